/** The editor's view model: plain data plus pure transition helpers.
 *
 * Keeping these as free functions over immutable state makes every UI
 * rule (numbering, entirety, completion gating, key bindings) testable
 * without a DOM.
 */

import type { PeerWork, SegmentView } from "./api.js";

/** One editable line: the server's segment view plus its display number. */
export interface Row {
  /** 1-based and stable: always the server index plus one. */
  number: number;
  view: SegmentView;
}

export type Banner =
  | { kind: "idle" }
  | { kind: "rejected"; message: string; diagnostics: string[] }
  | { kind: "locked" }
  | { kind: "entirety"; entirety: "complete" | "translating" };

export interface EditorState {
  sessionId: string | null;
  dossier: string;
  source: string;
  target: string;
  rows: Row[];
  /** Index of the selected row, -1 when nothing is selected. */
  active: number;
  completed: boolean;
  banner: Banner;
  peerLang: string | null;
  peers: PeerWork[];
}

export function emptyState(): EditorState {
  return {
    sessionId: null,
    dossier: "",
    source: "",
    target: "",
    rows: [],
    active: -1,
    completed: false,
    banner: { kind: "idle" },
    peerLang: null,
    peers: [],
  };
}

export function rowsFrom(views: SegmentView[]): Row[] {
  return views.map((view) => ({ number: view.index + 1, view }));
}

/** Replace the row the server just reconciled, leaving the rest alone. */
export function withView(rows: Row[], view: SegmentView): Row[] {
  return rows.map((row) => (row.view.index === view.index ? { ...row, view } : row));
}

export function withRowState(
  rows: Row[],
  index: number,
  patch: Partial<SegmentView>,
): Row[] {
  return rows.map((row) =>
    row.view.index === index ? { ...row, view: { ...row.view, ...patch } } : row,
  );
}

/** What completion will declare: complete only when every row is confirmed. */
export function entiretyAfterComplete(rows: Row[]): "complete" | "translating" {
  const allConfirmed =
    rows.length > 0 && rows.every((row) => row.view.state === "confirmed");
  return allConfirmed ? "complete" : "translating";
}

export function canComplete(state: EditorState): boolean {
  return state.sessionId !== null && !state.completed && state.rows.length > 0;
}

export function clampActive(rowCount: number, wanted: number): number {
  if (rowCount === 0) return -1;
  return Math.min(Math.max(wanted, 0), rowCount - 1);
}

export type KeyAction = "confirm-next" | "next" | "prev";

/** Keyboard-first navigation: Ctrl+Enter confirms and advances. */
export function keyAction(key: string, ctrl: boolean): KeyAction | null {
  if (!ctrl) return null;
  if (key === "Enter") return "confirm-next";
  if (key === "ArrowDown") return "next";
  if (key === "ArrowUp") return "prev";
  return null;
}
