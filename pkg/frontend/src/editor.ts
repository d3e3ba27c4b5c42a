/** The session controller: editor actions mapped onto API calls.
 *
 * Saves are optimistic: the row changes immediately and is then
 * reconciled with whatever the server answers, so rendered text never
 * drifts from server-held text for longer than one round trip. Errors
 * roll the row back and surface in the banner.
 */

import {
  ApiClient,
  ApiError,
  type AdjustOp,
  type SegmentSave,
  type Suggestion,
} from "./api.js";
import {
  clampActive,
  emptyState,
  entiretyAfterComplete,
  rowsFrom,
  withRowState,
  withView,
  type EditorState,
  type KeyAction,
} from "./model.js";

export interface Scheduler {
  set(callback: () => void, intervalMs: number): unknown;
  clear(handle: unknown): void;
}

const intervalScheduler: Scheduler = {
  set: (callback, intervalMs) => setInterval(callback, intervalMs),
  clear: (handle) => clearInterval(handle as Parameters<typeof clearInterval>[0]),
};

export class Editor {
  private readonly api: ApiClient;
  private readonly listeners: Array<(state: EditorState) => void> = [];
  state: EditorState;

  constructor(api: ApiClient) {
    this.api = api;
    this.state = emptyState();
  }

  onChange(listener: (state: EditorState) => void): void {
    this.listeners.push(listener);
  }

  private update(state: EditorState): void {
    this.state = state;
    for (const listener of this.listeners) listener(state);
  }

  private requireSession(): string {
    if (this.state.sessionId === null) throw new Error("no open session");
    return this.state.sessionId;
  }

  /** Upload a dossier and load its segments. False means it was rejected. */
  async open(med: Uint8Array, source: string, target: string): Promise<boolean> {
    try {
      const handle = await this.api.openSession(med, source, target);
      const snapshot = await this.api.segments(handle.id);
      const rows = rowsFrom(snapshot.segments);
      this.update({
        ...emptyState(),
        sessionId: snapshot.id,
        dossier: snapshot.dossier,
        source: snapshot.source,
        target: snapshot.target,
        rows,
        active: rows.length > 0 ? 0 : -1,
        completed: snapshot.completed,
      });
      return true;
    } catch (error) {
      if (error instanceof ApiError) {
        this.update({
          ...this.state,
          banner: {
            kind: "rejected",
            message: error.message,
            diagnostics: error.diagnostics,
          },
        });
        return false;
      }
      throw error;
    }
  }

  select(index: number): void {
    this.update({
      ...this.state,
      active: clampActive(this.state.rows.length, index),
    });
  }

  private async save(index: number, save: SegmentSave): Promise<boolean> {
    const sessionId = this.requireSession();
    const before = this.state.rows;
    this.update({
      ...this.state,
      rows: withRowState(before, index, {
        state: save.state,
        text: save.text,
        record_id: save.record_id ?? null,
      }),
    });
    try {
      const view = await this.api.saveSegment(sessionId, index, save);
      this.update({ ...this.state, rows: withView(this.state.rows, view) });
      return true;
    } catch (error) {
      if (error instanceof ApiError) {
        this.update({ ...this.state, rows: before, banner: this.bannerFor(error) });
        return false;
      }
      throw error;
    }
  }

  /** Keep what the translator typed without committing to it. */
  saveDraft(index: number, text: string): Promise<boolean> {
    return this.save(index, { state: "draft", text });
  }

  /** Confirm translator-typed text; any earlier record link is dropped. */
  confirm(index: number, text: string): Promise<boolean> {
    return this.save(index, { state: "confirmed", text });
  }

  /** Confirm a suggestion, reporting the use of its record. */
  acceptSuggestion(index: number, recordId: number): Promise<boolean> {
    const row = this.state.rows.find((r) => r.view.index === index);
    const suggestion: Suggestion | undefined = row?.view.suggestions.find(
      (s) => s.record_id === recordId,
    );
    if (!suggestion) throw new Error(`row ${index} has no suggestion r${recordId}`);
    return this.save(index, {
      state: "confirmed",
      text: suggestion.text,
      record_id: suggestion.record_id,
    });
  }

  /** Split or merge the source segmentation; rows renumber from the answer. */
  async adjust(index: number, op: AdjustOp): Promise<boolean> {
    const sessionId = this.requireSession();
    try {
      const result = await this.api.adjustSegment(sessionId, index, op);
      const rows = rowsFrom(result.segments);
      this.update({
        ...this.state,
        rows,
        active: clampActive(rows.length, this.state.active),
        completed: result.completed,
      });
      return true;
    } catch (error) {
      if (error instanceof ApiError) {
        this.update({ ...this.state, banner: this.bannerFor(error) });
        return false;
      }
      throw error;
    }
  }

  async refreshPeers(lang: string): Promise<void> {
    const sessionId = this.requireSession();
    const report = await this.api.peerWork(sessionId, lang);
    this.update({ ...this.state, peerLang: lang, peers: report.peers });
  }

  /** Poll a peer language at a fixed interval; returns a stop function. */
  startPeerPolling(
    lang: string,
    intervalMs: number,
    scheduler: Scheduler = intervalScheduler,
  ): () => void {
    const tick = () => {
      void this.refreshPeers(lang).catch(() => {
        /* transient poll failures keep the last good panel */
      });
    };
    tick();
    const handle = scheduler.set(tick, intervalMs);
    return () => scheduler.clear(handle);
  }

  /** Weave and download the dossier; the banner shows the new entirety. */
  async complete(): Promise<Uint8Array | null> {
    const sessionId = this.requireSession();
    try {
      const archive = await this.api.complete(sessionId);
      this.update({
        ...this.state,
        completed: true,
        banner: { kind: "entirety", entirety: entiretyAfterComplete(this.state.rows) },
      });
      return archive;
    } catch (error) {
      if (error instanceof ApiError) {
        this.update({ ...this.state, banner: this.bannerFor(error) });
        return null;
      }
      throw error;
    }
  }

  /** Apply a keyboard action to the active row. */
  async handleKey(action: KeyAction, typedText?: string): Promise<void> {
    const { active, rows } = this.state;
    if (action === "next" || action === "prev") {
      this.select(active + (action === "next" ? 1 : -1));
      return;
    }
    const row = rows[active];
    if (!row) return;
    const text = typedText ?? row.view.text;
    if (text.trim()) await this.confirm(row.view.index, text);
    this.select(active + 1);
  }

  private bannerFor(error: ApiError) {
    if (error.status === 409) return { kind: "locked" } as const;
    return {
      kind: "rejected",
      message: error.message,
      diagnostics: error.diagnostics,
    } as const;
  }
}
