/** Unit tests for the pure view model and renderer. */

import { expect, test } from "vitest";

import type { SegmentView } from "../src/api.js";
import {
  canComplete,
  clampActive,
  emptyState,
  entiretyAfterComplete,
  keyAction,
  rowsFrom,
  withView,
  type EditorState,
} from "../src/model.js";
import { escapeHtml, render } from "../src/view.js";

function view(index: number, patch: Partial<SegmentView> = {}): SegmentView {
  return {
    index,
    source_text: `Sentence ${index}.`,
    state: "untouched",
    text: "",
    record_id: null,
    suggestions: [],
    ...patch,
  };
}

function openState(views: SegmentView[]): EditorState {
  return {
    ...emptyState(),
    sessionId: "s1",
    source: "en",
    target: "es",
    rows: rowsFrom(views),
    active: views.length > 0 ? 0 : -1,
  };
}

test("row numbers are 1-based and match server indices", () => {
  const rows = rowsFrom([view(0), view(1), view(2)]);
  expect(rows.map((row) => [row.number, row.view.index])).toEqual([
    [1, 0],
    [2, 1],
    [3, 2],
  ]);
});

test("reconciling a server view replaces exactly its row", () => {
  const rows = rowsFrom([view(0), view(1)]);
  const updated = withView(rows, view(1, { state: "confirmed", text: "Hola." }));
  expect(updated[0]!.view.state).toBe("untouched");
  expect(updated[1]!.view).toMatchObject({ state: "confirmed", text: "Hola." });
  expect(updated[1]!.number).toBe(2);
});

test("entirety is complete only when every row is confirmed", () => {
  const confirmed = rowsFrom([view(0, { state: "confirmed", text: "a" })]);
  expect(entiretyAfterComplete(confirmed)).toBe("complete");
  const mixed = rowsFrom([
    view(0, { state: "confirmed", text: "a" }),
    view(1, { state: "draft", text: "b" }),
  ]);
  expect(entiretyAfterComplete(mixed)).toBe("translating");
  expect(entiretyAfterComplete([])).toBe("translating");
});

test("an empty document renders zero rows with complete disabled", () => {
  const state = openState([]);
  expect(canComplete(state)).toBe(false);
  const html = render(state);
  expect(html).not.toContain('<tr class="segment');
  expect(html).toContain('<button data-action="complete" disabled>');
});

test("a loaded document enables complete until the session finishes", () => {
  const state = openState([view(0)]);
  expect(canComplete(state)).toBe(true);
  expect(render(state)).toContain('<button data-action="complete">');
  expect(canComplete({ ...state, completed: true })).toBe(false);
});

test("source text is escaped on the way to the page", () => {
  const hostile = view(0, { source_text: '<script>alert("x")</script>' });
  const html = render(openState([hostile]));
  expect(html).not.toContain("<script>");
  expect(html).toContain("&lt;script&gt;alert(&quot;x&quot;)&lt;/script&gt;");
});

test("escapeHtml covers the four reserved characters", () => {
  expect(escapeHtml('<a href="?x&y">')).toBe("&lt;a href=&quot;?x&amp;y&quot;&gt;");
});

test("the suggestion panel follows the active row", () => {
  const views = [
    view(0, { suggestions: [{ record_id: 1, text: "Uno.", score: 1.0 }] }),
    view(1, { suggestions: [{ record_id: 2, text: "Dos.", score: 0.9 }] }),
  ];
  const onFirst = render({ ...openState(views), active: 0 });
  expect(onFirst).toContain("Uno.");
  expect(onFirst).not.toContain("Dos.");
  const onSecond = render({ ...openState(views), active: 1 });
  expect(onSecond).toContain("Dos.");
  expect(onSecond).toContain('<span class="score">0.90</span>');
});

test("the locked banner announces a completed session", () => {
  const html = render({ ...openState([view(0)]), banner: { kind: "locked" } });
  expect(html).toContain("session is completed");
});

test("keyboard map: control chords confirm and navigate", () => {
  expect(keyAction("Enter", true)).toBe("confirm-next");
  expect(keyAction("ArrowDown", true)).toBe("next");
  expect(keyAction("ArrowUp", true)).toBe("prev");
  expect(keyAction("Enter", false)).toBeNull();
  expect(keyAction("a", true)).toBeNull();
});

test("active row selection stays inside the listing", () => {
  expect(clampActive(3, -5)).toBe(0);
  expect(clampActive(3, 99)).toBe(2);
  expect(clampActive(0, 0)).toBe(-1);
});
