/** Render the editor state to HTML.
 *
 * Pure string rendering keeps the view inspectable in tests; the
 * browser shell assigns the result to a container and delegates
 * events by the data-action attributes.
 */

import { canComplete, type Banner, type EditorState, type Row } from "./model.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function renderBanner(banner: Banner): string {
  switch (banner.kind) {
    case "idle":
      return "";
    case "locked":
      return '<div class="banner locked">session is completed</div>';
    case "rejected": {
      const items = banner.diagnostics
        .map((line) => `<li>${escapeHtml(line)}</li>`)
        .join("");
      const listing = items ? `<ul class="diagnostics">${items}</ul>` : "";
      return `<div class="banner rejected">${escapeHtml(banner.message)}${listing}</div>`;
    }
    case "entirety":
      return `<div class="banner entirety entirety-${banner.entirety}">entirety: ${banner.entirety}</div>`;
  }
}

function renderRow(row: Row, active: boolean, completed: boolean): string {
  const view = row.view;
  const classes = `segment state-${view.state}${active ? " active" : ""}`;
  const lock = completed ? " disabled" : "";
  return (
    `<tr class="${classes}" data-row="${row.number}" data-index="${view.index}">` +
    `<td class="number">${row.number}</td>` +
    `<td class="source">${escapeHtml(view.source_text)}</td>` +
    `<td class="target"><textarea data-action="edit" data-index="${view.index}"${lock}>` +
    `${escapeHtml(view.text)}</textarea></td>` +
    `<td class="state">${view.state}</td>` +
    `<td class="tools">` +
    `<button data-action="confirm" data-index="${view.index}"${lock}>confirm</button>` +
    `<button data-action="split" data-index="${view.index}"${lock}>split</button>` +
    `<button data-action="merge" data-index="${view.index}"${lock}>merge</button>` +
    `</td></tr>`
  );
}

function renderRows(state: EditorState): string {
  if (state.sessionId === null) return "";
  const body = state.rows
    .map((row) => renderRow(row, row.view.index === state.active, state.completed))
    .join("");
  return (
    '<table class="segments"><thead><tr>' +
    "<th>#</th><th>source</th><th>target</th><th>state</th><th></th>" +
    `</tr></thead><tbody>${body}</tbody></table>`
  );
}

function renderSuggestions(state: EditorState): string {
  const row = state.rows[state.active];
  if (!row) return '<aside class="suggestions"></aside>';
  const items = row.view.suggestions
    .map(
      (s) =>
        `<li><button data-action="accept" data-index="${row.view.index}" ` +
        `data-record="${s.record_id}">${escapeHtml(s.text)}` +
        `<span class="score">${s.score.toFixed(2)}</span></button></li>`,
    )
    .join("");
  const body = items
    ? `<ul>${items}</ul>`
    : '<p class="empty">no suggestions</p>';
  return `<aside class="suggestions"><h2>suggestions</h2>${body}</aside>`;
}

function renderPeers(state: EditorState): string {
  if (state.peerLang === null) return '<aside class="peers"></aside>';
  const blocks = state.peers
    .map((peer) => {
      const lines = peer.segments
        .map(
          (seg) =>
            `<li data-peer-index="${seg.index}">${escapeHtml(seg.text)}</li>`,
        )
        .join("");
      return `<section class="peer" data-session="${escapeHtml(peer.session)}"><ul>${lines}</ul></section>`;
    })
    .join("");
  return (
    `<aside class="peers"><h2>peer ${escapeHtml(state.peerLang)}</h2>` +
    `${blocks}</aside>`
  );
}

export function render(state: EditorState): string {
  const complete = `<button data-action="complete"${canComplete(state) ? "" : " disabled"}>complete</button>`;
  return (
    '<div class="editor">' +
    renderBanner(state.banner) +
    renderRows(state) +
    renderSuggestions(state) +
    renderPeers(state) +
    `<footer>${complete}</footer>` +
    "</div>"
  );
}
