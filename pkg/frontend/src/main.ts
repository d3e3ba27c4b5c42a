/** Browser shell: wires the editor to a page.
 *
 * The server location is the single configuration value, taken from
 * the `?server=` query parameter or a `partext-server` meta tag, with
 * the page's own origin as fallback.
 */

import { ApiClient } from "./api.js";
import { Editor } from "./editor.js";
import { keyAction } from "./model.js";
import { render } from "./view.js";

const PEER_POLL_MS = 5000;

function serverBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("server");
  if (fromQuery) return fromQuery;
  const meta = document.querySelector('meta[name="partext-server"]');
  const fromMeta = meta?.getAttribute("content");
  return fromMeta || window.location.origin;
}

function textareaFor(container: HTMLElement, index: number): HTMLTextAreaElement | null {
  return container.querySelector(`textarea[data-action=edit][data-index="${index}"]`);
}

function download(archive: Uint8Array, name: string): void {
  const blob = new Blob([archive as unknown as BlobPart], { type: "application/zip" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = name;
  anchor.click();
  URL.revokeObjectURL(url);
}

export function boot(root: HTMLElement): Editor {
  const editor = new Editor(new ApiClient(serverBase()));
  const container = document.createElement("div");
  root.appendChild(container);
  editor.onChange((state) => {
    container.innerHTML = render(state);
  });

  let stopPolling: (() => void) | null = null;

  const uploadForm = root.querySelector("form.upload");
  uploadForm?.addEventListener("submit", (event) => {
    event.preventDefault();
    const form = event.currentTarget as HTMLFormElement;
    const fileInput = form.querySelector('input[type="file"]') as HTMLInputElement;
    const source = (form.querySelector('input[name="source"]') as HTMLInputElement).value;
    const target = (form.querySelector('input[name="target"]') as HTMLInputElement).value;
    const peer = (form.querySelector('input[name="peer"]') as HTMLInputElement).value;
    const file = fileInput.files?.[0];
    if (!file) return;
    void file.arrayBuffer().then(async (buffer) => {
      const opened = await editor.open(new Uint8Array(buffer), source, target);
      stopPolling?.();
      if (opened && peer) {
        stopPolling = editor.startPeerPolling(peer, PEER_POLL_MS);
      }
    });
  });

  container.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest("[data-action]");
    if (!(target instanceof HTMLElement)) return;
    const action = target.dataset["action"];
    const index = Number(target.dataset["index"] ?? "-1");
    if (action === "accept") {
      void editor.acceptSuggestion(index, Number(target.dataset["record"]));
    } else if (action === "confirm") {
      const text = textareaFor(container, index)?.value ?? "";
      void editor.confirm(index, text);
    } else if (action === "split") {
      const textarea = textareaFor(container, index);
      const row = editor.state.rows[index];
      const offset = textarea?.selectionStart ?? 0;
      if (row && offset > 0 && offset < row.view.source_text.length) {
        void editor.adjust(index, { op: "split", offset });
      }
    } else if (action === "merge") {
      void editor.adjust(index, { op: "merge" });
    } else if (action === "complete") {
      void editor.complete().then((archive) => {
        if (archive) download(archive, `${editor.state.dossier}.med`);
      });
    }
  });

  container.addEventListener(
    "focus",
    (event) => {
      const textarea = event.target as HTMLElement;
      if (textarea.matches("textarea[data-action=edit]")) {
        editor.select(Number(textarea.dataset["index"]));
      }
    },
    true,
  );

  container.addEventListener(
    "blur",
    (event) => {
      const textarea = event.target as HTMLTextAreaElement;
      if (!textarea.matches?.("textarea[data-action=edit]")) return;
      const index = Number(textarea.dataset["index"]);
      const row = editor.state.rows[index];
      if (row && textarea.value !== row.view.text) {
        void editor.saveDraft(index, textarea.value);
      }
    },
    true,
  );

  container.addEventListener("keydown", (event) => {
    const action = keyAction(event.key, event.ctrlKey || event.metaKey);
    if (!action) return;
    event.preventDefault();
    const textarea = event.target as HTMLTextAreaElement;
    const typed = textarea.matches?.("textarea[data-action=edit]")
      ? textarea.value
      : undefined;
    void editor.handleKey(action, typed);
  });

  return editor;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot(document.getElementById("app") as HTMLElement);
}
