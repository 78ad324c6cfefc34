/** Bootstrap: wire the API client, state and the two panes together. */

import { ApiClient, CorrectionRejectedError, VersionConflictError } from "./api.js";
import { collectHighlights } from "./highlights.js";
import { renderDocument } from "./docview.js";
import { renderTree } from "./treeview.js";
import {
  initialState,
  ViewState,
  withConflict,
  withDraft,
  withTree,
  withValidationError,
} from "./state.js";
import type { Correction } from "./types.js";

const api = new ApiClient();
let state: ViewState = initialState();

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function showBanner(message: string, kind: "conflict" | "error" | "info",
                    withReload = false): void {
  const banner = el<HTMLDivElement>("banner");
  banner.className = `banner banner-${kind}`;
  banner.textContent = message;
  if (withReload) {
    const button = document.createElement("button");
    button.textContent = "reload";
    button.addEventListener("click", () => { void refresh(); });
    banner.append(" ", button);
  }
  banner.hidden = false;
}

function clearBanner(): void {
  el<HTMLDivElement>("banner").hidden = true;
}

async function submitCorrection(correction: Correction): Promise<void> {
  const docId = state.docId;
  if (!docId) return;
  state = withDraft(state, correction);
  try {
    await api.postCorrection(docId, correction);
    await refresh();
    clearBanner();
  } catch (error) {
    if (error instanceof VersionConflictError) {
      state = withConflict(state, error.currentVersion);
      showBanner(`Version conflict: the tree is at version ${error.currentVersion}, `
        + `you edited version ${correction.base_version}. Your change was kept as a `
        + `draft; reload to retry.`, "conflict", true);
    } else if (error instanceof CorrectionRejectedError) {
      state = withValidationError(state, error.message);
      showBanner(`Rejected: ${error.message}`, "error");
    } else {
      showBanner(String(error), "error");
    }
  }
}

function selectNode(nodeId: string): void {
  state = { ...state, selectedNodeId: nodeId };
  document.querySelectorAll(".node.selected").forEach(n => n.classList.remove("selected"));
  document.querySelectorAll(`[data-node-id="${nodeId}"]`).forEach(
    n => n.classList.add("selected"));
  currentReveal?.(nodeId);
}

let currentReveal: ((nodeId: string) => void) | null = null;

async function refresh(): Promise<void> {
  if (!state.docId) return;
  const [doc, tree] = await Promise.all([
    api.getDoc(state.docId),
    api.getTree(state.docId),
  ]);
  state = withTree(state, tree);
  el<HTMLSpanElement>("version").textContent = `v${tree.version}`;

  const docPane = el<HTMLDivElement>("doc-pane");
  const treePane = el<HTMLDivElement>("tree-pane");
  docPane.replaceChildren();
  treePane.replaceChildren();

  const highlights = collectHighlights(tree);
  const view = renderDocument(doc, highlights, selectNode);
  currentReveal = view.reveal;
  docPane.append(view.element);
  treePane.append(renderTree(tree, doc, {
    onSelect: selectNode,
    onCorrection: correction => { void submitCorrection(correction); },
  }));
}

async function switchDoc(docId: string): Promise<void> {
  state = { ...initialState(), docId };
  await refresh();
  clearBanner();
}

async function init(): Promise<void> {
  const docs = await api.listDocs();
  const picker = el<HTMLSelectElement>("doc-picker");
  picker.replaceChildren();
  for (const doc of docs) {
    const option = document.createElement("option");
    option.value = doc.id;
    option.textContent = `${doc.id} (v${doc.version}${doc.accepted ? ", accepted" : ""})`;
    picker.append(option);
  }
  picker.addEventListener("change", () => { void switchDoc(picker.value); });

  el<HTMLButtonElement>("export").addEventListener("click", () => {
    void (async () => {
      if (!state.docId) return;
      const xml = await api.exportXml(state.docId);
      const blob = new Blob([xml], { type: "application/xml" });
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = `${state.docId}.xml`;
      link.click();
      URL.revokeObjectURL(link.href);
    })();
  });

  el<HTMLButtonElement>("accept").addEventListener("click", () => {
    void (async () => {
      if (!state.docId) return;
      try {
        await api.accept(state.docId, state.version);
        showBanner("Tree accepted.", "info");
      } catch (error) {
        if (error instanceof VersionConflictError) {
          showBanner(`Version conflict at accept: current is `
            + `${error.currentVersion}.`, "conflict", true);
        } else {
          showBanner(String(error), "error");
        }
      }
    })();
  });

  if (docs.length > 0) {
    picker.value = docs[0].id;
    await switchDoc(docs[0].id);
  }
}

void init();
