/** Tree pane: the nested frame tree with drag-and-drop reattachment,
 * frame-end adjustment and relabeling. The tree shown is always exactly
 * the service's response. */

import type { Correction, DocDto, NodeDto, TreeDto } from "./types.js";

export interface TreeCallbacks {
  onSelect(nodeId: string): void;
  onCorrection(correction: Correction): void;
}

function label(node: NodeDto): string {
  if (node.kind === "condition") {
    return `condition [${node.position}]`;
  }
  if (node.kind === "justification") {
    return "justification";
  }
  return "recommendation";
}

function sentenceEnds(doc: DocDto, after: number): number[] {
  const ends: number[] = [];
  for (const block of doc.blocks) {
    for (const s of block.sentences) {
      if (s.end >= after) ends.push(s.end);
    }
  }
  return ends;
}

export function renderTree(tree: TreeDto, doc: DocDto,
                           callbacks: TreeCallbacks): HTMLElement {
  const container = document.createElement("div");
  container.className = "treeview";

  const makeDropTarget = (element: HTMLElement, parentId: string): void => {
    element.addEventListener("dragover", event => {
      event.preventDefault();
      element.classList.add("drop-ok");
    });
    element.addEventListener("dragleave", () => element.classList.remove("drop-ok"));
    element.addEventListener("drop", event => {
      event.preventDefault();
      element.classList.remove("drop-ok");
      const recId = event.dataTransfer?.getData("text/segment-id");
      if (recId && recId !== parentId) {
        callbacks.onCorrection({
          kind: "reattach_recommendation",
          recommendation_id: recId,
          new_parent_id: parentId,
          base_version: tree.version,
        });
      }
    });
  };

  const renderNode = (node: NodeDto): HTMLElement => {
    const item = document.createElement("li");
    const head = document.createElement("div");
    head.className = `node node-${node.kind}`;
    if (node.id) {
      head.dataset.nodeId = node.id;
    }

    const title = document.createElement("span");
    title.className = "node-label";
    title.textContent = node.kind === "root" ? "document" : label(node);
    head.append(title);

    if (node.text) {
      const excerpt = document.createElement("span");
      excerpt.className = "node-text";
      excerpt.textContent = node.text.length > 70
        ? `${node.text.slice(0, 67)}…` : node.text;
      head.append(excerpt);
    }

    if (node.kind === "condition" && node.rules) {
      const trace = document.createElement("span");
      trace.className = "node-trace";
      trace.textContent = node.rules.map(r => r.rule).join(" → ");
      trace.title = node.rules.map(r => `${r.rule}: ${r.detail}`).join("\n");
      head.append(trace);
    }

    if (node.id) {
      const id = node.id;
      head.addEventListener("click", () => callbacks.onSelect(id));
    }

    if (node.kind === "recommendation" && node.id) {
      head.draggable = true;
      head.addEventListener("dragstart", event => {
        event.dataTransfer?.setData("text/segment-id", node.id!);
      });
      const relabel = document.createElement("button");
      relabel.textContent = "→ condition";
      relabel.className = "action";
      relabel.addEventListener("click", event => {
        event.stopPropagation();
        callbacks.onCorrection({
          kind: "relabel_segment",
          segment_id: node.id!,
          new_kind: "condition",
          base_version: tree.version,
        });
      });
      head.append(relabel);
    }

    if (node.kind === "condition" && node.id) {
      makeDropTarget(head, node.id);
      const frameEnd = document.createElement("select");
      frameEnd.className = "action frame-end";
      frameEnd.title = "move the frame end to a sentence boundary";
      for (const end of sentenceEnds(doc, node.frame_start ?? 0)) {
        const option = document.createElement("option");
        option.value = String(end);
        option.textContent = `… ${end}`;
        option.selected = end === node.frame_end;
        frameEnd.append(option);
      }
      frameEnd.addEventListener("click", event => event.stopPropagation());
      frameEnd.addEventListener("change", () => {
        callbacks.onCorrection({
          kind: "adjust_frame_end",
          condition_id: node.id!,
          new_end: Number(frameEnd.value),
          base_version: tree.version,
        });
      });
      head.append(frameEnd);
      const relabel = document.createElement("button");
      relabel.textContent = "→ recommendation";
      relabel.className = "action";
      relabel.addEventListener("click", event => {
        event.stopPropagation();
        callbacks.onCorrection({
          kind: "relabel_segment",
          segment_id: node.id!,
          new_kind: "recommendation",
          base_version: tree.version,
        });
      });
      head.append(relabel);
    }

    item.append(head);
    if (node.children.length > 0) {
      const list = document.createElement("ul");
      for (const child of node.children) {
        list.append(renderNode(child));
      }
      item.append(list);
    }
    return item;
  };

  const rootList = document.createElement("ul");
  const rootItem = renderNode(tree.root);
  makeDropTarget(rootItem.querySelector(".node")!, "root");
  rootList.append(rootItem);
  container.append(rootList);
  return container;
}
