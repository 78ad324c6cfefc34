/** Document pane: source text with segment highlights. */

import { Chunk, colorClass, computeChunks, Highlight } from "./highlights.js";
import type { DocDto } from "./types.js";
import { buildByteToCharMap } from "./utf8.js";

export interface DocView {
  element: HTMLElement;
  /** Scroll the span of a node into view and flash it. */
  reveal(nodeId: string): void;
}

export function renderDocument(doc: DocDto, highlights: Highlight[],
                               onSelect: (nodeId: string) => void): DocView {
  const byteMap = buildByteToCharMap(doc.text);
  const chunks: Chunk[] = computeChunks(doc.text, byteMap, highlights);

  const element = document.createElement("pre");
  element.className = "docview";
  const bySegment = new Map<string, HTMLElement>();

  for (const chunk of chunks) {
    if (chunk.highlight === null) {
      element.append(document.createTextNode(chunk.text));
      continue;
    }
    const span = document.createElement("span");
    span.textContent = chunk.text;
    span.className = colorClass(chunk.highlight);
    const id = chunk.highlight.id;
    if (id !== null) {
      span.dataset.segmentId = id;
      span.addEventListener("click", () => onSelect(id));
      if (!bySegment.has(id)) {
        bySegment.set(id, span);
      }
    }
    element.append(span);
  }

  return {
    element,
    reveal(nodeId: string): void {
      const target = bySegment.get(nodeId);
      if (!target) return;
      target.scrollIntoView({ block: "center" });
      target.classList.add("flash");
      setTimeout(() => target.classList.remove("flash"), 900);
    },
  };
}
