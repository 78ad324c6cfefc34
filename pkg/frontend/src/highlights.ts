/** Highlight computation: flatten the tree into span descriptors and cut
 * the document text into render chunks. Pure functions, no DOM. */

import type { NodeDto, TreeDto } from "./types.js";
import { byteToChar } from "./utf8.js";

export interface Highlight {
  id: string | null; // justifications carry no segment id
  kind: "condition" | "recommendation" | "justification";
  position: string | null;
  start: number; // byte offsets
  end: number;
  depth: number;
}

/** Every segment/justification span of the tree, ordered by start.
 * Spans are exactly the service's; the UI never recomputes scope. */
export function collectHighlights(tree: TreeDto): Highlight[] {
  const out: Highlight[] = [];
  const walk = (node: NodeDto, depth: number): void => {
    if (node.kind !== "root" && node.start != null && node.end != null) {
      out.push({
        id: node.id ?? null,
        kind: node.kind,
        position: node.position ?? null,
        start: node.start,
        end: node.end,
        depth,
      });
    }
    for (const child of node.children) {
      walk(child, depth + 1);
    }
  };
  walk(tree.root, 0);
  out.sort((a, b) => a.start - b.start || a.end - b.end);
  return out;
}

export function colorClass(h: Highlight): string {
  if (h.kind === "condition") {
    return `hl hl-condition hl-${h.position ?? "detached"}`;
  }
  return `hl hl-${h.kind}`;
}

export interface Chunk {
  text: string;
  highlight: Highlight | null;
}

/** Cut the source text at highlight boundaries. Highlights never overlap
 * (same-kind segments are disjoint and cross-kind pieces are
 * clause-separated), but nested/overlapping spans degrade gracefully to
 * the innermost (deepest) highlight. */
export function computeChunks(text: string, byteMap: Map<number, number>,
                              highlights: Highlight[]): Chunk[] {
  const boundaries = new Set<number>([0, text.length]);
  for (const h of highlights) {
    boundaries.add(byteToChar(byteMap, h.start));
    boundaries.add(byteToChar(byteMap, h.end));
  }
  const charOf = new Map<Highlight, [number, number]>();
  for (const h of highlights) {
    charOf.set(h, [byteToChar(byteMap, h.start), byteToChar(byteMap, h.end)]);
  }
  const cuts = [...boundaries].sort((a, b) => a - b);
  const chunks: Chunk[] = [];
  for (let i = 0; i + 1 < cuts.length; i++) {
    const [from, to] = [cuts[i], cuts[i + 1]];
    if (from === to) continue;
    let best: Highlight | null = null;
    for (const h of highlights) {
      const [s, e] = charOf.get(h)!;
      if (s <= from && to <= e && (best === null || h.depth > best.depth)) {
        best = h;
      }
    }
    chunks.push({ text: text.slice(from, to), highlight: best });
  }
  return chunks;
}
