/** Minimal reader for the service's canonical GEM XML (2-space indent,
 * one element per line). Enough structure for diffing two exports. */

export interface XmlNode {
  tag: "gem" | "conditional" | "recommendation" | "justification";
  attrs: Record<string, string>;
  text: string | null;
  children: XmlNode[];
}

const OPEN = /^<(\w[\w-]*)((?:\s+[\w-]+="[^"]*")*)\s*(\/)?>(?:(.*)<\/\1>)?$/;

function parseAttrs(raw: string): Record<string, string> {
  const attrs: Record<string, string> = {};
  for (const m of raw.matchAll(/([\w-]+)="([^"]*)"/g)) {
    attrs[m[1]] = m[2];
  }
  return attrs;
}

function unescape(text: string): string {
  return text.replace(/&lt;/g, "<").replace(/&gt;/g, ">").replace(/&amp;/g, "&");
}

export function parseCanonicalXml(xml: string): XmlNode {
  const lines = xml.split("\n").filter(l => l.trim() !== "" && !l.startsWith("<?xml"));
  const stack: XmlNode[] = [];
  let root: XmlNode | null = null;
  for (const line of lines) {
    const trimmed = line.trim();
    if (trimmed.startsWith("</")) {
      stack.pop();
      continue;
    }
    const m = OPEN.exec(trimmed);
    if (!m) {
      throw new Error(`unparseable line: ${trimmed}`);
    }
    const node: XmlNode = {
      tag: m[1] as XmlNode["tag"],
      attrs: parseAttrs(m[2] ?? ""),
      text: m[4] !== undefined ? unescape(m[4]) : null,
      children: [],
    };
    if (stack.length === 0) {
      root = node;
    } else {
      stack[stack.length - 1].children.push(node);
    }
    const selfClosing = m[3] === "/" || m[4] !== undefined;
    if (!selfClosing) {
      stack.push(node);
    }
  }
  if (!root) {
    throw new Error("empty document");
  }
  return root;
}

/** recommendation span -> parent conditional span key (or "root"). */
export function leafParents(root: XmlNode): Map<string, string> {
  const parents = new Map<string, string>();
  const walk = (node: XmlNode, parent: string): void => {
    for (const child of node.children) {
      if (child.tag === "recommendation") {
        parents.set(`${child.attrs.start}-${child.attrs.end}`, parent);
      } else if (child.tag === "conditional") {
        walk(child, `${child.attrs.start}-${child.attrs.end}`);
      }
    }
  };
  walk(root, "root");
  return parents;
}
