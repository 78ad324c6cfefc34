"""Canonical GEM-style XML serialization of scope trees.

Grammar (offsets are byte offsets into the companion UTF-8 source):

    <gem doc-id="..." version="N">
      <conditional start end position rules scope-end> ... </conditional>
      <recommendation start end>exact source text</recommendation>
      <justification start end/>
    </gem>

``start``/``end`` are always the segment's own span; a conditional's
governed extent runs from its ``end`` to ``scope-end``, and ``rules``
carries the comma-joined rule trace ids.  Canonical form: XML
declaration, two-space indentation, attributes in the order above,
UTF-8, LF line endings, trailing newline.  ``parse(emit(t)) == t`` for
every valid tree.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .docmodel import Document, Span
from .scope import (
    RULE_IDS,
    Frame,
    NodeKind,
    ScopeNode,
    ScopeTree,
    TraceEntry,
)
from .segmenter import Position, SegmentKind, make_segment


class GemXmlError(ValueError):
    """Malformed or invalid GEM XML."""


_POSITION_VALUES = {
    Position.TITLE: "title",
    Position.ENUM_INTRO: "enum-intro",
    Position.DETACHED: "detached",
    Position.INTEGRATED: "integrated",
}
_POSITION_BY_VALUE = {v: k for k, v in _POSITION_VALUES.items()}


def _escape_text(value: str) -> str:
    return value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _escape_attr(value: str) -> str:
    return _escape_text(value).replace('"', "&quot;")


def _emit_node(node: ScopeNode, doc: Document, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if node.kind is NodeKind.CONDITION:
        seg, frame = node.segment, node.frame
        attrs = (f'start="{seg.span.start}" end="{seg.span.end}"'
                 f' position="{_POSITION_VALUES[seg.position]}"'
                 f' rules="{",".join(frame.rule_ids())}"'
                 f' scope-end="{frame.scope.end}"')
        if node.children:
            out.append(f"{pad}<conditional {attrs}>")
            for child in node.children:
                _emit_node(child, doc, indent + 1, out)
            out.append(f"{pad}</conditional>")
        else:
            out.append(f"{pad}<conditional {attrs}/>")
    elif node.kind is NodeKind.RECOMMENDATION:
        seg = node.segment
        text = _escape_text(doc.text(seg.span))
        out.append(f'{pad}<recommendation start="{seg.span.start}"'
                   f' end="{seg.span.end}">{text}</recommendation>')
    elif node.kind is NodeKind.JUSTIFICATION:
        out.append(f'{pad}<justification start="{node.span.start}" end="{node.span.end}"/>')
    else:
        raise GemXmlError(f"cannot serialize node kind {node.kind}")


def emit(tree: ScopeTree, doc: Document) -> str:
    """Serialize a tree to canonical GEM XML (byte-stable for equal trees)."""
    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    root_attrs = f'doc-id="{_escape_attr(tree.doc_id)}" version="{tree.version}"'
    if tree.root.children:
        out.append(f"<gem {root_attrs}>")
        for child in tree.root.children:
            _emit_node(child, doc, 1, out)
        out.append("</gem>")
    else:
        out.append(f"<gem {root_attrs}/>")
    return "\n".join(out) + "\n"


def _int_attr(element: ET.Element, name: str) -> int:
    raw = element.get(name)
    if raw is None:
        raise GemXmlError(f"element <{element.tag}> is missing attribute {name!r}")
    try:
        return int(raw)
    except ValueError as exc:
        raise GemXmlError(f"element <{element.tag}>: attribute {name!r} is not an integer") from exc


def _span_attrs(element: ET.Element) -> Span:
    start = _int_attr(element, "start")
    end = _int_attr(element, "end")
    if not start < end:
        raise GemXmlError(f"element <{element.tag}>: offset inversion ({start} >= {end})")
    return Span(start, end)


def _parse_node(element: ET.Element) -> ScopeNode:
    if element.tag == "conditional":
        span = _span_attrs(element)
        position_value = element.get("position")
        if position_value not in _POSITION_BY_VALUE:
            raise GemXmlError(f"element <conditional>: unknown position {position_value!r}")
        rules = element.get("rules", "")
        trace = []
        for rule in rules.split(",") if rules else []:
            if rule not in RULE_IDS:
                raise GemXmlError(f"element <conditional>: unknown rule id {rule!r}")
            trace.append(TraceEntry(rule))
        if not trace:
            raise GemXmlError("element <conditional>: empty rule trace")
        scope_end = _int_attr(element, "scope-end")
        if scope_end < span.end:
            raise GemXmlError(f"element <conditional>: scope-end {scope_end} precedes "
                              f"the condition end {span.end}")
        segment = make_segment(SegmentKind.CONDITION, span, _POSITION_BY_VALUE[position_value])
        frame = Frame(condition=segment.id, scope=Span(span.end, scope_end), trace=tuple(trace))
        children = tuple(_parse_node(child) for child in element)
        return ScopeNode(kind=NodeKind.CONDITION, segment=segment, span=span,
                         frame=frame, children=children)
    if element.tag == "recommendation":
        span = _span_attrs(element)
        if len(element):
            raise GemXmlError("element <recommendation> cannot have children")
        segment = make_segment(SegmentKind.RECOMMENDATION, span, Position.NOT_APPLICABLE)
        return ScopeNode(kind=NodeKind.RECOMMENDATION, segment=segment, span=span)
    if element.tag == "justification":
        span = _span_attrs(element)
        if len(element):
            raise GemXmlError("element <justification> cannot have children")
        return ScopeNode(kind=NodeKind.JUSTIFICATION, span=span)
    raise GemXmlError(f"unknown element {element.tag!r}")


def parse(xml_text: str) -> ScopeTree:
    """Parse GEM XML back into a scope tree.

    Unknown elements, missing attributes and inverted offsets are
    rejected with the offending element named; malformed XML errors
    carry the line/column position.
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise GemXmlError(f"malformed XML at line {exc.position[0]}, "
                          f"column {exc.position[1]}: {exc.msg}") from exc
    if root.tag != "gem":
        raise GemXmlError(f"unknown element {root.tag!r} (expected <gem>)")
    doc_id = root.get("doc-id")
    if doc_id is None:
        raise GemXmlError("element <gem> is missing attribute 'doc-id'")
    version = _int_attr(root, "version")
    children = tuple(_parse_node(child) for child in root)
    return ScopeTree(doc_id=doc_id,
                     root=ScopeNode(kind=NodeKind.ROOT, children=children),
                     version=version)
