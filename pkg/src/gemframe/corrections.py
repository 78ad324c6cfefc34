"""Expert corrections applied to scope trees.

Three correction kinds cover the review vocabulary: reattaching a
recommendation leaf to another condition (or the root), adjusting a
frame end to a different sentence boundary, and relabeling a segment's
kind.  Corrections are validated against the tree invariants that
survive expert edits: attachment totality (every leaf appears exactly
once) and frame nesting (no partial overlaps).  Frame containment of
children is deliberately not enforced, since overriding a wrongly
computed scope is the point of an expert correction.

Each applied correction produces a new immutable tree with the version
incremented by one; replaying a correction log over the original tree
is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

from .docmodel import BlockKind, Document, NoEnclosingUnitError, Span, enclosing_unit
from .scope import Frame, NodeKind, ScopeNode, ScopeTree, default_scope
from .segmenter import Position, SegmentKind, make_segment

ROOT_ID = "root"


class CorrectionError(ValueError):
    """A correction violates a tree invariant; the message names it."""


class VersionConflict(Exception):
    """The correction's base version is stale."""

    def __init__(self, current_version: int):
        super().__init__(f"stale base version; current version is {current_version}")
        self.current_version = current_version


@dataclass(frozen=True)
class ReattachRecommendation:
    recommendation_id: str
    new_parent_id: str  # condition id or ROOT_ID
    base_version: int


@dataclass(frozen=True)
class AdjustFrameEnd:
    condition_id: str
    new_end: int
    base_version: int


@dataclass(frozen=True)
class RelabelSegment:
    segment_id: str
    new_kind: SegmentKind
    base_version: int


Correction = Union[ReattachRecommendation, AdjustFrameEnd, RelabelSegment]

_CHILD_ORDER = {NodeKind.CONDITION: 0, NodeKind.RECOMMENDATION: 1, NodeKind.JUSTIFICATION: 2}


def _sorted_children(children: tuple[ScopeNode, ...]) -> tuple[ScopeNode, ...]:
    return tuple(sorted(children, key=lambda n: (n.span.start, _CHILD_ORDER[n.kind], n.span.end)))


def _frames(tree: ScopeTree) -> dict[str, Frame]:
    return {node.segment.id: node.frame for node in tree.conditions()}


def _check_nesting(frames: dict[str, Frame]) -> None:
    items = list(frames.items())
    for i, (id_a, a) in enumerate(items):
        for id_b, b in items[i + 1:]:
            if a.scope.overlaps(b.scope) and not (a.scope.contains(b.scope)
                                                  or b.scope.contains(a.scope)):
                raise CorrectionError(
                    f"frames must nest: frame of {id_a} partially overlaps frame of {id_b}")


def _sentence_boundaries(doc: Document) -> set[int]:
    return {s.end for block in doc.blocks for s in block.sentences}


def reattach_recommendation(tree: ScopeTree, rec_id: str, new_parent_id: str) -> ScopeTree:
    """Move a recommendation leaf under another condition or the root."""
    leaf = tree.find(rec_id)
    if leaf is None or leaf.kind is not NodeKind.RECOMMENDATION:
        raise CorrectionError(f"unknown recommendation {rec_id!r}")
    if new_parent_id != ROOT_ID:
        parent = tree.find(new_parent_id)
        if parent is None or parent.kind is not NodeKind.CONDITION:
            raise CorrectionError(
                f"new parent {new_parent_id!r} must be a condition or {ROOT_ID!r} "
                "(recommendation and justification nodes are leaves)")

    def rebuild(node: ScopeNode) -> ScopeNode:
        kept = tuple(rebuild(c) for c in node.children
                     if not (c.kind is NodeKind.RECOMMENDATION and c.segment.id == rec_id))
        is_target = (node.kind is NodeKind.ROOT and new_parent_id == ROOT_ID) or (
            node.kind is NodeKind.CONDITION and node.segment.id == new_parent_id)
        if is_target:
            kept = _sorted_children(kept + (leaf,))
        return replace(node, children=kept)

    return replace(tree, root=rebuild(tree.root), version=tree.version + 1)


def adjust_frame_end(tree: ScopeTree, doc: Document, condition_id: str,
                     new_end: int) -> ScopeTree:
    """Move a condition frame's end to another sentence boundary."""
    node = tree.find(condition_id)
    if node is None or node.kind is not NodeKind.CONDITION:
        raise CorrectionError(f"unknown condition {condition_id!r}")
    if new_end not in _sentence_boundaries(doc):
        raise CorrectionError(
            f"frame end {new_end} must land on a sentence boundary")
    if new_end < node.frame.scope.start:
        raise CorrectionError(
            f"frame end {new_end} precedes the frame start {node.frame.scope.start}")

    new_frame = replace(node.frame, scope=Span(node.frame.scope.start, new_end))
    frames = _frames(tree)
    frames[condition_id] = new_frame
    _check_nesting(frames)

    def rebuild(n: ScopeNode) -> ScopeNode:
        children = tuple(rebuild(c) for c in n.children)
        if n.kind is NodeKind.CONDITION and n.segment.id == condition_id:
            return replace(n, frame=new_frame, children=children)
        return replace(n, children=children)

    return replace(tree, root=rebuild(tree.root), version=tree.version + 1)


def _derive_position(doc: Document, span: Span) -> Position:
    try:
        block_index, sentence_index = enclosing_unit(doc, span.start)
    except NoEnclosingUnitError as exc:
        raise CorrectionError(f"segment at byte {span.start} has no enclosing sentence") from exc
    block = doc.blocks[block_index]
    if block.kind is BlockKind.TITLE:
        return Position.TITLE
    if block.kind is BlockKind.ENUM_INTRO:
        return Position.ENUM_INTRO
    sentence = block.sentences[sentence_index]
    text = doc.text(span).rstrip()
    if span.start == sentence.start and text[-1:] in (",", ":"):
        return Position.DETACHED
    return Position.INTEGRATED


def relabel_segment(tree: ScopeTree, doc: Document, segment_id: str,
                    new_kind: SegmentKind) -> ScopeTree:
    """Flip a segment between condition and recommendation, in place.

    A demoted condition's children splice into its parent; a promoted
    recommendation receives its default frame (clipped into any
    enclosing frame) and starts with no children.
    """
    node = tree.find(segment_id)
    if node is None or node.segment is None:
        raise CorrectionError(f"unknown segment {segment_id!r}")
    if node.segment.kind is new_kind:
        raise CorrectionError(f"segment {segment_id!r} already has kind {new_kind.value}")

    if new_kind is SegmentKind.RECOMMENDATION:
        new_segment = make_segment(new_kind, node.segment.span, Position.NOT_APPLICABLE)
        new_node = ScopeNode(kind=NodeKind.RECOMMENDATION, segment=new_segment,
                             span=node.segment.span)

        def rebuild(n: ScopeNode) -> ScopeNode:
            out: list[ScopeNode] = []
            for child in n.children:
                if child.kind is NodeKind.CONDITION and child.segment.id == segment_id:
                    out.append(new_node)
                    out.extend(rebuild(g) for g in child.children)
                else:
                    out.append(rebuild(child))
            return replace(n, children=_sorted_children(tuple(out)))

        return replace(tree, root=rebuild(tree.root), version=tree.version + 1)

    position = _derive_position(doc, node.segment.span)
    new_segment = make_segment(SegmentKind.CONDITION, node.segment.span, position)
    frame = default_scope(new_segment, doc)
    frames = _frames(tree)
    enclosing = [f.scope.end for f in frames.values() if f.scope.contains(new_segment.span)]
    if enclosing and frame.scope.end > min(enclosing):
        frame = replace(frame, scope=Span(frame.scope.start, min(enclosing)))
    frames[new_segment.id] = frame
    _check_nesting(frames)
    new_node = ScopeNode(kind=NodeKind.CONDITION, segment=new_segment,
                         span=new_segment.span, frame=frame)

    def rebuild(n: ScopeNode) -> ScopeNode:
        children = tuple(
            new_node if (c.kind is NodeKind.RECOMMENDATION and c.segment.id == segment_id)
            else rebuild(c)
            for c in n.children)
        return replace(n, children=_sorted_children(children))

    return replace(tree, root=rebuild(tree.root), version=tree.version + 1)


def apply_correction(tree: ScopeTree, doc: Document,
                     correction: Correction) -> ScopeTree:
    """Version-check and apply one correction, returning the new tree."""
    if correction.base_version != tree.version:
        raise VersionConflict(tree.version)
    if isinstance(correction, ReattachRecommendation):
        return reattach_recommendation(tree, correction.recommendation_id,
                                       correction.new_parent_id)
    if isinstance(correction, AdjustFrameEnd):
        return adjust_frame_end(tree, doc, correction.condition_id, correction.new_end)
    if isinstance(correction, RelabelSegment):
        return relabel_segment(tree, doc, correction.segment_id, correction.new_kind)
    raise CorrectionError(f"unknown correction kind {type(correction).__name__}")
