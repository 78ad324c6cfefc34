"""Stage 2: resolve each condition's frame and build the nested tree.

Default frame rules, keyed by the condition's introducer position:

* R1 (title): the frame runs to just before the next title of the same
  or higher level (here: the end of the last block before it);
* R2 (enumeration intro): the frame covers all items of the group;
* R3 (detached): the frame runs to the end of the current block;
* R4 (integrated): the frame runs to the end of the current sentence.

Exceptions, applied in the fixed order E1, E2, E3 (E2 re-checked after
an E3 extension):

* E1: when the first detached condition under a title condition shares
  enough vocabulary with it, its frame stretches to the title's frame end;
* E2: a sentence opening with a contrast or justification marker closes
  a detached frame early; justification markers additionally yield a
  justification span running to the paragraph end;
* E3: a following paragraph opening with an anaphoric cue prolongs a
  detached frame, repeatedly.

Frames that still partially overlap an enclosing frame are clipped to
the enclosing frame's end, then every segment attaches to the innermost
frame containing it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum

from .docmodel import BlockKind, Document, Span, enclosing_unit
from .lexicon import MarkerClass, MarkerLexicon
from .segmenter import Position, Segment, SegmentKind, sentence_hits

R1_TITLE = "R1_title"
R2_ENUM = "R2_enum"
R3_DETACHED = "R3_detached_paragraph"
R4_INTEGRATED = "R4_integrated_sentence"
E1_TITLE_REDUNDANCY = "E1_title_redundancy"
E2_RUPTURE = "E2_rupture_close"
E3_ANAPHORA = "E3_anaphora_extend"
CLIP_NESTING = "CLIP_nesting"

RULE_IDS = (R1_TITLE, R2_ENUM, R3_DETACHED, R4_INTEGRATED,
            E1_TITLE_REDUNDANCY, E2_RUPTURE, E3_ANAPHORA, CLIP_NESTING)

TITLE_REDUNDANCY_THRESHOLD = 0.5


@dataclass(frozen=True)
class TraceEntry:
    """One applied rule.  The detail is diagnostic only and not part of
    equality (the XML representation carries rule ids alone)."""

    rule: str
    detail: str = field(default="", compare=False)


@dataclass(frozen=True)
class Frame:
    """A condition's governed extent, starting at the condition's end."""

    condition: str  # segment id
    scope: Span
    trace: tuple[TraceEntry, ...]

    def rule_ids(self) -> tuple[str, ...]:
        return tuple(entry.rule for entry in self.trace)


class NodeKind(Enum):
    ROOT = "root"
    CONDITION = "condition"
    RECOMMENDATION = "recommendation"
    JUSTIFICATION = "justification"


@dataclass(frozen=True)
class ScopeNode:
    kind: NodeKind
    children: tuple["ScopeNode", ...] = ()
    segment: Segment | None = None
    span: Span | None = None  # payload span; equals segment.span when a segment exists
    frame: Frame | None = None

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class ScopeTree:
    doc_id: str
    root: ScopeNode
    version: int = 1

    def conditions(self) -> list[ScopeNode]:
        return [n for n in self.root.walk() if n.kind is NodeKind.CONDITION]

    def recommendations(self) -> list[ScopeNode]:
        return [n for n in self.root.walk() if n.kind is NodeKind.RECOMMENDATION]

    def find(self, segment_id: str) -> ScopeNode | None:
        for node in self.root.walk():
            if node.segment is not None and node.segment.id == segment_id:
                return node
        return None


def _block_of(doc: Document, segment: Segment) -> int:
    block_index, _ = enclosing_unit(doc, segment.span.start)
    return block_index


def _last_block_end_before(doc: Document, stop_index: int, from_index: int) -> int:
    """End of the last block in (from_index, stop_index); falls back to
    the end of ``from_index`` itself when the range is empty."""
    if stop_index - from_index > 1:
        return doc.blocks[stop_index - 1].span.end
    return doc.blocks[from_index].span.end


def default_scope(cond: Segment, doc: Document) -> Frame:
    """Compute a condition's default frame (rules R1-R4)."""
    block_index = _block_of(doc, cond)
    block = doc.blocks[block_index]

    if cond.position is Position.TITLE:
        closer = len(doc.blocks)
        for i in range(block_index + 1, len(doc.blocks)):
            candidate = doc.blocks[i]
            if candidate.kind is BlockKind.TITLE and candidate.level <= block.level:
                closer = i
                break
        end = _last_block_end_before(doc, closer, block_index)
        detail = f"section closes before block {closer}" if closer < len(doc.blocks) \
            else "section runs to document end"
        return Frame(cond.id, Span(cond.span.end, max(cond.span.end, end)),
                     (TraceEntry(R1_TITLE, detail),))

    if cond.position is Position.ENUM_INTRO:
        group = doc.enum_group_of(block_index)
        if group is not None and group.items:
            end = doc.blocks[group.items[-1]].span.end
            detail = f"covers {len(group.items)} items"
        else:
            end, detail = block.span.end, "no enumeration items"
        return Frame(cond.id, Span(cond.span.end, max(cond.span.end, end)),
                     (TraceEntry(R2_ENUM, detail),))

    if cond.position is Position.DETACHED:
        return Frame(cond.id, Span(cond.span.end, max(cond.span.end, block.span.end)),
                     (TraceEntry(R3_DETACHED, f"paragraph ends at byte {block.span.end}"),))

    _, sentence_index = enclosing_unit(doc, cond.span.start)
    sentence = block.sentences[sentence_index]
    return Frame(cond.id, Span(cond.span.end, max(cond.span.end, sentence.end)),
                 (TraceEntry(R4_INTEGRATED, f"sentence ends at byte {sentence.end}"),))


def _content_tokens(text: str, lexicon: MarkerLexicon) -> set[str]:
    tokens = {t.lower() for t in re.findall(r"\w+", text)}
    return tokens - set(lexicon.stopwords)


def title_overlap(title_text: str, condition_text: str, lexicon: MarkerLexicon) -> float:
    """Jaccard similarity of content tokens (stopwords removed)."""
    a = _content_tokens(title_text, lexicon)
    b = _content_tokens(condition_text, lexicon)
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


def apply_title_redundancy(frame: Frame, title_frame: Frame, cond: Segment,
                           title_cond: Segment, doc: Document,
                           lexicon: MarkerLexicon) -> Frame:
    """E1: extend the first detached frame under a title whose wording it
    partly repeats, up to the title frame's end."""
    score = title_overlap(doc.text(title_cond.span), doc.text(cond.span), lexicon)
    if score >= TITLE_REDUNDANCY_THRESHOLD and title_frame.scope.end > frame.scope.end:
        return replace(frame,
                       scope=Span(frame.scope.start, title_frame.scope.end),
                       trace=frame.trace + (TraceEntry(E1_TITLE_REDUNDANCY,
                                                       f"token overlap {score:.2f}"),))
    return frame


def _scope_sentences_after_condition(frame: Frame, cond: Segment,
                                     doc: Document) -> list[tuple[int, int, Span]]:
    """Sentences fully inside the frame, strictly after the condition's
    own sentence, in document order: (block index, sentence index, span)."""
    cond_block, cond_sentence = enclosing_unit(doc, cond.span.start)
    out = []
    for block_index in range(cond_block, len(doc.blocks)):
        block = doc.blocks[block_index]
        if block.span.start >= frame.scope.end:
            break
        for sentence_index, sentence in enumerate(block.sentences):
            if block_index == cond_block and sentence_index <= cond_sentence:
                continue
            if sentence.end <= frame.scope.end and sentence.start >= cond.span.start:
                out.append((block_index, sentence_index, sentence))
    return out


def apply_rupture(frame: Frame, cond: Segment, doc: Document,
                  lexicon: MarkerLexicon) -> tuple[Frame, Span | None]:
    """E2: close a detached frame just before a sentence that opens with
    a contrast or justification marker.  A justification marker also
    yields the cut-off span up to its paragraph end."""
    cond_block, cond_sentence = enclosing_unit(doc, cond.span.start)
    # truncating "just before" the first scanned sentence keeps the
    # remainder of the condition's own sentence inside the frame
    previous_end = min(doc.blocks[cond_block].sentences[cond_sentence].end,
                       frame.scope.end)
    for block_index, _, sentence in _scope_sentences_after_condition(frame, cond, doc):
        hits = sentence_hits(doc, block_index, sentence, lexicon)
        opening = [h for h in hits
                   if h.span.start == sentence.start and h.marker_class in
                   (MarkerClass.RUPTURE_CONTRAST, MarkerClass.RUPTURE_JUSTIFICATION)]
        if opening:
            new_end = previous_end
            truncated = replace(
                frame,
                scope=Span(frame.scope.start, new_end),
                trace=frame.trace + (TraceEntry(
                    E2_RUPTURE, f"{opening[0].pattern!r} closes frame at byte {new_end}"),))
            justification = None
            if opening[0].marker_class is MarkerClass.RUPTURE_JUSTIFICATION:
                justification = Span(sentence.start, doc.blocks[block_index].span.end)
            return truncated, justification
        previous_end = sentence.end
    return frame, None


def apply_anaphora(frame: Frame, cond: Segment, doc: Document,
                   lexicon: MarkerLexicon) -> Frame:
    """E3: while the next paragraph opens with an anaphoric cue, pull it
    into the frame."""
    while True:
        boundary = None
        for block_index, block in enumerate(doc.blocks):
            if block.span.end == frame.scope.end:
                boundary = block_index
                break
        if boundary is None or boundary + 1 >= len(doc.blocks):
            return frame
        nxt = doc.blocks[boundary + 1]
        if nxt.kind is not BlockKind.PARAGRAPH or not nxt.sentences:
            return frame
        first = nxt.sentences[0]
        hits = sentence_hits(doc, boundary + 1, first, lexicon)
        if not any(h.span.start == first.start and h.marker_class is MarkerClass.ANAPHORA_CUE
                   for h in hits):
            return frame
        frame = replace(frame,
                        scope=Span(frame.scope.start, nxt.span.end),
                        trace=frame.trace + (TraceEntry(
                            E3_ANAPHORA, f"continues over block {boundary + 1}"),))


def _innermost_enclosing(span: Span, frames: dict[str, Frame],
                         exclude: str | None = None) -> str | None:
    best: str | None = None
    for cond_id, frame in frames.items():
        if cond_id == exclude or not frame.scope.contains(span):
            continue
        if best is None:
            best = cond_id
            continue
        b = frames[best].scope
        if (frame.scope.start, -frame.scope.end) > (b.start, -b.end):
            best = cond_id
    return best


def build_scope_tree(doc: Document, segments: list[Segment],
                     lexicon: MarkerLexicon) -> ScopeTree:
    """Compute all frames, apply exceptions and clips, and nest segments."""
    conditions = {s.id: s for s in segments if s.kind is SegmentKind.CONDITION}
    recommendations = [s for s in segments if s.kind is SegmentKind.RECOMMENDATION]

    frames: dict[str, Frame] = {
        cond_id: default_scope(cond, doc) for cond_id, cond in conditions.items()
    }

    # E1: the first detached frame under each governing title condition.
    title_ids = [cid for cid, c in conditions.items() if c.position is Position.TITLE]
    detached_ids = sorted(
        (cid for cid, c in conditions.items() if c.position is Position.DETACHED),
        key=lambda cid: conditions[cid].span.start)
    first_under: dict[str, str] = {}
    for cid in detached_ids:
        governing = _innermost_enclosing(conditions[cid].span,
                                         {t: frames[t] for t in title_ids})
        if governing is not None and governing not in first_under:
            first_under[governing] = cid
    for title_id, cid in first_under.items():
        frames[cid] = apply_title_redundancy(
            frames[cid], frames[title_id], conditions[cid], conditions[title_id],
            doc, lexicon)

    # E2, then E3, then the E2 re-check on frames E3 actually extended.
    justifications: list[Span] = []
    for cid, cond in conditions.items():
        if frames[cid].trace[0].rule != R3_DETACHED:
            continue
        frames[cid], justification = apply_rupture(frames[cid], cond, doc, lexicon)
        if justification is not None:
            justifications.append(justification)
    for cid, cond in conditions.items():
        frame = frames[cid]
        if frame.trace[0].rule != R3_DETACHED:
            continue
        if not any(b.span.end == frame.scope.end for b in doc.blocks):
            continue  # no longer at a block end (for instance after E2)
        extended = apply_anaphora(frame, cond, doc, lexicon)
        if extended is not frame:
            frames[cid], justification = apply_rupture(extended, cond, doc, lexicon)
            if justification is not None:
                justifications.append(justification)

    # Clip partial overlaps to the innermost enclosing frame's end.
    changed = True
    while changed:
        changed = False
        for cid in sorted(conditions, key=lambda c: conditions[c].span.start):
            enclosing = [f.scope.end for other, f in frames.items()
                         if other != cid and f.scope.contains(conditions[cid].span)]
            if not enclosing:
                continue
            limit = min(enclosing)
            if frames[cid].scope.end > limit:
                frames[cid] = replace(
                    frames[cid],
                    scope=Span(frames[cid].scope.start, limit),
                    trace=frames[cid].trace + (TraceEntry(
                        CLIP_NESTING, f"clipped to enclosing frame end {limit}"),))
                changed = True

    # Nest: every node hangs off the innermost frame containing its span.
    children: dict[str | None, list[ScopeNode]] = {}

    def attach(parent: str | None, node: ScopeNode) -> None:
        children.setdefault(parent, []).append(node)

    cond_nodes: dict[str, tuple[Segment, Frame]] = {
        cid: (conditions[cid], frames[cid]) for cid in conditions
    }
    for cid, (cond, frame) in cond_nodes.items():
        parent = _innermost_enclosing(cond.span, frames, exclude=cid)
        attach(parent, ScopeNode(kind=NodeKind.CONDITION, segment=cond,
                                 span=cond.span, frame=frame))
    for rec in recommendations:
        parent = _innermost_enclosing(rec.span, frames)
        attach(parent, ScopeNode(kind=NodeKind.RECOMMENDATION, segment=rec, span=rec.span))
    for span in justifications:
        parent = _innermost_enclosing(span, frames)
        attach(parent, ScopeNode(kind=NodeKind.JUSTIFICATION, span=span))

    order = {NodeKind.CONDITION: 0, NodeKind.RECOMMENDATION: 1, NodeKind.JUSTIFICATION: 2}

    def assemble(parent: str | None) -> tuple[ScopeNode, ...]:
        nodes = sorted(children.get(parent, []),
                       key=lambda n: (n.span.start, order[n.kind], n.span.end))
        out = []
        for node in nodes:
            if node.kind is NodeKind.CONDITION:
                node = replace(node, children=assemble(node.segment.id))
            out.append(node)
        return tuple(out)

    root = ScopeNode(kind=NodeKind.ROOT, children=assemble(None))
    return ScopeTree(doc_id=doc.id, root=root, version=1)


def trace_statistics(tree: ScopeTree) -> dict[str, object]:
    """Counts of rule usage plus the default-only vs exception split."""
    usage = {rule: 0 for rule in RULE_IDS}
    total = 0
    default_only = 0
    for node in tree.conditions():
        total += 1
        ids = node.frame.rule_ids()
        for rule in ids:
            usage[rule] += 1
        if len(ids) == 1:
            default_only += 1
    return {
        "frames": total,
        "default_only": default_only,
        "with_exceptions": total - default_only,
        "default_fraction": default_only / total if total else 0.0,
        "rule_usage": usage,
    }
