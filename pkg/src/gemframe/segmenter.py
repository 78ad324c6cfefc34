"""Stage 1: classify sentences into CONDITION / RECOMMENDATION segments.

A sentence with a deontic marker becomes a recommendation; a sentence
with a condition trigger becomes a condition whose span runs from the
trigger to the first following comma or colon (or to the sentence end).
Titles yield conditions when they carry a trigger or a domain term;
enumeration intros when they carry a trigger.  A sentence with a
sentence-initial trigger plus a later deontic is split into a detached
condition prefix and a recommendation remainder.

Segments never cut below the sentence level except for that
trigger-clause split.  Recommendations are then extended over directly
following unmarked sentences of the same block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .docmodel import Block, BlockKind, Document, Span, enclosing_unit
from .lexicon import (
    ALL_CLASSES,
    DEONTIC_CLASSES,
    MarkerClass,
    MarkerHit,
    MarkerLexicon,
    match_markers,
)

# Domain terms only make sense in titles (a pathology name used as a
# heading acts as a condition); outside titles they are ignored.
_NON_TITLE_CLASSES = frozenset(ALL_CLASSES - {MarkerClass.DOMAIN_TERM})


class SegmentKind(Enum):
    CONDITION = "condition"
    RECOMMENDATION = "recommendation"


class Position(Enum):
    TITLE = "title"
    ENUM_INTRO = "enum-intro"
    DETACHED = "detached"
    INTEGRATED = "integrated"
    NOT_APPLICABLE = "n/a"


@dataclass(frozen=True)
class Segment:
    """An elementary condition or recommendation span.

    ``hits`` and ``origin_block`` are segmentation provenance; they are
    excluded from equality so that segments reconstructed from the XML
    representation compare equal to freshly segmented ones.
    """

    id: str
    kind: SegmentKind
    span: Span
    position: Position
    hits: tuple[MarkerHit, ...] = field(default=(), compare=False)
    origin_block: int = field(default=-1, compare=False)


def make_segment(kind: SegmentKind, span: Span, position: Position,
                 hits: tuple[MarkerHit, ...] = (), origin_block: int = -1) -> Segment:
    """Build a segment with its stable span-derived id."""
    prefix = "c" if kind is SegmentKind.CONDITION else "r"
    return Segment(id=f"{prefix}{span.start}-{span.end}", kind=kind, span=span,
                   position=position, hits=hits, origin_block=origin_block)


def _classes_for(block: Block) -> frozenset[MarkerClass]:
    return ALL_CLASSES if block.kind is BlockKind.TITLE else _NON_TITLE_CLASSES


def sentence_hits(doc: Document, block_index: int, sentence: Span,
                  lexicon: MarkerLexicon) -> list[MarkerHit]:
    """Marker hits for one sentence, honoring the title-only domain terms."""
    block = doc.blocks[block_index]
    return match_markers(doc.text(sentence), sentence, lexicon, _classes_for(block))


def _clause_end(doc: Document, sentence: Span, from_byte: int) -> int:
    """Byte end of the trigger clause: first ',' or ':' at or after
    ``from_byte`` (inclusive of the punctuation), else the sentence end."""
    text = doc.text(sentence)
    start_char = doc.byte_to_char(from_byte) - doc.byte_to_char(sentence.start)
    for i in range(start_char, len(text)):
        if text[i] in ",:":
            rel = len(text[:i + 1].encode("utf-8"))
            return sentence.start + rel
    return sentence.end


def _trim(doc: Document, span: Span) -> Span | None:
    """Shrink a span to its non-whitespace content; None when empty."""
    text = doc.text(span)
    lead = len(text) - len(text.lstrip())
    trail = len(text) - len(text.rstrip())
    if lead + trail >= len(text):
        return None
    start = span.start + len(text[:lead].encode("utf-8"))
    end = span.end - len(text[len(text) - trail:].encode("utf-8"))
    return Span(start, end)


def classify_position(candidate: Segment, doc: Document) -> Position:
    """Resolve a condition candidate's introducer position.

    Title and enumeration-intro positions pass through from the origin
    block kind.  Otherwise the condition is detached iff its trigger
    starts the sentence and a comma or colon closes the clause before
    the first deontic hit (or before the sentence end); else integrated.
    """
    block_index, sentence_index = enclosing_unit(doc, candidate.span.start)
    block = doc.blocks[block_index]
    if block.kind is BlockKind.TITLE:
        return Position.TITLE
    if block.kind is BlockKind.ENUM_INTRO:
        return Position.ENUM_INTRO
    sentence = block.sentences[sentence_index]
    triggers = [h for h in candidate.hits if h.marker_class is MarkerClass.CONDITION_TRIGGER]
    if not triggers or triggers[0].span.start != sentence.start:
        return Position.INTEGRATED
    if any(h.marker_class in DEONTIC_CLASSES for h in candidate.hits):
        # a deontic inside the clause means no comma separated it from the trigger
        return Position.INTEGRATED
    if doc.text(candidate.span).rstrip()[-1:] in (",", ":"):
        return Position.DETACHED
    return Position.INTEGRATED


def _hits_within(hits: list[MarkerHit], span: Span) -> tuple[MarkerHit, ...]:
    return tuple(h for h in hits if span.contains(h.span))


def classify_units(doc: Document, lexicon: MarkerLexicon) -> list[Segment]:
    """Unextended condition/recommendation candidates, in document order."""
    segments: list[Segment] = []
    for block_index, block in enumerate(doc.blocks):
        for sentence in block.sentences:
            hits = sentence_hits(doc, block_index, sentence, lexicon)
            if not hits:
                continue
            triggers = [h for h in hits if h.marker_class is MarkerClass.CONDITION_TRIGGER]
            deontics = [h for h in hits if h.marker_class in DEONTIC_CLASSES]
            domain = [h for h in hits if h.marker_class is MarkerClass.DOMAIN_TERM]

            if block.kind is BlockKind.TITLE:
                # Titles act as section labels: only conditions arise there.
                if triggers or domain:
                    segments.append(make_segment(
                        SegmentKind.CONDITION, sentence, Position.TITLE,
                        _hits_within(hits, sentence), block_index))
                continue

            if triggers:
                trigger = triggers[0]
                cond_span = Span(trigger.span.start, _clause_end(doc, sentence, trigger.span.end))
                cond = make_segment(SegmentKind.CONDITION, cond_span, Position.INTEGRATED,
                                    _hits_within(hits, cond_span), block_index)
                cond = Segment(id=cond.id, kind=cond.kind, span=cond.span,
                               position=classify_position(cond, doc),
                               hits=cond.hits, origin_block=block_index)
                segments.append(cond)
                if deontics:
                    # Recommendation piece: the clause remainder when it holds a
                    # deontic, else the deontic-bearing prefix before the trigger.
                    rec_span = None
                    if any(h.span.start >= cond_span.end for h in deontics):
                        rec_span = _trim(doc, Span(cond_span.end, sentence.end))
                    elif any(h.span.end <= cond_span.start for h in deontics):
                        rec_span = _trim(doc, Span(sentence.start, cond_span.start))
                    if rec_span is not None:
                        segments.append(make_segment(
                            SegmentKind.RECOMMENDATION, rec_span, Position.NOT_APPLICABLE,
                            _hits_within(hits, rec_span), block_index))
            elif deontics:
                segments.append(make_segment(
                    SegmentKind.RECOMMENDATION, sentence, Position.NOT_APPLICABLE,
                    _hits_within(hits, sentence), block_index))
    segments.sort(key=lambda s: (s.span.start, s.span.end))
    return segments


def extend_segments(candidates: list[Segment], doc: Document,
                    lexicon: MarkerLexicon) -> list[Segment]:
    """Merge unmarked follow-up sentences into preceding recommendations.

    Extension stops at the block end, at the next sentence carrying any
    marker, and never crosses into another block (so never across an
    enumeration boundary).  Conditions are never extended.
    """
    marked: dict[tuple[int, int], bool] = {}

    def is_marked(block_index: int, sentence_index: int) -> bool:
        key = (block_index, sentence_index)
        if key not in marked:
            sentence = doc.blocks[block_index].sentences[sentence_index]
            marked[key] = bool(sentence_hits(doc, block_index, sentence, lexicon))
        return marked[key]

    extended: list[Segment] = []
    for seg in candidates:
        if seg.kind is not SegmentKind.RECOMMENDATION:
            extended.append(seg)
            continue
        block_index, sentence_index = enclosing_unit(doc, seg.span.end - 1)
        block = doc.blocks[block_index]
        end = seg.span.end
        for next_index in range(sentence_index + 1, len(block.sentences)):
            if is_marked(block_index, next_index):
                break
            end = block.sentences[next_index].end
        if end != seg.span.end:
            seg = make_segment(seg.kind, Span(seg.span.start, end), seg.position,
                               seg.hits, seg.origin_block)
        extended.append(seg)
    extended.sort(key=lambda s: (s.span.start, s.span.end))
    return extended


def segment_document(doc: Document, lexicon: MarkerLexicon) -> list[Segment]:
    """Full stage-1 run: classify units, then extend recommendations."""
    return extend_segments(classify_units(doc, lexicon), doc, lexicon)
