"""End-to-end pipeline: text in, scope tree and canonical XML out."""

from __future__ import annotations

from dataclasses import dataclass

from .docmodel import Document, parse_document
from .gemxml import emit
from .lexicon import MarkerLexicon, load_lexicon
from .scope import ScopeTree, build_scope_tree, trace_statistics
from .segmenter import Segment, SegmentKind, segment_document


@dataclass(frozen=True)
class PipelineResult:
    doc: Document
    segments: list[Segment]
    tree: ScopeTree
    xml: str

    def summary(self) -> str:
        stats = trace_statistics(self.tree)
        conditions = sum(1 for s in self.segments if s.kind is SegmentKind.CONDITION)
        recommendations = len(self.segments) - conditions
        lines = [
            f"document: {self.doc.id}",
            f"blocks: {len(self.doc.blocks)}",
            f"segments: {conditions} conditions, {recommendations} recommendations",
            f"frames: {stats['frames']} "
            f"(default rules only: {stats['default_only']}, "
            f"with exceptions: {stats['with_exceptions']}, "
            f"default fraction: {stats['default_fraction']:.0%})",
        ]
        usage = ", ".join(f"{rule}={count}" for rule, count in stats["rule_usage"].items() if count)
        lines.append(f"rule usage: {usage or 'none'}")
        return "\n".join(lines)


def run_pipeline(text: str, doc_id: str = "doc",
                 lexicon: MarkerLexicon | None = None) -> PipelineResult:
    """Parse, segment, resolve scopes and serialize one document."""
    if lexicon is None:
        lexicon = load_lexicon()
    doc = parse_document(text, doc_id)
    segments = segment_document(doc, lexicon)
    tree = build_scope_tree(doc, segments, lexicon)
    return PipelineResult(doc=doc, segments=segments, tree=tree, xml=emit(tree, doc))
