"""Evaluation of system trees against gold annotations.

Segment matching comes in two modes.  ``strict`` demands the same kind
and identical spans after whitespace trimming; ``lenient`` demands the
same kind and an overlap of at least half the longer span.  Matching is
greedy by position and one-to-one.

Per kind, recall is the strict match count over the gold count and
precision is the lenient match count over the gold count; this is the
convention of the published result tables, where every printed ratio
has the gold count as denominator ("# corrects" exceeds "# trouvés" in
every row, so the two counts cannot share one match criterion).  The
F-measure is the plain harmonic mean of recall and precision.

Attachment accuracy compares transitive (condition, recommendation)
pairs between trees; pairwise agreement compares the innermost
governing condition of aligned recommendation leaves; Cohen's kappa is
the standard chance-corrected agreement over per-sentence labels.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .docmodel import Document, Span
from .scope import NodeKind, ScopeNode, ScopeTree
from .segmenter import Segment, SegmentKind


@dataclass(frozen=True)
class KindScores:
    present: int
    found: int
    correct: int
    recall: float
    precision: float
    f_measure: float


@dataclass(frozen=True)
class EvalReport:
    doc_id: str
    conditions: KindScores
    recommendations: KindScores
    attachment_pairs_gold: int
    attachment_pairs_common: int
    attachment_accuracy: float
    agreement: float
    kappa: float

    def to_dict(self) -> dict:
        def scores(s: KindScores) -> dict:
            return {"present": s.present, "found": s.found, "correct": s.correct,
                    "recall": s.recall, "precision": s.precision,
                    "f_measure": s.f_measure}
        return {
            "doc_id": self.doc_id,
            "conditions": scores(self.conditions),
            "recommendations": scores(self.recommendations),
            "attachment_pairs_gold": self.attachment_pairs_gold,
            "attachment_pairs_common": self.attachment_pairs_common,
            "attachment_accuracy": self.attachment_accuracy,
            "agreement": self.agreement,
            "kappa": self.kappa,
        }


def tree_segments(tree: ScopeTree) -> list[Segment]:
    """All condition and recommendation segments of a tree, by position."""
    segments = [node.segment for node in tree.root.walk() if node.segment is not None]
    segments.sort(key=lambda s: (s.span.start, s.span.end))
    return segments


def _trimmed(span: Span, source: str | None) -> Span:
    if source is None:
        return span
    raw = source.encode("utf-8")[span.start:span.end]
    lead = len(raw) - len(raw.lstrip())
    trail = len(raw) - len(raw.rstrip())
    if lead + trail >= len(raw):
        return span
    return Span(span.start + lead, span.end - trail)


def _is_match(system: Segment, gold: Segment, mode: str, source: str | None) -> bool:
    if system.kind is not gold.kind:
        return False
    if mode == "strict":
        return _trimmed(system.span, source) == _trimmed(gold.span, source)
    if mode == "lenient":
        overlap = min(system.span.end, gold.span.end) - max(system.span.start, gold.span.start)
        longer = max(len(system.span), len(gold.span))
        return longer > 0 and overlap / longer >= 0.5
    raise ValueError(f"unknown matching mode {mode!r}")


def match_segments(system: list[Segment], gold: list[Segment], mode: str,
                   source: str | None = None) -> list[tuple[int, int]]:
    """Greedy positional one-to-one matching; returns (system index, gold
    index) pairs."""
    gold_order = sorted(range(len(gold)), key=lambda i: (gold[i].span.start, gold[i].span.end))
    system_order = sorted(range(len(system)), key=lambda i: (system[i].span.start, system[i].span.end))
    matched_system: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for g in gold_order:
        for s in system_order:
            if s in matched_system:
                continue
            if _is_match(system[s], gold[g], mode, source):
                matched_system.add(s)
                pairs.append((s, g))
                break
    return pairs


def prf_from_counts(present: int, found: int, correct: int) -> tuple[float, float, float]:
    """Recall, precision and F-measure from raw table counts.

    Both ratios are over the gold count; 0/0 is defined as 0.
    """
    recall = found / present if present else 0.0
    precision = correct / present if present else 0.0
    f = 2 * recall * precision / (recall + precision) if recall + precision else 0.0
    return recall, precision, f


def segment_prf(system: list[Segment], gold: list[Segment],
                source: str | None = None) -> dict[SegmentKind, KindScores]:
    """Per-kind recall / precision / F between system and gold segments."""
    out: dict[SegmentKind, KindScores] = {}
    for kind in SegmentKind:
        system_k = [s for s in system if s.kind is kind]
        gold_k = [g for g in gold if g.kind is kind]
        found = len(match_segments(system_k, gold_k, "strict", source))
        correct = len(match_segments(system_k, gold_k, "lenient", source))
        recall, precision, f = prf_from_counts(len(gold_k), found, correct)
        out[kind] = KindScores(present=len(gold_k), found=found, correct=correct,
                               recall=recall, precision=precision, f_measure=f)
    return out


def attachment_pairs(tree: ScopeTree) -> set[tuple[str, str]]:
    """All (ancestor condition id, recommendation id) pairs, transitive
    over frame nesting."""
    pairs: set[tuple[str, str]] = set()

    def walk(node: ScopeNode, ancestors: tuple[str, ...]) -> None:
        if node.kind is NodeKind.RECOMMENDATION:
            for cond_id in ancestors:
                pairs.add((cond_id, node.segment.id))
            return
        next_ancestors = ancestors
        if node.kind is NodeKind.CONDITION:
            next_ancestors = ancestors + (node.segment.id,)
        for child in node.children:
            walk(child, next_ancestors)

    walk(tree.root, ())
    return pairs


def attachment_accuracy(system_tree: ScopeTree, gold_tree: ScopeTree,
                        matching: dict[str, str] | None = None) -> float:
    """Common (condition, recommendation) pairs over the gold pair count.

    ``matching`` maps system segment ids to their gold counterparts;
    when omitted, segments are identified by their span-derived ids.
    """
    gold_pairs = attachment_pairs(gold_tree)
    if not gold_pairs:
        return 0.0
    system_pairs = attachment_pairs(system_tree)
    if matching is not None:
        system_pairs = {(matching[c], matching[r])
                        for c, r in system_pairs if c in matching and r in matching}
    return len(system_pairs & gold_pairs) / len(gold_pairs)


def segment_matching_map(system_tree: ScopeTree, gold_tree: ScopeTree,
                         mode: str = "lenient", source: str | None = None) -> dict[str, str]:
    """System segment id -> gold segment id under the given match mode."""
    system = tree_segments(system_tree)
    gold = tree_segments(gold_tree)
    return {system[s].id: gold[g].id for s, g in match_segments(system, gold, mode, source)}


def _leaf_parents(tree: ScopeTree) -> dict[str, str]:
    """Recommendation id -> innermost governing condition id (or 'root')."""
    parents: dict[str, str] = {}

    def walk(node: ScopeNode, governing: str) -> None:
        if node.kind is NodeKind.RECOMMENDATION:
            parents[node.segment.id] = governing
            return
        next_governing = node.segment.id if node.kind is NodeKind.CONDITION else governing
        for child in node.children:
            walk(child, next_governing)

    walk(tree.root, "root")
    return parents


def pairwise_agreement(tree_a: ScopeTree, tree_b: ScopeTree) -> float:
    """Fraction of recommendation leaves attached to the same innermost
    condition in both annotations; unalignable leaves count as
    disagreement."""
    parents_a = _leaf_parents(tree_a)
    parents_b = _leaf_parents(tree_b)
    aligned = set(parents_a) & set(parents_b)
    total = len(aligned) + len(set(parents_a) - aligned) + len(set(parents_b) - aligned)
    if total == 0:
        return 0.0
    same = sum(1 for leaf in aligned if parents_a[leaf] == parents_b[leaf])
    return same / total


def cohen_kappa(labels_a: list[str], labels_b: list[str]) -> float:
    """Cohen's kappa between two equal-length label sequences."""
    if not labels_a or len(labels_a) != len(labels_b):
        raise ValueError("label sequences must be non-empty and of equal length")
    n = len(labels_a)
    observed = sum(1 for a, b in zip(labels_a, labels_b) if a == b) / n
    freq_a = Counter(labels_a)
    freq_b = Counter(labels_b)
    expected = sum(freq_a[label] * freq_b.get(label, 0) for label in freq_a) / (n * n)
    if expected == 1.0:
        return 1.0 if observed == 1.0 else 0.0
    return (observed - expected) / (1.0 - expected)


def sentence_labels(tree: ScopeTree, doc: Document) -> list[str]:
    """Per-sentence labels (condition before recommendation before none)
    for kappa between two annotations of one document."""
    segments = tree_segments(tree)
    labels = []
    for block in doc.blocks:
        for sentence in block.sentences:
            label = "None"
            for seg in segments:
                if seg.span.overlaps(sentence):
                    if seg.kind is SegmentKind.CONDITION:
                        label = "Condition"
                        break
                    label = "Recommendation"
            labels.append(label)
    return labels


def evaluate(system_tree: ScopeTree, gold_tree: ScopeTree, doc: Document) -> EvalReport:
    """Full report: segment scores, attachment accuracy, agreement, kappa."""
    system = tree_segments(system_tree)
    gold = tree_segments(gold_tree)
    scores = segment_prf(system, gold, doc.source)
    gold_pairs = attachment_pairs(gold_tree)
    matching = segment_matching_map(system_tree, gold_tree, "lenient", doc.source)
    system_pairs = {(matching[c], matching[r])
                    for c, r in attachment_pairs(system_tree)
                    if c in matching and r in matching}
    return EvalReport(
        doc_id=gold_tree.doc_id,
        conditions=scores[SegmentKind.CONDITION],
        recommendations=scores[SegmentKind.RECOMMENDATION],
        attachment_pairs_gold=len(gold_pairs),
        attachment_pairs_common=len(system_pairs & gold_pairs),
        attachment_accuracy=attachment_accuracy(system_tree, gold_tree, matching),
        agreement=pairwise_agreement(system_tree, gold_tree),
        kappa=cohen_kappa(sentence_labels(system_tree, doc), sentence_labels(gold_tree, doc)),
    )


def format_report(report: EvalReport) -> str:
    """Plain-text result table in the layout of the published evaluation."""
    def pct(value: float) -> str:
        return f"{100 * value:.2f}"

    c, r = report.conditions, report.recommendations
    rows = [
        ("", "Conditions", "Recommandations", "Rattachements"),
        ("# présents", str(c.present), str(r.present), str(report.attachment_pairs_gold)),
        ("# trouvés", str(c.found), str(r.found), ""),
        ("rappel", pct(c.recall), pct(r.recall), ""),
        ("# corrects", str(c.correct), str(r.correct), str(report.attachment_pairs_common)),
        ("précision", pct(c.precision), pct(r.precision), pct(report.attachment_accuracy)),
        ("F-mesure", pct(c.f_measure), pct(r.f_measure), ""),
    ]
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    lines = [f"GBPC : {report.doc_id}"]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i])
                               for i, cell in enumerate(row)).rstrip())
    lines.append(f"accord (rattachements) : {report.agreement:.4f}")
    lines.append(f"kappa (étiquettes de phrases) : {report.kappa:.4f}")
    return "\n".join(lines) + "\n"
