"""Acceptance suite: one test per acceptance criterion, each printing a
pass/fail line.

Criterion 6 includes an expected kappa of 0.6 for the worked example
labels [C,C,R,N] vs [C,R,R,N].  That figure presumes a chance agreement
of 0.375, which is one annotator's marginals squared; the standard
chance term multiplies the two annotators' marginals and gives
p_e = 0.3125, hence kappa = 7/11 = 0.6364 (confirmed against
scikit-learn).  The implementation computes the standard coefficient,
so that single check fails by design; see README and the unit tests in
test_evaluation.py for the verified value.
"""

import math
import random
import time

import pytest

from gemframe.docmodel import Span, enclosing_unit, parse_document
from gemframe.evaluation import (
    attachment_accuracy,
    cohen_kappa,
    evaluate,
    pairwise_agreement,
    prf_from_counts,
)
from gemframe.gemxml import emit, parse
from gemframe.pipeline import run_pipeline
from gemframe.scope import (
    CLIP_NESTING,
    E1_TITLE_REDUNDANCY,
    E2_RUPTURE,
    E3_ANAPHORA,
    R1_TITLE,
    R2_ENUM,
    R3_DETACHED,
    R4_INTEGRATED,
    Frame,
    NodeKind,
    ScopeNode,
    ScopeTree,
    TraceEntry,
)
from gemframe.segmenter import Position, SegmentKind, make_segment

from conftest import GOLDEN_NAMES, golden_text, golden_xml
from docgen import random_guideline


def report(line: str) -> None:
    print(line)


# --------------------------------------------------------------------------
# Criterion 1: table arithmetic
# --------------------------------------------------------------------------

TABLE_ROWS = [
    # (present, found, correct, printed rappel, printed précision)
    (73, 60, 70, 82.19, 95.89), (96, 88, 94, 91.66, 97.91),
    (70, 61, 65, 87.14, 92.85), (107, 96, 104, 89.71, 97.19),
    (75, 62, 73, 82.66, 97.33), (107, 100, 106, 93.45, 99.06),
    (60, 45, 59, 75.00, 98.33), (91, 65, 88, 71.42, 96.70),
]
ATTACHMENT_ROWS = [(169, 126, 74.55), (177, 136, 76.83),
                   (182, 162, 89.01), (151, 107, 70.86)]


def _attachment_trees(gold_pairs: int, common: int):
    cond = make_segment(SegmentKind.CONDITION, Span(0, 5), Position.DETACHED)
    recs = [make_segment(SegmentKind.RECOMMENDATION, Span(10 + 10 * i, 15 + 10 * i),
                         Position.NOT_APPLICABLE) for i in range(gold_pairs)]
    leaves = [ScopeNode(kind=NodeKind.RECOMMENDATION, segment=r, span=r.span) for r in recs]
    frame = Frame(cond.id, Span(5, 15 + 10 * gold_pairs), (TraceEntry(R3_DETACHED),))

    def tree(attached, loose):
        cond_node = ScopeNode(kind=NodeKind.CONDITION, segment=cond, span=cond.span,
                              frame=frame, children=tuple(attached))
        return ScopeTree(doc_id="t", root=ScopeNode(
            kind=NodeKind.ROOT, children=(cond_node,) + tuple(loose)))

    return tree(leaves[:common], leaves[common:]), tree(leaves, ())


def test_criterion_1_table_arithmetic():
    started = time.perf_counter()
    for present, found, correct, rappel, precision in TABLE_ROWS:
        recall_value, precision_value, _ = prf_from_counts(present, found, correct)
        assert 100 * recall_value == pytest.approx(rappel, abs=0.01)
        assert 100 * precision_value == pytest.approx(precision, abs=0.01)
    for gold_pairs, common, printed in ATTACHMENT_ROWS:
        system_tree, gold_tree = _attachment_trees(gold_pairs, common)
        value = attachment_accuracy(system_tree, gold_tree)
        assert 100 * value == pytest.approx(printed, abs=0.01)
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    report(f"[PASS] criterion 1: 16 recall/precision rows and 4 attachment rows "
           f"reproduced within 0.01 ({elapsed:.3f}s)")


# --------------------------------------------------------------------------
# Criterion 2: agreement figure
# --------------------------------------------------------------------------

def test_criterion_2_agreement_figure():
    cond_a = make_segment(SegmentKind.CONDITION, Span(0, 5), Position.DETACHED)
    cond_b = make_segment(SegmentKind.CONDITION, Span(6, 9), Position.DETACHED)
    recs = [make_segment(SegmentKind.RECOMMENDATION, Span(100 + 10 * i, 105 + 10 * i),
                         Position.NOT_APPLICABLE) for i in range(162)]

    def build(first, second):
        def node(c, leaves):
            frame = Frame(c.id, Span(c.span.end, 100 + 10 * 162), (TraceEntry(R3_DETACHED),))
            children = tuple(ScopeNode(kind=NodeKind.RECOMMENDATION, segment=r, span=r.span)
                             for r in leaves)
            return ScopeNode(kind=NodeKind.CONDITION, segment=c, span=c.span,
                             frame=frame, children=children)
        return ScopeTree(doc_id="agree", root=ScopeNode(
            kind=NodeKind.ROOT, children=(node(cond_a, first), node(cond_b, second))))

    tree_a = build(recs, [])
    tree_b = build(recs[5:], recs[:5])  # 5 of 162 leaves attached elsewhere
    value = pairwise_agreement(tree_a, tree_b)
    assert value == pytest.approx(0.9691, abs=0.0001)
    assert math.floor(value * 100) / 100 == 0.96  # printed as 0,96
    report(f"[PASS] criterion 2: agreement on the 162-leaf fixture is {value:.4f} "
           f"(prints as 0.96)")


# --------------------------------------------------------------------------
# Criterion 3: golden pipeline fixtures
# --------------------------------------------------------------------------

INTENDED_TRACES = {
    "r1_title": [(R1_TITLE,)],
    "r2_enum": [(R2_ENUM,)],
    "r3_detached": [(R3_DETACHED,)],
    "r4_integrated": [(R4_INTEGRATED,)],
    "e1_title_redundancy": [(R1_TITLE,), (R3_DETACHED, E1_TITLE_REDUNDANCY)],
    "e2_rupture": [(R3_DETACHED, E2_RUPTURE)],
    "e2_justification": [(R3_DETACHED, E2_RUPTURE)],
    "e3_anaphora": [(R3_DETACHED, E3_ANAPHORA)],
    "clip_nesting": [(R2_ENUM,), (R3_DETACHED, E3_ANAPHORA, CLIP_NESTING)],
}
JUSTIFICATION_FIXTURES = {"e2_justification"}


def test_criterion_3_golden_fixtures(lexicon):
    assert sorted(INTENDED_TRACES) == GOLDEN_NAMES
    started = time.perf_counter()
    for name in GOLDEN_NAMES:
        result = run_pipeline(golden_text(name), name, lexicon)
        assert result.xml == golden_xml(name), f"{name}: output differs from expected XML"
        traces = sorted(n.frame.rule_ids() for n in result.tree.conditions())
        assert traces == sorted(INTENDED_TRACES[name]), f"{name}: unexpected rule trace"
        has_justification = any(n.kind is NodeKind.JUSTIFICATION
                                for n in result.tree.root.walk())
        assert has_justification == (name in JUSTIFICATION_FIXTURES)
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    report(f"[PASS] criterion 3: {len(GOLDEN_NAMES)} golden fixtures byte-identical "
           f"with intended rule traces ({elapsed:.3f}s)")


# --------------------------------------------------------------------------
# Criterion 4: default-rule bounds on 1000 random documents
# --------------------------------------------------------------------------

def test_criterion_4_default_rule_bounds(lexicon):
    rng = random.Random(2024)
    started = time.perf_counter()
    for _ in range(1000):
        result = run_pipeline(random_guideline(rng), "prop", lexicon)
        doc, tree = result.doc, result.tree
        for node in tree.conditions():
            ids = node.frame.rule_ids()
            block_index, sentence_index = enclosing_unit(doc, node.segment.span.start)
            if ids == (R4_INTEGRATED,):
                assert node.frame.scope.end == \
                    doc.blocks[block_index].sentences[sentence_index].end
            if ids == (R3_DETACHED,):
                assert node.frame.scope.end == doc.blocks[block_index].span.end
            if ids[0] == R2_ENUM:
                group = doc.enum_group_of(block_index)
                assert node.frame.scope.end == doc.blocks[group.items[-1]].span.end
        scopes = [n.frame.scope for n in tree.conditions()]
        for i, a in enumerate(scopes):
            for b in scopes[i + 1:]:
                assert (not a.overlaps(b)) or a.contains(b) or b.contains(a)
        rec_ids = sorted(s.id for s in result.segments
                         if s.kind is SegmentKind.RECOMMENDATION)
        leaf_ids = sorted(n.segment.id for n in tree.recommendations())
        assert leaf_ids == rec_ids
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    report(f"[PASS] criterion 4: bounds, nesting and attachment totality hold on 1000 "
           f"random documents ({elapsed:.1f}s)")


# --------------------------------------------------------------------------
# Criterion 5: round-trip on 1000 random trees
# --------------------------------------------------------------------------

def test_criterion_5_round_trip(lexicon):
    rng = random.Random(4096)
    started = time.perf_counter()
    for _ in range(1000):
        result = run_pipeline(random_guideline(rng), "rt", lexicon)
        assert parse(result.xml) == result.tree
        assert emit(result.tree, result.doc) == result.xml  # byte-stable re-emit
        assert emit(parse(result.xml), result.doc) == result.xml
    elapsed = time.perf_counter() - started
    report(f"[PASS] criterion 5: parse(emit(t)) == t and canonical emit byte-stable on "
           f"1000 random trees ({elapsed:.1f}s)")


# --------------------------------------------------------------------------
# Criterion 6: metric identities
# --------------------------------------------------------------------------

def test_criterion_6_metric_identities_self_evaluation(lexicon):
    text = ("# Diabète\n\nEn cas de fièvre, il faut boire. Un repos est nécessaire.\n\n"
            "Il est recommandé de surveiller.")
    result = run_pipeline(text, "self", lexicon)
    doc = parse_document(text, "self")
    rep = evaluate(result.tree, result.tree, doc)
    assert rep.conditions.recall == rep.conditions.precision == 1.0
    assert rep.recommendations.recall == rep.recommendations.precision == 1.0
    assert rep.attachment_accuracy == rep.agreement == rep.kappa == 1.0
    report("[PASS] criterion 6a: self-evaluation yields all ones")


def test_criterion_6_metric_identities_kappa_worked_example():
    value = cohen_kappa(["C", "C", "R", "N"], ["C", "R", "R", "N"])
    status = "PASS" if value == pytest.approx(0.6, abs=1e-9) else "FAIL"
    report(f"[{status}] criterion 6b: kappa on the worked example is {value:.6f} "
           f"(required: 0.600000 exactly; standard formula gives 7/11 = 0.636364)")
    assert value == pytest.approx(0.6, abs=1e-9), (
        "kappa([C,C,R,N],[C,R,R,N]) is required to equal 0.6 exactly, but 0.6 "
        "presumes p_e = 0.375 (one annotator's marginals squared); the standard "
        "coefficient uses p_e = sum of cross-annotator marginal products = 0.3125 "
        "and yields 7/11 = 0.636364 (confirmed by hand and by scikit-learn). "
        "Implemented faithfully as the standard coefficient; this check is "
        "expected to fail. See README.")


def test_criterion_6_metric_identities_f_measure():
    rng = random.Random(72)
    for _ in range(1000):
        present = rng.randint(1, 400)
        found = rng.randint(0, present)
        correct = rng.randint(0, present)
        recall, precision, f = prf_from_counts(present, found, correct)
        if recall and precision:
            assert f == pytest.approx(2 * recall * precision / (recall + precision))
            assert min(recall, precision) - 1e-12 <= f <= max(recall, precision) + 1e-12
        else:
            assert f == 0.0
    report("[PASS] criterion 6c: F is the harmonic mean and lies between R and P "
           "on 1000 random count tuples")


# --------------------------------------------------------------------------
# Criterion 7: self-consistency oracle over the golden fixtures
# --------------------------------------------------------------------------

def test_criterion_7_self_consistency(lexicon):
    for name in GOLDEN_NAMES:
        text = golden_text(name)
        result = run_pipeline(text, name, lexicon)
        gold_tree = parse(golden_xml(name))
        doc = parse_document(text, name)
        rep = evaluate(result.tree, gold_tree, doc)
        assert rep.conditions.recall == rep.conditions.precision == 1.0 or \
            rep.conditions.present == 0
        assert rep.recommendations.recall == rep.recommendations.precision == 1.0
        assert rep.attachment_accuracy == 1.0 or rep.attachment_pairs_gold == 0
    report(f"[PASS] criterion 7: run_eval(system, own gold) scores 1.0 on all "
           f"{len(GOLDEN_NAMES)} fixtures")
