"""Tests for segment matching, table arithmetic, attachment metrics,
agreement and kappa."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gemframe.docmodel import Span, parse_document
from gemframe.evaluation import (
    attachment_accuracy,
    attachment_pairs,
    cohen_kappa,
    evaluate,
    match_segments,
    pairwise_agreement,
    prf_from_counts,
    segment_prf,
    tree_segments,
)
from gemframe.pipeline import run_pipeline
from gemframe.scope import Frame, NodeKind, ScopeNode, ScopeTree, TraceEntry
from gemframe.segmenter import Position, SegmentKind, make_segment


def seg(kind, start, end):
    return make_segment(kind, Span(start, end),
                        Position.DETACHED if kind is SegmentKind.CONDITION
                        else Position.NOT_APPLICABLE)


def flat_tree(doc_id, parents):
    """Build a tree from {condition key: [recommendation spans]}; key None
    collects root-level recommendations.  Conditions get adjacent frames."""
    children = []
    for cond_seg, recs in parents:
        leaves = tuple(ScopeNode(kind=NodeKind.RECOMMENDATION, segment=r, span=r.span)
                       for r in recs)
        if cond_seg is None:
            children.extend(leaves)
        else:
            frame = Frame(cond_seg.id,
                          Span(cond_seg.span.end,
                               max([r.span.end for r in recs] + [cond_seg.span.end])),
                          (TraceEntry("R3_detached_paragraph"),))
            children.append(ScopeNode(kind=NodeKind.CONDITION, segment=cond_seg,
                                      span=cond_seg.span, frame=frame, children=leaves))
    return ScopeTree(doc_id=doc_id, root=ScopeNode(kind=NodeKind.ROOT,
                                                   children=tuple(children)))


class TestMatchSegments:
    def test_identical_lists_fully_matched(self):
        segments = [seg(SegmentKind.CONDITION, 0, 10), seg(SegmentKind.RECOMMENDATION, 12, 30)]
        for mode in ("strict", "lenient"):
            assert len(match_segments(segments, segments, mode)) == 2

    def test_whitespace_trim_matches_strict(self):
        source = "abcdefgh  "
        system = [seg(SegmentKind.RECOMMENDATION, 0, 8)]
        gold = [seg(SegmentKind.RECOMMENDATION, 0, 10)]  # trailing spaces
        assert match_segments(system, gold, "strict", source) == [(0, 0)]
        assert match_segments(system, gold, "strict", None) == []

    def test_sixty_percent_overlap_matches_lenient_only(self):
        # system covers 60% of the longer gold span
        system = [seg(SegmentKind.RECOMMENDATION, 0, 60)]
        gold = [seg(SegmentKind.RECOMMENDATION, 0, 100)]
        assert match_segments(system, gold, "strict") == []
        assert match_segments(system, gold, "lenient") == [(0, 0)]

    def test_under_half_overlap_rejected(self):
        system = [seg(SegmentKind.RECOMMENDATION, 0, 40)]
        gold = [seg(SegmentKind.RECOMMENDATION, 0, 100)]
        assert match_segments(system, gold, "lenient") == []

    def test_kind_mismatch_never_matches(self):
        system = [seg(SegmentKind.CONDITION, 0, 10)]
        gold = [seg(SegmentKind.RECOMMENDATION, 0, 10)]
        assert match_segments(system, gold, "strict") == []

    def test_one_to_one(self):
        system = [seg(SegmentKind.RECOMMENDATION, 0, 10),
                  seg(SegmentKind.RECOMMENDATION, 0, 11)]
        gold = [seg(SegmentKind.RECOMMENDATION, 0, 10)]
        assert len(match_segments(system, gold, "lenient")) == 1


class TestTableArithmetic:
    # printed counts and ratios of the four published evaluation tables
    ROWS = [
        ("cancer-conditions", 73, 60, 70, 82.19, 95.89),
        ("cancer-recommendations", 96, 88, 94, 91.66, 97.91),
        ("chimio-conditions", 70, 61, 65, 87.14, 92.85),
        ("chimio-recommendations", 107, 96, 104, 89.71, 97.19),
        ("denutrition-conditions", 75, 62, 73, 82.66, 97.33),
        ("denutrition-recommendations", 107, 100, 106, 93.45, 99.06),
        ("aomi-conditions", 60, 45, 59, 75.00, 98.33),
        ("aomi-recommendations", 91, 65, 88, 71.42, 96.70),
    ]

    @pytest.mark.parametrize("name,present,found,correct,rappel,precision", ROWS)
    def test_printed_ratios(self, name, present, found, correct, rappel, precision):
        recall, prec, _ = prf_from_counts(present, found, correct)
        assert 100 * recall == pytest.approx(rappel, abs=0.01)
        assert 100 * prec == pytest.approx(precision, abs=0.01)

    def test_f_is_harmonic_mean(self):
        # 60/73 and 70/73: F = 2RP/(R+P) = 88.52 (not the printed 88.85)
        recall, precision, f = prf_from_counts(73, 60, 70)
        expected = 2 * recall * precision / (recall + precision)
        assert f == expected
        assert 100 * f == pytest.approx(88.52, abs=0.01)

    def test_zero_over_zero_is_zero(self):
        assert prf_from_counts(0, 0, 0) == (0.0, 0.0, 0.0)


class TestAttachment:
    def test_single_pair(self):
        c1 = seg(SegmentKind.CONDITION, 0, 5)
        r1 = seg(SegmentKind.RECOMMENDATION, 6, 10)
        tree = flat_tree("t", [(c1, [r1])])
        assert attachment_pairs(tree) == {(c1.id, r1.id)}

    def test_transitive_pairs(self):
        c1 = seg(SegmentKind.CONDITION, 0, 5)
        c2 = seg(SegmentKind.CONDITION, 6, 10)
        r1 = seg(SegmentKind.RECOMMENDATION, 11, 20)
        inner = ScopeNode(kind=NodeKind.CONDITION, segment=c2, span=c2.span,
                          frame=Frame(c2.id, Span(10, 20),
                                      (TraceEntry("R3_detached_paragraph"),)),
                          children=(ScopeNode(kind=NodeKind.RECOMMENDATION,
                                              segment=r1, span=r1.span),))
        outer = ScopeNode(kind=NodeKind.CONDITION, segment=c1, span=c1.span,
                          frame=Frame(c1.id, Span(5, 20),
                                      (TraceEntry("R3_detached_paragraph"),)),
                          children=(inner,))
        tree = ScopeTree(doc_id="t", root=ScopeNode(kind=NodeKind.ROOT, children=(outer,)))
        assert attachment_pairs(tree) == {(c1.id, r1.id), (c2.id, r1.id)}

    def test_root_recommendation_contributes_nothing(self):
        r1 = seg(SegmentKind.RECOMMENDATION, 0, 10)
        tree = flat_tree("t", [(None, [r1])])
        assert attachment_pairs(tree) == set()

    def test_identical_trees_score_one(self, lexicon):
        result = run_pipeline("En cas de fièvre, il faut boire.", "t", lexicon)
        assert attachment_accuracy(result.tree, result.tree) == 1.0

    @pytest.mark.parametrize("gold_pairs,common,printed", [
        (169, 126, 74.55),
        (177, 136, 76.83),
        (182, 162, 89.01),
        (151, 107, 70.86),
    ])
    def test_printed_attachment_rows(self, gold_pairs, common, printed):
        cond = seg(SegmentKind.CONDITION, 0, 5)
        gold_recs = [seg(SegmentKind.RECOMMENDATION, 10 + 10 * i, 15 + 10 * i)
                     for i in range(gold_pairs)]
        gold = flat_tree("t", [(cond, gold_recs)])
        system = flat_tree("t", [(cond, gold_recs[:common]), (None, gold_recs[common:])])
        assert 100 * attachment_accuracy(system, gold) == pytest.approx(printed, abs=0.01)


class TestPairwiseAgreement:
    def _two_annotations(self, total=162, moved=5):
        c1 = seg(SegmentKind.CONDITION, 0, 5)
        c2 = seg(SegmentKind.CONDITION, 6, 9)
        recs = [seg(SegmentKind.RECOMMENDATION, 100 + 10 * i, 105 + 10 * i)
                for i in range(total)]
        tree_a = flat_tree("t", [(c1, recs), (c2, [])])
        tree_b = flat_tree("t", [(c1, recs[moved:]), (c2, recs[:moved])])
        return tree_a, tree_b

    def test_published_agreement_value(self):
        tree_a, tree_b = self._two_annotations(162, 5)
        value = pairwise_agreement(tree_a, tree_b)
        assert value == pytest.approx(157 / 162, abs=1e-9)
        assert value == pytest.approx(0.9691, abs=0.0001)

    def test_identical_trees(self):
        tree_a, _ = self._two_annotations()
        assert pairwise_agreement(tree_a, tree_a) == 1.0

    def test_fully_disjoint_attachments(self):
        tree_a, tree_b = self._two_annotations(10, 10)
        assert pairwise_agreement(tree_a, tree_b) == 0.0

    def test_symmetry(self):
        tree_a, tree_b = self._two_annotations(20, 7)
        assert pairwise_agreement(tree_a, tree_b) == pairwise_agreement(tree_b, tree_a)

    def test_unalignable_leaf_counts_as_disagreement(self):
        c1 = seg(SegmentKind.CONDITION, 0, 5)
        r1 = seg(SegmentKind.RECOMMENDATION, 10, 20)
        r2 = seg(SegmentKind.RECOMMENDATION, 30, 40)
        tree_a = flat_tree("t", [(c1, [r1, r2])])
        tree_b = flat_tree("t", [(c1, [r1])])
        assert pairwise_agreement(tree_a, tree_b) == 0.5


class TestCohenKappa:
    def test_identical_non_constant(self):
        assert cohen_kappa(["C", "R", "N", "C"], ["C", "R", "N", "C"]) == 1.0

    def test_worked_example_standard_formula(self):
        # hand computation: p_o = 3/4; marginals a = (.5, .25, .25),
        # b = (.25, .5, .25); p_e = .5*.25 + .25*.5 + .25*.25 = 0.3125;
        # kappa = (0.75 - 0.3125) / (1 - 0.3125) = 7/11
        value = cohen_kappa(["C", "C", "R", "N"], ["C", "R", "R", "N"])
        assert value == pytest.approx(7 / 11)

    def test_against_sklearn_oracle(self):
        from sklearn.metrics import cohen_kappa_score
        rng = random.Random(51)
        labels = ["C", "R", "N"]
        for _ in range(30):
            n = rng.randint(2, 60)
            a = [rng.choice(labels) for _ in range(n)]
            b = [rng.choice(labels) for _ in range(n)]
            if len(set(a)) == 1 and a == b:
                continue
            expected = cohen_kappa_score(a, b)
            assert cohen_kappa(a, b) == pytest.approx(expected, abs=1e-12)

    def test_independent_labelings_near_zero(self):
        rng = random.Random(53)
        a = [rng.choice("CRN") for _ in range(20000)]
        b = [rng.choice("CRN") for _ in range(20000)]
        assert abs(cohen_kappa(a, b)) < 0.02

    def test_symmetry(self):
        a = ["C", "C", "R", "N", "R"]
        b = ["C", "R", "R", "N", "N"]
        assert cohen_kappa(a, b) == pytest.approx(cohen_kappa(b, a))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            cohen_kappa([], [])

    def test_constant_identical(self):
        assert cohen_kappa(["C", "C"], ["C", "C"]) == 1.0


class TestSelfEvaluation:
    def test_all_ones(self, lexicon):
        text = ("# Diabète\n\nEn cas de fièvre, il faut boire. Un repos est nécessaire.\n\n"
                "Il est recommandé de surveiller.")
        result = run_pipeline(text, "self", lexicon)
        doc = parse_document(text, "self")
        report = evaluate(result.tree, result.tree, doc)
        assert report.conditions.recall == 1.0
        assert report.conditions.precision == 1.0
        assert report.recommendations.recall == 1.0
        assert report.recommendations.precision == 1.0
        assert report.attachment_accuracy == 1.0
        assert report.agreement == 1.0
        assert report.kappa == 1.0


class TestFMeasure:
    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 500), st.integers(0, 500), st.integers(0, 500))
    def test_bounds_and_harmonic_mean(self, present, found, correct):
        found = min(found, present)
        correct = min(correct, present)
        recall, precision, f = prf_from_counts(present, found, correct)
        if recall and precision:
            assert f == pytest.approx(2 * recall * precision / (recall + precision))
            assert min(recall, precision) - 1e-12 <= f <= max(recall, precision) + 1e-12
        else:
            assert f == 0.0


class TestPrfOnSegments:
    def test_missing_recommendation_lowers_recall(self, lexicon):
        result = run_pipeline(
            "Il faut boire.\n\nUn repos est nécessaire.\n\nIl est recommandé de dormir.",
            "m", lexicon)
        gold = tree_segments(result.tree)
        system = gold[:-1]
        scores = segment_prf(system, gold)
        assert scores[SegmentKind.RECOMMENDATION].present == 3
        assert scores[SegmentKind.RECOMMENDATION].found == 2
        assert scores[SegmentKind.RECOMMENDATION].recall == pytest.approx(2 / 3)
