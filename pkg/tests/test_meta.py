import math

import pytest

from hauser.index import ReferenceIndex
from hauser.meta import (
    BASELINE_KINDS,
    BaselineSet,
    baseline_column,
    evaluate_column,
    evaluate_report,
    relevance_size_sweep,
    report_column,
)
from hauser.ratings import Rating, RatingsDataset
from hauser.scoring import CandidateScore, relevance
from hauser.similes import extract_components
from hauser.stats import pearson, spearman


def make_row(set_id, candidate_id, quality=None, creativity=None, informativeness=None, valid=True):
    if not valid:
        return CandidateScore(set_id, candidate_id, None, None, None, flags=("invalid",))
    return CandidateScore(
        set_id,
        candidate_id,
        relevance=0.0,
        logical=0.5,
        sentiment=0.0,
        relevance_n=0.5,
        logical_n=0.5,
        sentiment_n=0.5,
        quality=quality if quality is not None else 0.5,
        creativity=creativity if creativity is not None else 0.0,
        informativeness=informativeness if informativeness is not None else 1.0,
    )


def make_ratings(entries):
    # entries: (set_id, candidate_id, score) from a single rater, quality only
    rows = []
    for set_id, candidate_id, score in entries:
        for perspective in ("quality", "creativity", "informativeness"):
            rows.append(Rating(set_id, candidate_id, "r1", perspective, score, False))
    return RatingsDataset(rows)


def test_report_column_keeps_valid_rows_only():
    rows = [
        make_row("s1", "a", quality=0.7),
        make_row("s1", "b", valid=False),
        make_row("s1", "c", quality=0.2),
    ]
    column = report_column(rows, "quality")
    assert column == {("s1", "a"): 0.7, ("s1", "c"): 0.2}


def test_report_column_picks_the_right_attribute():
    rows = [make_row("s1", "a", quality=0.7, creativity=-1.5, informativeness=4.0)]
    assert report_column(rows, "creativity")[("s1", "a")] == -1.5
    assert report_column(rows, "informativeness")[("s1", "a")] == 4.0
    with pytest.raises(ValueError):
        report_column(rows, "fluency")


def test_evaluate_column_hand_worked_two_sets():
    # Set A: metric tracks the humans exactly. Set B: metric is reversed.
    column = {
        ("A", "a1"): 0.1,
        ("A", "a2"): 0.2,
        ("A", "a3"): 0.3,
        ("B", "b1"): 0.1,
        ("B", "b2"): 0.2,
        ("B", "b3"): 0.3,
    }
    ratings = make_ratings(
        [
            ("A", "a1", 1),
            ("A", "a2", 2),
            ("A", "a3", 3),
            ("B", "b1", 3),
            ("B", "b2", 2),
            ("B", "b3", 1),
        ]
    )
    report = evaluate_column(column, ratings, "quality", "Q", ks=(1, 3))
    assert report.n_candidates == 6
    assert report.n_ranking_sets == 2
    assert report.degenerate_sets == 0
    # The two sets cancel exactly.
    assert report.pearson.coefficient == pytest.approx(0.0, abs=1e-12)
    assert report.spearman.coefficient == pytest.approx(0.0, abs=1e-12)
    # Set A hits at 1; set B's best human sits at metric rank 3.
    assert report.hr[1] == pytest.approx(0.5)
    assert report.hr[3] == pytest.approx(1.0)
    assert report.mrr == pytest.approx((1.0 + 1.0 / 3.0) / 2.0)
    # Set A is a perfect ranking; set B is the fully reversed one.
    reversed_dcg = 1.0 + 2.0 / math.log2(3.0) + 3.0 / 2.0
    ideal_dcg = 3.0 + 2.0 / math.log2(3.0) + 1.0 / 2.0
    assert report.ndcg[3] == pytest.approx((1.0 + reversed_dcg / ideal_dcg) / 2.0)


def test_evaluate_column_small_sets_correlate_but_do_not_rank():
    column = {
        ("A", "a1"): 0.1,
        ("A", "a2"): 0.2,
        ("A", "a3"): 0.3,
        ("B", "b1"): 0.4,
        ("B", "b2"): 0.9,
    }
    ratings = make_ratings(
        [
            ("A", "a1", 1),
            ("A", "a2", 2),
            ("A", "a3", 3),
            ("B", "b1", 2),
            ("B", "b2", 5),
        ]
    )
    report = evaluate_column(column, ratings, "quality", "Q")
    assert report.n_candidates == 5
    assert report.n_ranking_sets == 1
    metric = [0.1, 0.2, 0.3, 0.4, 0.9]
    human = [1.0, 2.0, 3.0, 2.0, 5.0]
    assert report.pearson.coefficient == pytest.approx(
        pearson(metric, human).coefficient
    )
    assert report.spearman.coefficient == pytest.approx(
        spearman(metric, human).coefficient
    )


def test_evaluate_column_skips_candidates_missing_from_either_side():
    column = {
        ("A", "a1"): 0.1,
        ("A", "a2"): 0.2,
        ("A", "a3"): 0.3,
        ("A", "ghost"): 0.9,  # never rated
    }
    ratings = make_ratings(
        [
            ("A", "a1", 1),
            ("A", "a2", 2),
            ("A", "a3", 3),
            ("A", "a4", 5),  # rated but absent from the report
        ]
    )
    report = evaluate_column(column, ratings, "quality", "Q")
    assert report.n_candidates == 3


def test_evaluate_column_counts_degenerate_sets():
    column = {
        ("A", "a1"): 0.1,
        ("A", "a2"): 0.2,
        ("A", "a3"): 0.3,
        ("B", "b1"): 0.3,
        ("B", "b2"): 0.2,
        ("B", "b3"): 0.1,
    }
    ratings = make_ratings(
        [
            ("A", "a1", 1),
            ("A", "a2", 2),
            ("A", "a3", 3),
            ("B", "b1", 4),
            ("B", "b2", 4),
            ("B", "b3", 4),
        ]
    )
    report = evaluate_column(column, ratings, "quality", "Q", ks=(3,))
    assert report.degenerate_sets == 1
    assert report.n_ranking_sets == 2
    # The flat set scores a perfect NDCG by convention, set A is perfect too.
    assert report.ndcg[3] == pytest.approx(1.0)


def test_evaluate_column_needs_three_pairs():
    column = {("A", "a1"): 0.1, ("A", "a2"): 0.2}
    ratings = make_ratings([("A", "a1", 1), ("A", "a2", 2)])
    with pytest.raises(ValueError):
        evaluate_column(column, ratings, "quality", "Q")


def test_evaluate_report_covers_all_three_perspectives():
    rows = [
        make_row("A", "a1", quality=0.1, creativity=-2.0, informativeness=2.0),
        make_row("A", "a2", quality=0.2, creativity=-1.0, informativeness=4.0),
        make_row("A", "a3", quality=0.3, creativity=-3.0, informativeness=3.0),
    ]
    ratings = make_ratings([("A", "a1", 1), ("A", "a2", 2), ("A", "a3", 3)])
    reports = evaluate_report(rows, ratings)
    assert [r.metric_name for r in reports] == ["Q", "C", "I"]
    assert [r.perspective for r in reports] == [
        "quality",
        "creativity",
        "informativeness",
    ]
    assert reports[0].spearman.coefficient == pytest.approx(1.0)


def test_baseline_column_bleu_hand_values():
    group = BaselineSet(
        set_id="A",
        references=("the sun",),
        candidates=(("c1", "the sun"), ("c2", "the moon")),
    )
    column = baseline_column([group], "bleu_2")
    # c1 reproduces the reference (BLEU 1), c2 has no matching bigram (BLEU 0),
    # and min-max over the set maps those to 1 and 0 again.
    assert column[("A", "c1")] == pytest.approx(1.0)
    assert column[("A", "c2")] == pytest.approx(0.0)


def test_baseline_column_normalizes_within_each_set():
    groups = [
        BaselineSet("A", ("a b c d",), (("c1", "a b c d"), ("c2", "a b x y"))),
        BaselineSet("B", ("p q",), (("c1", "p q"), ("c2", "p q"))),
    ]
    column = baseline_column(groups, "rouge_1")
    # Set A: recalls 1.0 and 0.5 normalize to 1 and 0.
    assert column[("A", "c1")] == pytest.approx(1.0)
    assert column[("A", "c2")] == pytest.approx(0.0)
    # Set B is all-equal, so both candidates sit at the midpoint.
    assert column[("B", "c1")] == pytest.approx(0.5)
    assert column[("B", "c2")] == pytest.approx(0.5)


def test_baseline_column_rejects_unknown_kind():
    group = BaselineSet("A", ("x",), (("c1", "x"),))
    with pytest.raises(ValueError):
        baseline_column([group], "meteor")
    for kind in BASELINE_KINDS:
        baseline_column([group], kind)


def test_baseline_set_validation():
    with pytest.raises(ValueError):
        BaselineSet("A", (), (("c1", "x"),))
    with pytest.raises(ValueError):
        BaselineSet("A", ("x",), ())


def sweep_fixture():
    corpus_texts = [
        "The dog ran like the wind.",
        "The cat ran like the wind.",
        "The dog ran like a deer.",
        "The dog ran like the wind.",
        "The fox ran like the wind.",
        "The dog ran like a machine.",
        "The dog ran like the wind.",
        "The dog ran like a deer.",
        "The horse ran like the wind.",
        "The dog ran like the wind.",
    ]
    corpus = [extract_components(t) for t in corpus_texts]
    probes = [
        extract_components("The dog ran like the wind."),
        extract_components("The dog ran like a deer."),
        extract_components("The dog ran like a machine."),
    ]
    truth = [3.0, 2.0, 1.0]
    return corpus, probes, truth


def test_sweep_full_fraction_matches_direct_computation():
    corpus, probes, truth = sweep_fixture()
    points = relevance_size_sweep(corpus, probes, truth, fractions=(1.0,), seed=7)
    assert len(points) == 1
    point = points[0]
    assert point.fraction == 1.0
    assert point.n_records == len(corpus)
    assert not point.degenerate
    index = ReferenceIndex.build_from_corpus(corpus)
    scores = [relevance(p, index, mode="approx")[0] for p in probes]
    assert point.rho == pytest.approx(spearman(scores, truth).coefficient)
    # The planted corpus ranks the probes exactly as the truth does.
    assert point.rho == pytest.approx(1.0)


def test_sweep_is_deterministic_and_sorted_by_fraction():
    corpus, probes, truth = sweep_fixture()
    a = relevance_size_sweep(corpus, probes, truth, fractions=(1.0, 0.3), seed=3)
    b = relevance_size_sweep(corpus, probes, truth, fractions=(0.3, 1.0), seed=3)
    assert a == b
    assert [p.fraction for p in a] == [0.3, 1.0]
    assert [p.n_records for p in a] == [3, 10]


def test_sweep_flags_degenerate_points_instead_of_failing():
    corpus, _, _ = sweep_fixture()
    # Probes no sample can support: every score is 0, so rho is undefined.
    probes = [
        extract_components("The team fought like lions."),
        extract_components("The team fought like tigers."),
    ]
    points = relevance_size_sweep(corpus, probes, [1.0, 2.0], fractions=(0.1,), seed=0)
    assert points[0].degenerate
    assert points[0].rho == 0.0
    assert points[0].n_records == 1


def test_sweep_validation():
    corpus, probes, truth = sweep_fixture()
    with pytest.raises(ValueError):
        relevance_size_sweep(corpus, probes, truth[:-1])
    with pytest.raises(ValueError):
        relevance_size_sweep([], probes, truth)
    with pytest.raises(ValueError):
        relevance_size_sweep(corpus, probes, truth, fractions=(0.0,))
    with pytest.raises(ValueError):
        relevance_size_sweep(corpus, probes, truth, fractions=(1.5,))
