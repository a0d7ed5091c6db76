"""Meta-evaluation: checking a metric against human judgments.

Every check here reduces to one shape: a column of metric values per
(set_id, candidate_id), a column of mean human ratings, and then pooled
correlation plus per-set recommendation metrics. The quality, creativity,
and informativeness columns come straight from a score report; n-gram
baseline columns are derived from candidate texts and reference similes,
min-max normalized within each set because their raw magnitudes are not
comparable across sets.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .baselines import bleu_n, rouge_l, rouge_n
from .index import ReferenceIndex
from .ranking import RankingTask, hr_at_k, mrr, ndcg_at_k
from .ratings import RatingsDataset
from .scoring import CandidateScore, minmax_normalize, relevance
from .similes import SimileSentence
from .stats import CorrelationResult, pearson, spearman

METRIC_FOR_PERSPECTIVE = {
    "quality": "Q",
    "creativity": "C",
    "informativeness": "I",
}

Key = tuple[str, str]


@dataclass(frozen=True)
class ColumnReport:
    """Correlation and ranking results for one metric column."""

    perspective: str
    metric_name: str
    pearson: CorrelationResult
    spearman: CorrelationResult
    n_candidates: int
    hr: dict[int, float]
    ndcg: dict[int, float]
    mrr: float | None
    n_ranking_sets: int
    degenerate_sets: int


def report_column(rows: Sequence[CandidateScore], perspective: str) -> dict[Key, float]:
    """Metric values per candidate for one perspective, invalid rows skipped."""
    if perspective not in METRIC_FOR_PERSPECTIVE:
        raise ValueError(f"unknown perspective {perspective!r}")
    attr = {
        "quality": "quality",
        "creativity": "creativity",
        "informativeness": "informativeness",
    }[perspective]
    column: dict[Key, float] = {}
    for row in rows:
        value = getattr(row, attr)
        if row.valid and value is not None:
            column[(row.set_id, row.candidate_id)] = float(value)
    return column


def evaluate_column(
    column: Mapping[Key, float],
    ratings: RatingsDataset,
    perspective: str,
    metric_name: str,
    ks: Sequence[int] = (1, 2, 3),
    min_candidates: int = 3,
) -> ColumnReport:
    """Pooled correlations plus per-set ranking metrics for one column.

    Only candidates present in both the column and the ratings count.
    Sets contribute to the ranking metrics when at least min_candidates of
    their candidates survive the pairing; sets whose human means are all
    equal still count (their NDCG is 1 by convention) but are tallied as
    degenerate.
    """
    means = ratings.mean_scores(perspective)
    paired = [
        (key, column[key], means[key])
        for key in ratings.candidates()
        if key in column and key in means
    ]
    if len(paired) < 3:
        raise ValueError(
            f"need at least 3 paired candidates, got {len(paired)}"
        )
    metric_values = [m for _, m, _ in paired]
    human_values = [h for _, _, h in paired]
    pearson_result = pearson(metric_values, human_values)
    spearman_result = spearman(metric_values, human_values)

    by_set: dict[str, list[tuple[float, float]]] = {}
    for (set_id, _), metric_value, human in paired:
        by_set.setdefault(set_id, []).append((metric_value, human))
    tasks = []
    degenerate = 0
    for set_id, pairs in by_set.items():
        if len(pairs) < min_candidates:
            continue
        human_gains = tuple(h for _, h in pairs)
        if len(set(human_gains)) == 1:
            degenerate += 1
        tasks.append(
            RankingTask(human=human_gains, metric=tuple(m for m, _ in pairs))
        )
    hr = {k: hr_at_k(tasks, k) for k in ks} if tasks else {}
    ndcg = {k: ndcg_at_k(tasks, k) for k in ks} if tasks else {}
    return ColumnReport(
        perspective=perspective,
        metric_name=metric_name,
        pearson=pearson_result,
        spearman=spearman_result,
        n_candidates=len(paired),
        hr=hr,
        ndcg=ndcg,
        mrr=mrr(tasks) if tasks else None,
        n_ranking_sets=len(tasks),
        degenerate_sets=degenerate,
    )


def evaluate_report(
    rows: Sequence[CandidateScore],
    ratings: RatingsDataset,
    perspectives: Sequence[str] = ("quality", "creativity", "informativeness"),
    ks: Sequence[int] = (1, 2, 3),
    min_candidates: int = 3,
) -> list[ColumnReport]:
    """Evaluate each requested perspective's metric column."""
    reports = []
    for perspective in perspectives:
        column = report_column(rows, perspective)
        reports.append(
            evaluate_column(
                column,
                ratings,
                perspective,
                METRIC_FOR_PERSPECTIVE[perspective],
                ks=ks,
                min_candidates=min_candidates,
            )
        )
    return reports


# ---------------------------------------------------------------------------
# N-gram baseline columns


@dataclass(frozen=True)
class BaselineSet:
    """Texts a baseline needs for one candidate set."""

    set_id: str
    references: tuple[str, ...]
    candidates: tuple[tuple[str, str], ...]  # (candidate_id, text)

    def __post_init__(self) -> None:
        object.__setattr__(self, "references", tuple(self.references))
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if not self.references:
            raise ValueError("a baseline set needs at least one reference")
        if not self.candidates:
            raise ValueError("a baseline set needs at least one candidate")


BASELINE_KINDS = ("bleu_2", "bleu_4", "rouge_1", "rouge_2", "rouge_l")


def baseline_column(sets: Sequence[BaselineSet], kind: str) -> dict[Key, float]:
    """Per-candidate baseline scores, min-max normalized within each set."""
    if kind not in BASELINE_KINDS:
        raise ValueError(f"unknown baseline {kind!r}")
    column: dict[Key, float] = {}
    for group in sets:
        raw = [
            _baseline_score(text, group.references, kind)
            for _, text in group.candidates
        ]
        for (candidate_id, _), value in zip(group.candidates, minmax_normalize(raw)):
            column[(group.set_id, candidate_id)] = value
    return column


def _baseline_score(text: str, references: tuple[str, ...], kind: str) -> float:
    if kind == "bleu_2":
        return bleu_n(text, references, 2)
    if kind == "bleu_4":
        return bleu_n(text, references, 4)
    if kind == "rouge_1":
        return rouge_n(text, references, 1)
    if kind == "rouge_2":
        return rouge_n(text, references, 2)
    return rouge_l(text, references)


# ---------------------------------------------------------------------------
# Reference corpus size sweep


@dataclass(frozen=True)
class SweepPoint:
    fraction: float
    n_records: int
    rho: float
    p_value: float
    degenerate: bool  # no variance at this size; rho pinned to 0


def relevance_size_sweep(
    corpus: Sequence[SimileSentence],
    probes: Sequence[SimileSentence],
    truth: Sequence[float],
    fractions: Sequence[float] = (0.01, 0.1, 1.0),
    seed: int = 0,
) -> list[SweepPoint]:
    """Spearman between approximate relevance and a ground ranking as the
    reference corpus grows.

    One seeded shuffle drives every point, so smaller samples are prefixes
    of larger ones and the only moving part is corpus size.
    """
    if len(probes) != len(truth):
        raise ValueError("need one truth value per probe")
    if not corpus:
        raise ValueError("corpus must be non-empty")
    for fraction in fractions:
        if not 0.0 < fraction <= 1.0:
            raise ValueError(f"fractions must be in (0, 1], got {fraction}")
    order = list(range(len(corpus)))
    random.Random(seed).shuffle(order)
    points = []
    for fraction in sorted(fractions):
        n = max(1, math.floor(fraction * len(corpus)))
        sample = [corpus[i] for i in order[:n]]
        index = ReferenceIndex.build_from_corpus(sample)
        scores = [relevance(p, index, mode="approx")[0] for p in probes]
        try:
            rho = spearman(scores, list(truth))
            points.append(
                SweepPoint(
                    fraction=fraction,
                    n_records=n,
                    rho=rho.coefficient,
                    p_value=rho.p_value,
                    degenerate=False,
                )
            )
        except ValueError:
            points.append(
                SweepPoint(
                    fraction=fraction, n_records=n, rho=0.0, p_value=1.0, degenerate=True
                )
            )
    return points
