"""Recommendation-style ranking metrics over candidate sets.

Each task pairs the human scores (relevance gains) with the metric scores
whose ranking is being judged. Metric order is descending with ties broken
by input position, so results are reproducible for any input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class RankingTask:
    """One candidate set: human gains and the metric's scores, aligned."""

    human: tuple[float, ...]
    metric: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "human", tuple(float(v) for v in self.human))
        object.__setattr__(self, "metric", tuple(float(v) for v in self.metric))
        if len(self.human) != len(self.metric):
            raise ValueError("human and metric scores must align")
        if not self.human:
            raise ValueError("a ranking task needs at least one candidate")
        if any(v < 0 for v in self.human):
            raise ValueError("human gains must be non-negative")
        for v in self.human + self.metric:
            if not math.isfinite(v):
                raise ValueError("scores must be finite")


def metric_order(task: RankingTask) -> list[int]:
    """Candidate indices, best metric score first, ties by input position."""
    return sorted(range(len(task.metric)), key=lambda i: (-task.metric[i], i))


def _best_indices(task: RankingTask) -> set[int]:
    top = max(task.human)
    return {i for i, v in enumerate(task.human) if v == top}


def hit_rate_single(task: RankingTask, k: int) -> float:
    """1.0 when any human-best candidate sits in the metric's top k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    best = _best_indices(task)
    top_k = metric_order(task)[:k]
    return 1.0 if best.intersection(top_k) else 0.0


def reciprocal_rank_single(task: RankingTask) -> float:
    """1 / rank of the first human-best candidate in metric order."""
    best = _best_indices(task)
    for position, idx in enumerate(metric_order(task), start=1):
        if idx in best:
            return 1.0 / position
    raise AssertionError("unreachable: some candidate is always human-best")


def dcg(gains_in_rank_order: Sequence[float], k: int) -> float:
    """Discounted cumulative gain of the first k gains as ordered."""
    return math.fsum(
        gain / math.log2(position + 1)
        for position, gain in enumerate(gains_in_rank_order[:k], start=1)
    )


def ndcg_single(task: RankingTask, k: int) -> float:
    """DCG of the metric's ordering against the ideal ordering.

    When every human gain is equal (including all zero) any ordering is
    ideal, and the task contributes 1.0.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    ideal = dcg(sorted(task.human, reverse=True), k)
    if ideal == 0.0:
        return 1.0
    ordered_gains = [task.human[i] for i in metric_order(task)]
    return dcg(ordered_gains, k) / ideal


def hr_at_k(tasks: Sequence[RankingTask], k: int) -> float:
    """Mean hit rate at k over tasks."""
    _check_tasks(tasks)
    return math.fsum(hit_rate_single(t, k) for t in tasks) / len(tasks)


def ndcg_at_k(tasks: Sequence[RankingTask], k: int) -> float:
    """Mean normalized DCG at k over tasks."""
    _check_tasks(tasks)
    return math.fsum(ndcg_single(t, k) for t in tasks) / len(tasks)


def mrr(tasks: Sequence[RankingTask]) -> float:
    """Mean reciprocal rank of the human-best candidate."""
    _check_tasks(tasks)
    return math.fsum(reciprocal_rank_single(t) for t in tasks) / len(tasks)


def _check_tasks(tasks: Sequence[RankingTask]) -> None:
    if not tasks:
        raise ValueError("need at least one ranking task")
