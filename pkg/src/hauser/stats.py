"""Correlation statistics and inter-rater agreement.

Pearson and Spearman are computed from their definitions; the only borrowed
numerics is the Student-t distribution function behind the two-sided
p-value. p = 2 * P(T >= |t|) with t = r * sqrt((n-2) / (1 - r^2)) on n - 2
degrees of freedom, the usual large-sample approximation for both
coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from scipy.stats import t as _student_t


@dataclass(frozen=True)
class CorrelationResult:
    coefficient: float
    p_value: float
    n: int


def pearson(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Pearson's r with a two-sided t-approximated p-value."""
    x, y = _check_paired(x, y)
    n = len(x)
    mean_x = math.fsum(x) / n
    mean_y = math.fsum(y) / n
    dx = [v - mean_x for v in x]
    dy = [v - mean_y for v in y]
    ss_x = math.fsum(d * d for d in dx)
    ss_y = math.fsum(d * d for d in dy)
    if ss_x == 0.0 or ss_y == 0.0:
        raise ValueError("correlation is undefined for a zero-variance input")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(ss_x * ss_y)
    r = max(-1.0, min(1.0, r))
    return CorrelationResult(coefficient=r, p_value=_two_sided_p(r, n), n=n)


def spearman(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Spearman's rho: Pearson over average-tied ranks."""
    x, y = _check_paired(x, y)
    return pearson(rank_with_ties(x), rank_with_ties(y))


def rank_with_ties(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the average of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _two_sided_p(r: float, n: int) -> float:
    if abs(r) == 1.0:
        return 0.0
    t_stat = r * math.sqrt((n - 2) / (1.0 - r * r))
    return float(2.0 * _student_t.sf(abs(t_stat), n - 2))


def _check_paired(x: Sequence[float], y: Sequence[float]) -> tuple[list[float], list[float]]:
    if len(x) != len(y):
        raise ValueError(f"paired samples differ in length: {len(x)} vs {len(y)}")
    if len(x) < 3:
        raise ValueError(f"need at least 3 pairs, got {len(x)}")
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    for v in xs + ys:
        if not math.isfinite(v):
            raise ValueError("samples must be finite")
    return xs, ys


# ---------------------------------------------------------------------------
# Inter-rater agreement


@dataclass(frozen=True)
class AgreementResult:
    """Leave-one-out agreement: each rater against the mean of the others.

    per_rater maps rater id to (pearson, spearman). Raters whose scores, or
    whose peers' mean, carry no variance cannot be correlated; they are
    listed in excluded and ignored by the aggregates.
    """

    mean_pearson: float
    max_pearson: float
    mean_spearman: float
    max_spearman: float
    per_rater: dict[str, tuple[float, float]]
    excluded: tuple[str, ...]


def inter_rater_agreement(scores_by_rater: Mapping[str, Sequence[float]]) -> AgreementResult:
    raters = sorted(scores_by_rater)
    if len(raters) < 2:
        raise ValueError("agreement needs at least two raters")
    lengths = {len(scores_by_rater[r]) for r in raters}
    if len(lengths) != 1:
        raise ValueError("raters must score the same items")
    n_items = lengths.pop()
    if n_items < 3:
        raise ValueError("agreement needs at least 3 shared items")
    columns = {r: [float(v) for v in scores_by_rater[r]] for r in raters}
    per_rater: dict[str, tuple[float, float]] = {}
    excluded: list[str] = []
    for rater in raters:
        own = columns[rater]
        others = [columns[o] for o in raters if o != rater]
        peer_mean = [math.fsum(col[i] for col in others) / len(others) for i in range(n_items)]
        try:
            p = pearson(own, peer_mean).coefficient
            s = spearman(own, peer_mean).coefficient
        except ValueError:
            excluded.append(rater)
            continue
        per_rater[rater] = (p, s)
    if not per_rater:
        raise ValueError("no rater had enough variance to correlate")
    pearsons = [v[0] for v in per_rater.values()]
    spearmans = [v[1] for v in per_rater.values()]
    return AgreementResult(
        mean_pearson=math.fsum(pearsons) / len(pearsons),
        max_pearson=max(pearsons),
        mean_spearman=math.fsum(spearmans) / len(spearmans),
        max_spearman=max(spearmans),
        per_rater=per_rater,
        excluded=tuple(excluded),
    )
