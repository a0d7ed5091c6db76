"""Human rating data: CSV IO, quality filtering, and rater alignment.

A rating is one rater's 1-5 judgment of one candidate under one
perspective (quality, creativity, or informativeness), plus a
lacks_context flag the rater can set when the candidate cannot be judged
at all. Filtering removes candidates that are unratable or that split the
raters into opposite camps; both removals are recorded.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

PERSPECTIVES = ("quality", "creativity", "informativeness")
CSV_HEADER = ["set_id", "candidate_id", "rater_id", "perspective", "score", "lacks_context"]

LOW_SCORES = frozenset({1, 2})
HIGH_SCORES = frozenset({4, 5})


class RatingsFormatError(ValueError):
    """A ratings CSV row does not match the documented schema."""


@dataclass(frozen=True)
class Rating:
    set_id: str
    candidate_id: str
    rater_id: str
    perspective: str
    score: int
    lacks_context: bool = False

    def __post_init__(self) -> None:
        for name in ("set_id", "candidate_id", "rater_id"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")
        if self.perspective not in PERSPECTIVES:
            raise ValueError(
                f"perspective must be one of {PERSPECTIVES}, got {self.perspective!r}"
            )
        if not isinstance(self.score, int) or not 1 <= self.score <= 5:
            raise ValueError(f"score must be an int in 1..5, got {self.score!r}")


@dataclass(frozen=True)
class RemovedCandidate:
    set_id: str
    candidate_id: str
    reason: str  # "lacks_context" or "divided_ratings"


class RatingsDataset:
    """Immutable collection of ratings with the common lookups."""

    def __init__(self, ratings: Iterable[Rating]):
        self.ratings = tuple(ratings)
        seen = set()
        for r in self.ratings:
            key = (r.set_id, r.candidate_id, r.rater_id, r.perspective)
            if key in seen:
                raise ValueError(f"duplicate rating for {key}")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.ratings)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatingsDataset):
            return NotImplemented
        return self.ratings == other.ratings

    def candidates(self) -> list[tuple[str, str]]:
        """Distinct (set_id, candidate_id), in first-appearance order."""
        out: list[tuple[str, str]] = []
        seen = set()
        for r in self.ratings:
            key = (r.set_id, r.candidate_id)
            if key not in seen:
                seen.add(key)
                out.append(key)
        return out

    def candidates_of_set(self, set_id: str) -> list[str]:
        return [cid for sid, cid in self.candidates() if sid == set_id]

    def set_ids(self) -> list[str]:
        out: list[str] = []
        for sid, _ in self.candidates():
            if sid not in out:
                out.append(sid)
        return out

    def scores_for(self, set_id: str, candidate_id: str, perspective: str) -> list[int]:
        return [
            r.score
            for r in self.ratings
            if r.set_id == set_id
            and r.candidate_id == candidate_id
            and r.perspective == perspective
        ]

    def mean_scores(self, perspective: str) -> dict[tuple[str, str], float]:
        """Mean rating per candidate under one perspective."""
        sums: dict[tuple[str, str], list[int]] = {}
        for r in self.ratings:
            if r.perspective == perspective:
                sums.setdefault((r.set_id, r.candidate_id), []).append(r.score)
        return {key: math.fsum(vals) / len(vals) for key, vals in sums.items()}

    def rater_matrix(self, perspective: str) -> dict[str, list[float]]:
        """Aligned per-rater score columns over candidates every rater scored.

        Candidates missing any rater are dropped so the columns stay
        comparable; raises when no complete candidate remains.
        """
        raters = sorted({r.rater_id for r in self.ratings if r.perspective == perspective})
        if not raters:
            raise ValueError(f"no ratings under perspective {perspective!r}")
        cell: dict[tuple[str, str], dict[str, int]] = {}
        for r in self.ratings:
            if r.perspective == perspective:
                cell.setdefault((r.set_id, r.candidate_id), {})[r.rater_id] = r.score
        complete = [key for key in self.candidates() if len(cell.get(key, {})) == len(raters)]
        if not complete:
            raise ValueError("no candidate was scored by every rater")
        return {
            rater: [float(cell[key][rater]) for key in complete] for rater in raters
        }


# ---------------------------------------------------------------------------
# Filtering


def filter_ratings(dataset: RatingsDataset) -> tuple[RatingsDataset, list[RemovedCandidate]]:
    """Drop candidates that cannot be trusted for meta-evaluation.

    A candidate goes when (a) any rater flagged lacks_context, or (b) its
    quality scores land in both {1, 2} and {4, 5}: raters who disagree
    that strongly are answering different questions. All perspectives of a
    removed candidate are dropped. Running the filter again is a no-op.
    """
    flagged: set[tuple[str, str]] = set()
    quality_scores: dict[tuple[str, str], set[int]] = {}
    for r in dataset.ratings:
        key = (r.set_id, r.candidate_id)
        if r.lacks_context:
            flagged.add(key)
        if r.perspective == "quality":
            quality_scores.setdefault(key, set()).add(r.score)
    removed: list[RemovedCandidate] = []
    gone: set[tuple[str, str]] = set()
    for key in dataset.candidates():
        if key in flagged:
            removed.append(RemovedCandidate(key[0], key[1], "lacks_context"))
            gone.add(key)
            continue
        scores = quality_scores.get(key, set())
        if scores & LOW_SCORES and scores & HIGH_SCORES:
            removed.append(RemovedCandidate(key[0], key[1], "divided_ratings"))
            gone.add(key)
    kept = RatingsDataset(
        r for r in dataset.ratings if (r.set_id, r.candidate_id) not in gone
    )
    return kept, removed


def sets_for_ranking(dataset: RatingsDataset, min_candidates: int = 3) -> list[str]:
    """Set ids with enough candidates for recommendation-style metrics."""
    return [
        sid
        for sid in dataset.set_ids()
        if len(dataset.candidates_of_set(sid)) >= min_candidates
    ]


# ---------------------------------------------------------------------------
# CSV


def read_ratings_csv(path) -> RatingsDataset:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise RatingsFormatError("ratings file is empty") from None
        if header != CSV_HEADER:
            raise RatingsFormatError(
                f"bad header {header!r}, expected {CSV_HEADER!r}"
            )
        ratings = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise RatingsFormatError(
                    f"line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}"
                )
            set_id, candidate_id, rater_id, perspective, score_raw, lacks_raw = row
            try:
                ratings.append(
                    Rating(
                        set_id=set_id,
                        candidate_id=candidate_id,
                        rater_id=rater_id,
                        perspective=perspective,
                        score=int(score_raw),
                        lacks_context=_parse_bool(lacks_raw),
                    )
                )
            except ValueError as exc:
                raise RatingsFormatError(f"line {lineno}: {exc}") from exc
    try:
        return RatingsDataset(ratings)
    except ValueError as exc:
        raise RatingsFormatError(str(exc)) from exc


def write_ratings_csv(dataset: RatingsDataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in dataset.ratings:
            writer.writerow(
                [
                    r.set_id,
                    r.candidate_id,
                    r.rater_id,
                    r.perspective,
                    str(r.score),
                    "1" if r.lacks_context else "0",
                ]
            )


def _parse_bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true"):
        return True
    if value in ("0", "false", ""):
        return False
    raise ValueError(f"lacks_context must be 0/1/true/false, got {raw!r}")
