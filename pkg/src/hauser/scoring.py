"""The five scoring criteria and candidate-set level evaluation.

Quality-perspective criteria (normalized within a candidate set, then
weighted):

  relevance             mean reference support for the (topic, vehicle)
                        pairs of a candidate, from the index
  logical consistency   1 - P(contradiction) with the literal sentence as
                        premise and the candidate as hypothesis
  sentiment consistency P_simile(a) - P_literal(a), where a is the dominant
                        polarity of the literal prefix, the simile prefix
                        runs through the first vehicle, and the literal
                        prefix runs through the first event

Creativity (-ln(mean vehicle frequency + 1)) and informativeness (mean
vehicle token count) are reported raw: they are only compared within a
candidate set, never normalized, and never folded into quality.

Normalized scores are min-max within the set's valid candidates; when a
criterion is constant across the set every candidate gets 0.5. Quality
scores from different sets are not comparable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .gateway import ClassifierGateway
from .index import MODE_CORPUS, MODE_KB, ReferenceIndex
from .similes import SimileSentence, extract_components, normalize_phrase

RELEVANCE_KB = "kb"
RELEVANCE_APPROX = "approx"

FLAG_INVALID = "invalid"
FLAG_NO_TOPIC = "no_topic"
FLAG_DEGRADED_PREFIX = "degraded_literal_prefix"


@dataclass(frozen=True)
class QualityWeights:
    """Criterion weights; any positive mix is accepted and normalized."""

    relevance: float
    logical: float
    sentiment: float

    def __post_init__(self) -> None:
        values = (self.relevance, self.logical, self.sentiment)
        if any(v < 0 for v in values):
            raise ValueError("weights must be non-negative")
        total = sum(values)
        if total <= 0:
            raise ValueError("at least one weight must be positive")
        object.__setattr__(self, "relevance", self.relevance / total)
        object.__setattr__(self, "logical", self.logical / total)
        object.__setattr__(self, "sentiment", self.sentiment / total)


DEFAULT_WEIGHTS = QualityWeights(relevance=3.0, logical=2.0, sentiment=1.0)


@dataclass(frozen=True)
class CandidateInput:
    """One generated candidate; spans may be pre-annotated or left to the
    extractor."""

    candidate_id: str
    text: str
    simile: SimileSentence | None = None

    def __post_init__(self) -> None:
        if not self.candidate_id:
            raise ValueError("candidate_id must be non-empty")
        if self.simile is not None and self.simile.text != self.text:
            raise ValueError("annotated simile text must match candidate text")


@dataclass(frozen=True)
class CandidateScore:
    """One report row. Score fields are None when the candidate is invalid."""

    set_id: str
    candidate_id: str
    relevance: float | None
    logical: float | None
    sentiment: float | None
    relevance_n: float | None = None
    logical_n: float | None = None
    sentiment_n: float | None = None
    quality: float | None = None
    creativity: float | None = None
    informativeness: float | None = None
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "flags", tuple(self.flags))

    @property
    def valid(self) -> bool:
        return FLAG_INVALID not in self.flags


# ---------------------------------------------------------------------------
# Criterion functions


def relevance(
    simile: SimileSentence, index: ReferenceIndex, mode: str = RELEVANCE_APPROX
) -> tuple[float, list[str]]:
    """Mean reference support over instances that carry a topic.

    Instances without a topic do not enter the numerator or denominator;
    if no instance has one the score is 0 with a no_topic flag.
    """
    _check_mode(mode, index)
    values = []
    for inst in simile.instances:
        if inst.topic is None:
            continue
        topic = normalize_phrase(inst.topic.text_in(simile.text))
        vehicle = normalize_phrase(inst.vehicle.text_in(simile.text))
        if not topic or not vehicle:
            continue
        if mode == RELEVANCE_KB:
            values.append(float(index.pair_mass(topic, vehicle)))
        else:
            values.append(float(index.pair_count(topic, vehicle)))
    if not values:
        return 0.0, [FLAG_NO_TOPIC]
    return math.fsum(values) / len(values), []


def _check_mode(mode: str, index: ReferenceIndex) -> None:
    if mode == RELEVANCE_KB:
        if index.mode != MODE_KB:
            raise ValueError("kb relevance needs a knowledge base index")
    elif mode == RELEVANCE_APPROX:
        if index.mode != MODE_CORPUS:
            raise ValueError("approx relevance needs a corpus index")
    else:
        raise ValueError(f"unknown relevance mode {mode!r}")


def logical_consistency(
    literal: str, candidate_text: str, gateway: ClassifierGateway
) -> float:
    """1 - P(contradiction); the literal is the premise."""
    dist = gateway.nli(premise=literal, hypothesis=candidate_text)
    return 1.0 - dist.contradiction


def sentiment_consistency(
    simile: SimileSentence,
    literal: str,
    gateway: ClassifierGateway,
    literal_event_end: int | None = None,
) -> tuple[float, list[str]]:
    """Polarity shift the vehicle introduces over the literal reading.

    Prefixes cut the texts right after the first vehicle and the first
    event respectively, so the comparison isolates the vehicle's
    contribution. Without a locatable event the whole literal stands in
    and the row is flagged. A tied literal polarity counts as positive.
    """
    flags: list[str] = []
    first = simile.instances[0]
    simile_prefix = simile.text[: first.vehicle.end]
    end = literal_event_end
    if end is None and first.event is not None:
        event_text = first.event.text_in(simile.text)
        pos = literal.find(event_text)
        if pos >= 0:
            end = pos + len(event_text)
    if end is None or not 0 < end <= len(literal):
        literal_prefix = literal
        flags.append(FLAG_DEGRADED_PREFIX)
    else:
        literal_prefix = literal[:end]
    lit = gateway.sentiment(literal_prefix)
    sim = gateway.sentiment(simile_prefix)
    if lit.positive >= lit.negative:
        value = sim.positive - lit.positive
    else:
        value = sim.negative - lit.negative
    return value, flags


def creativity(
    simile: SimileSentence, index: ReferenceIndex, apply_log: bool = True
) -> float:
    """Negated log of mean vehicle frequency; unseen vehicles score 0."""
    counts = [
        float(index.vehicle_count(inst.vehicle.text_in(simile.text)))
        for inst in simile.instances
    ]
    mean = math.fsum(counts) / len(counts)
    if apply_log:
        return -math.log(mean + 1.0)
    return -mean


def informativeness(simile: SimileSentence) -> float:
    """Mean whitespace token count of the raw vehicle spans."""
    lengths = [
        len(inst.vehicle.text_in(simile.text).split()) for inst in simile.instances
    ]
    return math.fsum(lengths) / len(lengths)


def minmax_normalize(values: Sequence[float]) -> list[float]:
    """Map to [0, 1] within the sequence; a constant sequence maps to 0.5."""
    if not values:
        return []
    lo, hi = min(values), max(values)
    if lo == hi:
        return [0.5] * len(values)
    return [(v - lo) / (hi - lo) for v in values]


def quality(
    relevance_n: float,
    logical_n: float,
    sentiment_n: float,
    weights: QualityWeights = DEFAULT_WEIGHTS,
) -> float:
    return (
        weights.relevance * relevance_n
        + weights.logical * logical_n
        + weights.sentiment * sentiment_n
    )


# ---------------------------------------------------------------------------
# Candidate set scoring


def score_candidate_set(
    set_id: str,
    literal: str,
    candidates: Sequence[CandidateInput],
    index: ReferenceIndex,
    gateway: ClassifierGateway,
    mode: str = RELEVANCE_APPROX,
    weights: QualityWeights = DEFAULT_WEIGHTS,
    apply_log: bool = True,
    allow_as: bool = False,
) -> list[CandidateScore]:
    """Score every candidate of one set against the shared literal.

    Candidates where no simile can be found are kept in the output as
    invalid rows; they are excluded from normalization, so they never
    distort the valid candidates' quality scores.
    """
    if not set_id:
        raise ValueError("set_id must be non-empty")
    if not literal.strip():
        raise ValueError("literal must be non-empty")
    if not candidates:
        raise ValueError("need at least one candidate")
    ids = [c.candidate_id for c in candidates]
    if len(set(ids)) != len(ids):
        raise ValueError("candidate ids must be unique within a set")

    rows: list[CandidateScore] = []
    valid_positions: list[int] = []
    for position, cand in enumerate(candidates):
        simile = cand.simile
        if simile is None:
            simile = extract_components(cand.text, allow_as=allow_as)
        if simile is None:
            rows.append(
                CandidateScore(
                    set_id=set_id,
                    candidate_id=cand.candidate_id,
                    relevance=None,
                    logical=None,
                    sentiment=None,
                    flags=(FLAG_INVALID,),
                )
            )
            continue
        flags: list[str] = []
        r, r_flags = relevance(simile, index, mode)
        flags.extend(r_flags)
        c_l = logical_consistency(literal, cand.text, gateway)
        c_s, s_flags = sentiment_consistency(simile, literal, gateway)
        flags.extend(s_flags)
        rows.append(
            CandidateScore(
                set_id=set_id,
                candidate_id=cand.candidate_id,
                relevance=r,
                logical=c_l,
                sentiment=c_s,
                creativity=creativity(simile, index, apply_log=apply_log),
                informativeness=informativeness(simile),
                flags=tuple(flags),
            )
        )
        valid_positions.append(position)

    if valid_positions:
        r_n = minmax_normalize([rows[p].relevance for p in valid_positions])
        l_n = minmax_normalize([rows[p].logical for p in valid_positions])
        s_n = minmax_normalize([rows[p].sentiment for p in valid_positions])
        for slot, position in enumerate(valid_positions):
            rows[position] = replace(
                rows[position],
                relevance_n=r_n[slot],
                logical_n=l_n[slot],
                sentiment_n=s_n[slot],
                quality=quality(r_n[slot], l_n[slot], s_n[slot], weights),
            )
    return rows


# ---------------------------------------------------------------------------
# Combined reranking


def combined_rerank(
    rows: Sequence[CandidateScore],
    ratio: tuple[float, float, float] = (2.0, 2.0, 1.0),
) -> list[tuple[CandidateScore, float]]:
    """Order candidates by weighted per-criterion ranks, best first.

    Quality, creativity, and informativeness each rank the valid
    candidates (1 is best, ties keep input order); the sort key is the
    ratio-weighted rank sum, lower is better. Key ties go to the higher
    quality score, then input order.
    """
    # zero components are allowed: 1:0:0 degenerates to a pure quality sort
    if len(ratio) != 3 or any(w < 0 for w in ratio) or sum(ratio) <= 0:
        raise ValueError("ratio needs three non-negative weights with a positive sum")
    valid = [row for row in rows if row.valid]
    if len(valid) < 2:
        raise ValueError("reranking needs at least two valid candidates")
    if any(row.quality is None for row in valid):
        raise ValueError("reranking needs fully scored candidates")

    def ranks_of(values: list[float]) -> dict[int, int]:
        order = sorted(range(len(values)), key=lambda i: (-values[i], i))
        return {idx: position + 1 for position, idx in enumerate(order)}

    q_rank = ranks_of([row.quality for row in valid])
    c_rank = ranks_of([row.creativity for row in valid])
    i_rank = ranks_of([row.informativeness for row in valid])
    wq, wc, wi = ratio
    keyed = [
        (row, wq * q_rank[i] + wc * c_rank[i] + wi * i_rank[i])
        for i, row in enumerate(valid)
    ]
    order = sorted(
        range(len(keyed)), key=lambda i: (keyed[i][1], -keyed[i][0].quality, i)
    )
    return [keyed[i] for i in order]


# ---------------------------------------------------------------------------
# Report serialization (line-delimited JSON, fixed key order)


def score_to_record(row: CandidateScore) -> dict:
    return {
        "set_id": row.set_id,
        "candidate_id": row.candidate_id,
        "r": row.relevance,
        "c_l": row.logical,
        "c_s": row.sentiment,
        "r_n": row.relevance_n,
        "c_l_n": row.logical_n,
        "c_s_n": row.sentiment_n,
        "Q": row.quality,
        "C": row.creativity,
        "I": row.informativeness,
        "flags": list(row.flags),
    }


def record_to_score(record: dict) -> CandidateScore:
    try:
        return CandidateScore(
            set_id=record["set_id"],
            candidate_id=record["candidate_id"],
            relevance=record["r"],
            logical=record["c_l"],
            sentiment=record["c_s"],
            relevance_n=record["r_n"],
            logical_n=record["c_l_n"],
            sentiment_n=record["c_s_n"],
            quality=record["Q"],
            creativity=record["C"],
            informativeness=record["I"],
            flags=tuple(record.get("flags", ())),
        )
    except KeyError as exc:
        raise ValueError(f"score record is missing key {exc}") from exc


def write_report(rows: Iterable[CandidateScore], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(score_to_record(row), ensure_ascii=False))
            handle.write("\n")


def read_report(path) -> list[CandidateScore]:
    rows = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append(record_to_score(json.loads(line)))
            except (json.JSONDecodeError, ValueError) as exc:
                raise ValueError(f"report line {lineno}: {exc}") from exc
    return rows
