"""Simile domain types and deterministic rule-based component extraction.

A simile instance is a comparator ("like"/"as") plus the vehicle phrase that
follows it, optionally tied back to the governing event verb and its subject
(the topic). Everything here is pure string/offset work over immutable
inputs; no statistical models are involved.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence

from . import lexicon

_WS_RE = re.compile(r"\s+")
_CLAUSE_PUNCT = ",.;:!?"
_BOUNDARY_CHARS = " \t\n\r!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~"

DEFAULT_LINKING_VERBS = frozenset(
    {
        "be", "seem", "turn", "become", "appear", "look", "feel",
        "sound", "smell", "taste", "grow", "remain", "stay",
    }
)

_PURE_MODALS = frozenset(
    {"will", "would", "shall", "should", "can", "could", "may", "might", "must", "ought"}
)


class CorpusFormatError(ValueError):
    """A corpus record does not match the line-delimited JSON schema."""


class LinkingVerbRejection(ValueError):
    """Simile rejected: its event is a linking verb, so the sentence would
    be meaningless once the comparator and vehicle are removed."""


class ExtractionError(ValueError):
    """Component extraction failed for a candidate sentence."""


class ComponentKind(str, Enum):
    TOPIC = "topic"
    EVENT = "event"
    COMPARATOR = "comparator"
    VEHICLE = "vehicle"


@dataclass(frozen=True)
class ComponentSpan:
    """Half-open character span [start, end) into the owning sentence."""

    kind: ComponentKind
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0:
            raise ValueError(f"span start must be >= 0, got {self.start}")
        if self.end <= self.start:
            raise ValueError(f"span end must be > start, got [{self.start}, {self.end})")

    def text_in(self, text: str) -> str:
        return text[self.start : self.end]

    def overlaps(self, other: "ComponentSpan") -> bool:
        return self.start < other.end and other.start < self.end


@dataclass(frozen=True)
class SimileInstance:
    """One comparator occurrence with its extracted components."""

    comparator: ComponentSpan
    vehicle: ComponentSpan
    topic: ComponentSpan | None = None
    event: ComponentSpan | None = None

    def __post_init__(self) -> None:
        expected = {
            "comparator": (self.comparator, ComponentKind.COMPARATOR),
            "vehicle": (self.vehicle, ComponentKind.VEHICLE),
            "topic": (self.topic, ComponentKind.TOPIC),
            "event": (self.event, ComponentKind.EVENT),
        }
        for name, (span, kind) in expected.items():
            if span is not None and span.kind is not kind:
                raise ValueError(f"{name} span has kind {span.kind}")
        if self.vehicle.start < self.comparator.end:
            raise ValueError("vehicle span must begin after its comparator ends")
        spans = self.spans()
        for i, a in enumerate(spans):
            for b in spans[i + 1 :]:
                if a.overlaps(b):
                    raise ValueError(f"{a.kind.value} and {b.kind.value} spans overlap")

    def spans(self) -> list[ComponentSpan]:
        return [s for s in (self.topic, self.event, self.comparator, self.vehicle) if s]


@dataclass(frozen=True)
class SimileSentence:
    """A sentence with one or more annotated simile instances."""

    text: str
    instances: tuple[SimileInstance, ...]

    def __post_init__(self) -> None:
        if not self.instances:
            raise ValueError("a simile sentence needs at least one instance")
        object.__setattr__(self, "instances", tuple(self.instances))
        last = -1
        for inst in self.instances:
            if inst.comparator.start < last:
                raise ValueError("instances must be ordered by comparator start")
            last = inst.comparator.start
            for span in inst.spans():
                if span.end > len(self.text):
                    raise ValueError(
                        f"{span.kind.value} span [{span.start}, {span.end}) exceeds text length"
                    )
            comp = inst.comparator.text_in(self.text).lower()
            if comp not in ("like", "as"):
                raise ValueError(f"comparator text must be 'like' or 'as', got {comp!r}")

    def vehicle_texts(self) -> list[str]:
        return [inst.vehicle.text_in(self.text) for inst in self.instances]

    def topic_vehicle_pairs(self) -> list[tuple[str, str]]:
        """Raw (topic, vehicle) text for instances that have both."""
        pairs = []
        for inst in self.instances:
            if inst.topic is not None:
                pairs.append((inst.topic.text_in(self.text), inst.vehicle.text_in(self.text)))
        return pairs


@dataclass(frozen=True)
class LiteralSimilePair:
    """A simile and its literal rewrite with comparator+vehicle removed.

    ``insertion_offsets[i]`` is the character position in ``literal`` where
    instance i's removed segment belongs; :func:`splice_back` restores the
    original sentence up to single-space normalization.
    """

    literal: str
    simile: SimileSentence
    insertion_offsets: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "insertion_offsets", tuple(self.insertion_offsets))
        if len(self.insertion_offsets) != len(self.simile.instances):
            raise ValueError("need one insertion offset per simile instance")
        for off in self.insertion_offsets:
            if not 0 <= off <= len(self.literal):
                raise ValueError(f"insertion offset {off} outside literal")


@dataclass(frozen=True)
class CandidateSet:
    """Simile candidates generated from one shared literal sentence."""

    set_id: str
    literal: str
    candidates: tuple[SimileSentence, ...]
    candidate_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "candidate_ids", tuple(self.candidate_ids))
        if not self.candidates:
            raise ValueError("a candidate set needs at least one candidate")
        if len(self.candidates) != len(self.candidate_ids):
            raise ValueError("need one id per candidate")
        if len(set(self.candidate_ids)) != len(self.candidate_ids):
            raise ValueError("candidate ids must be unique")


# ---------------------------------------------------------------------------
# Tokenization


@dataclass(frozen=True)
class Token:
    """Whitespace token with the punctuation-trimmed core located inside it."""

    text: str
    start: int
    end: int
    core: str
    core_start: int
    core_end: int

    @property
    def low(self) -> str:
        return self.core.lower()


def tokenize(text: str) -> list[Token]:
    tokens = []
    for match in re.finditer(r"\S+", text):
        raw = match.group()
        start, end = match.span()
        lead = 0
        while lead < len(raw) and not raw[lead].isalnum():
            lead += 1
        trail = len(raw)
        while trail > lead and not raw[trail - 1].isalnum():
            trail -= 1
        core = raw[lead:trail]
        tokens.append(Token(raw, start, end, core, start + lead, start + trail))
    return tokens


def _trailing_clause_punct(tok: Token) -> bool:
    return any(ch in _CLAUSE_PUNCT for ch in tok.text[tok.core_end - tok.start :])


# ---------------------------------------------------------------------------
# Lemmatization (suffix rules + irregular table; no external model)


def lemmatize_verb(word: str) -> str:
    """Best-effort verb lemma via the irregular table and suffix rules."""
    w = word.lower()
    irregular = lexicon.irregular_verb_map()
    if w in irregular:
        return irregular[w]
    verbs = lexicon.verb_lemmas()
    if w in verbs:
        return w
    if len(w) > 4 and w.endswith("ies"):
        return w[:-3] + "y"
    if len(w) > 3 and w.endswith("ied"):
        return w[:-3] + "y"
    if len(w) > 3 and w.endswith("es"):
        stem = w[:-2]
        if stem.endswith(("s", "x", "z", "ch", "sh")):
            return stem
        if w[:-1] in verbs:
            return w[:-1]
        if stem in verbs:
            return stem
        return w[:-1]
    if len(w) > 2 and w.endswith("s") and not w.endswith("ss"):
        return w[:-1]
    if len(w) > 3 and w.endswith("ed"):
        return _strip_participle_suffix(w, 2, verbs)
    if len(w) > 4 and w.endswith("ing"):
        return _strip_participle_suffix(w, 3, verbs)
    return w


def _strip_participle_suffix(w: str, n: int, verbs: frozenset[str]) -> str:
    stem = w[:-n]
    candidates = [stem + "e", stem]
    doubled = len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in "aeiou"
    if doubled:
        candidates.append(stem[:-1])
    for cand in candidates:
        if cand in verbs:
            return cand
    return stem[:-1] if doubled else stem


def _is_verb_form(low: str) -> bool:
    """True when the token plausibly realizes a verb from the lexicon."""
    if not low or not low.replace("'", "").isalpha():
        return False
    rules = lexicon.pos_rules()
    if low in rules["determiners"] or low in rules["pronouns"] or low in rules["prepositions"]:
        return False
    if low in rules["coordinators"] or low in rules["subordinators"] or low in rules["adverbs"]:
        return False
    if low in _PURE_MODALS:
        return False
    if low in lexicon.irregular_verb_map():
        return True
    return lemmatize_verb(low) in lexicon.verb_lemmas()


def is_linking_verb_event(event_text: str, linking_verbs: Iterable[str] | None = None) -> bool:
    """True when the head verb of the event phrase is a linking verb."""
    linking = DEFAULT_LINKING_VERBS if linking_verbs is None else frozenset(linking_verbs)
    tokens = tokenize(event_text)
    fallback = None
    for tok in reversed(tokens):
        if not tok.core:
            continue
        if fallback is None:
            fallback = tok
        if _is_verb_form(tok.low):
            return lemmatize_verb(tok.low) in linking
    if fallback is None:
        return False
    return lemmatize_verb(fallback.low) in linking


# ---------------------------------------------------------------------------
# Phrase normalization


def normalize_phrase(phrase: str) -> str:
    """Canonical lookup key: lowercased, boundary punctuation stripped,
    whitespace collapsed, leading articles removed. Idempotent."""
    s = _WS_RE.sub(" ", phrase.lower()).strip()
    while True:
        prev = s
        s = s.strip(_BOUNDARY_CHARS)
        for article in ("a ", "an ", "the "):
            if s.startswith(article):
                s = s[len(article) :]
                break
        else:
            if s in ("a", "an", "the"):
                s = ""
        s = s.strip()
        if s == prev:
            return s


# ---------------------------------------------------------------------------
# Component extraction


def extract_components(sentence: str, allow_as: bool = False) -> SimileSentence | None:
    """Detect simile instances in a raw sentence.

    Returns one instance per comparator found, or None when the sentence has
    no comparator. The vehicle is the maximal noun phrase after the
    comparator; the event is the nearest preceding verb; the topic is that
    verb's subject phrase when recoverable.
    """
    if not sentence:
        return None
    tokens = tokenize(sentence)
    instances = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        comp_idx = None
        if tok.low == "like":
            comp_idx = i
        elif allow_as and tok.low == "as" and i + 2 < len(tokens):
            middle, second = tokens[i + 1], tokens[i + 2]
            if (
                second.low == "as"
                and _is_adjish(middle)
                and not middle.low.endswith("ly")
                and not _trailing_clause_punct(middle)
                and not _trailing_clause_punct(tok)
            ):
                comp_idx = i + 2
        if comp_idx is None:
            i += 1
            continue
        vehicle = _scan_vehicle(tokens, comp_idx)
        if vehicle is None:
            i = comp_idx + 1
            continue
        # for "as ADJ as" the event sits left of the first "as", index i
        event_idx = _scan_event(tokens, i)
        topic_span = _scan_topic(tokens, event_idx) if event_idx is not None else None
        comp_tok = tokens[comp_idx]
        instances.append(
            SimileInstance(
                comparator=ComponentSpan(
                    ComponentKind.COMPARATOR, comp_tok.core_start, comp_tok.core_end
                ),
                vehicle=ComponentSpan(ComponentKind.VEHICLE, vehicle[0], vehicle[1]),
                topic=topic_span,
                event=(
                    ComponentSpan(
                        ComponentKind.EVENT,
                        tokens[event_idx].core_start,
                        tokens[event_idx].core_end,
                    )
                    if event_idx is not None
                    else None
                ),
            )
        )
        i = comp_idx + 1
    if not instances:
        return None
    return SimileSentence(text=sentence, instances=tuple(instances))


def _scan_vehicle(tokens: Sequence[Token], comp_idx: int) -> tuple[int, int] | None:
    """Span of the maximal noun phrase following the comparator."""
    rules = lexicon.pos_rules()
    collected: list[Token] = []
    for j in range(comp_idx + 1, len(tokens)):
        tok = tokens[j]
        low = tok.low
        if not tok.core:
            break
        if low in ("like", "as"):
            break
        if low in rules["subordinators"] or low in rules["coordinators"]:
            break
        if low in _PURE_MODALS:
            break
        if low == "to" and j + 1 < len(tokens) and _is_base_verb(tokens[j + 1].low):
            break
        if collected and _is_finite_stop_verb(tok, tokens[j - 1]):
            break
        collected.append(tok)
        if _trailing_clause_punct(tok):
            break
    if not collected:
        return None
    return collected[0].core_start, collected[-1].core_end


def _is_base_verb(low: str) -> bool:
    return low in lexicon.verb_lemmas() or low in lexicon.irregular_verb_map()


def _is_finite_stop_verb(tok: Token, prev: Token) -> bool:
    """Finite verb forms end the vehicle scan; participial -ed/-ing forms
    and verbs in modifier position after a determiner do not."""
    low = tok.low
    if not _is_verb_form(low):
        return False
    if low.endswith("ed") or low.endswith("ing"):
        return False
    if prev.low in lexicon.pos_rules()["determiners"]:
        return False
    return True


_ING_NOUNS = frozenset(
    {
        "morning", "evening", "ceiling", "thing", "something", "nothing",
        "anything", "everything", "lightning", "clothing", "sibling",
        "darling", "duckling",
    }
)


def _is_event_verb(low: str) -> bool:
    """Event scan is more liberal than the lexicon: an out-of-lexicon token
    with clear -ed/-ing verbal morphology still counts."""
    if _is_verb_form(low):
        return True
    rules = lexicon.pos_rules()
    closed = (
        rules["determiners"]
        | rules["pronouns"]
        | rules["prepositions"]
        | rules["coordinators"]
        | rules["subordinators"]
        | rules["adverbs"]
    )
    if not low.isalpha() or low in closed or low in _ING_NOUNS:
        return False
    return len(low) > 4 and (low.endswith("ed") or low.endswith("ing"))


def _scan_event(tokens: Sequence[Token], comp_idx: int) -> int | None:
    for j in range(comp_idx - 1, -1, -1):
        if _is_event_verb(tokens[j].low):
            return j
    return None


def _scan_topic(tokens: Sequence[Token], event_idx: int) -> ComponentSpan | None:
    """Subject phrase of the event verb: nearest preceding nominal head,
    extended left across determiners, modifiers, and of-style attachments."""
    rules = lexicon.pos_rules()
    head = None
    for j in range(event_idx - 1, -1, -1):
        tok = tokens[j]
        if not tok.core or _trailing_clause_punct(tok):
            break
        low = tok.low
        if low in rules["pronouns"]:
            head = j
            break
        if _is_verb_form(low):
            # nominal reading: determiner right before, or a mid-sentence
            # capitalized proper noun that happens to share a verb's shape
            after_det = j > 0 and tokens[j - 1].low in rules["determiners"]
            capitalized = j > 0 and tok.core[0].isupper()
            if after_det or capitalized:
                head = j
                break
            continue
        if low in rules["coordinators"] or low in rules["adverbs"]:
            continue
        if low in _PURE_MODALS or low in ("not", "n't"):
            continue
        if low in rules["determiners"] or low in rules["prepositions"] or low in rules["subordinators"]:
            continue
        if tok.core.replace("'", "").isalnum():
            head = j
            break
    if head is None:
        return None
    start_idx = head
    det_seen = False
    j = head - 1
    while j >= 0:
        tok = tokens[j]
        if not tok.core or _trailing_clause_punct(tok):
            break
        low = tok.low
        if low in rules["determiners"]:
            # a second plain determiner would start a different noun phrase
            if det_seen and low not in ("all", "both", "half"):
                break
            det_seen = True
            start_idx = j
            j -= 1
            continue
        if low in rules["prepositions"] and j > 0 and _is_nounish(tokens[j - 1]):
            start_idx = j - 1
            det_seen = False
            j -= 2
            continue
        if not det_seen and (_is_adjish(tok) or _is_participial_modifier(tok)):
            start_idx = j
            j -= 1
            continue
        break
    return ComponentSpan(
        ComponentKind.TOPIC, tokens[start_idx].core_start, tokens[head].core_end
    )


def _is_participial_modifier(tok: Token) -> bool:
    low = tok.low
    return (low.endswith("ed") or low.endswith("ing")) and _is_verb_form(low)


def _is_adjish(tok: Token) -> bool:
    low = tok.low
    if not tok.core or not tok.core.replace("'", "").isalnum():
        return False
    rules = lexicon.pos_rules()
    closed = (
        rules["determiners"]
        | rules["pronouns"]
        | rules["prepositions"]
        | rules["coordinators"]
        | rules["subordinators"]
        | rules["adverbs"]
    )
    return low not in closed and not _is_verb_form(low)


def _is_nounish(tok: Token) -> bool:
    if not tok.core:
        return False
    low = tok.low
    rules = lexicon.pos_rules()
    if low in rules["pronouns"]:
        return True
    return _is_adjish(tok)


# ---------------------------------------------------------------------------
# Literal derivation


def make_literal(
    simile: SimileSentence, linking_verbs: Iterable[str] | None = None
) -> LiteralSimilePair:
    """Strip every comparator+vehicle segment, producing the literal rewrite.

    Raises LinkingVerbRejection when any instance's event is a linking verb;
    such sentences carry no content once the vehicle is gone.
    """
    text = simile.text
    for inst in simile.instances:
        if inst.event is not None and is_linking_verb_event(
            inst.event.text_in(text), linking_verbs
        ):
            raise LinkingVerbRejection(
                f"event {inst.event.text_in(text)!r} is a linking verb"
            )
    literal = _collapse(text[: simile.instances[0].comparator.start])
    offsets = []
    for idx, inst in enumerate(simile.instances):
        nxt = (
            simile.instances[idx + 1].comparator.start
            if idx + 1 < len(simile.instances)
            else len(text)
        )
        chunk = _collapse(text[inst.vehicle.end : nxt]).strip()
        left = literal.rstrip()
        offsets.append(len(left))
        if not chunk:
            literal = left
        elif not left or chunk[0] in _CLAUSE_PUNCT:
            literal = left + chunk
        else:
            literal = left + " " + chunk
    return LiteralSimilePair(literal=literal, simile=simile, insertion_offsets=tuple(offsets))


def _collapse(chunk: str) -> str:
    return _WS_RE.sub(" ", chunk)


def splice_back(pair: LiteralSimilePair) -> str:
    """Reinsert every removed comparator+vehicle segment; together with
    make_literal this round-trips up to single-space normalization."""
    text = pair.literal
    order = sorted(
        range(len(pair.simile.instances)),
        key=lambda i: (pair.insertion_offsets[i], i),
        reverse=True,
    )
    for i in order:
        inst = pair.simile.instances[i]
        segment = pair.simile.text[inst.comparator.start : inst.vehicle.end]
        off = pair.insertion_offsets[i]
        left, right = text[:off], text[off:]
        sep_l = "" if not left or left[-1].isspace() else " "
        sep_r = "" if not right or right[0].isspace() or right[0] in _CLAUSE_PUNCT else " "
        text = left + sep_l + segment + sep_r + right
    return text


# ---------------------------------------------------------------------------
# Corpus serialization (line-delimited JSON)


def simile_to_record(simile: SimileSentence) -> dict:
    return {
        "text": simile.text,
        "instances": [
            {
                "topic": [inst.topic.start, inst.topic.end] if inst.topic else None,
                "event": [inst.event.start, inst.event.end] if inst.event else None,
                "comparator": [inst.comparator.start, inst.comparator.end],
                "vehicle": [inst.vehicle.start, inst.vehicle.end],
            }
            for inst in simile.instances
        ],
    }


def simile_from_record(record: dict) -> SimileSentence:
    try:
        text = record["text"]
        raw_instances = record["instances"]
        if not isinstance(text, str) or not isinstance(raw_instances, list):
            raise TypeError("bad field types")
        instances = []
        for raw in raw_instances:
            spans = {}
            for name, kind in (
                ("topic", ComponentKind.TOPIC),
                ("event", ComponentKind.EVENT),
                ("comparator", ComponentKind.COMPARATOR),
                ("vehicle", ComponentKind.VEHICLE),
            ):
                value = raw.get(name)
                if value is None:
                    spans[name] = None
                else:
                    start, end = value
                    spans[name] = ComponentSpan(kind, int(start), int(end))
            if spans["comparator"] is None or spans["vehicle"] is None:
                raise KeyError("comparator and vehicle spans are required")
            instances.append(
                SimileInstance(
                    comparator=spans["comparator"],
                    vehicle=spans["vehicle"],
                    topic=spans["topic"],
                    event=spans["event"],
                )
            )
        return SimileSentence(text=text, instances=tuple(instances))
    except CorpusFormatError:
        raise
    except Exception as exc:
        raise CorpusFormatError(f"malformed simile record: {exc}") from exc


def parse_corpus_line(line: str) -> SimileSentence:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(record, dict):
        raise CorpusFormatError("corpus line must be a JSON object")
    return simile_from_record(record)


def read_corpus(path) -> Iterator[SimileSentence]:
    """Iterate annotated similes from a JSON-lines file (strict)."""
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                yield parse_corpus_line(line)


def write_corpus(similes: Iterable[SimileSentence], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for simile in similes:
            handle.write(json.dumps(simile_to_record(simile), ensure_ascii=False))
            handle.write("\n")
