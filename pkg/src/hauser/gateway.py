"""Classifier gateway: NLI and sentiment behind one caching front end.

The scoring code never talks to a model directly. It asks the gateway,
which forwards to a backend over a small JSON protocol:

    POST /v1/nli        {"premise": str, "hypothesis": str}
                        -> {"entailment": p, "neutral": p, "contradiction": p}
    POST /v1/sentiment  {"text": str}
                        -> {"positive": p, "negative": p}
    GET  /v1/health     -> {"status": "ok", "nli_model": str, "sentiment_model": str}

Errors come back as {"error": str} with HTTP 400 (malformed request),
422 (empty text), or 503 (model unavailable). Two backends ship here: a
deterministic lexicon-driven stub for tests and offline runs, and a remote
HTTP client for a real model server.

Responses are cached keyed by the exact request bytes, so repeated queries
are free and a cached answer is indistinguishable from a fresh one.
"""

from __future__ import annotations

import json
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Protocol

import requests

from . import lexicon
from .similes import tokenize

_SUM_TOLERANCE = 1e-6

NLI_ENDPOINT = "/v1/nli"
SENTIMENT_ENDPOINT = "/v1/sentiment"
HEALTH_ENDPOINT = "/v1/health"


class GatewayError(Exception):
    """Base for everything the gateway can raise about a backend."""


class BackendTimeout(GatewayError):
    """The backend did not answer within the configured timeout."""


class BackendTransportError(GatewayError):
    """Connection failure or non-200 response from the backend."""

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class MalformedResponseError(GatewayError):
    """The backend answered, but not with the documented schema."""


@dataclass(frozen=True)
class NLIDistribution:
    entailment: float
    neutral: float
    contradiction: float

    def __post_init__(self) -> None:
        _check_distribution(
            (self.entailment, self.neutral, self.contradiction), "nli"
        )


@dataclass(frozen=True)
class SentimentDistribution:
    positive: float
    negative: float

    def __post_init__(self) -> None:
        _check_distribution((self.positive, self.negative), "sentiment")


def _check_distribution(values: tuple[float, ...], name: str) -> None:
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} probability {v!r} outside [0, 1]")
    total = sum(values)
    if abs(total - 1.0) > _SUM_TOLERANCE:
        raise ValueError(f"{name} probabilities sum to {total!r}, expected 1")


class Backend(Protocol):
    def request(self, endpoint: str, payload: dict) -> dict: ...

    def health(self) -> dict: ...


# ---------------------------------------------------------------------------
# Deterministic stub backend


class StubBackend:
    """Lexicon-driven classifier stand-in. Deterministic by construction.

    Sentiment: with p and n counting positive/negative lexicon hits per
    token occurrence, positive = (p + 1) / (p + n + 2); no hits lands on
    0.5 exactly.

    NLI, first rule that matches wins:
      1. an antonym of a premise content word appears in the hypothesis
         -> (0.05, 0.15, 0.80)
      2. whitespace-normalized lowercase containment in either direction
         -> (0.90, 0.10, 0.00)
      3. Jaccard overlap j of content tokens (stopwords dropped; empty
         union counts as j = 1) -> (0.3 + 0.6j, 0.6 - 0.5j, 0.1(1 - j))
    """

    nli_model = "stub-nli"
    sentiment_model = "stub-sentiment"

    def request(self, endpoint: str, payload: dict) -> dict:
        if endpoint == NLI_ENDPOINT:
            dist = self.nli(payload["premise"], payload["hypothesis"])
            return {
                "entailment": dist.entailment,
                "neutral": dist.neutral,
                "contradiction": dist.contradiction,
            }
        if endpoint == SENTIMENT_ENDPOINT:
            dist = self.sentiment(payload["text"])
            return {"positive": dist.positive, "negative": dist.negative}
        raise ValueError(f"stub backend has no endpoint {endpoint!r}")

    def health(self) -> dict:
        return {
            "status": "ok",
            "nli_model": self.nli_model,
            "sentiment_model": self.sentiment_model,
        }

    def sentiment(self, text: str) -> SentimentDistribution:
        tokens = _content_stream(text)
        if not tokens:
            raise ValueError("sentiment text must contain at least one token")
        pos_lex, neg_lex = lexicon.positive_words(), lexicon.negative_words()
        p = sum(1 for t in tokens if t in pos_lex)
        n = sum(1 for t in tokens if t in neg_lex)
        positive = (p + 1) / (p + n + 2)
        return SentimentDistribution(positive=positive, negative=1.0 - positive)

    def nli(self, premise: str, hypothesis: str) -> NLIDistribution:
        prem_tokens = _content_stream(premise)
        hyp_tokens = _content_stream(hypothesis)
        if not prem_tokens or not hyp_tokens:
            raise ValueError("nli premise and hypothesis must be non-empty")
        antonyms = lexicon.antonym_map()
        stop = lexicon.stopwords()
        prem_content = {t for t in prem_tokens if t not in stop}
        hyp_content = {t for t in hyp_tokens if t not in stop}
        hyp_all = set(hyp_tokens)
        for word in prem_content:
            if antonyms.get(word, frozenset()) & hyp_all:
                return NLIDistribution(0.05, 0.15, 0.80)
        prem_norm = " ".join(prem_tokens)
        hyp_norm = " ".join(hyp_tokens)
        if prem_norm in hyp_norm or hyp_norm in prem_norm:
            return NLIDistribution(0.90, 0.10, 0.00)
        union = prem_content | hyp_content
        j = len(prem_content & hyp_content) / len(union) if union else 1.0
        return NLIDistribution(0.3 + 0.6 * j, 0.6 - 0.5 * j, 0.1 * (1.0 - j))


def _content_stream(text: str) -> list[str]:
    return [tok.low for tok in tokenize(text) if tok.core]


# ---------------------------------------------------------------------------
# Remote backend


@dataclass(frozen=True)
class BackendConfig:
    base_url: str
    timeout: float = 10.0

    def __post_init__(self) -> None:
        if not self.base_url:
            raise ValueError("base_url must be set")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


class RemoteBackend:
    """HTTP client for a model server speaking the gateway protocol."""

    def __init__(self, config: BackendConfig):
        self.config = config
        self._session = requests.Session()

    def request(self, endpoint: str, payload: dict) -> dict:
        url = self.config.base_url.rstrip("/") + endpoint
        try:
            response = self._session.post(url, json=payload, timeout=self.config.timeout)
        except requests.Timeout as exc:
            raise BackendTimeout(f"no answer from {url} within {self.config.timeout}s") from exc
        except requests.RequestException as exc:
            raise BackendTransportError(f"request to {url} failed: {exc}") from exc
        if response.status_code != 200:
            raise BackendTransportError(
                f"HTTP {response.status_code} from {url}: {_error_body(response)}",
                status=response.status_code,
            )
        try:
            body = response.json()
        except ValueError as exc:
            raise MalformedResponseError(f"{url} returned non-JSON body") from exc
        if not isinstance(body, dict):
            raise MalformedResponseError(f"{url} returned {type(body).__name__}, expected object")
        return body

    def health(self) -> dict:
        url = self.config.base_url.rstrip("/") + HEALTH_ENDPOINT
        try:
            response = self._session.get(url, timeout=self.config.timeout)
        except requests.Timeout as exc:
            raise BackendTimeout(f"no answer from {url} within {self.config.timeout}s") from exc
        except requests.RequestException as exc:
            raise BackendTransportError(f"request to {url} failed: {exc}") from exc
        if response.status_code != 200:
            raise BackendTransportError(
                f"HTTP {response.status_code} from {url}: {_error_body(response)}",
                status=response.status_code,
            )
        try:
            return response.json()
        except ValueError as exc:
            raise MalformedResponseError(f"{url} returned non-JSON body") from exc


def _error_body(response) -> str:
    try:
        body = response.json()
        if isinstance(body, dict) and isinstance(body.get("error"), str):
            return body["error"]
    except ValueError:
        pass
    return response.text[:200]


# ---------------------------------------------------------------------------
# Gateway


class ClassifierGateway:
    """Caching, backpressured front end over a backend.

    The cache is a plain LRU keyed by endpoint plus canonical payload
    bytes; max_in_flight bounds concurrent backend calls, cache hits are
    never throttled. Failed calls are not cached.
    """

    def __init__(self, backend: Backend, cache_capacity: int = 4096, max_in_flight: int = 8):
        if cache_capacity < 0:
            raise ValueError("cache_capacity must be >= 0")
        if max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        self.backend = backend
        self.cache_capacity = cache_capacity
        self._cache: OrderedDict[bytes, object] = OrderedDict()
        self._lock = threading.Lock()
        self._slots = threading.BoundedSemaphore(max_in_flight)
        self.hits = 0
        self.misses = 0

    def nli(self, premise: str, hypothesis: str) -> NLIDistribution:
        if not premise.strip():
            raise ValueError("nli premise must be non-empty")
        if not hypothesis.strip():
            raise ValueError("nli hypothesis must be non-empty")
        payload = {"premise": premise, "hypothesis": hypothesis}
        return self._cached(NLI_ENDPOINT, payload, _parse_nli)

    def sentiment(self, text: str) -> SentimentDistribution:
        if not text.strip():
            raise ValueError("sentiment text must be non-empty")
        return self._cached(SENTIMENT_ENDPOINT, {"text": text}, _parse_sentiment)

    def health(self) -> dict:
        return self.backend.health()

    def _cached(self, endpoint: str, payload: dict, parse):
        key = _request_key(endpoint, payload)
        with self._lock:
            if key in self._cache:
                self._cache.move_to_end(key)
                self.hits += 1
                return self._cache[key]
        with self._slots:
            raw = self.backend.request(endpoint, payload)
        result = parse(raw)
        with self._lock:
            self.misses += 1
            if self.cache_capacity > 0:
                self._cache[key] = result
                self._cache.move_to_end(key)
                while len(self._cache) > self.cache_capacity:
                    self._cache.popitem(last=False)
        return result


def _request_key(endpoint: str, payload: dict) -> bytes:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return endpoint.encode("utf-8") + b"\x00" + blob.encode("utf-8")


def _parse_nli(raw: dict) -> NLIDistribution:
    try:
        return NLIDistribution(
            entailment=float(raw["entailment"]),
            neutral=float(raw["neutral"]),
            contradiction=float(raw["contradiction"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedResponseError(f"bad nli response {raw!r}: {exc}") from exc


def _parse_sentiment(raw: dict) -> SentimentDistribution:
    try:
        return SentimentDistribution(
            positive=float(raw["positive"]), negative=float(raw["negative"])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedResponseError(f"bad sentiment response {raw!r}: {exc}") from exc
