"""Model loading and batched inference behind canonical labels.

One classifier wraps one sequence-classification checkpoint in eval mode,
so identical requests produce identical outputs. Inference per model is
serialized through a single worker; a bounded waiting room in front of it
turns overload into ServiceBusy instead of unbounded queue growth.
"""

import threading
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Sequence

import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer

from .config import SidecarConfig
from .labels import NLI_LABELS, SENTIMENT_LABELS, mapping_self_test, reorder

KIND_NLI = "nli"
KIND_SENTIMENT = "sentiment"

QUEUE_SLOTS_PER_WORKER = 64

# tokenizers signal "unlimited" with a huge sentinel
_SANE_LENGTH_LIMIT = 1_000_000


class ServiceBusy(RuntimeError):
    """The model's waiting room is full; try again later."""


@dataclass(frozen=True)
class Classification:
    probabilities: dict[str, float]
    truncated: bool


class _Worker:
    """Single inference worker: one turn at a time, bounded waiting room."""

    def __init__(self, slots: int = QUEUE_SLOTS_PER_WORKER):
        self._room = threading.BoundedSemaphore(slots)
        self._turn = threading.Lock()

    @contextmanager
    def slot(self):
        if not self._room.acquire(blocking=False):
            raise ServiceBusy("inference queue is full")
        try:
            with self._turn:
                yield
        finally:
            self._room.release()


class TextClassifier:
    """One checkpoint plus its tokenizer, reporting canonical labels."""

    def __init__(
        self,
        model_id: str,
        canonical: Sequence[str],
        device: str = "cpu",
        pair_input: bool = False,
    ):
        self.model_id = model_id
        self.canonical = tuple(canonical)
        self.pair_input = pair_input
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModelForSequenceClassification.from_pretrained(model_id)
        self.model = model.to(device).eval()
        self.permutation = mapping_self_test(self.model.config.id2label, self.canonical)

    @property
    def max_tokens(self) -> int:
        limit = self.tokenizer.model_max_length
        if 0 < limit < _SANE_LENGTH_LIMIT:
            return int(limit)
        return int(self.model.config.max_position_embeddings)

    def classify(self, items: Sequence[tuple[str, ...]]) -> list[Classification]:
        """One forward pass over items of (text,) or (text, text_pair)."""
        firsts = [item[0] for item in items]
        seconds = [item[1] for item in items] if self.pair_input else None
        encoded = self.tokenizer(
            firsts,
            seconds,
            padding=True,
            truncation=True,
            max_length=self.max_tokens,
            return_tensors="pt",
        ).to(self.model.device)
        with torch.inference_mode():
            logits = self.model(**encoded).logits
        rows = torch.softmax(logits, dim=-1).tolist()
        return [
            Classification(
                probabilities=dict(zip(self.canonical, reorder(row, self.permutation))),
                truncated=self._overflows(item),
            )
            for item, row in zip(items, rows)
        ]

    def _overflows(self, item: tuple[str, ...]) -> bool:
        second = item[1] if self.pair_input else None
        full = self.tokenizer(item[0], second, truncation=False, verbose=False)
        return len(full["input_ids"]) > self.max_tokens


class ModelService:
    """Both classifiers behind per-model workers and request validation."""

    def __init__(self, config: SidecarConfig):
        self.config = config
        self.nli_classifier = TextClassifier(
            config.nli_model_id, NLI_LABELS, config.device, pair_input=True
        )
        self.sentiment_classifier = TextClassifier(
            config.sentiment_model_id, SENTIMENT_LABELS, config.device
        )
        self._workers = {KIND_NLI: _Worker(), KIND_SENTIMENT: _Worker()}

    def nli(self, premise: str, hypothesis: str) -> Classification:
        return self.micro_batch(
            KIND_NLI, [{"premise": premise, "hypothesis": hypothesis}]
        )[0]

    def sentiment(self, text: str) -> Classification:
        return self.micro_batch(KIND_SENTIMENT, [{"text": text}])[0]

    def micro_batch(self, kind: str, requests: Sequence[dict]) -> list[Classification]:
        """Run homogeneous requests in chunks of max_batch under one worker.

        Oversized batches are split transparently; a request that does not
        match the kind's schema (including one of the other kind) rejects
        the whole batch before any inference runs.
        """
        items = [_item(kind, request) for request in requests]
        if not items:
            return []
        classifier = (
            self.nli_classifier if kind == KIND_NLI else self.sentiment_classifier
        )
        results: list[Classification] = []
        with self._workers[kind].slot():
            for start in range(0, len(items), self.config.max_batch):
                results.extend(classifier.classify(items[start : start + self.config.max_batch]))
        return results


def _item(kind: str, request: dict) -> tuple[str, ...]:
    if kind == KIND_NLI:
        fields = ("premise", "hypothesis")
    elif kind == KIND_SENTIMENT:
        fields = ("text",)
    else:
        raise ValueError(f"unknown request kind {kind!r}")
    if not isinstance(request, dict) or set(request) != set(fields):
        raise ValueError(f"a {kind} request needs exactly the fields {list(fields)}")
    values = tuple(request[field] for field in fields)
    for field, value in zip(fields, values):
        if not isinstance(value, str):
            raise ValueError(f"{field} must be a string")
        if not value.strip():
            raise ValueError(f"{field} must not be empty")
    return values
