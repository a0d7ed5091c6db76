"""Map checkpoint label vocabularies onto the wire protocol's label order.

Checkpoints disagree about casing and logit order, so the mapping goes by
label name, never by index, and an unmappable vocabulary is a startup
error rather than a runtime surprise.
"""

from typing import Mapping, Sequence

NLI_LABELS = ("entailment", "neutral", "contradiction")
SENTIMENT_LABELS = ("positive", "negative")

_ALIASES = {
    "entailment": "entailment",
    "entail": "entailment",
    "neutral": "neutral",
    "contradiction": "contradiction",
    "contradict": "contradiction",
    "positive": "positive",
    "pos": "positive",
    "negative": "negative",
    "neg": "negative",
}


class LabelMappingError(ValueError):
    """The checkpoint's labels cannot be mapped onto the protocol's."""


def canonical_name(raw: str) -> str | None:
    return _ALIASES.get(raw.strip().lower())


def label_permutation(
    id2label: Mapping[int, str], canonical: Sequence[str]
) -> tuple[int, ...]:
    """Logit index per canonical label: probs[perm[k]] belongs to canonical[k]."""
    if len(id2label) != len(canonical):
        raise LabelMappingError(
            f"expected {len(canonical)} labels, checkpoint declares {len(id2label)}"
        )
    by_name: dict[str, int] = {}
    for index, raw in id2label.items():
        name = canonical_name(raw)
        if name is None:
            raise LabelMappingError(f"unrecognized label {raw!r} at logit index {index}")
        if name in by_name:
            raise LabelMappingError(f"label {name!r} appears more than once")
        by_name[name] = int(index)
    missing = [name for name in canonical if name not in by_name]
    if missing:
        raise LabelMappingError(f"checkpoint lacks labels {missing}")
    return tuple(by_name[name] for name in canonical)


def reorder(values: Sequence[float], permutation: Sequence[int]) -> list[float]:
    """Values in checkpoint logit order -> canonical order."""
    return [values[i] for i in permutation]


def verify_permutation(
    permutation: Sequence[int], id2label: Mapping[int, str], canonical: Sequence[str]
) -> None:
    """Prove reorder() lands every checkpoint label on its canonical slot.

    Pushes a unit spike through each logit position; catches both a broken
    permutation and a drifted alias table.
    """
    if sorted(permutation) != list(range(len(canonical))):
        raise LabelMappingError(
            f"{tuple(permutation)!r} is not a bijection over {len(canonical)} labels"
        )
    for index, raw in id2label.items():
        spike = [0.0] * len(canonical)
        spike[int(index)] = 1.0
        landed = reorder(spike, permutation).index(1.0)
        want = canonical.index(canonical_name(raw))
        if landed != want:
            raise LabelMappingError(
                f"label {raw!r} at logit {index} lands on {canonical[landed]!r},"
                f" want {canonical[want]!r}"
            )


def mapping_self_test(
    id2label: Mapping[int, str], canonical: Sequence[str]
) -> tuple[int, ...]:
    """Derive the permutation and verify it; run once per model at startup."""
    permutation = label_permutation(id2label, canonical)
    verify_permutation(permutation, id2label, canonical)
    return permutation
