import pytest

from sidecar.labels import (
    NLI_LABELS,
    SENTIMENT_LABELS,
    LabelMappingError,
    canonical_name,
    label_permutation,
    mapping_self_test,
    reorder,
    verify_permutation,
)

from conftest import NLI_ID2LABEL, SENTIMENT_ID2LABEL


def test_canonical_name_is_case_and_space_insensitive():
    assert canonical_name("ENTAILMENT") == "entailment"
    assert canonical_name("  Neutral ") == "neutral"
    assert canonical_name("pos") == "positive"
    assert canonical_name("NEG") == "negative"
    assert canonical_name("LABEL_0") is None


def test_permutation_for_scrambled_nli_map():
    # contradiction sits at logit 0, entailment at 1, neutral at 2
    assert label_permutation(NLI_ID2LABEL, NLI_LABELS) == (1, 2, 0)


def test_permutation_for_scrambled_sentiment_map():
    assert label_permutation(SENTIMENT_ID2LABEL, SENTIMENT_LABELS) == (1, 0)


def test_permutation_identity_when_already_canonical():
    id2label = {0: "entailment", 1: "neutral", 2: "contradiction"}
    assert label_permutation(id2label, NLI_LABELS) == (0, 1, 2)


def test_reorder_applies_permutation():
    assert reorder([10.0, 20.0, 30.0], (1, 2, 0)) == [20.0, 30.0, 10.0]


@pytest.mark.parametrize(
    "id2label",
    [
        {0: "entailment", 1: "neutral"},  # wrong count
        {0: "entailment", 1: "neutral", 2: "LABEL_2"},  # unknown name
        {0: "entailment", 1: "neutral", 2: "entail"},  # duplicate after aliasing
    ],
)
def test_unmappable_nli_vocabularies(id2label):
    with pytest.raises(LabelMappingError):
        label_permutation(id2label, NLI_LABELS)


def test_unmappable_sentiment_vocabulary():
    with pytest.raises(LabelMappingError):
        label_permutation({0: "POSITIVE", 1: "pos"}, SENTIMENT_LABELS)


def test_verify_rejects_wrong_permutation():
    # identity is wrong for the scrambled map
    with pytest.raises(LabelMappingError):
        verify_permutation((0, 1, 2), NLI_ID2LABEL, NLI_LABELS)


def test_verify_rejects_non_bijection():
    with pytest.raises(LabelMappingError, match="bijection"):
        verify_permutation((0, 0, 1), NLI_ID2LABEL, NLI_LABELS)


def test_self_test_returns_verified_permutation():
    assert mapping_self_test(NLI_ID2LABEL, NLI_LABELS) == (1, 2, 0)
    assert mapping_self_test(SENTIMENT_ID2LABEL, SENTIMENT_LABELS) == (1, 0)
