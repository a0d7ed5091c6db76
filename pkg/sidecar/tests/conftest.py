"""Shared fixtures: two tiny local checkpoints with scrambled label maps.

The models are randomly initialized, so their outputs mean nothing. That
is the point: every test here exercises plumbing (label mapping, batching,
truncation, the wire protocol), which random weights prove just as well as
real ones, with no downloads and sub-second loads.
"""

import pytest
import torch
from transformers import BertConfig, BertForSequenceClassification, BertTokenizerFast
from transformers.utils import logging as hf_logging

from sidecar.config import SidecarConfig
from sidecar.service import ModelService

hf_logging.set_verbosity_error()
hf_logging.disable_progress_bar()

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "a", "an", "and", "is", "was", "like", "not",
    "dog", "cat", "wind", "fire", "storm", "stone", "river", "glass",
    "ran", "fought", "slept", "moved", "burned", "sang",
    "bright", "dark", "cold", "warm", "quick", "slow",
]

MAX_TOKENS = 48

# deliberately scrambled and oddly cased: the mapping must go by name
NLI_ID2LABEL = {0: "CONTRADICTION", 1: "entailment", 2: "Neutral"}
SENTIMENT_ID2LABEL = {0: "NEGATIVE", 1: "POSITIVE"}


def build_checkpoint(root, id2label: dict[int, str], seed: int) -> str:
    root.mkdir(parents=True, exist_ok=True)
    (root / "vocab.txt").write_text("\n".join(VOCAB) + "\n", encoding="utf-8")
    tokenizer = BertTokenizerFast(
        vocab_file=str(root / "vocab.txt"), model_max_length=MAX_TOKENS
    )
    tokenizer.save_pretrained(root)
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=1,
        num_attention_heads=2,
        intermediate_size=48,
        max_position_embeddings=MAX_TOKENS,
        num_labels=len(id2label),
        id2label=id2label,
        label2id={label: index for index, label in id2label.items()},
    )
    torch.manual_seed(seed)
    model = BertForSequenceClassification(config)
    model.save_pretrained(root)
    return str(root)


@pytest.fixture(scope="session")
def nli_checkpoint(tmp_path_factory):
    return build_checkpoint(tmp_path_factory.mktemp("nli-model"), NLI_ID2LABEL, seed=11)


@pytest.fixture(scope="session")
def sentiment_checkpoint(tmp_path_factory):
    return build_checkpoint(
        tmp_path_factory.mktemp("sentiment-model"), SENTIMENT_ID2LABEL, seed=23
    )


@pytest.fixture(scope="session")
def config(nli_checkpoint, sentiment_checkpoint):
    # max_batch is small so splitting is exercised with handful-sized batches
    return SidecarConfig(
        nli_model_id=nli_checkpoint,
        sentiment_model_id=sentiment_checkpoint,
        port=8100,
        max_batch=4,
        device="cpu",
    )


@pytest.fixture(scope="session")
def service(config):
    return ModelService(config)
