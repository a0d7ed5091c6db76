"""Reference HTTP server for the classifier wire protocol.

Wraps one NLI and one binary sentiment checkpoint behind
POST /v1/nli, POST /v1/sentiment, and GET /v1/health, with checkpoint
label vocabularies mapped onto the protocol's canonical labels by name.
"""

from .app import create_app
from .config import DEFAULT_NLI_MODEL, DEFAULT_SENTIMENT_MODEL, SidecarConfig
from .labels import (
    NLI_LABELS,
    SENTIMENT_LABELS,
    LabelMappingError,
    label_permutation,
    mapping_self_test,
)
from .service import Classification, ModelService, ServiceBusy, TextClassifier

__all__ = [
    "Classification",
    "DEFAULT_NLI_MODEL",
    "DEFAULT_SENTIMENT_MODEL",
    "LabelMappingError",
    "ModelService",
    "NLI_LABELS",
    "SENTIMENT_LABELS",
    "ServiceBusy",
    "SidecarConfig",
    "TextClassifier",
    "create_app",
    "label_permutation",
    "mapping_self_test",
]
