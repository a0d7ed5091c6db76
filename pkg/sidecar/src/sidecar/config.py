"""Service configuration."""

from dataclasses import dataclass

DEFAULT_NLI_MODEL = "roberta-base_mnli_bc"
DEFAULT_SENTIMENT_MODEL = "distilbert-base-uncased-finetuned-sst-2-english"


@dataclass(frozen=True)
class SidecarConfig:
    """Which checkpoints to serve and how.

    Model ids go straight to the loader, so hub ids and local directories
    both work. The defaults are known-good public checkpoints; swap them
    freely, the label mapping adapts by name.
    """

    nli_model_id: str = DEFAULT_NLI_MODEL
    sentiment_model_id: str = DEFAULT_SENTIMENT_MODEL
    port: int = 8100
    max_batch: int = 32
    device: str = "cpu"

    def __post_init__(self) -> None:
        if not self.nli_model_id:
            raise ValueError("nli_model_id must be non-empty")
        if not self.sentiment_model_id:
            raise ValueError("sentiment_model_id must be non-empty")
        if not isinstance(self.port, int) or not 1 <= self.port <= 65535:
            raise ValueError(f"port must be an integer in 1..65535, got {self.port!r}")
        if not isinstance(self.max_batch, int) or self.max_batch < 1:
            raise ValueError(f"max_batch must be a positive integer, got {self.max_batch!r}")
        if not self.device:
            raise ValueError("device must be non-empty")
