"""Command-line entry point: load both models, then serve."""

import argparse

import uvicorn

from .app import create_app
from .config import DEFAULT_NLI_MODEL, DEFAULT_SENTIMENT_MODEL, SidecarConfig


def serve(config: SidecarConfig, host: str = "127.0.0.1") -> None:
    # models load before the socket binds, so a bad id aborts the process
    app = create_app(config)
    uvicorn.run(app, host=host, port=config.port)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="hauser-sidecar",
        description="Serve NLI and sentiment classifiers over HTTP.",
    )
    parser.add_argument("--nli-model", default=DEFAULT_NLI_MODEL, help="checkpoint id or path")
    parser.add_argument(
        "--sentiment-model", default=DEFAULT_SENTIMENT_MODEL, help="checkpoint id or path"
    )
    parser.add_argument("--port", type=int, default=8100)
    parser.add_argument("--max-batch", type=int, default=32)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--host", default="127.0.0.1")
    args = parser.parse_args(argv)
    try:
        config = SidecarConfig(
            nli_model_id=args.nli_model,
            sentiment_model_id=args.sentiment_model,
            port=args.port,
            max_batch=args.max_batch,
            device=args.device,
        )
    except ValueError as exc:
        parser.error(str(exc))
    serve(config, host=args.host)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
