"""HTTP face of the sidecar.

Route handlers are synchronous on purpose: FastAPI runs them in its thread
pool while the service serializes per-model inference itself, so the HTTP
layer stays concurrent without touching model state from two threads.

Error contract: 400 malformed body, 422 empty text, 503 while models are
loading or when a model's queue is full.
"""

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import SidecarConfig
from .service import Classification, ModelService, ServiceBusy


class NLIRequest(BaseModel):
    premise: str
    hypothesis: str


class SentimentRequest(BaseModel):
    text: str


def create_app(config: SidecarConfig, preload: bool = True) -> FastAPI:
    """Build the application; preload=False leaves it answering 503."""
    app = FastAPI(title="classifier sidecar")
    app.state.config = config
    app.state.service = ModelService(config) if preload else None

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request body"})

    def service() -> ModelService:
        loaded = app.state.service
        if loaded is None:
            raise HTTPException(status_code=503, detail="models are still loading")
        return loaded

    def payload(result: Classification) -> dict:
        body = dict(result.probabilities)
        if result.truncated:
            body["truncated"] = True
        return body

    @app.post("/v1/nli")
    def nli(request: NLIRequest) -> dict:
        loaded = service()
        try:
            return payload(loaded.nli(request.premise, request.hypothesis))
        except ServiceBusy as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.post("/v1/sentiment")
    def sentiment(request: SentimentRequest) -> dict:
        loaded = service()
        try:
            return payload(loaded.sentiment(request.text))
        except ServiceBusy as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.get("/v1/health")
    def health():
        body = {
            "status": "ok" if app.state.service is not None else "loading",
            "nli_model": config.nli_model_id,
            "sentiment_model": config.sentiment_model_id,
        }
        if app.state.service is None:
            return JSONResponse(status_code=503, content=body)
        return body

    return app
