"""Stateless HTTP scoring service for external RL training loops.

POST /v1/score        {response, ground_truth, implicit_think?} -> one result
POST /v1/score_batch  {items: [...]} -> {items: [...]} in request order
GET  /healthz         -> 200 "ok"

Results are exactly what the in-process scorer returns; the service holds
no mutable state, so any number of concurrent clients see identical
results for identical requests.  Malformed bodies yield HTTP 400 with an
error object.
"""

from __future__ import annotations

import threading
import time

import uvicorn
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from .errors import BindError
from .rewards import RewardConfig, score_to_wire


class ScoreRequest(BaseModel):
    response: str
    ground_truth: str = Field(min_length=1)
    implicit_think: bool | None = None


class BatchRequest(BaseModel):
    items: list[ScoreRequest]


def create_app(default_implicit_think: bool = False) -> FastAPI:
    app = FastAPI(title="tomforge reward service")

    @app.exception_handler(RequestValidationError)
    async def bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": {"type": "validation", "detail": exc.errors()}})

    def run(item: ScoreRequest) -> dict:
        implicit = default_implicit_think if item.implicit_think is None else item.implicit_think
        return score_to_wire(item.response, item.ground_truth, RewardConfig(implicit_think=implicit))

    @app.get("/healthz")
    def healthz() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.post("/v1/score")
    def score_one(item: ScoreRequest) -> dict:
        return run(item)

    @app.post("/v1/score_batch")
    def score_batch(batch: BatchRequest) -> dict:
        return {"items": [run(item) for item in batch.items]}

    return app


def serve(port: int = 8731, host: str = "127.0.0.1", implicit_think: bool = False) -> None:
    """Run the service until interrupted."""
    try:
        uvicorn.run(create_app(implicit_think), host=host, port=port, log_level="warning")
    except OSError as e:
        raise BindError(f"cannot bind {host}:{port}: {e}") from e


class ServiceHandle:
    """Service in a background thread, mainly for tests and embedding."""

    def __init__(self, port: int, host: str = "127.0.0.1", implicit_think: bool = False):
        config = uvicorn.Config(
            create_app(implicit_think), host=host, port=port, log_level="warning"
        )
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)
        self.base_url = f"http://{host}:{port}"

    def __enter__(self) -> "ServiceHandle":
        self.thread.start()
        deadline = time.monotonic() + 15.0
        while not self.server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("reward service failed to start")
            time.sleep(0.02)
        return self

    def __exit__(self, *exc) -> None:
        self.server.should_exit = True
        self.thread.join(timeout=10.0)
