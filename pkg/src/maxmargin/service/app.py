"""FastAPI application exposing the solver over HTTP."""

from fastapi import FastAPI, HTTPException

from ..data import DataError
from ..solvers import ConfigError
from . import handlers
from .schemas import (
    CertifyRequest,
    CertifyResponse,
    CompareRequest,
    CompareResponse,
    HealthResponse,
    RunRequest,
    RunResponse,
)

VERSION = "0.1.0"


def create_app() -> FastAPI:
    app = FastAPI(title="maxmargin", version=VERSION)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=VERSION)

    @app.post("/run", response_model=RunResponse)
    def run_endpoint(req: RunRequest) -> RunResponse:
        return _call(handlers.handle_run, req)

    @app.post("/certify", response_model=CertifyResponse)
    def certify_endpoint(req: CertifyRequest) -> CertifyResponse:
        return _call(handlers.handle_certify, req)

    @app.post("/compare", response_model=CompareResponse)
    def compare_endpoint(req: CompareRequest) -> CompareResponse:
        return _call(handlers.handle_compare, req)

    return app


def _call(handler, req):
    try:
        return handler(req)
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except DataError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


app = create_app()
