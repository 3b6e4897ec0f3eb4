"""HTTP/JSON API over the evaluation store, plus static UI hosting.

Configuration comes from a JSON file:

    {
      "sets_root": "studies/",        # parent of image-set directories
      "data_dir": "eval-data/",       # vote log + session snapshots
      "host": "127.0.0.1",
      "port": 8750,
      "seed": "graymode",             # base seed for sessions without one
      "ui_dir": "frontend/dist"       # optional static bundle to serve at /
    }
"""

from __future__ import annotations

import argparse
import json
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .store import (
    BLANK_PNG,
    EvalStore,
    NotFoundError,
    StageConflictError,
    ValidationFailure,
)


@dataclass
class ServiceConfig:
    sets_root: str
    data_dir: str
    host: str = "127.0.0.1"
    port: int = 8750
    seed: str = "graymode"
    ui_dir: str | None = None

    @staticmethod
    def load(path) -> "ServiceConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return ServiceConfig(**data)


class CreateSessionBody(BaseModel):
    observer_id: str
    image_set_id: str
    seed: str | None = None


class Stage1Body(BaseModel):
    picks: list[str]


class FinalBody(BaseModel):
    pick: str


def create_app(config: ServiceConfig) -> FastAPI:
    store = EvalStore(config.sets_root, config.data_dir, base_seed=config.seed)
    app = FastAPI(title="graymode evaluation service")
    app.state.store = store

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(StageConflictError)
    async def _conflict(request: Request, exc: StageConflictError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(ValidationFailure)
    async def _invalid(request: Request, exc: ValidationFailure):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        return store.create_session(body.observer_id, body.image_set_id,
                                    body.seed)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return store.session_view(session_id)

    @app.get("/sessions/{session_id}/images/{image_id}/stage1")
    def get_stage1(session_id: str, image_id: str):
        return store.stage1_manifest(session_id, image_id)

    @app.post("/sessions/{session_id}/images/{image_id}/stage1")
    def post_stage1(session_id: str, image_id: str, body: Stage1Body):
        return store.submit_stage1(session_id, image_id, body.picks)

    @app.get("/sessions/{session_id}/images/{image_id}/stage2")
    def get_stage2(session_id: str, image_id: str):
        return store.stage2_manifest(session_id, image_id)

    @app.post("/sessions/{session_id}/images/{image_id}/final")
    def post_final(session_id: str, image_id: str, body: FinalBody):
        return store.submit_final(session_id, image_id, body.pick)

    @app.get("/tally")
    def get_tally(set: str, cohort: str | None = None):
        return store.tally(set, cohort).to_dict()

    @app.get("/assets/{token}")
    def get_asset(token: str):
        path = store.asset(token)
        if path is None:
            return Response(content=BLANK_PNG, media_type="image/png")
        return FileResponse(path, media_type="image/png")

    if config.ui_dir and Path(config.ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=config.ui_dir, html=True),
                  name="ui")

    return app


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="graymode-eval",
                                     description="run the evaluation service")
    parser.add_argument("--config", required=True, help="JSON config file")
    args = parser.parse_args(argv)
    config = ServiceConfig.load(args.config)

    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
