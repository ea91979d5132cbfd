"""HTTP API for live enrollment and verification.

Stateless request handlers over a shared read-only model and a
single-writer template store; enrollment requests serialize through a
lock, verifications run concurrently.  No authentication layer: this is
a demo system.
"""

from __future__ import annotations

import threading
import time

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .errors import (
    ModelMismatchError,
    NotFoundError,
    RecordingRejectedError,
    ValidationError,
)
from .network import ModelParams
from .pipeline import MODEL_RATE_HZ, DecisionPolicy, process_recording, verify
from .signal import recording_from_dict
from .stimulus import generate_schedule, schedule_to_dict
from .store import TemplateStore


def create_app(
    params: ModelParams,
    store: TemplateStore,
    policy: DecisionPolicy = DecisionPolicy(),
) -> FastAPI:
    app = FastAPI(title="gazeid", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    started = time.time()
    write_lock = threading.Lock()

    @app.exception_handler(ValidationError)
    async def _validation(_req: Request, exc: ValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(RecordingRejectedError)
    async def _rejected(_req: Request, exc: RecordingRejectedError):
        return JSONResponse(
            status_code=400, content={"error": "recording rejected", "report": exc.report}
        )

    @app.exception_handler(NotFoundError)
    async def _notfound(_req: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(ModelMismatchError)
    async def _mismatch(_req: Request, exc: ModelMismatchError):
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.post("/api/enroll", status_code=201)
    async def enroll(body: dict):
        name = body.get("name", "")
        rec = recording_from_dict(body.get("recording"))
        embedding = process_recording(rec, params)
        with write_lock:
            store.enroll(name, embedding)
            count = len(store.lookup(name).embeddings)
        return {"name": name, "embedding_count": count}

    @app.post("/api/verify")
    async def verify_endpoint(body: dict):
        name = body.get("name", "")
        if not name:
            raise ValidationError("name is required")
        rec = recording_from_dict(body.get("recording"))
        result = verify(name, rec, store, params, policy)
        return result.to_dict()

    @app.get("/api/users")
    async def users():
        return {
            "users": [
                {"name": n, "embedding_count": c} for n, c in store.list_users()
            ]
        }

    @app.delete("/api/users/{name}")
    async def delete_user(name: str):
        with write_lock:
            store.delete_user(name)
        return Response(status_code=204)

    @app.get("/api/stimulus")
    async def stimulus(seed: int = 0):
        return schedule_to_dict(generate_schedule(seed))

    @app.get("/api/health")
    async def health():
        return {
            "status": "ok",
            "model_id": params.model_id,
            "model_rate_hz": MODEL_RATE_HZ,
            "threshold": policy.threshold,
            "uptime_s": time.time() - started,
        }

    return app
