"""FastAPI service implementing the classifier wire protocol.

POST /classify        {"language": "python"|"java", "code": "<source>"}
POST /classify_batch  {"items": [{language, code}, ...]}  (order-preserving)
GET  /healthz         {"status": "ok", "model": "<id>"}

Schema violations return 400; requests before the model finishes loading
return 503. The loaded artifact is read-only shared state.
"""

from __future__ import annotations

import threading
from pathlib import Path

import torch
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import LABELS
from .model import pad_batch
from .train import load_artifact

MAX_BATCH = 256


class ModelHolder:
    def __init__(self, model_dir: str | Path):
        self.model_dir = Path(model_dir)
        self.model = None
        self.vocab = None
        self.manifest: dict = {}
        self._lock = threading.Lock()

    @property
    def ready(self) -> bool:
        return self.model is not None

    def load(self) -> None:
        with self._lock:
            if self.model is None:
                self.model, self.vocab, self.manifest = load_artifact(self.model_dir)

    @property
    def model_id(self) -> str:
        base = self.manifest.get("base_model", "unloaded")
        return f"{base}@{self.manifest.get('dataset_fingerprint', '')[:12]}"

    def probabilities(self, codes: list[str]) -> list[dict[str, float]]:
        # items are scored one at a time so batch results are bit-identical
        # to serial calls; desk-scale inputs make batching a non-concern
        cfg = self.manifest["config"]
        out = []
        with torch.no_grad():
            for code in codes:
                encoded = self.vocab.encode(code, cfg["max_len"])
                ids, mask = pad_batch([encoded], cfg["max_len"])
                row = torch.softmax(self.model(ids, mask), dim=1)[0].tolist()
                total = sum(row)
                out.append({name: row[i] / total for i, name in enumerate(LABELS)})
        return out


def _bad_request(detail: str) -> JSONResponse:
    return JSONResponse(status_code=400, content={"error": detail})


def _validate_item(item) -> str | None:
    if not isinstance(item, dict):
        return "item must be an object"
    if not isinstance(item.get("language"), str) or not item["language"]:
        return "language must be a nonempty string"
    if not isinstance(item.get("code"), str) or not item["code"]:
        return "code must be a nonempty string"
    return None


def create_app(model_dir: str | Path, defer_load: bool = False) -> FastAPI:
    holder = ModelHolder(model_dir)
    app = FastAPI(title="pivot-service")
    app.state.holder = holder

    if not defer_load:
        holder.load()

    @app.exception_handler(RequestValidationError)
    async def validation_to_400(request: Request, exc: RequestValidationError):
        return _bad_request(str(exc.errors()[:1]))

    @app.get("/healthz")
    async def healthz():
        if not holder.ready:
            return JSONResponse(status_code=503, content={"status": "loading"})
        return {"status": "ok", "model": holder.model_id}

    @app.post("/classify")
    async def classify(request: Request):
        if not holder.ready:
            return JSONResponse(status_code=503, content={"error": "model loading"})
        try:
            body = await request.json()
        except Exception:
            return _bad_request("body must be JSON")
        problem = _validate_item(body)
        if problem:
            return _bad_request(problem)
        probs = holder.probabilities([body["code"]])[0]
        return {"probs": probs, "model": holder.model_id}

    @app.post("/classify_batch")
    async def classify_batch(request: Request):
        if not holder.ready:
            return JSONResponse(status_code=503, content={"error": "model loading"})
        try:
            body = await request.json()
        except Exception:
            return _bad_request("body must be JSON")
        items = body.get("items") if isinstance(body, dict) else None
        if not isinstance(items, list) or not items:
            return _bad_request("items must be a nonempty list")
        if len(items) > MAX_BATCH:
            return _bad_request(f"batch too large (max {MAX_BATCH})")
        for item in items:
            problem = _validate_item(item)
            if problem:
                return _bad_request(problem)
        probs = holder.probabilities([item["code"] for item in items])
        return {
            "results": [
                {"probs": p, "model": holder.model_id} for p in probs
            ]
        }

    return app
