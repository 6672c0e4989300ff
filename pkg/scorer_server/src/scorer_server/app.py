"""HTTP surface of the scorer: three JSON endpoints.

POST /v1/mask_predict  {tokens, mask_index, candidates} -> {logits, probabilities}
POST /v1/hidden_states {tokens, layers}                 -> {states, dimension}
GET  /v1/info                                           -> {vocab_digest, depth, dimension}

Probabilities are the full-vocabulary softmax restricted to the
candidates, computed in double precision after the forward pass. Any
malformed or protocol-violating request answers 400 with a named reason;
model failures answer 500.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from .batching import Batcher
from .model import BadRequest, MaskedLm, UnknownPiece


class MaskPredictRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    tokens: list[str] = Field(min_length=3)
    mask_index: int = Field(ge=0)
    candidates: list[str] = Field(min_length=1)


class HiddenStatesRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    tokens: list[str] = Field(min_length=1)
    layers: list[int] = Field(min_length=1)


def create_app(model: MaskedLm, max_batch_size: int = 8) -> FastAPI:
    app = FastAPI(title="scorer-server", docs_url=None, redoc_url=None)
    batcher = Batcher(model, max_batch_size=max_batch_size)
    app.state.model = model
    app.state.batcher = batcher

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc.errors())})

    @app.exception_handler(UnknownPiece)
    async def unknown_piece(request: Request, exc: UnknownPiece):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(BadRequest)
    async def bad_request(request: Request, exc: BadRequest):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    def check_frame(tokens: list[str]) -> None:
        if len(tokens) > model.max_positions:
            raise BadRequest(f"frame of {len(tokens)} tokens exceeds model limit {model.max_positions}")

    @app.get("/v1/info")
    def info() -> dict:
        return {
            "vocab_digest": model.vocab_digest,
            "depth": model.depth,
            "dimension": model.dimension,
        }

    @app.post("/v1/mask_predict")
    def mask_predict(request: MaskPredictRequest) -> dict:
        check_frame(request.tokens)
        if request.mask_index >= len(request.tokens):
            raise BadRequest(f"mask_index {request.mask_index} outside frame of {len(request.tokens)} tokens")
        if request.tokens[request.mask_index] != model.mask_piece:
            raise BadRequest(f"tokens[{request.mask_index}] is {request.tokens[request.mask_index]!r}, "
                             f"not {model.mask_piece!r}")
        ids = model.ids_for(request.tokens)
        candidate_ids = model.ids_for(request.candidates)
        result = batcher.submit(ids)
        row = result.logits[request.mask_index]
        shifted = row - row.max()
        probabilities = np.exp(shifted)
        probabilities /= probabilities.sum()
        return {
            "logits": [float(row[i]) for i in candidate_ids],
            "probabilities": [float(probabilities[i]) for i in candidate_ids],
        }

    @app.post("/v1/hidden_states")
    def hidden_states(request: HiddenStatesRequest) -> dict:
        check_frame(request.tokens)
        for layer in request.layers:
            if not (1 <= layer <= model.depth):
                raise BadRequest(f"layer {layer} outside [1, {model.depth}]")
        ids = model.ids_for(request.tokens)
        result = batcher.submit(ids)
        states = [result.hidden[layer].tolist() for layer in request.layers]
        return {"states": states, "dimension": model.dimension}

    return app
