"""HTTP surface of the document service.

Optimistic concurrency: clients send the version they believe is current;
a mismatch returns 409 with the live version and nothing is applied.
Command batches are atomic.  Layout and governance are computed on demand
from the live document, so a snapshot is always internally consistent.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from .. import governance, layout, model
from ..edit import EditError
from ..model import DomainError, InvalidDocument, LishError, PathError
from .schemas import (
    ApplyResponse,
    CommandBatch,
    ConflictResponse,
    RejectedResponse,
    SnapshotResponse,
)
from .workspace import UnknownDocument, VersionConflict, Workspace


def create_app(workspace_dir: str = ".", ui_dir: str | None = None) -> FastAPI:
    # The interface claims GET /docs for the document list, so the
    # interactive API docs move out of the way.
    app = FastAPI(title="lish document service", docs_url=None, redoc_url=None)
    workspace = Workspace(workspace_dir)
    app.state.workspace = workspace

    ui = ui_dir or os.environ.get("LISH_UI")
    if ui and Path(ui).is_dir():
        app.mount("/ui", StaticFiles(directory=ui, html=True), name="ui")

    def _state(doc_id: str):
        try:
            return workspace.get_state(doc_id)
        except UnknownDocument:
            raise HTTPException(status_code=404, detail=f"no document {doc_id!r}") from None

    @app.get("/docs", response_model=list[str])
    def list_docs() -> list[str]:
        return workspace.list_ids()

    @app.get("/docs/{doc_id}", response_model=SnapshotResponse)
    def snapshot(doc_id: str) -> SnapshotResponse:
        state = _state(doc_id)
        doc = state.doc
        try:
            placements = layout.compute_layout(doc)
        except InvalidDocument as exc:
            return JSONResponse(
                status_code=422,
                content=RejectedResponse(error=str(exc), report=exc.report.to_json()).model_dump(),
            )
        return SnapshotResponse(
            id=doc_id,
            version=doc.version,
            doc=model.document_to_json(doc),
            layout=layout.placements_to_json(placements),
        )

    @app.post(
        "/docs/{doc_id}/commands",
        response_model=ApplyResponse,
        responses={409: {"model": ConflictResponse}, 422: {"model": RejectedResponse}},
    )
    async def apply_commands(doc_id: str, batch: CommandBatch):
        state = _state(doc_id)
        async with state.lock:
            try:
                result = workspace.apply_batch(state, batch.expected_version, batch.commands)
            except VersionConflict as exc:
                return JSONResponse(
                    status_code=409,
                    content=ConflictResponse(current_version=exc.current_version).model_dump(),
                )
            except EditError as exc:
                report = exc.report.to_json() if exc.report is not None else None
                return JSONResponse(
                    status_code=422,
                    content=RejectedResponse(error=str(exc), report=report).model_dump(),
                )
            except (PathError, DomainError) as exc:
                return JSONResponse(
                    status_code=422, content=RejectedResponse(error=str(exc)).model_dump()
                )
        return ApplyResponse(
            id=doc_id,
            version=result.doc.version,
            diagnostics=list(result.diagnostics),
            doc=model.document_to_json(result.doc),
        )

    @app.get("/docs/{doc_id}/governed")
    def governed(doc_id: str, path: str = Query("")) -> list[list[int]]:
        state = _state(doc_id)
        cells = _guard(lambda: governance.governed_set(state.doc, model.parse_path(path)))
        return [list(p) for p in sorted(cells)]

    @app.get("/docs/{doc_id}/margins")
    def margins(doc_id: str, path: str = Query("")) -> list[list[int]]:
        state = _state(doc_id)
        found = _guard(lambda: governance.governing_margins(state.doc, model.parse_path(path)))
        return [list(p) for p in found]

    @app.get("/docs/{doc_id}/formula")
    def formula(doc_id: str, path: str = Query("")) -> dict:
        state = _state(doc_id)
        resolution = _guard(lambda: governance.effective_formula(state.doc, model.parse_path(path)))
        return resolution.to_json()

    @app.get("/docs/{doc_id}/selection")
    def selection(doc_id: str, sel: str = Query(...)) -> list[list[int]]:
        state = _state(doc_id)

        def resolve():
            parsed = governance.selection_from_json(json.loads(sel))
            return governance.selection_cells(state.doc, parsed)

        return [list(p) for p in _guard(resolve)]

    @app.get("/events")
    async def events() -> StreamingResponse:
        queue = workspace.subscribe()

        async def stream():
            try:
                yield ": connected\n\n"
                while True:
                    event = await queue.get()
                    yield f"data: {json.dumps(event, separators=(',', ':'))}\n\n"
            finally:
                workspace.unsubscribe(queue)

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app


def _guard(fn):
    try:
        return fn()
    except (PathError, DomainError, json.JSONDecodeError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except LishError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
