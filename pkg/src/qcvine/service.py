"""Local HTTP service exposing the engine to interactive clients.

Single-process developer tool bound to loopback.  Model ids are content
hashes of (source, params), so posting the same program twice is idempotent.
Mutations (program upload, fold updates) serialize through one lock and
publish new immutable session snapshots by atomic replacement; reads never
lock.  Diagram payloads are cached per fold-state key.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field, replace

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from pydantic import BaseModel

from .abstraction import abstract_diagram
from .context import build_bundle, connectivity, entanglement_history, placement_context, provenance, suggest_placements
from .dsl import ParseError
from .frontend import CompileError, SourceProgram, compile_source
from .model import CircuitModel, DomainError, QvError
from .render import RenderTheme, render_abstraction, render_component, render_matrix, render_placement, render_timeline
from .segmentation import ComponentDiagram, FoldState, build_component_diagram
from .serialize import canonical_json


class ProgramRequest(BaseModel):
    source: str
    params: dict[str, int] = {}


class FoldRequest(BaseModel):
    unfolded: list[int]


@dataclass
class Session:
    model_id: str
    model: CircuitModel
    fold: FoldState = field(default_factory=FoldState)
    cache: dict = field(default_factory=dict)

    def diagram(self, fold: FoldState | None = None) -> ComponentDiagram:
        fold = self.fold if fold is None else fold
        key = ("diagram", fold.key())
        found = self.cache.get(key)
        if found is None:
            found = build_component_diagram(self.model, fold)
            self.cache[key] = found
        return found


def model_id_for(source: str, params: dict[str, int]) -> str:
    blob = canonical_json({"source": source, "params": params})
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def create_app(theme: RenderTheme | None = None) -> FastAPI:
    app = FastAPI(title="qcvine", docs_url=None, redoc_url=None)
    # local developer tool: the explorer page is typically served from
    # another localhost port, so allow cross-origin reads
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    theme = theme or RenderTheme()
    sessions: dict[str, Session] = {}
    write_lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request", "detail": exc.errors()})

    @app.exception_handler(DomainError)
    async def not_found(request: Request, exc: DomainError):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(QvError)
    async def engine_error(request: Request, exc: QvError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    def get_session(model_id: str) -> Session:
        session = sessions.get(model_id)
        if session is None:
            raise DomainError(f"unknown model: {model_id}")
        return session

    def publish(session: Session) -> None:
        sessions[session.model_id] = session

    @app.get("/health")
    def health():
        return {"ok": True}

    @app.post("/program")
    def post_program(req: ProgramRequest):
        mid = model_id_for(req.source, req.params)
        try:
            model = compile_source(SourceProgram(req.source, dict(req.params)))
        except (ParseError, CompileError) as exc:
            line = getattr(exc, "line", 0)
            col = getattr(exc, "col", 0)
            return JSONResponse(
                status_code=422,
                content={"diagnostics": [{"line": line, "col": col, "message": str(exc)}]},
            )
        with write_lock:
            publish(Session(mid, model))
        return {"modelId": mid}

    @app.get("/model/{model_id}/structure")
    def get_structure(model_id: str):
        session = get_session(model_id)
        assert session.model.tree is not None
        return _canonical(session.model.tree.to_dict())

    @app.post("/model/{model_id}/fold")
    def post_fold(model_id: str, req: FoldRequest):
        with write_lock:
            session = get_session(model_id)
            tree = session.model.tree
            assert tree is not None
            for nid in req.unfolded:
                if nid not in tree.nodes:
                    raise DomainError(f"unknown tree node: {nid}")
            publish(replace(session, fold=FoldState(frozenset(req.unfolded))))
        return {"ok": True, "unfolded": sorted(set(req.unfolded))}

    @app.get("/model/{model_id}/component")
    def get_component(model_id: str, format: str = Query("json")):
        session = get_session(model_id)
        diagram = session.diagram()
        if format == "svg":
            return Response(render_component(diagram, theme), media_type="image/svg+xml")
        return _canonical(diagram.to_dict())

    @app.get("/model/{model_id}/abstraction")
    def get_abstraction(model_id: str, format: str = Query("json")):
        session = get_session(model_id)
        key = ("abstraction", session.fold.key(), format)
        payload = session.cache.get(key)
        if payload is None:
            diagram = session.diagram()
            tree = session.model.tree
            assert tree is not None
            abs_diagram = abstract_diagram(diagram, tree, session.model)
            if format == "svg":
                payload = ("svg", render_abstraction(abs_diagram, theme))
            else:
                payload = ("json", abs_diagram.to_dict())
            session.cache[key] = payload
        kind, body = payload
        if kind == "svg":
            return Response(body, media_type="image/svg+xml")
        return _canonical(body)

    @app.get("/model/{model_id}/provenance")
    def get_provenance(model_id: str, qubit: int, format: str = Query("json")):
        session = get_session(model_id)
        diagram = session.diagram()
        timeline = provenance(session.model, diagram, qubit)
        if format == "svg":
            bundle = build_bundle(session.model, diagram, qubit=qubit)
            return Response(render_timeline(bundle, theme), media_type="image/svg+xml")
        return _canonical(timeline.to_dict())

    @app.get("/model/{model_id}/placement")
    def get_placement(model_id: str, threshold: int = 1, format: str = Query("json")):
        session = get_session(model_id)
        diagram = session.diagram()
        pc = placement_context(session.model, diagram, threshold)
        if format == "svg":
            bundle = build_bundle(session.model, diagram, threshold=threshold)
            return Response(render_placement(diagram, bundle, theme), media_type="image/svg+xml")
        return _canonical(pc.to_dict())

    @app.get("/model/{model_id}/suggest")
    def get_suggest(model_id: str, gate: int):
        session = get_session(model_id)
        diagram = session.diagram()
        candidates = suggest_placements(session.model, diagram, gate)
        return _canonical({"gate": gate, "candidates": candidates})

    @app.get("/model/{model_id}/connectivity")
    def get_connectivity(model_id: str, node: int | None = None, format: str = Query("json")):
        session = get_session(model_id)
        matrix = connectivity(session.model, node)
        if format == "svg":
            diagram = session.diagram()
            bundle = build_bundle(session.model, diagram, scope=node)
            return Response(render_matrix(bundle, theme), media_type="image/svg+xml")
        return _canonical(matrix.to_dict())

    @app.get("/model/{model_id}/entanglement")
    def get_entanglement(model_id: str):
        session = get_session(model_id)
        return _canonical(entanglement_history(session.model).to_dict())

    app.state.sessions = sessions
    return app


def _canonical(payload: dict) -> Response:
    return PlainTextResponse(canonical_json(payload), media_type="application/json")


def register_model(app: FastAPI, source: str, params: dict[str, int]) -> str:
    """Compile and install a model directly (used by ``qcvine serve``)."""
    mid = model_id_for(source, params)
    model = compile_source(SourceProgram(source, dict(params)))
    app.state.sessions[mid] = Session(mid, model)
    return mid
