"""JSON-over-HTTP API for the companion UI.

Holds one session (log + norm + score tables) in memory; replacing it is
atomic, readers see the old or the new session, never a mix. Responses are
pure functions of (session, request) and use the envelope
``{"ok": true, "data": ...}`` / ``{"ok": false, "error": {code, message}}``
with error codes matching the module error names.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import aggregation, insights, log_io, norm as norm_mod, scoring
from .aggregation import FilterSpec, HeatmapMatrix, UnknownFeature, UnknownView
from .event_log import EventLog
from .norm import ProcessNorm, SchemaViolation
from .scoring import ScoreTable


@dataclass(slots=True)
class Session:
    session_id: str
    log: EventLog
    norm: ProcessNorm
    tables: dict[str, ScoreTable]
    warnings: list[norm_mod.NormWarning]
    log_digest: str
    norm_digest: str
    created: str


class SessionBody(BaseModel):
    log_path: str
    format: str | None = None  # "xes" | "csv"; inferred from suffix if absent
    mapping: dict | None = None  # CSV column mapping
    norm: dict


class FilterBody(BaseModel):
    equals: list[list[str]] = []
    score_quantile: float | None = None


class HeatmapBody(BaseModel):
    view: str
    feature: str
    filter: FilterBody | None = None


class FindingsBody(BaseModel):
    view: str
    k: int = 5
    min_support: int = 1


def _ok(data) -> JSONResponse:
    return JSONResponse({"ok": True, "data": data})


def _err(code: str, message: str, status: int) -> JSONResponse:
    return JSONResponse(
        {"ok": False, "error": {"code": code, "message": message}}, status_code=status
    )


def create_app(
    allow_dir: str | Path = ".",
    cors_origin: str = "*",
    threads: int = 1,
) -> FastAPI:
    """Build the API app; ``allow_dir`` is the only root logs may load from."""
    app = FastAPI(title="wise", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    root = Path(allow_dir).resolve()
    state_lock = threading.Lock()
    app.state.session = None

    @app.exception_handler(StarletteHTTPException)
    async def http_exc(_request: Request, exc: StarletteHTTPException):
        return _err("HttpError", str(exc.detail), exc.status_code)

    @app.exception_handler(RequestValidationError)
    async def validation_exc(_request: Request, exc: RequestValidationError):
        return _err("SchemaViolation", str(exc.errors()), 400)

    def session_summary(session: Session) -> dict:
        return {
            "session_id": session.session_id,
            "views": [v.name for v in session.norm.views],
            "n_cases": len(session.log.traces),
            "n_events": session.log.event_count,
            "feature_catalog": [
                {
                    "name": f.name,
                    "level": f.level,
                    "kind": f.kind,
                    "distinct_values": f.distinct_values,
                }
                for f in session.log.feature_catalog
            ],
            "warnings": [
                {
                    "view": w.view,
                    "layer": w.layer.key,
                    "activity": w.activity,
                    "message": w.message,
                }
                for w in session.warnings
            ],
            "log_digest": session.log_digest,
            "norm_digest": session.norm_digest,
            "created": session.created,
        }

    @app.get("/api/health")
    async def health():
        session: Session | None = app.state.session
        return _ok(
            {
                "status": "ok",
                "session": None if session is None else {"session_id": session.session_id},
            }
        )

    @app.post("/api/session")
    async def create_session(body: SessionBody):
        path = (root / body.log_path).resolve()
        if not path.is_relative_to(root) or not path.is_file():
            return _err("UnknownLogPath", f"no readable log at {body.log_path!r}", 404)

        try:
            norm = norm_mod.load_norm(json.dumps(body.norm))
        except SchemaViolation as exc:
            return _err("SchemaViolation", str(exc), 400)
        except norm_mod.DuplicateViewName as exc:
            return _err("DuplicateViewName", str(exc), 400)

        raw = path.read_bytes()
        fmt = body.format or ("csv" if path.suffix.lower() == ".csv" else "xes")
        try:
            if fmt == "csv":
                mapping = body.mapping or {}
                cm = log_io.ColumnMapping(
                    case_col=mapping.get("case_col", "case_id"),
                    activity_col=mapping.get("activity_col", "activity"),
                    time_col=mapping.get("time_col"),
                    time_format=mapping.get("time_format"),
                )
                log = log_io.parse_csv(raw, cm)
            else:
                log = log_io.parse_xes(raw)
        except log_io.MalformedXml as exc:
            return _err("MalformedXml", str(exc), 422)
        except (
            log_io.MissingCaseId,
            log_io.MissingActivity,
            log_io.MissingColumn,
            log_io.BadTimestamp,
            log_io.EmptyCaseId,
        ) as exc:
            return _err(type(exc).__name__, str(exc), 422)

        tables = {
            t.view_name: t for t in scoring.score_all_views(norm, log, threads=threads)
        }
        log_digest = hashlib.sha256(raw).hexdigest()[:16]
        norm_digest = hashlib.sha256(
            json.dumps(body.norm, sort_keys=True).encode()
        ).hexdigest()[:16]
        session = Session(
            session_id=hashlib.sha256(f"{log_digest}:{norm_digest}".encode()).hexdigest()[:12],
            log=log,
            norm=norm,
            tables=tables,
            warnings=norm_mod.validate_against_log(norm, log),
            log_digest=log_digest,
            norm_digest=norm_digest,
            created=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )
        with state_lock:
            app.state.session = session
        return _ok(session_summary(session))

    def _session_or_none() -> Session | None:
        return app.state.session

    @app.get("/api/scores")
    async def scores(view: str, offset: int = 0, limit: int = 50):
        session = _session_or_none()
        if session is None:
            return _err("NoSession", "load a session first", 404)
        table = session.tables.get(view)
        if table is None:
            return _err("UnknownView", f"no view named {view!r}", 404)
        page = table.rows[max(offset, 0) : max(offset, 0) + max(limit, 0)]
        return _ok(
            {
                "view": view,
                "offset": offset,
                "limit": limit,
                "total": len(table.rows),
                "rows": [scoring.instance_score_to_dict(r) for r in page],
            }
        )

    @app.post("/api/heatmap")
    async def heatmap(body: HeatmapBody):
        session = _session_or_none()
        if session is None:
            return _err("NoSession", "load a session first", 404)
        table = session.tables.get(body.view)
        if table is None:
            return _err("UnknownView", f"no view named {body.view!r}", 404)
        log = session.log
        if log.feature(body.feature) is None:
            return _err("UnknownFeature", f"no feature named {body.feature!r}", 404)
        try:
            if body.filter and (body.filter.equals or body.filter.score_quantile is not None):
                spec = FilterSpec(
                    view=body.view,
                    equals=[(f, v) for f, v in body.filter.equals],
                    score_quantile=body.filter.score_quantile,
                )
                log, table = aggregation.apply_filter(log, table, spec)
            matrix = (
                aggregation.build_heatmap(table, log, body.feature)
                if table.rows
                else HeatmapMatrix(
                    feature=body.feature,
                    columns=aggregation.HEATMAP_COLUMNS,
                    rows=[],
                    cells=[],
                    volumes=[],
                )
            )
        except (UnknownFeature, aggregation.NonCategoricalFeature) as exc:
            return _err(type(exc).__name__, str(exc), 404)
        except UnknownView as exc:
            return _err("UnknownView", str(exc), 404)
        return _ok(
            {
                "feature": matrix.feature,
                "columns": list(matrix.columns),
                "rows": matrix.rows,
                "cells": matrix.cells,
                "volumes": matrix.volumes,
            }
        )

    @app.post("/api/findings")
    async def findings(body: FindingsBody):
        session = _session_or_none()
        if session is None:
            return _err("NoSession", "load a session first", 404)
        table = session.tables.get(body.view)
        if table is None:
            return _err("UnknownView", f"no view named {body.view!r}", 404)
        cells: list[aggregation.AggregationCell] = []
        for info in session.log.feature_catalog:
            if info.level == "case" and info.kind == "categorical":
                cells.extend(aggregation.aggregate(table, session.log, info.name))
        result = insights.derive_findings(cells, k=max(body.k, 1), min_support=max(body.min_support, 1))
        return _ok(
            [
                {
                    "rank": f.rank,
                    "feature": f.feature,
                    "value": f.value,
                    "layer": f.layer.key,
                    "deficit": f.deficit,
                    "n_cases": f.n_cases,
                    "statement": f.statement,
                }
                for f in result
            ]
        )

    return app
