"""HTTP adapter exposing the audit workflow.

A thin layer over the core modules: every response is reproducible by
calling the module operations directly with the same inputs. Sessions
persist as checkpoint files (write-through on every mutation) under the
configured data directory; uploaded dataset bytes are held in memory only
and must be re-supplied after a restore if inference is to be re-run.

Error contract: AuditError codes map to 404 (unknown session), 409 (stage
order), 400 (malformed requests), or 422 (domain errors); bodies are
always {code, message, details}.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from . import canonical
from ._version import __version__
from .config import ModelProfile, SectorPolicy, resolve_thresholds, ThresholdSpec
from .data_model import ColumnSchema, detect_proxies, load_csv, DEFAULT_PROXY_THRESHOLD
from .errors import (
    AuditError,
    PayloadMissingError,
    SessionNotFoundError,
    StageOrderViolationError,
)
from .metrics import DEFAULT_LEVEL, DEFAULT_REPLICATES, MetricResult, evaluate_dataset
from .reporting import REPORT_FORMATS, export_plot_data, generate_report, render
from .risk import assess, load_question_bank, parse_responses
from .scoring import DEFAULT_BI_METRICS, MetricVector, verdict
from .session import (
    CHECKPOINT_SUFFIX,
    AuditSession,
    amend_stage,
    checkpoint_bytes,
    complete_stage,
    create_session,
    restore,
)

DEFAULT_ADDR = "127.0.0.1:8680"
DEFAULT_MAX_UPLOAD = 100 * 1024 * 1024

_STATUS_BY_CODE = {
    "SESSION_NOT_FOUND": 404,
    "STAGE_ORDER_VIOLATION": 409,
    "STAGE_NOT_COMPLETED": 409,
    "UNKNOWN_FORMAT": 400,
}


class SurveyBody(BaseModel):
    responses: list[dict]


class ConfigBody(BaseModel):
    model_profile: dict
    sector_policy: dict


class EvaluateBody(BaseModel):
    seed: int
    replicates: int = DEFAULT_REPLICATES
    level: float = DEFAULT_LEVEL
    with_ci: bool = True


class ScoreBody(BaseModel):
    bi_metrics: list[str] | None = None
    reference: dict[str, dict] | None = None


class SessionStore:
    """In-memory registry with write-through checkpoint persistence."""

    def __init__(self, data_dir: str | Path | None):
        self.data_dir = Path(data_dir) if data_dir else None
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, AuditSession] = {}
        self._datasets: dict[str, object] = {}
        self._lock = threading.Lock()

    def _path(self, session_id: str) -> Path | None:
        if self.data_dir is None:
            return None
        return self.data_dir / f"{session_id}{CHECKPOINT_SUFFIX}"

    def add(self, session: AuditSession) -> None:
        with self._lock:
            self._sessions[session.session_id] = session
        self.persist(session)

    def get(self, session_id: str) -> AuditSession:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is not None:
            return session
        path = self._path(session_id)
        if path is not None and path.exists():
            session = restore(path.read_bytes())
            with self._lock:
                self._sessions.setdefault(session_id, session)
                return self._sessions[session_id]
        raise SessionNotFoundError(
            f"no session {session_id!r}", details={"session_id": session_id}
        )

    def persist(self, session: AuditSession) -> None:
        path = self._path(session.session_id)
        if path is not None:
            path.write_bytes(checkpoint_bytes(session))

    def put_dataset(self, session_id: str, dataset) -> None:
        with self._lock:
            self._datasets[session_id] = dataset

    def dataset(self, session_id: str):
        with self._lock:
            ds = self._datasets.get(session_id)
        if ds is None:
            raise PayloadMissingError(
                "dataset bytes are not loaded for this session; re-upload the CSV",
                details={"session_id": session_id},
            )
        return ds


def _submit_stage(session: AuditSession, stage: str, payload: dict) -> None:
    """Complete the current stage, or amend it if it already ran (which
    invalidates everything downstream per the workflow contract)."""
    if session.stage == stage:
        complete_stage(session, stage, payload)
    elif stage in session.payloads:
        amend_stage(session, stage, payload)
    else:
        raise StageOrderViolationError(
            f"session is at stage {session.stage!r}; cannot submit {stage!r} yet",
            details={"current": session.stage, "requested": stage},
        )


def create_app(
    data_dir: str | Path | None = None,
    question_bank_path: str | Path | None = None,
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD,
) -> FastAPI:
    if data_dir is None:
        data_dir = os.environ.get("NISHPAKSH_DATA_DIR") or None
    if question_bank_path is None:
        question_bank_path = os.environ.get("NISHPAKSH_QUESTION_BANK") or None

    app = FastAPI(title="nishpaksh", version=__version__)
    # auth lives at the gateway; the dashboard is served from its own origin
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(data_dir)
    question_bank = load_question_bank(question_bank_path)
    app.state.store = store

    @app.exception_handler(AuditError)
    async def audit_error_handler(request: Request, exc: AuditError):
        status = _STATUS_BY_CODE.get(exc.code, 422)
        return JSONResponse(status_code=status, content=exc.to_dict())

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={
                "code": "VALIDATION",
                "message": "request failed validation",
                "details": json.loads(json.dumps(exc.errors(), default=str)),
            },
        )

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=400,
            content={"code": "VALIDATION", "message": str(exc)},
        )

    def canonical_json(payload, status_code: int = 200) -> Response:
        return Response(
            content=canonical.dump_bytes(payload),
            status_code=status_code,
            media_type="application/json",
        )

    @app.post("/api/v1/sessions", status_code=201)
    def post_session():
        session = create_session()
        store.add(session)
        return canonical_json(session.state_dict(), status_code=201)

    @app.get("/api/v1/sessions/{session_id}")
    def get_session(session_id: str):
        session = store.get(session_id)
        return canonical_json(session.state_dict())

    @app.get("/api/v1/question-bank")
    def get_question_bank():
        return canonical_json([item.to_dict() for item in question_bank])

    @app.put("/api/v1/sessions/{session_id}/survey")
    def put_survey(session_id: str, body: SurveyBody):
        session = store.get(session_id)
        responses = parse_responses(body.responses)
        profile = assess(question_bank, responses)
        payload = {
            "responses": [r.to_dict() for r in responses],
            "risk_profile": profile.to_dict(),
        }
        with session.lock:
            _submit_stage(session, "SurveyIntake", payload)
            store.persist(session)
        return canonical_json(profile.to_dict())

    @app.put("/api/v1/sessions/{session_id}/config")
    def put_config(session_id: str, body: ConfigBody):
        session = store.get(session_id)
        if "SurveyIntake" not in session.payloads:
            raise StageOrderViolationError(
                "survey must be completed before configuration",
                details={"current": session.stage},
            )
        profile = ModelProfile.from_dict(body.model_profile)
        policy = SectorPolicy.from_dict(body.sector_policy)
        category = session.payload("SurveyIntake")["risk_profile"]["category"]
        thresholds = resolve_thresholds(category, policy)
        payload = {
            "model_profile": profile.to_dict(),
            "sector_policy": policy.to_dict(),
            "threshold_spec": thresholds.to_dict(),
        }
        with session.lock:
            _submit_stage(session, "ThresholdSpecification", payload)
            store.persist(session)
        return canonical_json(thresholds.to_dict())

    @app.post("/api/v1/sessions/{session_id}/dataset")
    def post_dataset(
        session_id: str,
        file: UploadFile = File(...),
        upload_schema: str = Form(..., alias="schema"),
        proxy_threshold: float = Form(DEFAULT_PROXY_THRESHOLD),
    ):
        session = store.get(session_id)
        raw = file.file.read()
        if len(raw) > max_upload_bytes:
            raise ValueError(
                f"upload exceeds the {max_upload_bytes} byte cap"
            )
        try:
            schema_obj = ColumnSchema.from_dict(json.loads(upload_schema))
        except json.JSONDecodeError as exc:
            raise ValueError(f"schema is not valid JSON: {exc}") from exc
        dataset = load_csv(raw, schema_obj)
        findings = detect_proxies(dataset, proxy_threshold)
        payload = {
            "dataset_fingerprint": dataset.fingerprint,
            "n_rows": dataset.n_rows,
            "schema": schema_obj.to_dict(),
            "proxy_findings": [f.to_dict() for f in findings],
            "proxy_threshold": proxy_threshold,
            "rejected_rows": list(dataset.rejected_rows),
        }
        with session.lock:
            _submit_stage(session, "ProxyFeatureReview", payload)
            store.put_dataset(session_id, dataset)
            store.persist(session)
        return canonical_json(payload)

    @app.post("/api/v1/sessions/{session_id}/evaluate")
    def post_evaluate(session_id: str, body: EvaluateBody):
        session = store.get(session_id)
        if "ThresholdSpecification" not in session.payloads or "ProxyFeatureReview" not in session.payloads:
            raise StageOrderViolationError(
                "configuration and dataset stages must be completed before evaluation",
                details={"current": session.stage},
            )
        dataset = store.dataset(session_id)
        stored_fp = session.payload("ProxyFeatureReview")["dataset_fingerprint"]
        if dataset.fingerprint != stored_fp:
            raise PayloadMissingError(
                "loaded dataset does not match the reviewed fingerprint; re-upload",
                details={"expected": stored_fp, "loaded": dataset.fingerprint},
            )
        selected = session.payload("ThresholdSpecification")["sector_policy"]["selected_metrics"]
        payload = evaluate_dataset(
            dataset,
            metrics=list(selected),
            seed=body.seed,
            replicates=body.replicates,
            level=body.level,
            with_ci=body.with_ci,
        )
        with session.lock:
            _submit_stage(session, "Inference", payload)
            store.persist(session)
        return canonical_json(payload)

    @app.post("/api/v1/sessions/{session_id}/score")
    def post_score(session_id: str, body: ScoreBody | None = None):
        session = store.get(session_id)
        if "Inference" not in session.payloads:
            raise StageOrderViolationError(
                "inference must run before scoring", details={"current": session.stage}
            )
        body = body or ScoreBody()
        inference = session.payload("Inference")
        thresholds = ThresholdSpec.from_dict(
            session.payload("ThresholdSpecification")["threshold_spec"]
        )
        results = [MetricResult.from_dict(r) for r in inference["fairness"]]
        attributes = list(
            session.payload("ProxyFeatureReview")["schema"]["sensitive_columns"]
        )
        bi_metrics = tuple(body.bi_metrics) if body.bi_metrics else DEFAULT_BI_METRICS
        reference = None
        if body.reference:
            reference = {
                attr: MetricVector.from_dict(vec) for attr, vec in body.reference.items()
            }
        result = verdict(
            results,
            thresholds,
            attributes=attributes,
            bi_metrics=bi_metrics,
            reference=reference,
        )
        payload = {"verdict": result.to_dict()}
        with session.lock:
            _submit_stage(session, "CompositeScoring", payload)
            store.persist(session)
        return canonical_json(result.to_dict())

    @app.get("/api/v1/sessions/{session_id}/report")
    def get_report(session_id: str, format: str = "json"):
        session = store.get(session_id)
        if format not in REPORT_FORMATS:
            from .errors import UnknownFormatError

            raise UnknownFormatError(
                f"unknown report format {format!r}", details={"format": format}
            )
        report = generate_report(session)
        media = {
            "json": "application/json",
            "markdown": "text/markdown; charset=utf-8",
            "html": "text/html; charset=utf-8",
        }[format]
        return Response(content=render(report, format), media_type=media)

    @app.get("/api/v1/sessions/{session_id}/plots/{kind}")
    def get_plot(session_id: str, kind: str):
        session = store.get(session_id)
        return canonical_json(export_plot_data(session, kind).to_dict())

    @app.get("/api/v1/sessions/{session_id}/checkpoint")
    def get_checkpoint(session_id: str):
        session = store.get(session_id)
        return Response(
            content=checkpoint_bytes(session), media_type="application/json"
        )

    @app.put("/api/v1/sessions/{session_id}/checkpoint")
    async def put_checkpoint(session_id: str, request: Request):
        document = await request.body()
        session = restore(document)
        if session.session_id != session_id:
            raise ValueError(
                "checkpoint session_id does not match the path session id"
            )
        store.add(session)
        return canonical_json(session.state_dict())

    return app


def resolve_addr(addr: str | None = None) -> tuple[str, int]:
    value = addr or os.environ.get("NISHPAKSH_ADDR") or DEFAULT_ADDR
    host, _, port = value.rpartition(":")
    if not host:
        raise ValueError(f"invalid address {value!r}; expected host:port")
    return host, int(port)
