"""Five-stage audit workflow with canonical JSON checkpoints.

Stages run strictly in order; completing one stores its payload and
advances the pointer. Amending an already-completed stage replaces its
payload, wipes every downstream payload, and rewinds the pointer to the
first invalidated stage (no payload diffing: any amendment invalidates).
Checkpoints are canonical JSON, so equal session state means equal bytes,
and restore re-validates every structural invariant.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import canonical
from .errors import (
    CorruptCheckpointError,
    PayloadValidationError,
    SchemaVersionMismatchError,
    StageNotCompletedError,
    StageOrderViolationError,
)

SCHEMA_VERSION = 1
CHECKPOINT_SUFFIX = ".nishpaksh.json"

STAGES = (
    "SurveyIntake",
    "ThresholdSpecification",
    "ProxyFeatureReview",
    "Inference",
    "CompositeScoring",
    "Complete",
)
PAYLOAD_STAGES = STAGES[:-1]  # Complete carries no payload


def _now_iso(now: datetime | None = None) -> str:
    dt = now or datetime.now(timezone.utc)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat()


def _require_keys(stage: str, payload: dict, keys: tuple[str, ...]) -> None:
    if not isinstance(payload, dict):
        raise PayloadValidationError(f"{stage} payload must be an object")
    missing = [k for k in keys if k not in payload]
    if missing:
        raise PayloadValidationError(
            f"{stage} payload missing keys: {missing}",
            details={"stage": stage, "keys": missing},
        )


def _validate_payload(stage: str, payload: dict) -> None:
    if stage == "SurveyIntake":
        _require_keys(stage, payload, ("responses", "risk_profile"))
        _require_keys(stage, payload["risk_profile"], ("domain_scores", "composite", "category"))
    elif stage == "ThresholdSpecification":
        _require_keys(stage, payload, ("model_profile", "sector_policy", "threshold_spec"))
        _require_keys(stage, payload["threshold_spec"], ("category", "table_version", "metrics"))
    elif stage == "ProxyFeatureReview":
        _require_keys(stage, payload, ("dataset_fingerprint", "n_rows", "schema", "proxy_findings"))
    elif stage == "Inference":
        _require_keys(stage, payload, ("seed", "replicates", "level", "fairness", "performance", "subgroup_rates"))
    elif stage == "CompositeScoring":
        _require_keys(stage, payload, ("verdict",))
        _require_keys(stage, payload["verdict"], ("checks", "overall_pass", "bias_index"))
    else:
        raise PayloadValidationError(f"unknown stage {stage!r}")


@dataclass
class AuditSession:
    """Mutable workflow state; one writer at a time per session."""

    session_id: str
    created_at: str
    updated_at: str
    stage: str = STAGES[0]
    revision: int = 0
    payloads: dict[str, dict] = field(default_factory=dict)
    lock: threading.RLock = field(
        default_factory=threading.RLock, repr=False, compare=False
    )

    def stage_index(self) -> int:
        return STAGES.index(self.stage)

    def completed(self, stage: str) -> bool:
        return STAGES.index(stage) < self.stage_index() and stage in self.payloads

    def payload(self, stage: str) -> dict:
        return self.payloads[stage]

    def state_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "session_id": self.session_id,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "stage": self.stage,
            "revision": self.revision,
            "payloads": {k: v for k, v in self.payloads.items()},
        }


def create_session(
    session_id: str | None = None, now: datetime | str | None = None
) -> AuditSession:
    """Fresh session at the first stage, revision 0."""
    ts = now if isinstance(now, str) else _now_iso(now)
    return AuditSession(
        session_id=session_id or uuid.uuid4().hex,
        created_at=ts,
        updated_at=ts,
    )


def complete_stage(
    session: AuditSession,
    stage: str,
    payload: dict,
    now: datetime | str | None = None,
) -> AuditSession:
    """Store the current stage's payload and advance the pointer."""
    if stage not in PAYLOAD_STAGES:
        raise StageOrderViolationError(f"stage {stage!r} cannot be completed")
    with session.lock:
        if stage != session.stage:
            raise StageOrderViolationError(
                f"session is at stage {session.stage!r}, not {stage!r}",
                details={"current": session.stage, "requested": stage},
            )
        _validate_payload(stage, payload)
        session.payloads[stage] = payload
        session.stage = STAGES[session.stage_index() + 1]
        session.revision += 1
        session.updated_at = now if isinstance(now, str) else _now_iso(now)
    return session


def amend_stage(
    session: AuditSession,
    stage: str,
    payload: dict,
    now: datetime | str | None = None,
) -> AuditSession:
    """Replace a completed stage's payload and invalidate everything after it."""
    if stage not in PAYLOAD_STAGES:
        raise StageNotCompletedError(f"stage {stage!r} carries no payload")
    with session.lock:
        if stage not in session.payloads:
            raise StageNotCompletedError(
                f"stage {stage!r} was never completed",
                details={"stage": stage, "current": session.stage},
            )
        _validate_payload(stage, payload)
        session.payloads[stage] = payload
        idx = STAGES.index(stage)
        for downstream in PAYLOAD_STAGES[idx + 1 :]:
            session.payloads.pop(downstream, None)
        session.stage = STAGES[idx + 1]
        session.revision += 1
        session.updated_at = now if isinstance(now, str) else _now_iso(now)
    return session


def checkpoint(session: AuditSession) -> str:
    """Canonical JSON document for the session; equal state, equal bytes."""
    with session.lock:
        return canonical.dumps(session.state_dict())


def checkpoint_bytes(session: AuditSession) -> bytes:
    return checkpoint(session).encode("utf-8")


def restore(document: str | bytes | dict) -> AuditSession:
    """Rebuild a session from a checkpoint, re-validating every invariant."""
    if isinstance(document, (str, bytes)):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise CorruptCheckpointError(f"checkpoint is not valid JSON: {exc}") from exc
    else:
        data = document
    if not isinstance(data, dict):
        raise CorruptCheckpointError("checkpoint must be a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatchError(
            f"checkpoint schema_version {version!r} != {SCHEMA_VERSION}",
            details={"found": version, "expected": SCHEMA_VERSION},
        )
    for key in ("session_id", "created_at", "updated_at", "stage", "revision", "payloads"):
        if key not in data:
            raise CorruptCheckpointError(f"checkpoint missing key {key!r}")
    stage = data["stage"]
    if stage not in STAGES:
        raise CorruptCheckpointError(f"unknown stage {stage!r}")
    payloads = data["payloads"]
    if not isinstance(payloads, dict):
        raise CorruptCheckpointError("payloads must be an object")
    revision = data["revision"]
    if not isinstance(revision, int) or revision < 0:
        raise CorruptCheckpointError("revision must be a non-negative integer")

    # payload exists for a stage iff that stage is strictly before the pointer
    stage_idx = STAGES.index(stage)
    for i, s in enumerate(PAYLOAD_STAGES):
        if i < stage_idx and s not in payloads:
            raise CorruptCheckpointError(
                f"completed stage {s!r} has no payload", details={"stage": s}
            )
        if i >= stage_idx and s in payloads:
            raise CorruptCheckpointError(
                f"stage {s!r} has a payload but was never reached",
                details={"stage": s},
            )
    unknown = [s for s in payloads if s not in PAYLOAD_STAGES]
    if unknown:
        raise CorruptCheckpointError(f"payloads for unknown stages: {unknown}")
    for s, payload in payloads.items():
        try:
            _validate_payload(s, payload)
        except PayloadValidationError as exc:
            raise CorruptCheckpointError(
                f"payload for {s!r} fails validation: {exc.message}"
            ) from exc

    return AuditSession(
        session_id=data["session_id"],
        created_at=data["created_at"],
        updated_at=data["updated_at"],
        stage=stage,
        revision=revision,
        payloads={s: payloads[s] for s in PAYLOAD_STAGES if s in payloads},
    )
