from __future__ import annotations

import json

import pytest

from nishpaksh.errors import (
    CorruptCheckpointError,
    PayloadValidationError,
    SchemaVersionMismatchError,
    StageNotCompletedError,
    StageOrderViolationError,
)
from nishpaksh.session import (
    PAYLOAD_STAGES,
    STAGES,
    amend_stage,
    checkpoint,
    complete_stage,
    create_session,
    restore,
)

SURVEY = {
    "responses": [{"item_id": "data-01", "rating": 3}],
    "risk_profile": {
        "domain_scores": {"Data": 3.0},
        "process_score": 3.0,
        "technical_score": 3.0,
        "composite": 3.0,
        "category": "Medium",
    },
}
CONFIG = {
    "model_profile": {"model_type": "machine-learning", "task": "binary-classification"},
    "sector_policy": {"sector": "generic", "selected_metrics": ["SPD"]},
    "threshold_spec": {"category": "Medium", "table_version": "1.0.0", "metrics": {}},
}
PROXY = {
    "dataset_fingerprint": "f" * 64,
    "n_rows": 8,
    "schema": {"sensitive_columns": ["race"]},
    "proxy_findings": [],
    "proxy_threshold": 0.5,
    "rejected_rows": [],
}
INFERENCE = {
    "seed": 42,
    "replicates": 1000,
    "level": 0.95,
    "with_ci": True,
    "fairness": [],
    "performance": [],
    "subgroup_rates": [],
    "warnings": [],
}
SCORING = {
    "verdict": {
        "checks": [],
        "overall_pass": True,
        "bias_index": {"race": 0.0},
        "bi_metrics": ["SPD"],
        "fairness_score": 1.0,
        "fairness_score_clamped": 1.0,
        "reference": {},
        "warnings": [],
    }
}
PAYLOADS = dict(zip(PAYLOAD_STAGES, (SURVEY, CONFIG, PROXY, INFERENCE, SCORING)))


def advance(session, upto: int):
    for stage in PAYLOAD_STAGES[:upto]:
        complete_stage(session, stage, PAYLOADS[stage], now="2026-01-01T00:00:00+00:00")
    return session


class TestCreate:
    def test_initial_state(self):
        s = create_session()
        assert s.stage == "SurveyIntake"
        assert s.revision == 0
        assert s.payloads == {}

    def test_unique_ids(self):
        assert create_session().session_id != create_session().session_id

    def test_injected_id_and_time(self):
        s = create_session(session_id="abc", now="2026-01-01T00:00:00+00:00")
        assert s.session_id == "abc"
        assert s.created_at == "2026-01-01T00:00:00+00:00"


class TestCompleteStage:
    def test_forward_transition(self):
        s = create_session()
        complete_stage(s, "SurveyIntake", SURVEY)
        assert s.stage == "ThresholdSpecification"
        assert s.revision == 1

    def test_out_of_order_rejected(self):
        s = create_session()
        with pytest.raises(StageOrderViolationError):
            complete_stage(s, "Inference", INFERENCE)

    def test_terminal_transition(self):
        s = advance(create_session(), 5)
        assert s.stage == "Complete"
        assert s.revision == 5

    def test_complete_cannot_be_completed(self):
        s = advance(create_session(), 5)
        with pytest.raises(StageOrderViolationError):
            complete_stage(s, "Complete", {})

    def test_invalid_payload_rejected(self):
        s = create_session()
        with pytest.raises(PayloadValidationError):
            complete_stage(s, "SurveyIntake", {"responses": []})

    def test_revision_increments_on_every_mutation(self):
        s = create_session()
        revs = [s.revision]
        for stage in PAYLOAD_STAGES:
            complete_stage(s, stage, PAYLOADS[stage])
            revs.append(s.revision)
        assert revs == [0, 1, 2, 3, 4, 5]


class TestAmendStage:
    def test_cascade_invalidation(self):
        s = advance(create_session(), 4)  # through Inference
        amend_stage(s, "SurveyIntake", SURVEY)
        assert s.stage == "ThresholdSpecification"
        assert set(s.payloads) == {"SurveyIntake"}

    def test_identical_payload_still_invalidates(self):
        s = advance(create_session(), 3)
        rev = s.revision
        amend_stage(s, "ThresholdSpecification", CONFIG)
        assert s.stage == "ProxyFeatureReview"
        assert "ProxyFeatureReview" not in s.payloads
        assert s.revision == rev + 1

    def test_never_completed_stage_rejected(self):
        s = advance(create_session(), 2)
        with pytest.raises(StageNotCompletedError):
            amend_stage(s, "Inference", INFERENCE)

    def test_amend_final_stage_keeps_complete(self):
        s = advance(create_session(), 5)
        amend_stage(s, "CompositeScoring", SCORING)
        assert s.stage == "Complete"

    def test_no_downstream_payload_after_amend(self):
        for k, stage in enumerate(PAYLOAD_STAGES):
            s = advance(create_session(), 5)
            amend_stage(s, stage, PAYLOADS[stage])
            for later in PAYLOAD_STAGES[k + 1 :]:
                assert later not in s.payloads


class TestCheckpoint:
    def test_round_trip_idempotent(self):
        for upto in range(6):
            s = advance(create_session(), upto)
            doc = checkpoint(s)
            assert checkpoint(restore(doc)) == doc

    def test_restore_preserves_state(self):
        s = advance(create_session(), 3)
        r = restore(checkpoint(s))
        assert r.session_id == s.session_id
        assert r.revision == s.revision
        assert r.stage == s.stage
        assert r.payloads == s.payloads

    def test_canonical_shape(self):
        s = create_session()
        doc = json.loads(checkpoint(s))
        assert doc["stage"] == "SurveyIntake"
        assert doc["schema_version"] == 1

    def test_identical_state_differs_only_in_identity_fields(self):
        a = advance(create_session(session_id="one", now="2026-01-01T00:00:00+00:00"), 2)
        b = advance(create_session(session_id="two", now="2026-01-01T00:00:00+00:00"), 2)
        da, db = json.loads(checkpoint(a)), json.loads(checkpoint(b))
        da.pop("session_id"), db.pop("session_id")
        assert da == db

    def test_same_state_same_bytes(self):
        s = advance(create_session(), 2)
        assert checkpoint(s) == checkpoint(s)


class TestRestoreValidation:
    def _doc(self, **overrides):
        s = advance(create_session(), 2)
        doc = json.loads(checkpoint(s))
        doc.update(overrides)
        return doc

    def test_unknown_schema_version(self):
        with pytest.raises(SchemaVersionMismatchError):
            restore(self._doc(schema_version=99))

    def test_payload_for_skipped_stage(self):
        doc = self._doc()
        doc["payloads"]["Inference"] = INFERENCE
        with pytest.raises(CorruptCheckpointError):
            restore(doc)

    def test_missing_payload_for_completed_stage(self):
        doc = self._doc()
        del doc["payloads"]["SurveyIntake"]
        with pytest.raises(CorruptCheckpointError):
            restore(doc)

    def test_garbage_json(self):
        with pytest.raises(CorruptCheckpointError):
            restore(b"{not json")

    def test_bad_stage_name(self):
        with pytest.raises(CorruptCheckpointError):
            restore(self._doc(stage="Unknown"))

    def test_negative_revision(self):
        with pytest.raises(CorruptCheckpointError):
            restore(self._doc(revision=-1))

    def test_invalid_stage_payload(self):
        doc = self._doc()
        doc["payloads"]["SurveyIntake"] = {"responses": []}
        with pytest.raises(CorruptCheckpointError):
            restore(doc)


class TestInvariants:
    def test_never_later_payload_without_earlier(self):
        s = advance(create_session(), 5)
        amend_stage(s, "ProxyFeatureReview", PROXY)
        idxs = [PAYLOAD_STAGES.index(k) for k in s.payloads]
        assert idxs == list(range(len(idxs)))

    def test_stage_list_frozen(self):
        assert STAGES == (
            "SurveyIntake",
            "ThresholdSpecification",
            "ProxyFeatureReview",
            "Inference",
            "CompositeScoring",
            "Complete",
        )
