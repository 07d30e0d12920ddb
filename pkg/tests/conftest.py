from __future__ import annotations

import random

import numpy as np
import pytest

from nishpaksh.data_model import AuditDataset, ColumnSchema

_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance" in report.nodeid and report.when == "call":
        name = report.nodeid.split("::")[-1]
        _acceptance_results.append((name, "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, outcome in _acceptance_results:
        terminalreporter.write_line(f"{outcome}  {name}")


def make_dataset(
    labels,
    predictions,
    sensitive: dict[str, list[int]],
    features: dict | None = None,
) -> AuditDataset:
    """Assemble a validated dataset from plain lists."""
    n = len(labels)
    features = features or {}

    def as_feature(values):
        if any(isinstance(v, str) for v in values if v is not None):
            return list(values)  # categorical
        return np.array([np.nan if v is None else float(v) for v in values])

    schema = ColumnSchema(
        feature_columns=tuple(features),
        sensitive_columns=tuple(sensitive),
        label_column="label",
        prediction_column="prediction",
    )
    return AuditDataset(
        schema=schema,
        n_rows=n,
        labels=np.array(labels, dtype=np.int8),
        predictions=np.array(predictions, dtype=np.int8),
        sensitive={a: np.array(v, dtype=np.int8) for a, v in sensitive.items()},
        features={c: as_feature(v) for c, v in features.items()},
    )


def random_binary_dataset(rng: random.Random, max_n: int = 50) -> AuditDataset:
    """Random labels/predictions/attribute with both groups guaranteed."""
    n = rng.randint(2, max_n)
    labels = [rng.randint(0, 1) for _ in range(n)]
    predictions = [rng.randint(0, 1) for _ in range(n)]
    s = [rng.randint(0, 1) for _ in range(n)]
    if all(v == 1 for v in s):
        s[0] = 0
    if all(v == 0 for v in s):
        s[0] = 1
    return make_dataset(labels, predictions, {"attr": s})


@pytest.fixture
def simple_dataset() -> AuditDataset:
    # privileged favorable rate .75, unprivileged .25
    return make_dataset(
        labels=[1, 0, 1, 0, 1, 0, 1, 0],
        predictions=[1, 1, 1, 0, 1, 0, 0, 0],
        sensitive={"race": [1, 1, 1, 1, 0, 0, 0, 0], "sex": [1, 0, 1, 0, 1, 0, 1, 0]},
    )


def run_full_audit(
    dataset: AuditDataset,
    rating: int = 3,
    seed: int = 42,
    replicates: int = 150,
    with_ci: bool = True,
    session_id: str = "test-session",
    timestamp: str = "2026-02-03T04:05:06+00:00",
):
    """Drive all five stages in-process and return the completed session."""
    from nishpaksh.config import ModelProfile, SectorPolicy, resolve_thresholds
    from nishpaksh.data_model import detect_proxies
    from nishpaksh.metrics import MetricResult, evaluate_dataset
    from nishpaksh.risk import SurveyResponse, assess, load_question_bank
    from nishpaksh.scoring import verdict
    from nishpaksh.session import complete_stage, create_session

    session = create_session(session_id=session_id, now=timestamp)
    bank = load_question_bank()
    responses = [SurveyResponse(i.id, rating) for i in bank]
    profile = assess(bank, responses)
    complete_stage(
        session,
        "SurveyIntake",
        {"responses": [r.to_dict() for r in responses], "risk_profile": profile.to_dict()},
        now=timestamp,
    )
    model = ModelProfile(
        model_type="machine-learning", task="binary-classification", version="m-1"
    )
    policy = SectorPolicy(
        sector="generic",
        selected_metrics=("SPD", "DI", "NDI", "EOD", "AOD", "EO", "THEIL"),
    )
    thresholds = resolve_thresholds(profile.category, policy)
    complete_stage(
        session,
        "ThresholdSpecification",
        {
            "model_profile": model.to_dict(),
            "sector_policy": policy.to_dict(),
            "threshold_spec": thresholds.to_dict(),
        },
        now=timestamp,
    )
    findings = detect_proxies(dataset)
    complete_stage(
        session,
        "ProxyFeatureReview",
        {
            "dataset_fingerprint": dataset.fingerprint,
            "n_rows": dataset.n_rows,
            "schema": dataset.schema.to_dict(),
            "proxy_findings": [f.to_dict() for f in findings],
            "proxy_threshold": 0.5,
            "rejected_rows": list(dataset.rejected_rows),
        },
        now=timestamp,
    )
    inference = evaluate_dataset(
        dataset,
        metrics=list(policy.selected_metrics),
        seed=seed,
        replicates=replicates,
        with_ci=with_ci,
    )
    complete_stage(session, "Inference", inference, now=timestamp)
    results = [MetricResult.from_dict(r) for r in inference["fairness"]]
    v = verdict(results, thresholds, attributes=list(dataset.schema.sensitive_columns))
    complete_stage(session, "CompositeScoring", {"verdict": v.to_dict()}, now=timestamp)
    return session
