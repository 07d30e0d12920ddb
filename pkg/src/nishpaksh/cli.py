"""Batch-mode command line front end.

Exit codes form the CI contract: 0 means the audit ran and every selected
metric passed, 1 means the audit ran but the verdict failed, 2 is a usage
error, and 3 is a validation or domain error (details as ApiError JSON on
stderr). `audit run` is byte-reproducible for fixed inputs and seed: the
session id derives from the input content, and timestamps pin to the
epoch unless --timestamp supplies a real one.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import canonical
from .config import ModelProfile, SectorPolicy, resolve_thresholds
from .data_model import ColumnSchema, detect_proxies, load_csv, DEFAULT_PROXY_THRESHOLD
from .errors import AuditError
from .metrics import (
    DEFAULT_LEVEL,
    DEFAULT_REPLICATES,
    FAIRNESS_METRICS,
    GROUPWISE_METRICS,
    MetricResult,
    compute_metric,
    compute_metric_with_ci,
    evaluate_dataset,
)
from .reporting import REPORT_FORMATS, generate_report, render
from .risk import assess, load_question_bank, parse_responses
from .scoring import (
    DEFAULT_BI_METRICS,
    MetricVector,
    bias_index,
    clamp_unit,
    fairness_score,
    verdict,
)
from .session import CHECKPOINT_SUFFIX, checkpoint_bytes, complete_stage, create_session, restore

EPOCH_ISO = "1970-01-01T00:00:00+00:00"

EXIT_VERDICT_FAIL = 1
EXIT_DOMAIN_ERROR = 3


def guarded(fn):
    """Map domain errors to exit 3 with an ApiError JSON body on stderr."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except AuditError as exc:
            click.echo(canonical.dumps(exc.to_dict()), err=True)
            sys.exit(EXIT_DOMAIN_ERROR)
        except (json.JSONDecodeError, ValueError, OSError) as exc:
            click.echo(
                canonical.dumps({"code": "VALIDATION", "message": str(exc)}), err=True
            )
            sys.exit(EXIT_DOMAIN_ERROR)

    return wrapper


def _read_json(path: str):
    return json.loads(Path(path).read_text("utf-8"))


def _emit(payload) -> None:
    click.echo(canonical.dumps(payload))


@click.group()
@click.version_option(package_name="nishpaksh")
def main():
    """Fairness audit toolkit."""


# -- audit ---------------------------------------------------------------

@main.group()
def audit():
    """End-to-end audit runs."""


@audit.command("run")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True))
@click.option("--survey", "survey_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--replicates", default=DEFAULT_REPLICATES, show_default=True, type=int)
@click.option("--level", default=DEFAULT_LEVEL, show_default=True, type=float)
@click.option("--no-ci", is_flag=True, help="Skip bootstrap intervals.")
@click.option("--question-bank", "bank_path", type=click.Path(exists=True), default=None)
@click.option("--timestamp", default=EPOCH_ISO, show_default=False,
              help="ISO timestamp recorded on the session (default: epoch, for reproducible runs).")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@guarded
def audit_run(
    data_path, schema_path, survey_path, config_path, seed, replicates, level,
    no_ci, bank_path, timestamp, out_dir,
):
    """Run all five stages non-interactively and write checkpoint + reports.

    Exits 0 only if every selected metric passes on every attribute.
    """
    csv_bytes = Path(data_path).read_bytes()
    schema_doc = _read_json(schema_path)
    survey_doc = _read_json(survey_path)
    config_doc = _read_json(config_path)

    session_id = "b" + canonical.fingerprint_json(
        {
            "csv": canonical.fingerprint(csv_bytes),
            "schema": schema_doc,
            "survey": survey_doc,
            "config": config_doc,
            "seed": seed,
            "replicates": replicates,
            "level": level,
            "with_ci": not no_ci,
        }
    )[:16]
    session = create_session(session_id=session_id, now=timestamp)

    bank = load_question_bank(bank_path)
    responses = parse_responses(survey_doc)
    profile = assess(bank, responses)
    complete_stage(
        session,
        "SurveyIntake",
        {"responses": [r.to_dict() for r in responses], "risk_profile": profile.to_dict()},
        now=timestamp,
    )

    model = ModelProfile.from_dict(config_doc["model_profile"])
    policy = SectorPolicy.from_dict(config_doc["sector_policy"])
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

    schema = ColumnSchema.from_dict(schema_doc)
    dataset = load_csv(csv_bytes, schema)
    proxy_threshold = float(config_doc.get("proxy_threshold", DEFAULT_PROXY_THRESHOLD))
    findings = detect_proxies(dataset, proxy_threshold)
    complete_stage(
        session,
        "ProxyFeatureReview",
        {
            "dataset_fingerprint": dataset.fingerprint,
            "n_rows": dataset.n_rows,
            "schema": schema.to_dict(),
            "proxy_findings": [f.to_dict() for f in findings],
            "proxy_threshold": proxy_threshold,
            "rejected_rows": list(dataset.rejected_rows),
        },
        now=timestamp,
    )

    inference = evaluate_dataset(
        dataset,
        metrics=list(policy.selected_metrics),
        seed=seed,
        replicates=replicates,
        level=level,
        with_ci=not no_ci,
    )
    complete_stage(session, "Inference", inference, now=timestamp)

    results = [MetricResult.from_dict(r) for r in inference["fairness"]]
    bi_metrics = tuple(config_doc.get("bi_metrics") or DEFAULT_BI_METRICS)
    reference = None
    if config_doc.get("reference"):
        reference = {
            attr: MetricVector.from_dict(vec)
            for attr, vec in config_doc["reference"].items()
        }
    result = verdict(
        results,
        thresholds,
        attributes=list(schema.sensitive_columns),
        bi_metrics=bi_metrics,
        reference=reference,
    )
    complete_stage(session, "CompositeScoring", {"verdict": result.to_dict()}, now=timestamp)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{session_id}{CHECKPOINT_SUFFIX}").write_bytes(checkpoint_bytes(session))
    report = generate_report(session)
    for fmt, suffix in (("json", ".report.json"), ("markdown", ".report.md"), ("html", ".report.html")):
        (out / f"{session_id}{suffix}").write_bytes(render(report, fmt))

    _emit(
        {
            "session_id": session_id,
            "overall_pass": result.overall_pass,
            "fairness_score": result.fairness_score,
            "fairness_score_clamped": result.fairness_score_clamped,
            "risk_category": profile.category,
            "out_dir": str(out),
        }
    )
    if not result.overall_pass:
        sys.exit(EXIT_VERDICT_FAIL)


# -- survey ----------------------------------------------------------------

@main.group()
def survey():
    """Questionnaire scoring."""


@survey.command("score")
@click.option("--responses", "responses_path", required=True, type=click.Path(exists=True))
@click.option("--question-bank", "bank_path", type=click.Path(exists=True), default=None)
@guarded
def survey_score(responses_path, bank_path):
    """Score survey responses and print the risk profile."""
    bank = load_question_bank(bank_path)
    responses = parse_responses(_read_json(responses_path))
    _emit(assess(bank, responses).to_dict())


# -- metrics -----------------------------------------------------------------

@main.group()
def metrics():
    """Metric computation on a CSV."""


@metrics.command("compute")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--schema", "schema_path", required=True, type=click.Path(exists=True))
@click.option("--attribute", required=True)
@click.option("--metric", "metric_names", multiple=True,
              help="Metric name; repeatable. Defaults to all fairness metrics.")
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--replicates", default=DEFAULT_REPLICATES, show_default=True, type=int)
@click.option("--level", default=DEFAULT_LEVEL, show_default=True, type=float)
@click.option("--no-ci", is_flag=True)
@guarded
def metrics_compute(data_path, schema_path, attribute, metric_names, seed, replicates, level, no_ci):
    """Print a MetricResult JSON array for one sensitive attribute."""
    schema = ColumnSchema.from_dict(_read_json(schema_path))
    dataset = load_csv(Path(data_path).read_bytes(), schema)
    names = [m.upper() for m in metric_names] or list(FAIRNESS_METRICS)
    out = []
    for name in names:
        attr = attribute if name in GROUPWISE_METRICS else "overall"
        if no_ci:
            out.append(compute_metric(dataset, name, attr).to_dict())
        else:
            out.append(
                compute_metric_with_ci(dataset, name, attr, replicates, seed, level).to_dict()
            )
    _emit(out)


# -- composite scores ----------------------------------------------------------

@main.group()
def score():
    """Composite index arithmetic."""


def _parse_vector(raw: str, fallback_names) -> MetricVector:
    doc = json.loads(raw)
    if isinstance(doc, list):
        return MetricVector(names=tuple(fallback_names[: len(doc)]), values=tuple(doc))
    return MetricVector.from_dict(doc)


@score.command("bi")
@click.option("--evaluated", required=True, help="JSON array or MetricVector object.")
@click.option("--reference", required=True, help="JSON array or MetricVector object.")
@guarded
def score_bi(evaluated, reference):
    """Bias index between an evaluated metric vector and a reference."""
    ev = _parse_vector(evaluated, DEFAULT_BI_METRICS)
    ref = _parse_vector(reference, DEFAULT_BI_METRICS)
    _emit({"bias_index": bias_index(ev, ref), "metrics": list(ev.names)})


@score.command("fs")
@click.option("--bi", "bi_json", required=True, help="JSON array of bias indices.")
@guarded
def score_fs(bi_json):
    """Fairness score from per-attribute bias indices."""
    values = [float(v) for v in json.loads(bi_json)]
    fs = fairness_score(values)
    _emit({"fairness_score": fs, "fairness_score_clamped": clamp_unit(fs)})


# -- report ---------------------------------------------------------------------

@main.group()
def report():
    """Report rendering from checkpoints."""


@report.command("render")
@click.option("--checkpoint", "checkpoint_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", default="json", show_default=True,
              type=click.Choice(REPORT_FORMATS))
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write to a file instead of stdout.")
@guarded
def report_render(checkpoint_path, fmt, out_path):
    """Render a report from a session checkpoint file."""
    session = restore(Path(checkpoint_path).read_bytes())
    payload = render(generate_report(session), fmt)
    if out_path:
        Path(out_path).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()


# -- serve ------------------------------------------------------------------------

@main.command("serve")
@click.option("--addr", default=None, help="host:port (default NISHPAKSH_ADDR or 127.0.0.1:8680).")
@click.option("--data-dir", default=None, type=click.Path(file_okay=False))
@click.option("--question-bank", "bank_path", type=click.Path(exists=True), default=None)
@guarded
def serve(addr, data_dir, bank_path):
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app, resolve_addr

    host, port = resolve_addr(addr)
    app = create_app(data_dir=data_dir, question_bank_path=bank_path)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
