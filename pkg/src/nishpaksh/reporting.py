"""Report compilation and rendering.

A report is assembled from a completed session's stored payloads only;
nothing is recomputed at render time, so regenerating from a restored
checkpoint reproduces the original bytes. Three parts: Summary (model
metadata, risk category, fairness score, verdict), Tabulation (risk
sub-scores, per-metric values with intervals and bounds, bias indices),
Detailed Analysis (survey responses, proxy findings, subgroup rates,
plot-data blocks, warnings, threshold provenance).

Renderers are pure views over the canonical JSON report: markdown and
HTML show 4-significant-digit values with a full-precision appendix, and
the HTML embeds no external resources.
"""

from __future__ import annotations

import html as html_lib
from dataclasses import dataclass

from . import canonical
from ._version import __version__
from .errors import PayloadMissingError, SessionIncompleteError, UnknownFormatError
from .session import SCHEMA_VERSION, AuditSession

REPORT_FORMATS = ("json", "markdown", "html")

PLOT_KINDS = (
    "metric-comparison",
    "subgroup-rates",
    "uncertainty-intervals",
    "fairness-performance-tradeoff",
)


@dataclass(frozen=True)
class PlotData:
    """One chart-ready block: labeled series plus axis metadata."""

    kind: str
    series: tuple[dict, ...]
    axes: dict

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise UnknownFormatError(f"unknown plot kind {self.kind!r}")
        for s in self.series:
            lengths = {
                len(s[key]) for key in ("x", "y", "lower", "upper") if key in s
            }
            if len(lengths) > 1:
                raise PayloadMissingError(
                    f"series {s.get('label')!r} has inconsistent array lengths"
                )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "series": [dict(s) for s in self.series],
            "axes": dict(self.axes),
        }


@dataclass(frozen=True)
class AuditReport:
    provenance: dict
    summary: dict
    tabulation: dict
    detailed_analysis: dict

    def to_dict(self) -> dict:
        return {
            "provenance": dict(self.provenance),
            "summary": dict(self.summary),
            "tabulation": dict(self.tabulation),
            "detailed_analysis": dict(self.detailed_analysis),
        }


def _require_complete(session: AuditSession) -> None:
    if session.stage != "Complete":
        raise SessionIncompleteError(
            f"session is at stage {session.stage!r}; report needs a completed audit",
            details={"stage": session.stage},
        )


def generate_report(session: AuditSession) -> AuditReport:
    """Assemble the three-part report from the session's stored payloads."""
    _require_complete(session)
    survey = session.payload("SurveyIntake")
    config = session.payload("ThresholdSpecification")
    proxy = session.payload("ProxyFeatureReview")
    inference = session.payload("Inference")
    scoring = session.payload("CompositeScoring")

    risk_profile = survey["risk_profile"]
    threshold_spec = config["threshold_spec"]
    verdict = scoring["verdict"]

    provenance = {
        "tool_version": __version__,
        "checkpoint_schema_version": SCHEMA_VERSION,
        "session_id": session.session_id,
        "created_at": session.created_at,
        "updated_at": session.updated_at,
        "revision": session.revision,
        "threshold_table_version": threshold_spec["table_version"],
        "seed": inference["seed"],
        "replicates": inference["replicates"],
        "level": inference["level"],
        "dataset_fingerprint": proxy["dataset_fingerprint"],
    }

    summary = {
        "model": dict(config["model_profile"]),
        "risk_category": risk_profile["category"],
        "fairness_score": verdict["fairness_score"],
        "fairness_score_clamped": verdict["fairness_score_clamped"],
        "overall_verdict": "pass" if verdict["overall_pass"] else "fail",
    }

    ci_by_key = {
        (r["metric"], r["attribute"]): r for r in inference["fairness"]
    }
    metric_rows = []
    for check in verdict["checks"]:
        stored = ci_by_key.get((check["metric"], check["attribute"]), {})
        metric_rows.append(
            {
                **check,
                "ci_lower": stored.get("ci_lower"),
                "ci_upper": stored.get("ci_upper"),
            }
        )

    tabulation = {
        "domain_scores": dict(risk_profile["domain_scores"]),
        "process_score": risk_profile.get("process_score"),
        "technical_score": risk_profile.get("technical_score"),
        "composite_risk": risk_profile["composite"],
        "risk_category": risk_profile["category"],
        "metrics": metric_rows,
        "bias_index": dict(verdict["bias_index"]),
        "bi_metrics": list(verdict["bi_metrics"]),
    }

    warnings = list(inference.get("warnings", [])) + list(verdict.get("warnings", []))
    plot_blocks = {}
    for kind in PLOT_KINDS:
        try:
            plot_blocks[kind] = export_plot_data(session, kind).to_dict()
        except PayloadMissingError:
            continue

    detailed = {
        "survey_responses": list(survey["responses"]),
        "sector_policy": dict(config["sector_policy"]),
        "proxy_findings": list(proxy["proxy_findings"]),
        "proxy_threshold": proxy.get("proxy_threshold"),
        "rejected_rows": list(proxy.get("rejected_rows", [])),
        "subgroup_misclassification": list(inference["subgroup_rates"]),
        "performance": list(inference["performance"]),
        "plot_data": plot_blocks,
        "warnings": warnings,
        "threshold_provenance": {
            m: dict(spec) for m, spec in threshold_spec["metrics"].items()
        },
    }

    return AuditReport(
        provenance=provenance,
        summary=summary,
        tabulation=tabulation,
        detailed_analysis=detailed,
    )


# -- plot data ----------------------------------------------------------------

def export_plot_data(session: AuditSession, kind: str) -> PlotData:
    """Chart-ready series for one plot kind, straight from stored payloads."""
    if kind not in PLOT_KINDS:
        raise UnknownFormatError(f"unknown plot kind {kind!r}", details={"kind": kind})
    payloads = session.payloads

    def need(stage: str) -> dict:
        if stage not in payloads:
            raise PayloadMissingError(
                f"plot {kind!r} needs the {stage} payload",
                details={"kind": kind, "stage": stage},
            )
        return payloads[stage]

    if kind == "metric-comparison":
        inference = need("Inference")
        per_attr: dict[str, dict[str, float | None]] = {}
        for r in inference["fairness"]:
            if r["attribute"] == "overall":
                continue
            per_attr.setdefault(r["attribute"], {})[r["metric"]] = r["value"]
        metrics = sorted({m for vals in per_attr.values() for m in vals})
        series = tuple(
            {
                "label": attr,
                "x": metrics,
                "y": [per_attr[attr].get(m) for m in metrics],
            }
            for attr in sorted(per_attr)
        )
        return PlotData(kind=kind, series=series, axes={"x": "metric", "y": "value"})

    if kind == "subgroup-rates":
        inference = need("Inference")
        rows = inference["subgroup_rates"]
        labels = [r["subgroup"] for r in rows]
        return PlotData(
            kind=kind,
            series=(
                {"label": "FPR", "x": labels, "y": [r["fpr"] for r in rows]},
                {"label": "FNR", "x": labels, "y": [r["fnr"] for r in rows]},
            ),
            axes={"x": "subgroup", "y": "rate"},
        )

    if kind == "uncertainty-intervals":
        inference = need("Inference")
        if not inference.get("with_ci", False):
            raise PayloadMissingError(
                "confidence intervals were disabled for this session",
                details={"kind": kind},
            )
        labels, values, lowers, uppers = [], [], [], []
        for r in inference["fairness"] + inference["performance"]:
            if r.get("ci_lower") is None:
                continue
            labels.append(f"{r['metric']}[{r['attribute']}]")
            values.append(r["value"])
            lowers.append(r["ci_lower"])
            uppers.append(r["ci_upper"])
        series = (
            {"label": "point", "x": labels, "y": values, "lower": lowers, "upper": uppers},
        )
        return PlotData(kind=kind, series=series, axes={"x": "metric", "y": "value"})

    # fairness-performance-tradeoff
    inference = need("Inference")
    scoring = need("CompositeScoring")
    accuracy = next(
        (r["value"] for r in inference["performance"] if r["metric"] == "ACCURACY"),
        None,
    )
    fs = scoring["verdict"]["fairness_score"]
    if accuracy is None or fs is None:
        raise PayloadMissingError(
            "tradeoff plot needs a defined accuracy and fairness score",
            details={"kind": kind},
        )
    series = ({"label": "model", "x": [accuracy], "y": [fs]},)
    return PlotData(
        kind=kind, series=series, axes={"x": "accuracy", "y": "fairness_score"}
    )


# -- rendering ----------------------------------------------------------------

def render(report: AuditReport, format: str) -> bytes:
    """Serialize a report: canonical json, markdown, or self-contained html."""
    if format == "json":
        return canonical.dump_bytes(report.to_dict())
    if format == "markdown":
        return _render_markdown(report).encode("utf-8")
    if format == "html":
        return _render_html(report).encode("utf-8")
    raise UnknownFormatError(
        f"unknown report format {format!r}", details={"format": format}
    )


def _fmt(value) -> str:
    if value is None:
        return "undefined"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


def _full(value) -> str:
    if value is None:
        return "undefined"
    return repr(value) if isinstance(value, float) else str(value)


def _collect_precision_rows(report: AuditReport) -> list[tuple[str, str]]:
    """Full-precision values for the appendix, keyed by dotted path."""
    rows: list[tuple[str, str]] = []
    t = report.tabulation
    rows.append(("summary.fairness_score", _full(report.summary["fairness_score"])))
    rows.append(
        ("summary.fairness_score_clamped", _full(report.summary["fairness_score_clamped"]))
    )
    rows.append(("tabulation.composite_risk", _full(t["composite_risk"])))
    for domain in sorted(t["domain_scores"]):
        rows.append((f"tabulation.domain_scores.{domain}", _full(t["domain_scores"][domain])))
    rows.append(("tabulation.process_score", _full(t["process_score"])))
    rows.append(("tabulation.technical_score", _full(t["technical_score"])))
    for attr in sorted(t["bias_index"]):
        rows.append((f"tabulation.bias_index.{attr}", _full(t["bias_index"][attr])))
    for row in t["metrics"]:
        key = f"tabulation.metrics.{row['metric']}[{row['attribute']}]"
        rows.append((key, _full(row["value"])))
        if row.get("ci_lower") is not None:
            rows.append((key + ".ci_lower", _full(row["ci_lower"])))
            rows.append((key + ".ci_upper", _full(row["ci_upper"])))
    return rows


def _render_markdown(report: AuditReport) -> str:
    p, s, t, d = (
        report.provenance,
        report.summary,
        report.tabulation,
        report.detailed_analysis,
    )
    lines: list[str] = []
    out = lines.append
    out("# Fairness Audit Report")
    out("")
    out(f"Session `{p['session_id']}` (revision {p['revision']}), "
        f"tool {p['tool_version']}, threshold table {p['threshold_table_version']}.")
    out(f"Dataset fingerprint `{p['dataset_fingerprint']}`; "
        f"seed {p['seed']}, {p['replicates']} bootstrap replicates at level {_fmt(p['level'])}.")
    out("")
    out("## Summary")
    out("")
    model = s["model"]
    out(f"- Model: {model.get('version') or 'unversioned'} "
        f"({model.get('model_type')}, {model.get('task')})")
    if model.get("purpose"):
        out(f"- Purpose: {model['purpose']}")
    if model.get("intended_use"):
        out(f"- Intended use: {model['intended_use']}")
    out(f"- Risk category: {s['risk_category']}")
    out(f"- Fairness score: {_fmt(s['fairness_score'])} "
        f"(clamped {_fmt(s['fairness_score_clamped'])})")
    out(f"- Overall verdict: **{s['overall_verdict'].upper()}**")
    out("")
    out("## Tabulation")
    out("")
    out("### Risk scores")
    out("")
    out("| Domain | Score |")
    out("| --- | --- |")
    for domain in sorted(t["domain_scores"]):
        out(f"| {domain} | {_fmt(t['domain_scores'][domain])} |")
    out(f"| Process sub-score | {_fmt(t['process_score'])} |")
    out(f"| Technical sub-score | {_fmt(t['technical_score'])} |")
    out(f"| **Composite** | **{_fmt(t['composite_risk'])}** ({t['risk_category']}) |")
    out("")
    out("### Fairness metrics")
    out("")
    out("| Metric | Attribute | Value | 95% CI | Bounds | Verdict |")
    out("| --- | --- | --- | --- | --- | --- |")
    for row in t["metrics"]:
        ci = (
            f"[{_fmt(row['ci_lower'])}, {_fmt(row['ci_upper'])}]"
            if row.get("ci_lower") is not None
            else "n/a"
        )
        bounds = f"[{_fmt(row['lower'])}, {_fmt(row['upper'])}]"
        verdict = "pass" if row["pass"] else f"fail ({row['reason']})"
        out(
            f"| {row['metric']} | {row['attribute']} | {_fmt(row['value'])} "
            f"| {ci} | {bounds} | {verdict} |"
        )
    out("")
    out("### Bias index")
    out("")
    out(f"Metric vector: {', '.join(t['bi_metrics'])}; reference: parity unless supplied.")
    out("")
    out("| Attribute | Bias index |")
    out("| --- | --- |")
    for attr in sorted(t["bias_index"]):
        out(f"| {attr} | {_fmt(t['bias_index'][attr])} |")
    out("")
    out("## Detailed Analysis")
    out("")
    out("### Proxy findings")
    out("")
    if d["proxy_findings"]:
        out("| Feature | Sensitive attribute | Association | Measure | Flagged |")
        out("| --- | --- | --- | --- | --- |")
        for f in d["proxy_findings"]:
            flagged = "yes" if f["flagged"] else "no"
            if f.get("warning"):
                flagged += f" ({f['warning']})"
            out(
                f"| {f['feature']} | {f['sensitive_attribute']} "
                f"| {_fmt(f['association'])} | {f['measure']} | {flagged} |"
            )
    else:
        out("No feature columns were scanned.")
    out("")
    out("### Subgroup misclassification")
    out("")
    out("| Subgroup | N | FPR | FNR |")
    out("| --- | --- | --- | --- |")
    for row in d["subgroup_misclassification"]:
        out(f"| {row['subgroup']} | {row['n']} | {_fmt(row['fpr'])} | {_fmt(row['fnr'])} |")
    out("")
    out("### Performance")
    out("")
    out("| Metric | Value | 95% CI |")
    out("| --- | --- | --- |")
    for r in d["performance"]:
        ci = (
            f"[{_fmt(r['ci_lower'])}, {_fmt(r['ci_upper'])}]"
            if r.get("ci_lower") is not None
            else "n/a"
        )
        out(f"| {r['metric']} | {_fmt(r['value'])} | {ci} |")
    out("")
    out("### Survey responses")
    out("")
    out("| Item | Rating |")
    out("| --- | --- |")
    for resp in d["survey_responses"]:
        out(f"| {resp['item_id']} | {resp['rating']} |")
    out("")
    out("### Threshold provenance")
    out("")
    out("| Metric | Lower | Upper | Source |")
    out("| --- | --- | --- | --- |")
    for metric in sorted(d["threshold_provenance"]):
        spec = d["threshold_provenance"][metric]
        out(
            f"| {metric} | {_fmt(spec['lower'])} | {_fmt(spec['upper'])} "
            f"| {spec['provenance']} |"
        )
    out("")
    if d["warnings"]:
        out("### Warnings")
        out("")
        for w in d["warnings"]:
            out(f"- {w}")
        out("")
    if d["rejected_rows"]:
        out(
            f"Rows rejected at ingestion (missing outcome/sensitive cells): "
            f"{', '.join(str(i) for i in d['rejected_rows'])}"
        )
        out("")
    out("### Appendix: full-precision values")
    out("")
    out("| Path | Value |")
    out("| --- | --- |")
    for key, value in _collect_precision_rows(report):
        out(f"| {key} | {value} |")
    out("")
    return "\n".join(lines)


_HTML_STYLE = (
    "body{font-family:sans-serif;margin:2rem;color:#1a1a1a}"
    "table{border-collapse:collapse;margin:0.75rem 0}"
    "td,th{border:1px solid #bbb;padding:0.3rem 0.6rem;text-align:left}"
    "h1,h2,h3{color:#123}"
    ".pass{color:#0a6b0a;font-weight:bold}.fail{color:#a11;font-weight:bold}"
    "code{background:#f2f2f2;padding:0 0.2rem}"
)


def _render_html(report: AuditReport) -> str:
    """Self-contained HTML: inline style only, no external fetches."""
    md = _render_markdown(report)
    body: list[str] = []
    in_table = False
    for line in md.split("\n"):
        if line.startswith("|"):
            cells = [c.strip() for c in line.strip("|").split("|")]
            if all(set(c) <= {"-", " "} and c for c in cells):
                continue  # markdown header separator row
            tag = "th" if not in_table else "td"
            if not in_table:
                body.append("<table>")
                in_table = True
            row = "".join(f"<{tag}>{_md_inline(c)}</{tag}>" for c in cells)
            body.append(f"<tr>{row}</tr>")
            continue
        if in_table:
            body.append("</table>")
            in_table = False
        if line.startswith("# "):
            body.append(f"<h1>{_md_inline(line[2:])}</h1>")
        elif line.startswith("## "):
            body.append(f"<h2>{_md_inline(line[3:])}</h2>")
        elif line.startswith("### "):
            body.append(f"<h3>{_md_inline(line[4:])}</h3>")
        elif line.startswith("- "):
            body.append(f"<p>{_md_inline(line[2:])}</p>")
        elif line.strip():
            body.append(f"<p>{_md_inline(line)}</p>")
    if in_table:
        body.append("</table>")
    verdict_class = "pass" if report.summary["overall_verdict"] == "pass" else "fail"
    content = "\n".join(body).replace(
        f"<strong>{report.summary['overall_verdict'].upper()}</strong>",
        f"<strong class=\"{verdict_class}\">{report.summary['overall_verdict'].upper()}</strong>",
    )
    return (
        "<!DOCTYPE html>\n<html lang=\"en\"><head><meta charset=\"utf-8\">"
        f"<title>Fairness Audit Report</title><style>{_HTML_STYLE}</style></head>"
        f"<body>\n{content}\n</body></html>\n"
    )


def _md_inline(text: str) -> str:
    """Escape HTML, then re-apply the few markdown inline marks we emit."""
    escaped = html_lib.escape(text)
    while "**" in escaped:
        escaped = escaped.replace("**", "<strong>", 1).replace("**", "</strong>", 1)
    while "`" in escaped:
        escaped = escaped.replace("`", "<code>", 1).replace("`", "</code>", 1)
    return escaped
