"""Fairness auditing toolkit for binary classifiers over tabular data.

Workflow: score the lifecycle risk questionnaire, resolve risk-calibrated
metric thresholds, ingest predictions with sensitive attributes, compute
group fairness metrics with bootstrap intervals, and compile a
certification-style report with per-attribute bias indices and a
composite fairness score.
"""

from ._version import __version__
from .config import ModelProfile, SectorPolicy, ThresholdSpec, resolve_thresholds
from .data_model import (
    AuditDataset,
    ColumnSchema,
    ProxyFinding,
    detect_proxies,
    group_partition,
    load_csv,
)
from .errors import AuditError
from .metrics import (
    MetricResult,
    bootstrap_ci,
    compute_metric,
    compute_metric_with_ci,
    evaluate_dataset,
    subgroup_misclassification,
    theil_index,
)
from .reporting import AuditReport, PlotData, export_plot_data, generate_report, render
from .risk import (
    RiskProfile,
    SurveyItem,
    SurveyResponse,
    assess,
    classify_risk,
    load_question_bank,
)
from .scoring import FairnessVerdict, MetricVector, bias_index, fairness_score, verdict
from .session import (
    AuditSession,
    amend_stage,
    checkpoint,
    complete_stage,
    create_session,
    restore,
)

__all__ = [
    "__version__",
    "AuditDataset",
    "AuditError",
    "AuditReport",
    "AuditSession",
    "ColumnSchema",
    "FairnessVerdict",
    "MetricResult",
    "MetricVector",
    "ModelProfile",
    "PlotData",
    "ProxyFinding",
    "RiskProfile",
    "SectorPolicy",
    "SurveyItem",
    "SurveyResponse",
    "ThresholdSpec",
    "amend_stage",
    "assess",
    "bias_index",
    "bootstrap_ci",
    "checkpoint",
    "classify_risk",
    "complete_stage",
    "compute_metric",
    "compute_metric_with_ci",
    "create_session",
    "detect_proxies",
    "evaluate_dataset",
    "export_plot_data",
    "fairness_score",
    "generate_report",
    "group_partition",
    "load_csv",
    "load_question_bank",
    "render",
    "resolve_thresholds",
    "restore",
    "subgroup_misclassification",
    "theil_index",
    "verdict",
]
