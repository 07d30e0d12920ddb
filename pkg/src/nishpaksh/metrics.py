"""Group fairness and performance metrics with bootstrap confidence intervals.

All metrics are pure functions of an immutable AuditDataset. A zero
denominator never becomes 0: it yields an undefined result (value None,
defined False) that propagates through scoring and always fails a
threshold verdict. Point values and intervals are cached per dataset
fingerprint so repeated report stages do not recompute.

Sign convention: differences are privileged minus unprivileged, so a
positive SPD/EOD/AOD means the privileged group receives the favorable
treatment more often.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from itertools import product
from typing import Callable

import numpy as np

from .data_model import AuditDataset, group_partition
from .errors import TooManyDegenerateReplicatesError, UnknownMetricError

FAIRNESS_METRICS = ("SPD", "DI", "NDI", "EOD", "AOD", "EO", "THEIL")
PERFORMANCE_METRICS = ("ACCURACY", "PRECISION", "RECALL", "SPECIFICITY", "FPR", "FNR")
ALL_METRICS = FAIRNESS_METRICS + PERFORMANCE_METRICS

# Metrics that compare the two groups of one sensitive attribute; THEIL and
# the performance metrics are dataset-level ("overall").
GROUPWISE_METRICS = ("SPD", "DI", "NDI", "EOD", "AOD", "EO")

OVERALL = "overall"

DEFAULT_REPLICATES = 1000
DEFAULT_LEVEL = 0.95
REDRAW_FACTOR = 10


@dataclass(frozen=True)
class ConfusionCounts:
    """tp/fp/tn/fn for one group of rows."""

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


@dataclass(frozen=True)
class GroupConfusion:
    """Confusion counts split by privileged (1) / unprivileged (0) group."""

    privileged: ConfusionCounts
    unprivileged: ConfusionCounts

    def to_dict(self) -> dict:
        return {
            "privileged": self.privileged.to_dict(),
            "unprivileged": self.unprivileged.to_dict(),
        }


@dataclass
class MetricResult:
    """One metric value, optionally with a bootstrap CI and group breakdown."""

    metric: str
    attribute: str
    value: float | None
    ci_lower: float | None = None
    ci_upper: float | None = None
    defined: bool = True
    groups: dict = field(default_factory=dict)
    warning: str | None = None

    def __post_init__(self):
        if self.value is None:
            self.defined = False

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "attribute": self.attribute,
            "value": self.value,
            "ci_lower": self.ci_lower,
            "ci_upper": self.ci_upper,
            "defined": self.defined,
            "groups": self.groups,
            "warning": self.warning,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MetricResult":
        return cls(
            metric=data["metric"],
            attribute=data["attribute"],
            value=data["value"],
            ci_lower=data.get("ci_lower"),
            ci_upper=data.get("ci_upper"),
            defined=bool(data.get("defined", data["value"] is not None)),
            groups=data.get("groups") or {},
            warning=data.get("warning"),
        )


# -- confusion and plain rates ------------------------------------------------

def confusion_counts(
    labels: np.ndarray, predictions: np.ndarray, group_mask: np.ndarray
) -> ConfusionCounts:
    """Count tp/fp/tn/fn over the rows selected by group_mask (index array)."""
    if len(labels) != len(predictions):
        raise ValueError("labels and predictions differ in length")
    if len(group_mask) == 0:
        raise ValueError("group_mask is empty")
    y = np.asarray(labels)[group_mask]
    yhat = np.asarray(predictions)[group_mask]
    tp = int(((y == 1) & (yhat == 1)).sum())
    fp = int(((y == 0) & (yhat == 1)).sum())
    tn = int(((y == 0) & (yhat == 0)).sum())
    fn = int(((y == 1) & (yhat == 0)).sum())
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def _ratio(num: int, den: int) -> float | None:
    return None if den == 0 else num / den


def performance_metrics(confusion: ConfusionCounts) -> dict[str, float | None]:
    """Standard ratio metrics; zero denominators yield None, never 0."""
    c = confusion
    if c.total == 0:
        raise ValueError("empty confusion counts")
    return {
        "ACCURACY": (c.tp + c.tn) / c.total,
        "PRECISION": _ratio(c.tp, c.tp + c.fp),
        "RECALL": _ratio(c.tp, c.tp + c.fn),
        "SPECIFICITY": _ratio(c.tn, c.tn + c.fp),
        "FPR": _ratio(c.fp, c.fp + c.tn),
        "FNR": _ratio(c.fn, c.fn + c.tp),
    }


# -- metric kernels -----------------------------------------------------------
# Each kernel maps raw (labels, predictions, sensitive) arrays to a value or
# None. The public per-dataset operations and the bootstrap resampler share
# these so the two paths cannot drift apart.

def _rates(y: np.ndarray, yhat: np.ndarray, s: np.ndarray) -> tuple[float | None, float | None]:
    """Favorable-outcome rate per group; None when a group is empty."""
    priv = s == 1
    unpriv = s == 0
    p1 = float(yhat[priv].mean()) if priv.any() else None
    p0 = float(yhat[unpriv].mean()) if unpriv.any() else None
    return p1, p0


def _tpr_fpr(y: np.ndarray, yhat: np.ndarray, group: np.ndarray) -> tuple[float | None, float | None]:
    pos = group & (y == 1)
    neg = group & (y == 0)
    tpr = float(yhat[pos].mean()) if pos.any() else None
    fpr = float(yhat[neg].mean()) if neg.any() else None
    return tpr, fpr


def _kernel_spd(y, yhat, s):
    p1, p0 = _rates(y, yhat, s)
    if p1 is None or p0 is None:
        return None
    return p1 - p0


def _kernel_di(y, yhat, s):
    p1, p0 = _rates(y, yhat, s)
    if p1 is None or p0 is None:
        return None
    if p0 == 0.0:
        return 1.0 if p1 == 0.0 else None  # both-zero is parity by convention
    return p1 / p0


def _kernel_ndi(y, yhat, s):
    di = _kernel_di(y, yhat, s)
    return None if di is None else di - 1.0


def _kernel_eod(y, yhat, s):
    tpr1, _ = _tpr_fpr(y, yhat, s == 1)
    tpr0, _ = _tpr_fpr(y, yhat, s == 0)
    if tpr1 is None or tpr0 is None:
        return None
    return tpr1 - tpr0


def _kernel_aod(y, yhat, s):
    tpr1, fpr1 = _tpr_fpr(y, yhat, s == 1)
    tpr0, fpr0 = _tpr_fpr(y, yhat, s == 0)
    if None in (tpr1, fpr1, tpr0, fpr0):
        return None
    return 0.5 * ((fpr1 - fpr0) + (tpr1 - tpr0))


def _kernel_eo(y, yhat, s):
    tpr1, fpr1 = _tpr_fpr(y, yhat, s == 1)
    tpr0, fpr0 = _tpr_fpr(y, yhat, s == 0)
    if None in (tpr1, fpr1, tpr0, fpr0):
        return None
    return abs(fpr1 - fpr0) + abs(tpr1 - tpr0)


def _kernel_theil(y, yhat, s=None):
    """Generalized-entropy inequality over per-row benefits yhat - y + 1."""
    b = yhat.astype(float) - y.astype(float) + 1.0
    mu = b.mean()
    if mu == 0.0:
        return None  # every row has y=1, yhat=0: benefit carries no signal
    r = b / mu
    terms = np.where(r > 0, r * np.log(np.where(r > 0, r, 1.0)), 0.0)
    return float(terms.mean())


def _kernel_performance(name: str):
    def kernel(y, yhat, s=None):
        if len(y) == 0:
            return None
        counts = confusion_counts(y, yhat, np.arange(len(y)))
        return performance_metrics(counts)[name]

    return kernel


_KERNELS: dict[str, Callable] = {
    "SPD": _kernel_spd,
    "DI": _kernel_di,
    "NDI": _kernel_ndi,
    "EOD": _kernel_eod,
    "AOD": _kernel_aod,
    "EO": _kernel_eo,
    "THEIL": _kernel_theil,
    **{name: _kernel_performance(name) for name in PERFORMANCE_METRICS},
}


def _kernel(metric: str) -> Callable:
    try:
        return _KERNELS[metric]
    except KeyError:
        raise UnknownMetricError(
            f"unknown metric {metric!r}", details={"metric": metric}
        ) from None


# -- cache --------------------------------------------------------------------

_CACHE_MAX = 4096
_cache: OrderedDict[tuple, object] = OrderedDict()
_cache_lock = threading.Lock()


def _cached(key: tuple, compute: Callable[[], object]):
    with _cache_lock:
        if key in _cache:
            _cache.move_to_end(key)
            return _cache[key]
    value = compute()
    with _cache_lock:
        _cache[key] = value
        if len(_cache) > _CACHE_MAX:
            _cache.popitem(last=False)
    return value


def clear_cache() -> None:
    with _cache_lock:
        _cache.clear()


# -- public per-dataset operations ---------------------------------------------

def _arrays(dataset: AuditDataset, attribute: str | None):
    y = dataset.labels
    yhat = dataset.predictions
    s = dataset.sensitive_vector(attribute) if attribute else None
    return y, yhat, s


def compute_metric(dataset: AuditDataset, metric: str, attribute: str = OVERALL) -> MetricResult:
    """Point value for one metric; groupwise metrics need a sensitive attribute."""
    metric = metric.upper()
    kernel = _kernel(metric)
    groupwise = metric in GROUPWISE_METRICS
    attr = attribute if groupwise else OVERALL
    if groupwise:
        dataset.sensitive_vector(attribute)  # raises UnknownAttribute early

    def compute() -> MetricResult:
        y, yhat, s = _arrays(dataset, attribute if groupwise else None)
        value = kernel(y, yhat, s)
        groups = _group_breakdown(metric, y, yhat, s) if groupwise else {}
        return MetricResult(metric=metric, attribute=attr, value=value, groups=groups)

    result = _cached(("point", dataset.fingerprint, metric, attr), compute)
    # return a copy so callers attaching CIs do not mutate the cache
    return MetricResult(**{**result.__dict__, "groups": dict(result.groups)})


def _group_breakdown(metric: str, y, yhat, s) -> dict:
    if metric in ("SPD", "DI", "NDI"):
        p1, p0 = _rates(y, yhat, s)
        return {"privileged_rate": p1, "unprivileged_rate": p0}
    tpr1, fpr1 = _tpr_fpr(y, yhat, s == 1)
    tpr0, fpr0 = _tpr_fpr(y, yhat, s == 0)
    out = {"privileged_tpr": tpr1, "unprivileged_tpr": tpr0}
    if metric in ("AOD", "EO"):
        out.update({"privileged_fpr": fpr1, "unprivileged_fpr": fpr0})
    return out


def spd(dataset: AuditDataset, attribute: str) -> MetricResult:
    return compute_metric(dataset, "SPD", attribute)


def di(dataset: AuditDataset, attribute: str) -> MetricResult:
    return compute_metric(dataset, "DI", attribute)


def ndi(dataset: AuditDataset, attribute: str) -> MetricResult:
    return compute_metric(dataset, "NDI", attribute)


def eod(dataset: AuditDataset, attribute: str) -> MetricResult:
    return compute_metric(dataset, "EOD", attribute)


def aod(dataset: AuditDataset, attribute: str) -> MetricResult:
    return compute_metric(dataset, "AOD", attribute)


def eo(dataset: AuditDataset, attribute: str) -> MetricResult:
    return compute_metric(dataset, "EO", attribute)


def theil_index(dataset: AuditDataset) -> MetricResult:
    return compute_metric(dataset, "THEIL")


def group_confusion(dataset: AuditDataset, attribute: str) -> GroupConfusion:
    priv_idx, unpriv_idx = group_partition(dataset, attribute)
    return GroupConfusion(
        privileged=confusion_counts(dataset.labels, dataset.predictions, priv_idx),
        unprivileged=confusion_counts(dataset.labels, dataset.predictions, unpriv_idx),
    )


def subgroup_misclassification(dataset: AuditDataset, attributes: list[str]) -> list[dict]:
    """FPR/FNR per cell of the cross-product of the given attributes.

    Every cell appears, including empty ones; zero denominators carry None.
    """
    vectors = [dataset.sensitive_vector(a) for a in attributes]
    rows = []
    for combo in product((0, 1), repeat=len(attributes)):
        mask = np.ones(dataset.n_rows, dtype=bool)
        for vec, val in zip(vectors, combo):
            mask &= vec == val
        label = ",".join(f"{a}={v}" for a, v in zip(attributes, combo))
        n = int(mask.sum())
        if n == 0:
            rows.append({"subgroup": label, "n": 0, "fpr": None, "fnr": None})
            continue
        counts = confusion_counts(dataset.labels, dataset.predictions, np.flatnonzero(mask))
        rows.append(
            {
                "subgroup": label,
                "n": n,
                "fpr": _ratio(counts.fp, counts.fp + counts.tn),
                "fnr": _ratio(counts.fn, counts.fn + counts.tp),
            }
        )
    return rows


# -- bootstrap ----------------------------------------------------------------

def bootstrap_ci(
    dataset: AuditDataset,
    metric: str,
    attribute: str = OVERALL,
    replicates: int = DEFAULT_REPLICATES,
    seed: int | None = None,
    level: float = DEFAULT_LEVEL,
) -> tuple[float, float]:
    """Seeded percentile bootstrap interval for one metric.

    Rows are resampled with replacement; each draw gets its own RNG stream
    derived from (seed, draw index), so results do not depend on evaluation
    order. Draws on which the metric is undefined are discarded and redrawn,
    up to REDRAW_FACTOR times the replicate budget. Same inputs give a
    bit-identical interval.
    """
    metric = metric.upper()
    if seed is None:
        raise ValueError("an explicit seed is required for reproducible intervals")
    if replicates < 100:
        raise ValueError("replicates must be >= 100")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0,1)")
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    point = compute_metric(dataset, metric, attribute)
    if not point.defined:
        raise ValueError(f"{metric} is undefined on the full dataset; no CI")

    key = ("ci", dataset.fingerprint, metric, point.attribute, replicates, seed, level)

    def compute() -> tuple[float, float]:
        groupwise = metric in GROUPWISE_METRICS
        y, yhat, s = _arrays(dataset, attribute if groupwise else None)
        kernel = _kernel(metric)
        n = dataset.n_rows
        values: list[float] = []
        budget = replicates * REDRAW_FACTOR
        for draw in range(budget):
            if len(values) == replicates:
                break
            rng = np.random.default_rng((seed, draw))
            idx = rng.integers(0, n, n)
            v = kernel(y[idx], yhat[idx], None if s is None else s[idx])
            if v is not None:
                values.append(v)
        if len(values) < replicates:
            raise TooManyDegenerateReplicatesError(
                f"{metric} undefined on too many resamples "
                f"({len(values)}/{replicates} usable after {budget} draws)",
                details={"metric": metric, "usable": len(values), "budget": budget},
            )
        alpha = 1.0 - level
        lo, hi = np.quantile(values, [alpha / 2.0, 1.0 - alpha / 2.0])
        # percentile interval must bracket the point estimate we report
        return (float(min(lo, point.value)), float(max(hi, point.value)))

    return _cached(key, compute)


def compute_metric_with_ci(
    dataset: AuditDataset,
    metric: str,
    attribute: str = OVERALL,
    replicates: int = DEFAULT_REPLICATES,
    seed: int | None = None,
    level: float = DEFAULT_LEVEL,
) -> MetricResult:
    """Point value plus CI; degenerate bootstraps omit the CI with a warning."""
    result = compute_metric(dataset, metric, attribute)
    if not result.defined:
        return result
    try:
        lo, hi = bootstrap_ci(dataset, metric, attribute, replicates, seed, level)
        result.ci_lower, result.ci_upper = lo, hi
    except TooManyDegenerateReplicatesError as exc:
        result.warning = exc.message
    return result


def evaluate_dataset(
    dataset: AuditDataset,
    metrics: list[str],
    seed: int,
    replicates: int = DEFAULT_REPLICATES,
    level: float = DEFAULT_LEVEL,
    with_ci: bool = True,
) -> dict:
    """Full inference pass: selected fairness metrics per attribute, THEIL
    and performance metrics overall, and the subgroup FPR/FNR table.

    Returns a JSON-ready payload consumed by the session workflow.
    """
    selected = [m.upper() for m in metrics]
    for m in selected:
        _kernel(m)  # validate names before any work
    results: list[MetricResult] = []
    attrs = list(dataset.schema.sensitive_columns)
    for metric in selected:
        targets = attrs if metric in GROUPWISE_METRICS else [OVERALL]
        for attr in targets:
            if with_ci:
                results.append(
                    compute_metric_with_ci(dataset, metric, attr, replicates, seed, level)
                )
            else:
                results.append(compute_metric(dataset, metric, attr))
    performance = []
    for metric in PERFORMANCE_METRICS:
        if with_ci:
            performance.append(
                compute_metric_with_ci(dataset, metric, OVERALL, replicates, seed, level)
            )
        else:
            performance.append(compute_metric(dataset, metric, OVERALL))
    subgroups = subgroup_misclassification(dataset, attrs)
    warnings = [
        f"{r.metric}[{r.attribute}]: {r.warning}" for r in results + performance if r.warning
    ]
    warnings += [
        f"{r.metric}[{r.attribute}] undefined (zero denominator)"
        for r in results + performance
        if not r.defined
    ]
    return {
        "seed": seed,
        "replicates": replicates,
        "level": level,
        "with_ci": with_ci,
        "fairness": [r.to_dict() for r in results],
        "performance": [r.to_dict() for r in performance],
        "subgroup_rates": subgroups,
        "warnings": warnings,
    }
