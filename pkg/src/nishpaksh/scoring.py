"""Bias Index, Fairness Score, and threshold verdicts.

The Bias Index for one sensitive attribute is the RMS deviation of that
attribute's fairness-metric vector from a reference vector. The default
reference is ideal parity (all difference-scale metrics at 0); a baseline
model's measured vector may replace it. The Fairness Score aggregates the
per-attribute Bias Indices: FS = 1 - RMS(BI), so 1 means perfectly fair
and values can go negative when indices exceed 1 (both the raw and the
[0,1]-clamped score are reported).

DI stays out of Bias Index vectors: it is a ratio centered at 1, and NDI
already carries the same signal on the difference scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .config import ThresholdSpec
from .errors import EmptyListError, MissingResultError, VectorMismatchError
from .metrics import GROUPWISE_METRICS, OVERALL, MetricResult

# Default metric ordering for Bias Index vectors. EO is computed from the
# sum-of-absolute-differences definition; drop it via bi_metrics when
# comparing against older tabulations that folded EO into |AOD|.
DEFAULT_BI_METRICS = ("SPD", "NDI", "EOD", "AOD", "EO")


@dataclass(frozen=True)
class MetricVector:
    """Ordered fairness-metric values for one sensitive attribute."""

    names: tuple[str, ...]
    values: tuple[float, ...]
    attribute: str = ""

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(n.upper() for n in self.names))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.names) != len(self.values):
            raise VectorMismatchError(
                f"{len(self.names)} metric names but {len(self.values)} values"
            )

    def to_dict(self) -> dict:
        return {
            "names": list(self.names),
            "values": list(self.values),
            "attribute": self.attribute,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MetricVector":
        return cls(
            names=tuple(data["names"]),
            values=tuple(data["values"]),
            attribute=data.get("attribute", ""),
        )


def parity_reference(names: tuple[str, ...] | list[str], attribute: str = "") -> MetricVector:
    """Ideal-parity reference: zero for every difference-scale metric."""
    return MetricVector(names=tuple(names), values=(0.0,) * len(names), attribute=attribute)


def bias_index(evaluated: MetricVector, reference: MetricVector) -> float:
    """RMS distance between an evaluated metric vector and its reference."""
    if evaluated.names != reference.names:
        raise VectorMismatchError(
            "evaluated and reference vectors disagree on metrics",
            details={"evaluated": list(evaluated.names), "reference": list(reference.names)},
        )
    n = len(evaluated.names)
    if n == 0:
        raise VectorMismatchError("metric vectors are empty")
    return math.sqrt(
        sum((m - r) ** 2 for m, r in zip(evaluated.values, reference.values)) / n
    )


def fairness_score(bias_indices: list[float]) -> float:
    """1 - RMS of the per-attribute Bias Indices (raw, unclamped)."""
    if not bias_indices:
        raise EmptyListError("fairness_score needs at least one bias index")
    if any(b < 0 for b in bias_indices):
        raise ValueError("bias indices are non-negative by construction")
    m = len(bias_indices)
    return 1.0 - math.sqrt(sum(b * b for b in bias_indices) / m)


def clamp_unit(x: float) -> float:
    return max(0.0, min(1.0, x))


@dataclass
class FairnessVerdict:
    """Per-metric pass/fail against bounds plus the composite indices."""

    checks: list[dict]  # {metric, attribute, value, defined, lower, upper, pass, reason}
    overall_pass: bool
    bias_index: dict[str, float | None]  # per sensitive attribute
    bi_metrics: tuple[str, ...]
    fairness_score: float | None
    fairness_score_clamped: float | None
    reference: dict[str, dict]  # attribute -> reference vector used
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "checks": [dict(c) for c in self.checks],
            "overall_pass": self.overall_pass,
            "bias_index": dict(self.bias_index),
            "bi_metrics": list(self.bi_metrics),
            "fairness_score": self.fairness_score,
            "fairness_score_clamped": self.fairness_score_clamped,
            "reference": {a: dict(v) for a, v in self.reference.items()},
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FairnessVerdict":
        return cls(
            checks=[dict(c) for c in data["checks"]],
            overall_pass=bool(data["overall_pass"]),
            bias_index=dict(data["bias_index"]),
            bi_metrics=tuple(data["bi_metrics"]),
            fairness_score=data["fairness_score"],
            fairness_score_clamped=data["fairness_score_clamped"],
            reference={a: dict(v) for a, v in data["reference"].items()},
            warnings=list(data.get("warnings", [])),
        )


def _result_index(results: list[MetricResult]) -> dict[tuple[str, str], MetricResult]:
    return {(r.metric, r.attribute): r for r in results}


def verdict(
    results: list[MetricResult],
    thresholds: ThresholdSpec,
    attributes: list[str] | None = None,
    bi_metrics: tuple[str, ...] = DEFAULT_BI_METRICS,
    reference: dict[str, MetricVector] | None = None,
) -> FairnessVerdict:
    """Check every selected metric on every sensitive attribute against its
    bounds and compute BI per attribute plus the composite FS.

    An undefined metric always fails (reason "undefined") and is excluded
    pairwise from the BI vector with a warning. Bounds are closed: a value
    exactly on a bound passes.
    """
    by_key = _result_index(results)
    if attributes is None:
        attributes = sorted(
            {r.attribute for r in results if r.attribute != OVERALL}
        )
    bi_metrics = tuple(m.upper() for m in bi_metrics)
    warnings: list[str] = []

    checks: list[dict] = []
    for metric in thresholds.metrics:
        lo, hi = thresholds.bounds(metric)
        targets = attributes if metric in GROUPWISE_METRICS else [OVERALL]
        for attr in targets:
            result = by_key.get((metric, attr))
            if result is None:
                raise MissingResultError(
                    f"no result for {metric} on attribute {attr!r}",
                    details={"metric": metric, "attribute": attr},
                )
            if not result.defined:
                ok, reason = False, "undefined"
            elif lo <= result.value <= hi:
                ok, reason = True, "within bounds"
            else:
                ok, reason = False, "out of bounds"
            checks.append(
                {
                    "metric": metric,
                    "attribute": attr,
                    "value": result.value,
                    "defined": result.defined,
                    "lower": lo,
                    "upper": hi,
                    "pass": ok,
                    "reason": reason,
                }
            )

    bi_per_attr: dict[str, float | None] = {}
    reference_used: dict[str, dict] = {}
    for attr in attributes:
        names: list[str] = []
        values: list[float] = []
        ref_vector = (reference or {}).get(attr)
        ref_values: list[float] = []
        for j, metric in enumerate(bi_metrics):
            result = by_key.get((metric, attr))
            if result is None or not result.defined:
                warnings.append(
                    f"{metric}[{attr}] missing or undefined; excluded from bias index"
                )
                continue
            names.append(metric)
            values.append(result.value)
            if ref_vector is not None:
                ref_values.append(ref_vector.values[j])
        if not names:
            warnings.append(f"no defined metrics for {attr}; bias index undefined")
            bi_per_attr[attr] = None
            continue
        if ref_vector is not None and ref_vector.names != bi_metrics:
            raise VectorMismatchError(
                f"reference vector for {attr!r} must cover {list(bi_metrics)}"
            )
        ref = (
            MetricVector(names=tuple(names), values=tuple(ref_values), attribute=attr)
            if ref_vector is not None
            else parity_reference(tuple(names), attr)
        )
        evaluated = MetricVector(names=tuple(names), values=tuple(values), attribute=attr)
        bi_per_attr[attr] = bias_index(evaluated, ref)
        reference_used[attr] = ref.to_dict()

    defined_bis = [b for b in bi_per_attr.values() if b is not None]
    if defined_bis:
        fs = fairness_score(defined_bis)
        fs_clamped = clamp_unit(fs)
    else:
        fs = None
        fs_clamped = None
        warnings.append("no attribute has a defined bias index; fairness score undefined")

    return FairnessVerdict(
        checks=checks,
        overall_pass=all(c["pass"] for c in checks),
        bias_index=bi_per_attr,
        bi_metrics=bi_metrics,
        fairness_score=fs,
        fairness_score_clamped=fs_clamped,
        reference=reference_used,
        warnings=warnings,
    )
