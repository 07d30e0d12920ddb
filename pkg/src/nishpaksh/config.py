"""Model accountability metadata, sector policy, and threshold resolution.

The numeric default bounds live in resources/threshold_table.json (one
versioned file, swappable without code changes). Resolution starts from
that table, scales each bound's distance from its parity value by the
risk category factor, then applies sector and user overrides verbatim.
Overrides must keep the parity value inside the interval.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources as importlib_resources
from pathlib import Path

from .errors import InvalidOverrideError, InvalidPolicyError, UnsupportedTaskError
from .metrics import FAIRNESS_METRICS
from .risk import CATEGORIES

MODEL_TYPES = ("machine-learning", "deep-learning", "other")
SUPPORTED_TASKS = ("binary-classification",)
KNOWN_SECTORS = ("generic", "telecom", "finance", "healthcare", "recruitment")


@dataclass(frozen=True)
class ModelProfile:
    """What is being audited: type, task, purpose, intended use, version."""

    model_type: str
    task: str
    purpose: str = ""
    intended_use: str = ""
    version: str = ""

    def __post_init__(self):
        if self.model_type not in MODEL_TYPES:
            raise InvalidPolicyError(
                f"unknown model_type {self.model_type!r}; expected one of {MODEL_TYPES}"
            )
        if self.task not in SUPPORTED_TASKS:
            raise UnsupportedTaskError(
                f"task {self.task!r} is not supported (v1 audits binary-classification only)",
                details={"task": self.task},
            )

    def to_dict(self) -> dict:
        return {
            "model_type": self.model_type,
            "task": self.task,
            "purpose": self.purpose,
            "intended_use": self.intended_use,
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelProfile":
        try:
            return cls(
                model_type=data["model_type"],
                task=data["task"],
                purpose=data.get("purpose", ""),
                intended_use=data.get("intended_use", ""),
                version=data.get("version", ""),
            )
        except KeyError as exc:
            raise InvalidPolicyError(f"model profile missing key {exc}") from exc


@dataclass(frozen=True)
class SectorPolicy:
    """Sector-driven metric selection plus optional absolute bound overrides."""

    sector: str
    selected_metrics: tuple[str, ...]
    threshold_overrides: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "selected_metrics", tuple(m.upper() for m in self.selected_metrics)
        )
        if not self.selected_metrics:
            raise InvalidPolicyError("selected_metrics must be non-empty")
        unknown = [m for m in self.selected_metrics if m not in FAIRNESS_METRICS]
        if unknown:
            raise InvalidPolicyError(
                f"metrics not thresholdable: {unknown}", details={"metrics": unknown}
            )
        if not {"SPD", "DI"} & set(self.selected_metrics):
            raise InvalidPolicyError("selected_metrics must include SPD or DI")
        overrides = {
            m.upper(): (float(lo), float(hi))
            for m, (lo, hi) in dict(self.threshold_overrides).items()
        }
        object.__setattr__(self, "threshold_overrides", overrides)

    def to_dict(self) -> dict:
        return {
            "sector": self.sector,
            "selected_metrics": list(self.selected_metrics),
            "threshold_overrides": {
                m: [lo, hi] for m, (lo, hi) in self.threshold_overrides.items()
            },
        }

    @classmethod
    def from_dict(cls, data: dict, table: dict | None = None) -> "SectorPolicy":
        """Build a policy from JSON; the sector preset fills missing fields."""
        table = table or load_threshold_table()
        sector = data.get("sector", "generic")
        preset = table["sectors"].get(sector, table["sectors"]["generic"])
        selected = data.get("selected_metrics") or preset["selected_metrics"]
        overrides = {
            m: (pair[0], pair[1])
            for m, pair in (data.get("threshold_overrides") or {}).items()
        }
        return cls(
            sector=sector,
            selected_metrics=tuple(selected),
            threshold_overrides=overrides,
        )


@dataclass(frozen=True)
class ThresholdSpec:
    """Resolved closed bounds per selected metric, with provenance."""

    category: str
    table_version: str
    metrics: dict[str, dict]  # metric -> {lower, upper, parity, provenance}

    def __post_init__(self):
        for metric, spec in self.metrics.items():
            lo, hi, parity = spec["lower"], spec["upper"], spec["parity"]
            if lo > hi:
                raise InvalidOverrideError(
                    f"{metric}: lower bound {lo} exceeds upper bound {hi}"
                )
            if not lo <= parity <= hi:
                raise InvalidOverrideError(
                    f"{metric}: bounds [{lo},{hi}] exclude the parity value {parity}",
                    details={"metric": metric, "lower": lo, "upper": hi, "parity": parity},
                )

    def bounds(self, metric: str) -> tuple[float, float]:
        spec = self.metrics[metric.upper()]
        return spec["lower"], spec["upper"]

    def to_dict(self) -> dict:
        return {
            "category": self.category,
            "table_version": self.table_version,
            "metrics": {m: dict(spec) for m, spec in self.metrics.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ThresholdSpec":
        return cls(
            category=data["category"],
            table_version=data["table_version"],
            metrics={m: dict(spec) for m, spec in data["metrics"].items()},
        )


def load_threshold_table(path: str | Path | None = None) -> dict:
    if path is None:
        text = (
            importlib_resources.files("nishpaksh.resources")
            .joinpath("threshold_table.json")
            .read_text("utf-8")
        )
    else:
        text = Path(path).read_text("utf-8")
    table = json.loads(text)
    for key in ("version", "defaults", "risk_scaling", "sectors"):
        if key not in table:
            raise InvalidPolicyError(f"threshold table missing key {key!r}")
    return table


def _scale_about_parity(lower: float, upper: float, parity: float, factor: float) -> tuple[float, float]:
    return (parity - factor * (parity - lower), parity + factor * (upper - parity))


def resolve_thresholds(
    category: str,
    policy: SectorPolicy,
    table: dict | None = None,
) -> ThresholdSpec:
    """Risk-scaled bounds for every metric the policy selects.

    Deterministic and total over valid inputs: default table bounds are
    scaled about parity by the category factor (stricter categories shrink
    the interval), then sector overrides, then user overrides, both taken
    as absolute bounds.
    """
    if category not in CATEGORIES:
        raise InvalidPolicyError(f"unknown risk category {category!r}")
    table = table or load_threshold_table()
    factor = float(table["risk_scaling"][category])
    sector_overrides = (
        table["sectors"].get(policy.sector, {}).get("threshold_overrides") or {}
    )

    resolved: dict[str, dict] = {}
    for metric in policy.selected_metrics:
        base = table["defaults"].get(metric)
        if base is None:
            raise InvalidPolicyError(f"no default bounds for metric {metric!r}")
        parity = float(base["parity"])
        lo, hi = _scale_about_parity(
            float(base["lower"]), float(base["upper"]), parity, factor
        )
        provenance = "default-table"
        if metric in sector_overrides:
            ov = sector_overrides[metric]
            lo, hi = float(ov["lower"]), float(ov["upper"])
            provenance = "sector-override"
        if metric in policy.threshold_overrides:
            lo, hi = policy.threshold_overrides[metric]
            provenance = "user-override"
        if not lo <= parity <= hi:
            raise InvalidOverrideError(
                f"{metric}: override [{lo},{hi}] excludes the parity value {parity}",
                details={"metric": metric, "lower": lo, "upper": hi, "parity": parity},
            )
        resolved[metric] = {
            "lower": lo,
            "upper": hi,
            "parity": parity,
            "provenance": provenance,
        }
    return ThresholdSpec(
        category=category, table_version=str(table["version"]), metrics=resolved
    )
