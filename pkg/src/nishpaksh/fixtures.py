"""Reference vectors and a seeded synthetic dataset generator.

The generator produces validation-clean datasets with controllable group
imbalance and outcome rates, used by the test suite and by batch audits
that need a known-bias fixture. The published comparison vectors are kept
as fixed inputs for composite-score arithmetic checks; the tabulated EO
entries match |AOD| rather than the sum-of-absolute-differences EO this
engine computes, so they stay out of bias-index fixtures by default.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data_model import AuditDataset, ColumnSchema
from .errors import DegenerateSpecError
from .scoring import MetricVector

TABLE2_METRICS = ("SPD", "NDI", "EOD", "AOD", "EO")

TABLE2_EO_NOTE = (
    "The published EO column equals |AOD| instead of the sum of absolute "
    "rate differences; with the sum definition EO strictly exceeds |AOD| "
    "whenever the FPR and TPR gaps have opposite signs. These vectors are "
    "fixed fixture inputs, not recomputable outputs."
)


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic audit dataset.

    The first sensitive attribute drives outcome bias. Without TPR/FPR
    targets, predictions are drawn at the per-group favorable rates p1/p0
    independently of labels; with targets, predictions are drawn from the
    per-group TPR (on positives) and FPR (on negatives) and the favorable
    rates are implied.
    """

    n_rows: int
    privileged_fraction: dict[str, float]
    p1: float
    p0: float
    label_rate: float = 0.5
    tpr: tuple[float, float] | None = None  # (privileged, unprivileged)
    fpr: tuple[float, float] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n_rows < 10:
            raise DegenerateSpecError("n_rows must be at least 10")
        if not self.privileged_fraction:
            raise DegenerateSpecError("at least one sensitive attribute required")
        probs = [self.p1, self.p0, self.label_rate]
        probs += list(self.tpr or ()) + list(self.fpr or ())
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise DegenerateSpecError("probabilities must lie in [0,1]")
        if (self.tpr is None) != (self.fpr is None):
            raise DegenerateSpecError("tpr and fpr targets come as a pair")
        for attr, frac in self.privileged_fraction.items():
            if not 0.0 < frac < 1.0 or self.n_rows * min(frac, 1 - frac) < 1.0:
                raise DegenerateSpecError(
                    f"attribute {attr!r}: expected group size would be zero",
                    details={"attribute": attr, "fraction": frac},
                )


def generate(spec: SyntheticSpec) -> AuditDataset:
    """Deterministic synthetic dataset for the given spec and seed.

    If a sampled sensitive column happens to come out single-group, the
    first row is flipped so the dataset always validates; at n >= 10 and
    non-extreme fractions this is vanishingly rare.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n_rows
    attrs = list(spec.privileged_fraction)

    sensitive: dict[str, np.ndarray] = {}
    for attr in attrs:
        vec = (rng.random(n) < spec.privileged_fraction[attr]).astype(np.int8)
        if vec.sum() == 0:
            vec[0] = 1
        elif vec.sum() == n:
            vec[0] = 0
        sensitive[attr] = vec

    driver = sensitive[attrs[0]]
    labels = (rng.random(n) < spec.label_rate).astype(np.int8)
    if spec.tpr is None:
        rate = np.where(driver == 1, spec.p1, spec.p0)
        predictions = (rng.random(n) < rate).astype(np.int8)
    else:
        tpr = np.where(driver == 1, spec.tpr[0], spec.tpr[1])
        fpr = np.where(driver == 1, spec.fpr[0], spec.fpr[1])
        rate = np.where(labels == 1, tpr, fpr)
        predictions = (rng.random(n) < rate).astype(np.int8)

    # two numeric features: x1 leans on the driving attribute (a mild
    # proxy), x2 is independent noise
    x1 = rng.normal(0.0, 1.0, n) + 0.8 * driver
    x2 = rng.normal(0.0, 1.0, n)

    schema = ColumnSchema(
        feature_columns=("x1", "x2"),
        sensitive_columns=tuple(attrs),
        label_column="label",
        prediction_column="prediction",
    )
    return AuditDataset(
        schema=schema,
        n_rows=n,
        labels=labels,
        predictions=predictions,
        sensitive=sensitive,
        features={"x1": x1, "x2": x2},
    )


def generate_csv(spec: SyntheticSpec) -> bytes:
    return generate(spec).to_csv_bytes()


def biased_spec(n_rows: int = 1000, seed: int = 0) -> SyntheticSpec:
    """Two-attribute fixture with a strong favorable-rate gap (true SPD 0.35)."""
    return SyntheticSpec(
        n_rows=n_rows,
        privileged_fraction={"group_a": 0.5, "group_b": 0.5},
        p1=0.7,
        p0=0.35,
        seed=seed,
    )


def parity_spec(n_rows: int = 1000, seed: int = 0) -> SyntheticSpec:
    """Equal favorable rates in both groups (true SPD 0)."""
    return SyntheticSpec(
        n_rows=n_rows,
        privileged_fraction={"group_a": 0.5, "group_b": 0.5},
        p1=0.5,
        p0=0.5,
        seed=seed,
    )


def table2_vectors() -> dict:
    """The three published fairness-metric vectors used as fixed BI inputs."""
    return {
        "metrics": TABLE2_METRICS,
        "baseline": MetricVector(
            names=TABLE2_METRICS,
            values=(0.187, 0.753, 0.226, 0.176, 0.176),
            attribute="baseline",
        ),
        "racial_bias": MetricVector(
            names=TABLE2_METRICS,
            values=(0.106, 0.368, 0.094, 0.074, 0.074),
            attribute="race",
        ),
        "gender_bias": MetricVector(
            names=TABLE2_METRICS,
            values=(-0.287, -0.699, -0.368, -0.273, 0.273),
            attribute="sex",
        ),
        "eo_note": TABLE2_EO_NOTE,
    }
