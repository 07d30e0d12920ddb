from __future__ import annotations

import random

import pytest

from nishpaksh.config import (
    ModelProfile,
    SectorPolicy,
    ThresholdSpec,
    load_threshold_table,
    resolve_thresholds,
)
from nishpaksh.errors import InvalidOverrideError, InvalidPolicyError, UnsupportedTaskError
from nishpaksh.risk import CATEGORIES

ALL_SEVEN = ("SPD", "DI", "NDI", "EOD", "AOD", "EO", "THEIL")


def generic_policy(**kwargs) -> SectorPolicy:
    defaults = dict(sector="generic", selected_metrics=ALL_SEVEN)
    defaults.update(kwargs)
    return SectorPolicy(**defaults)


class TestModelProfile:
    def test_valid(self):
        p = ModelProfile(model_type="machine-learning", task="binary-classification")
        assert ModelProfile.from_dict(p.to_dict()) == p

    def test_regression_rejected(self):
        with pytest.raises(UnsupportedTaskError):
            ModelProfile(model_type="machine-learning", task="regression")

    def test_unknown_type_rejected(self):
        with pytest.raises(InvalidPolicyError):
            ModelProfile(model_type="quantum", task="binary-classification")


class TestSectorPolicy:
    def test_needs_spd_or_di(self):
        with pytest.raises(InvalidPolicyError):
            SectorPolicy(sector="generic", selected_metrics=("EOD", "AOD"))

    def test_nonempty(self):
        with pytest.raises(InvalidPolicyError):
            SectorPolicy(sector="generic", selected_metrics=())

    def test_performance_metrics_not_thresholdable(self):
        with pytest.raises(InvalidPolicyError):
            SectorPolicy(sector="generic", selected_metrics=("SPD", "ACCURACY"))

    def test_sector_preset_fills_selection(self):
        policy = SectorPolicy.from_dict({"sector": "healthcare"})
        assert "EO" in policy.selected_metrics

    def test_round_trip(self):
        p = generic_policy(threshold_overrides={"SPD": (-0.2, 0.2)})
        assert SectorPolicy.from_dict(p.to_dict()) == p


class TestResolveThresholds:
    def test_medium_defaults(self):
        spec = resolve_thresholds("Medium", generic_policy())
        assert spec.bounds("SPD") == (-0.10, 0.10)
        assert spec.bounds("DI") == (0.80, 1.25)
        assert spec.bounds("NDI") == (-0.25, 0.25)
        assert spec.bounds("EO") == (0.0, 0.20)
        assert spec.metrics["SPD"]["provenance"] == "default-table"

    def test_high_scales_half_about_parity(self):
        spec = resolve_thresholds("High", generic_policy())
        lo, hi = spec.bounds("SPD")
        assert lo == pytest.approx(-0.05) and hi == pytest.approx(0.05)
        lo, hi = spec.bounds("DI")
        assert lo == pytest.approx(0.90) and hi == pytest.approx(1.125)

    def test_very_low_widens(self):
        spec = resolve_thresholds("VeryLow", generic_policy())
        lo, hi = spec.bounds("SPD")
        assert lo == pytest.approx(-0.15) and hi == pytest.approx(0.15)
        lo, hi = spec.bounds("EO")
        assert lo == 0.0 and hi == pytest.approx(0.30)

    def test_override_excluding_parity_rejected(self):
        for category in CATEGORIES:
            with pytest.raises(InvalidOverrideError):
                resolve_thresholds(
                    category,
                    generic_policy(threshold_overrides={"SPD": (0.2, 0.3)}),
                )

    def test_user_override_wins_with_provenance(self):
        spec = resolve_thresholds(
            "Medium", generic_policy(threshold_overrides={"SPD": (-0.02, 0.02)})
        )
        assert spec.bounds("SPD") == (-0.02, 0.02)
        assert spec.metrics["SPD"]["provenance"] == "user-override"

    def test_sector_override_provenance(self):
        policy = SectorPolicy.from_dict({"sector": "recruitment"})
        spec = resolve_thresholds("High", policy)
        # recruitment pins DI to the four-fifths band regardless of category
        assert spec.bounds("DI") == (0.8, 1.25)
        assert spec.metrics["DI"]["provenance"] == "sector-override"

    def test_unknown_category(self):
        with pytest.raises(InvalidPolicyError):
            resolve_thresholds("Extreme", generic_policy())

    def test_deterministic(self):
        a = resolve_thresholds("Low", generic_policy())
        b = resolve_thresholds("Low", generic_policy())
        assert a.to_dict() == b.to_dict()

    def test_round_trip(self):
        spec = resolve_thresholds("Medium", generic_policy())
        assert ThresholdSpec.from_dict(spec.to_dict()).to_dict() == spec.to_dict()


def _contained(inner: tuple[float, float], outer: tuple[float, float]) -> bool:
    return outer[0] <= inner[0] and inner[1] <= outer[1]


class TestMonotoneStrictness:
    def test_shipped_table(self):
        policy = generic_policy()
        specs = [resolve_thresholds(c, policy) for c in CATEGORIES]
        # CATEGORIES runs VeryLow..High; each stricter interval nests inside
        for metric in ALL_SEVEN:
            for wider, tighter in zip(specs, specs[1:]):
                assert _contained(tighter.bounds(metric), wider.bounds(metric)), metric

    def test_random_valid_tables(self):
        rng = random.Random(2024)
        base = load_threshold_table()
        for _ in range(100):
            table = {
                "version": "t",
                "risk_scaling": base["risk_scaling"],
                "sectors": base["sectors"],
                "defaults": {},
            }
            for metric in ALL_SEVEN:
                parity = 1.0 if metric == "DI" else 0.0
                below = rng.uniform(0.01, 0.5)
                above = rng.uniform(0.01, 0.5)
                lower = parity if metric in ("EO", "THEIL") else parity - below
                table["defaults"][metric] = {
                    "lower": lower,
                    "upper": parity + above,
                    "parity": parity,
                }
            specs = [
                resolve_thresholds(c, generic_policy(), table=table) for c in CATEGORIES
            ]
            for metric in ALL_SEVEN:
                for wider, tighter in zip(specs, specs[1:]):
                    assert _contained(tighter.bounds(metric), wider.bounds(metric))
