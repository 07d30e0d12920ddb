from __future__ import annotations

import pytest

from nishpaksh.data_model import load_csv
from nishpaksh.errors import DegenerateSpecError
from nishpaksh.fixtures import (
    SyntheticSpec,
    biased_spec,
    generate,
    generate_csv,
    parity_spec,
    table2_vectors,
)
from nishpaksh.metrics import compute_metric


class TestSyntheticSpec:
    def test_rejects_tiny_dataset(self):
        with pytest.raises(DegenerateSpecError):
            SyntheticSpec(n_rows=5, privileged_fraction={"a": 0.5}, p1=0.5, p0=0.5)

    def test_rejects_empty_group_expectation(self):
        with pytest.raises(DegenerateSpecError):
            SyntheticSpec(n_rows=100, privileged_fraction={"a": 0.0}, p1=0.5, p0=0.5)

    def test_rejects_bad_probability(self):
        with pytest.raises(DegenerateSpecError):
            SyntheticSpec(n_rows=100, privileged_fraction={"a": 0.5}, p1=1.5, p0=0.5)

    def test_tpr_fpr_come_together(self):
        with pytest.raises(DegenerateSpecError):
            SyntheticSpec(
                n_rows=100, privileged_fraction={"a": 0.5}, p1=0.5, p0=0.5, tpr=(0.9, 0.7)
            )


class TestGenerate:
    def test_deterministic(self):
        spec = biased_spec(n_rows=300, seed=7)
        assert generate(spec) == generate(spec)
        assert generate_csv(spec) == generate_csv(spec)

    def test_different_seed_differs(self):
        a = generate(biased_spec(n_rows=300, seed=1))
        b = generate(biased_spec(n_rows=300, seed=2))
        assert a != b

    def test_output_passes_validation_and_reloads(self):
        spec = biased_spec(n_rows=120, seed=3)
        ds = generate(spec)
        again = load_csv(generate_csv(spec), ds.schema)
        assert again == ds

    def test_parity_spec_small_spd(self):
        ds = generate(parity_spec(n_rows=10000, seed=42))
        spd = compute_metric(ds, "SPD", "group_a").value
        assert abs(spd) < 0.05

    def test_biased_spec_converges_to_gap(self):
        spec = SyntheticSpec(
            n_rows=10000, privileged_fraction={"a": 0.5}, p1=0.7, p0=0.35, seed=42
        )
        spd = compute_metric(generate(spec), "SPD", "a").value
        assert spd == pytest.approx(0.35, abs=0.03)

    def test_confusion_targets_mode(self):
        spec = SyntheticSpec(
            n_rows=20000,
            privileged_fraction={"a": 0.5},
            p1=0.0,
            p0=0.0,
            tpr=(0.9, 0.6),
            fpr=(0.2, 0.1),
            seed=9,
        )
        ds = generate(spec)
        eod = compute_metric(ds, "EOD", "a")
        assert eod.value == pytest.approx(0.3, abs=0.03)
        assert eod.groups["privileged_tpr"] == pytest.approx(0.9, abs=0.02)

    def test_proxy_feature_correlates_with_driver(self):
        from nishpaksh.data_model import detect_proxies

        ds = generate(biased_spec(n_rows=5000, seed=5))
        findings = detect_proxies(ds, threshold=0.3)
        x1 = next(
            f for f in findings if f.feature == "x1" and f.sensitive_attribute == "group_a"
        )
        assert x1.association > 0.3 and x1.flagged


class TestTable2Vectors:
    def test_published_entries(self):
        t2 = table2_vectors()
        assert t2["baseline"].values[0] == 0.187  # SPD
        assert t2["gender_bias"].values[4] == 0.273  # EO
        assert t2["racial_bias"].values[3] == 0.074  # AOD
        assert t2["metrics"] == ("SPD", "NDI", "EOD", "AOD", "EO")

    def test_eo_note_present(self):
        assert "AOD" in table2_vectors()["eo_note"]
