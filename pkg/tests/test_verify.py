"""Monte-Carlo verification of the deviation bounds."""

import math

import pytest

from piflab.sources import IndepSourceSpec
from piflab.verify import (
    VerificationReport,
    verify_sum_mod_bound,
    verify_sv_hash_bound,
)

ETA = (0.7, 0.3)


class TestSumModVerification:
    def test_passes_on_reference_case(self):
        spec = IndepSourceSpec.iid(ETA, 3)
        report = verify_sum_mod_bound(spec.etas, 2, 2000, 0.05, reps=60, seed=1)
        assert report.passed
        assert report.repetitions == 60
        assert report.violation_rate <= report.allowed_rate + report.margin

    def test_report_accounting(self):
        spec = IndepSourceSpec.iid(ETA, 3)
        report = verify_sum_mod_bound(spec.etas, 2, 500, 0.05, reps=40, seed=2)
        assert report.violation_rate == pytest.approx(report.violations / 40)
        assert report.margin == pytest.approx(3.0 * math.sqrt(0.05 / 40))
        assert len(report.per_rep_tv) == 40
        assert all(tv >= 0.0 for tv in report.per_rep_tv)
        assert report.allowed_rate == pytest.approx(0.05)

    def test_deterministic_in_seed(self):
        spec = IndepSourceSpec.iid(ETA, 2)
        a = verify_sum_mod_bound(spec.etas, 2, 300, 0.05, reps=20, seed=9)
        b = verify_sum_mod_bound(spec.etas, 2, 300, 0.05, reps=20, seed=9)
        c = verify_sum_mod_bound(spec.etas, 2, 300, 0.05, reps=20, seed=10)
        assert a.per_rep_tv == b.per_rep_tv
        assert a.per_rep_tv != c.per_rep_tv

    def test_to_dict_roundtrippable(self):
        spec = IndepSourceSpec.iid(ETA, 2)
        report = verify_sum_mod_bound(spec.etas, 2, 200, 0.05, reps=10)
        d = report.to_dict()
        assert set(d) >= {
            "repetitions", "violations", "violation_rate", "allowed_rate",
            "margin", "passed", "bound_value", "per_rep_tv",
        }
        assert isinstance(d["per_rep_tv"], list)

    def test_composite_modulus(self):
        spec = IndepSourceSpec.iid((0.4, 0.3, 0.2, 0.1), 4)
        report = verify_sum_mod_bound(spec.etas, 4, 1000, 0.05, reps=30, seed=3)
        assert report.passed


class TestSvHashVerification:
    def test_passes_on_seeded_policy(self):
        report = verify_sv_hash_bound(
            4, 0.2, 32, 2, 100, 0.05, 0.05, reps=60, seed=4
        )
        assert isinstance(report, VerificationReport)
        assert report.passed
        assert report.allowed_rate == pytest.approx(0.1)
        assert len(report.per_rep_tv) == 60

    def test_passes_on_extreme_policy(self):
        report = verify_sv_hash_bound(
            3, 0.25, 24, 2, 100, 0.05, 0.05, reps=40, seed=5, policy="extreme"
        )
        assert report.passed

    def test_uniform_policy_has_small_tv(self):
        report = verify_sv_hash_bound(
            2, 0.5, 16, 2, 400, 0.05, 0.05, reps=30, seed=6, policy="uniform"
        )
        assert report.passed
        # fair source, fair hash: typical TV ~ 1/sqrt(K), far below the bound
        assert max(report.per_rep_tv) < report.bound_value

    def test_deterministic_in_seed(self):
        a = verify_sv_hash_bound(2, 0.25, 16, 2, 50, 0.05, 0.05, reps=10, seed=7)
        b = verify_sv_hash_bound(2, 0.25, 16, 2, 50, 0.05, 0.05, reps=10, seed=7)
        assert a.per_rep_tv == b.per_rep_tv

    def test_fresh_hash_per_repetition(self):
        report = verify_sv_hash_bound(2, 0.25, 16, 2, 50, 0.05, 0.05, reps=12, seed=8)
        # distinct affine draws produce distinct empirical TVs
        assert len(set(report.per_rep_tv)) > 1
