import json
import math

import numpy as np
import pytest

from convexsums.experiments import (
    RegressionResult,
    experiment_A,
    experiment_B,
    experiment_C,
    intersection_scan,
    regress,
)

SMALL_BUDGET = 2**18  # keeps unit tests fast; acceptance uses the default


class TestRegress:
    def test_exact_power_law(self):
        pts = [(float(n), 3.0 * n**0.625) for n in (64, 128, 256, 512)]
        r = regress(pts)
        assert abs(r.slope - 0.625) < 1e-12
        assert abs(math.exp(r.intercept) - 3.0) < 1e-12
        assert r.residual < 1e-13

    def test_noisy_power_law(self):
        rng = np.random.default_rng(7)
        pts = [
            (float(n), n**0.75 * math.exp(rng.normal(0, 0.01)))
            for n in (64, 128, 256, 512, 1024)
        ]
        r = regress(pts)
        assert abs(r.slope - 0.75) < 0.05

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            regress([(64.0, 1.0), (128.0, 2.0)])

    def test_nonpositive_value(self):
        with pytest.raises(ValueError):
            regress([(64.0, 1.0), (128.0, 0.0), (256.0, 2.0)])


class TestExperimentA:
    def test_identity_and_report(self):
        rep = experiment_A(64, grid_budget=SMALL_BUDGET)
        assert rep.exact_identity_pass
        assert rep.identity_max_rel_err <= 1e-6
        assert rep.hit_count >= 2
        assert rep.checked_j == list(range(1, 65))
        assert rep.norm.value > 0
        assert rep.ratio > 0

    def test_json_schema(self):
        rep = experiment_A(64, grid_budget=SMALL_BUDGET)
        d = rep.to_json_dict()
        assert set(d) == {
            "id",
            "N",
            "alpha",
            "hit_count",
            "identity",
            "norm",
            "predicted_exponent",
            "ratio",
            "seed",
        }
        assert d["identity"]["pass"] is True
        assert d["norm"]["direction"] == "t"
        assert d["norm"]["p"] == 4.0
        # timing must stay out of the serialized form
        assert "runtime" not in json.dumps(d)
        json.dumps(d, sort_keys=True)  # must be serializable as-is

    def test_identity_is_exact_not_just_close(self):
        # power-of-two N makes every phase dyadic: the residual is 0.0
        rep = experiment_A(128, grid_budget=SMALL_BUDGET)
        assert rep.identity_max_rel_err == 0.0


class TestExperimentB:
    def test_identity(self):
        rep = experiment_B(64, grid_budget=SMALL_BUDGET, seed=3)
        assert rep.exact_identity_pass
        assert rep.alpha == 0.5
        assert len(rep.checked_j) == 64
        assert all(1 <= j <= 64**1.5 for j in rep.checked_j)
        assert rep.norm.sup_direction == "x"

    def test_seed_changes_sample(self):
        a = experiment_B(64, grid_budget=SMALL_BUDGET, seed=0)
        b = experiment_B(64, grid_budget=SMALL_BUDGET, seed=1)
        assert a.checked_j != b.checked_j
        assert a.exact_identity_pass and b.exact_identity_pass

    def test_deterministic_json(self):
        a = experiment_B(64, grid_budget=SMALL_BUDGET, seed=5, threads=1)
        b = experiment_B(64, grid_budget=SMALL_BUDGET, seed=5, threads=4)
        assert json.dumps(a.to_json_dict(), sort_keys=True) == json.dumps(
            b.to_json_dict(), sort_keys=True
        )


class TestExperimentC:
    def test_identity(self):
        rep = experiment_C(64, grid_budget=SMALL_BUDGET, seed=2)
        assert rep.exact_identity_pass
        assert all(1 <= j <= 64**2 for j in rep.checked_j)
        # tilted frequencies force the naive path on a square grid
        side = int(math.isqrt(SMALL_BUDGET))
        assert rep.norm.grid.Mx == side
        assert rep.norm.grid.Mt == side
        assert rep.norm.grid.x_hi == 64.0**2

    def test_rejects_tiny_N(self):
        with pytest.raises(ValueError):
            experiment_C(32)


class TestScan:
    def test_alpha_one_slope(self):
        (r,) = intersection_scan([256, 1024, 4096], [1.0])
        assert r.alpha == 1.0
        assert r.target == pytest.approx(2 / 3)
        assert abs(r.slope - r.target) <= 0.15

    def test_small_alpha_target(self):
        (r,) = intersection_scan([64, 256, 1024], [0.25])
        assert r.target == 0.25
        assert isinstance(r, RegressionResult)
        assert r.slope > 0
