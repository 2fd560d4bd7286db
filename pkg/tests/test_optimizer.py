from __future__ import annotations

import numpy as np
import pytest

from delegate_opt import ModelParams, SenderDist, optimize, pi_s
from delegate_opt.errors import ConfigError
from delegate_opt.optimizer import OptimizerOptions, _GridSweep
from delegate_opt.thresholds import POOLING, STRICTLY_WELL_BEHAVED


class TestBaselineOptimum:
    def test_design1_uniform(self, baseline, uniform3):
        out = optimize(baseline, uniform3)
        rec = out.thresholds
        assert rec.eq_class == STRICTLY_WELL_BEHAVED
        assert rec.z_l == 0.0 and rec.t_l == 0.0
        assert rec.z_h == pytest.approx(1.75, abs=0.02)
        assert out.percentile_zh == pytest.approx(0.585, abs=0.01)
        assert out.surplus.total >= pi_s(baseline, uniform3)

    def test_interval_round_trips_thresholds(self, baseline, uniform3):
        from delegate_opt import SeparatingPath, invert_cap

        out = optimize(baseline, uniform3)
        path = SeparatingPath(baseline, out.thresholds.z_l, 3.0)
        rec = invert_cap(baseline, uniform3, path, out.interval[1])
        assert rec.z_h == pytest.approx(out.thresholds.z_h, abs=1e-6)

    def test_pure_signaling_pooling(self):
        out = optimize(ModelParams(a=0.0), SenderDist(5, 5, 3))
        rec = out.thresholds
        assert rec.eq_class == POOLING
        assert rec.z_h == 0.0 and rec.t_h == 0.0 and rec.s_h == 0.0
        assert out.interval == (0.0, 0.0)

    def test_scale_invariance_in_k(self, uniform3):
        z_hs = [
            optimize(ModelParams(k=k), uniform3).thresholds.z_h
            for k in (1.0, 2.0, 3.0)
        ]
        assert max(z_hs) - min(z_hs) <= 1e-5


class TestCertificates:
    @pytest.mark.parametrize(
        "params, shape",
        [
            (ModelParams(), (1, 1)),
            (ModelParams(), (3, 5)),
            (ModelParams(a=0.0, q=1.0), (1, 1)),
            (ModelParams(a=0.6, q=1.5), (5, 3)),
        ],
    )
    def test_refined_beats_brute_force_grid(self, params, shape):
        d = SenderDist(*shape, 3)
        out = optimize(params, d)
        brute = _GridSweep(params, d, 201)
        brute.run()
        assert out.surplus.total >= np.nanmax(brute.values) - 1e-8

    def test_grid_certificate_recorded(self, baseline, uniform3):
        out = optimize(baseline, uniform3)
        assert out.diagnostics["certificate"] >= -1e-8
        assert out.diagnostics["n_grid_evals"] == 61 * 62 // 2


class TestDeterminism:
    def test_bitwise_identical_outcomes(self, baseline, uniform3):
        a = optimize(baseline, uniform3)
        b = optimize(baseline, uniform3)
        assert a.thresholds == b.thresholds
        assert a.surplus == b.surplus
        assert a.interval == b.interval
        assert a.percentile_zh == b.percentile_zh

    def test_percentile_invariant_across_support(self, baseline):
        pcts = [
            optimize(baseline, SenderDist(1, 1, zbar)).percentile_zh
            for zbar in (1.0, 2.0, 3.0)
        ]
        assert max(pcts) - min(pcts) <= 0.01


class TestOptions:
    def test_grid_resolution_guard(self):
        with pytest.raises(ConfigError):
            OptimizerOptions(grid=2)
        with pytest.raises(ConfigError):
            OptimizerOptions(refine="downhill")

    def test_no_refine_stays_on_grid(self, baseline, uniform3):
        out = optimize(baseline, uniform3, OptimizerOptions(refine="none"))
        assert out.diagnostics["refine_method"] == "none"
        assert out.thresholds.z_h == pytest.approx(1.75, abs=0.05)

    def test_coarse_grid_still_lands_close(self, baseline, uniform3):
        out = optimize(baseline, uniform3, OptimizerOptions(grid=13))
        assert out.thresholds.z_h == pytest.approx(1.755, abs=0.05)


def test_nelder_mead_interior_refinement(baseline, uniform3):
    # force the 2-d path by disallowing the edge shortcut
    out = optimize(baseline, uniform3, OptimizerOptions(refine="nelder-mead"))
    assert out.thresholds.z_h == pytest.approx(1.755, abs=0.01)
    assert out.thresholds.z_l == pytest.approx(0.0, abs=1e-4)
