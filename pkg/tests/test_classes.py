import math

import numpy as np
import pytest

from widthlab import (
    MultiplierKernel,
    OutOfBranchError,
    PolyLog,
    Table,
    TrigPoly,
    TruncationExceededError,
    best_approx,
    convolution_constant,
    en_exact_l2,
    en_lower_search,
    lower_bound_pipeline,
    optimality_gap,
    synthesize,
)
from widthlab.classes import M_CAP
from widthlab.fourier import Exponential, analyze, apply_multiplier
from widthlab.norms import lp_norm, poly_lp_norm


class TestEnExactL2:
    def test_constant_sequence(self):
        kernel = MultiplierKernel(Table(np.ones(16)))
        for n in (0, 3, 10):
            assert en_exact_l2(kernel, n) == pytest.approx(0.5)

    def test_exponential_tail(self):
        kernel = MultiplierKernel(Exponential(1.0, 1.0))
        assert en_exact_l2(kernel, 3) == pytest.approx(0.5 * math.exp(-4))

    def test_truncation_guard(self):
        kernel = MultiplierKernel(Table(np.ones(4)))
        with pytest.raises(TruncationExceededError):
            en_exact_l2(kernel, 4)

    def test_nonincreasing_in_n(self):
        kernel = MultiplierKernel(PolyLog(0.5, 1.0), truncation=128)
        vals = [en_exact_l2(kernel, n) for n in (1, 4, 16, 64)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_matches_direct_sup_search(self):
        # independent oracle: maximize the projection residual over random
        # unit-norm inputs plus the first uncovered harmonic
        n = 10
        kernel = MultiplierKernel(PolyLog(0.0, 1.0), truncation=64)
        rng = np.random.default_rng(8)
        const = convolution_constant()
        grid = 512
        best = 0.0
        candidates = [TrigPoly.harmonic(n + 1)]
        for _ in range(200):
            c = rng.standard_normal(2 * 30 + 1)
            candidates.append(TrigPoly(c[0], c[1:31], c[31:]))
        for phi in candidates:
            norm = poly_lp_norm(phi, 2.0)
            image = apply_multiplier(kernel, phi)
            image = TrigPoly(0.0, const * image.a / norm, const * image.b / norm)
            f = synthesize(image, grid)
            resid = f.samples - synthesize(analyze(f, n), grid).samples
            from widthlab import GridFunction

            best = max(best, lp_norm(GridFunction(resid), 2.0))
        assert en_exact_l2(kernel, n) == pytest.approx(best, abs=1e-6)


class TestEnLowerSearch:
    def test_agrees_with_exact_l2(self):
        kernel = MultiplierKernel(PolyLog(0.0, 1.0), truncation=64)
        for n in (4, 10):
            exact = en_exact_l2(kernel, n)
            lower = en_lower_search(kernel, 2.0, 2.0, n, budget=30, seed=0)
            assert lower == pytest.approx(exact, rel=0.02)
            assert lower <= exact * (1 + 1e-9)

    def test_class_inside_subspace(self):
        lam = np.zeros(12)
        lam[:4] = 1.0
        kernel = MultiplierKernel(Table(lam))
        assert en_lower_search(kernel, 2.0, 3.0, 4, budget=20, seed=1) < 1e-9

    def test_bigger_budget_no_worse(self):
        kernel = MultiplierKernel(PolyLog(0.0, 1.0), truncation=64)
        small = en_lower_search(kernel, 1.5, 3.0, 4, budget=12, seed=2)
        large = en_lower_search(kernel, 1.5, 3.0, 4, budget=24, seed=2)
        assert large >= small - 1e-12

    def test_deterministic(self):
        kernel = MultiplierKernel(PolyLog(0.0, 1.0), truncation=32)
        a = en_lower_search(kernel, 1.5, 2.5, 3, budget=15, seed=9)
        b = en_lower_search(kernel, 1.5, 2.5, 3, budget=15, seed=9)
        assert a == b


class TestLowerBoundPipeline:
    def test_hand_value_branch_one(self):
        rep = lower_bound_pipeline(1.0, 2.0, 4.0, 16)
        assert rep.m_chosen == 256
        assert rep.phi_value == 1.0
        assert rep.lower_bound == pytest.approx(1 / math.log(256))
        assert rep.lower_bound == pytest.approx(0.1804, abs=5e-4)

    def test_hand_value_branch_two(self):
        rep = lower_bound_pipeline(1.0, 1.5, 2.0, 16, m_override=256)
        phi = max(256 ** (0.5 - 2 / 3), math.sqrt(240 / 256))
        assert rep.phi_value == pytest.approx(phi, abs=1e-12)
        assert rep.lower_bound == pytest.approx(phi / math.log(256), rel=1e-12)

    def test_log_equivalent_to_log_n(self):
        gamma = 1.3
        for n in (8, 64, 512):
            rep = lower_bound_pipeline(gamma, 2.0, 4.0, n)
            ratio = rep.lower_bound / math.log(n) ** (-gamma)
            assert 0.3 < ratio < 1.1

    def test_out_of_branch(self):
        with pytest.raises(OutOfBranchError):
            lower_bound_pipeline(1.0, 3.0, 2.0, 16)
        with pytest.raises(OutOfBranchError):
            lower_bound_pipeline(1.0, 2.0, 4.0, 1)

    def test_m_capped(self):
        rep = lower_bound_pipeline(1.0, 2.0, 6.0, 512)
        assert rep.m_chosen == M_CAP
        assert "capped" in rep.notes


class TestOptimalityGap:
    def test_l2_ratio_stabilizes(self):
        n_list = [2**k for k in range(3, 11)]
        report = optimality_gap(1.0, 2.0, 2.0, n_list)
        assert report.verdict == "order-consistent"
        # ratio of exact error to (ln n)^-1 settles near the convolution constant
        top = [
            u / math.log(n) ** (-1.0)
            for n, u in zip(report.n_list[-3:], report.upper[-3:])
        ]
        assert max(top) / min(top) < 1.1

    def test_degenerate_no_decay(self):
        report = optimality_gap(0.0, 2.0, 2.0, [8, 16, 32], rho=0.0)
        uppers = set(report.upper)
        assert len(uppers) == 1
        assert report.verdict == "order-consistent"

    def test_single_point(self):
        report = optimality_gap(1.0, 2.0, 2.0, [16])
        assert report.spread == 1.0
        assert report.verdict == "order-consistent"

    def test_lower_below_scaled_upper(self):
        n_list = [2**k for k in range(3, 9)]
        report = optimality_gap(1.0, 2.0, 2.0, n_list)
        c_fit = max(l / u for u, l in zip(report.upper, report.lower))
        assert all(
            l <= c_fit * u + 1e-12 for u, l in zip(report.upper, report.lower)
        )
        assert c_fit < 5.0


class TestProjectionBoundedness:
    @pytest.mark.parametrize("q", [1.5, 4.0])
    def test_partial_sum_norm_bounded(self, q):
        rng = np.random.default_rng(21)
        ratios = []
        for m in (4, 8, 16, 32):
            for _ in range(5):
                t = TrigPoly(rng.standard_normal(), rng.standard_normal(48), rng.standard_normal(48))
                f = synthesize(t, 512)
                sm = synthesize(analyze(f, m), 512)
                ratios.append(lp_norm(sm, q) / lp_norm(f, q))
        assert max(ratios) < 3.0
