import math

import numpy as np
import pytest

from widthlab import (
    InvalidExponentError,
    TrigPoly,
    analyze,
    best_approx,
    lp_norm,
    mz_ratio_stats,
    mz_sample,
    poly_lp_norm,
    synthesize,
)
from widthlab.norms import DiscretizedPoly


def random_poly(rng, degree):
    return TrigPoly(0.0, rng.standard_normal(degree), rng.standard_normal(degree))


class TestLpNorm:
    def test_constant_l2(self):
        f = synthesize(TrigPoly(1.0, np.zeros(0), np.zeros(0)), 256)
        assert lp_norm(f, 2) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-12)

    def test_cos_l2(self):
        f = synthesize(TrigPoly.harmonic(1), 256)
        assert lp_norm(f, 2) == pytest.approx(math.sqrt(math.pi), rel=1e-12)

    def test_cos_l1(self):
        f = synthesize(TrigPoly.harmonic(1), 2**14)
        assert lp_norm(f, 1) == pytest.approx(4.0, rel=1e-6)

    def test_rejects_p_below_one(self):
        f = synthesize(TrigPoly.harmonic(1), 64)
        with pytest.raises(InvalidExponentError):
            lp_norm(f, 0.5)

    def test_holder_consistency(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            t = random_poly(rng, 6)
            for p, q in [(1.0, 2.0), (1.5, 3.0), (2.0, 4.0)]:
                lo = poly_lp_norm(t, p)
                hi = poly_lp_norm(t, q)
                assert lo <= (2 * math.pi) ** (1 / p - 1 / q) * hi * (1 + 1e-10)


class TestBestApprox:
    def test_orthogonal_high_harmonic(self):
        n = 5
        f = synthesize(TrigPoly.harmonic(n + 1), 256)
        err, argmin = best_approx(f, n, 2.0)
        assert err == pytest.approx(math.sqrt(math.pi), rel=1e-12)
        assert np.max(np.abs(argmin.coeff_vector())) < 1e-12

    @pytest.mark.parametrize("q", [1.5, 2.0, 3.0])
    def test_member_of_subspace(self, q):
        rng = np.random.default_rng(1)
        t = random_poly(rng, 10)
        err, argmin = best_approx(synthesize(t, 256), 10, q)
        assert err < 1e-9
        assert np.max(np.abs(argmin.coeff_vector() - t.coeff_vector())) < 1e-7

    def test_parseval_tail(self):
        rng = np.random.default_rng(4)
        t = random_poly(rng, 20)
        err, _ = best_approx(synthesize(t), 10, 2.0)
        tail = math.sqrt(math.pi * (np.sum(t.a[10:] ** 2) + np.sum(t.b[10:] ** 2)))
        assert err == pytest.approx(tail, rel=1e-8)

    def test_error_nonincreasing_in_n(self):
        rng = np.random.default_rng(9)
        f = synthesize(random_poly(rng, 16), 256)
        for q in (1.5, 3.0):
            errs = [best_approx(f, n, q)[0] for n in (0, 4, 8, 12, 16)]
            assert all(a >= b - 1e-10 for a, b in zip(errs, errs[1:]))

    def test_zero_iff_no_residual_beyond_n(self):
        rng = np.random.default_rng(10)
        t = random_poly(rng, 6)
        f = synthesize(t, 256)
        assert best_approx(f, 6, 3.0)[0] < 1e-9
        assert best_approx(f, 5, 3.0)[0] > 1e-3

    def test_iterative_path_agrees_at_q2(self):
        rng = np.random.default_rng(12)
        f = synthesize(random_poly(rng, 12), 256)
        exact, _ = best_approx(f, 6, 2.0)
        iterated, _ = best_approx(f, 6, 2.0, force_iterative=True)
        assert iterated == pytest.approx(exact, rel=1e-7)


class TestMzSample:
    def test_constant_at_m1(self):
        d = mz_sample(TrigPoly(1.0, np.zeros(0), np.zeros(0)), 2.0, degree=1)
        assert np.allclose(d.values, 1.0)
        assert d.scaled_lp_norm() == pytest.approx(math.sqrt(3.0))

    def test_cos_three_points(self):
        d = mz_sample(TrigPoly.harmonic(1), 2.0)
        assert d.scaled_lp_norm() ** 2 == pytest.approx(1.5)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(3)
        d = mz_sample(random_poly(rng, 4), 2.5)
        shuffled = DiscretizedPoly(rng.permutation(d.values), d.scale, d.p)
        assert shuffled.scaled_lp_norm() == pytest.approx(d.scaled_lp_norm())

    def test_degree_zero_rejected(self):
        with pytest.raises(InvalidExponentError):
            mz_sample(TrigPoly(1.0, np.zeros(0), np.zeros(0)), 2.0)


class TestMzRatioStats:
    def test_p2_ratios_concentrate(self):
        for m in (4, 16):
            lo, hi = mz_ratio_stats(m, 2.0, 50, seed=0)
            assert hi / lo == pytest.approx(1.0, abs=1e-6)

    def test_deterministic(self):
        assert mz_ratio_stats(1, 2.5, 1, seed=77) == mz_ratio_stats(1, 2.5, 1, seed=77)

    def test_p3_spread_bounded_across_degrees(self):
        spreads = []
        for m in (4, 64):
            lo, hi = mz_ratio_stats(m, 3.0, 100, seed=1)
            spreads.append(hi / lo)
        assert max(spreads) / min(spreads) <= 10.0
