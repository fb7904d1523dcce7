"""L_p norms, best approximation from T_n in L_q, and equispaced sampling.

The best-approximation solver is iteratively reweighted least squares on the
2n+1 basis coefficients, warm-started from the Fourier partial sum (which is
already the exact q = 2 minimizer).
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    GridTooCoarseError,
    InvalidExponentError,
    NonconvergenceError,
)
from .fourier import GridFunction, TrigPoly, analyze, eval_poly, synthesize

QUADRATURE_TOL = 1e-10
QUADRATURE_CAP = 2**16
IRLS_TOL = 1e-10
IRLS_MAX_ITER = 500


def lp_norm(f, p):
    """Trapezoidal L_p norm of a grid function over [0, 2pi)."""
    if p < 1:
        raise InvalidExponentError(f"p must be >= 1, got {p}")
    n = f.size
    return float((2.0 * np.pi / n * np.sum(np.abs(f.samples) ** p)) ** (1.0 / p))


def poly_lp_norm(t, p, tol=QUADRATURE_TOL):
    """L_p norm of a trigonometric polynomial, refining the grid until stable.

    |t|^p is not band-limited for non-even p, so the grid is doubled until the
    norm stops moving (cap 2^16 points).
    """
    if p < 1:
        raise InvalidExponentError(f"p must be >= 1, got {p}")
    n_grid = max(256, 4 * (t.degree + 1))
    prev = lp_norm(synthesize(t, n_grid), p)
    # Even integer p: |t|^p is itself a trig polynomial, first grid is exact.
    if p == int(p) and int(p) % 2 == 0 and n_grid > p * t.degree:
        return prev
    while n_grid < QUADRATURE_CAP:
        n_grid *= 2
        cur = lp_norm(synthesize(t, n_grid), p)
        if abs(cur - prev) <= tol * max(abs(cur), 1.0):
            return cur
        prev = cur
    return prev


def _design_matrix(x, n):
    k = np.arange(1, n + 1)
    kx = np.multiply.outer(x, k)
    return np.hstack([np.ones((len(x), 1)), np.cos(kx), np.sin(kx)])


def _coeffs_to_poly(c, n):
    return TrigPoly(c[0], c[1 : n + 1], c[n + 1 :])


def best_approx(f, n, q, force_iterative=False):
    """Best approximation of f from T_n in L_q; returns (error, argmin).

    Convex in the coefficients for 1 < q < infinity.  The q = 2 answer is the
    Fourier partial sum; other q start there and reweight.  force_iterative
    routes q = 2 through the reweighting loop as well (cross-check hook).
    """
    if not 1.0 < q < np.inf:
        raise InvalidExponentError(f"q must lie in (1, inf), got {q}")
    if f.size < 2 * n + 1:
        raise GridTooCoarseError(f"grid of {f.size} points too coarse for degree {n}")

    partial = analyze(f, n)
    if q == 2.0 and not force_iterative:
        resid = GridFunction(f.samples - eval_poly(partial, f.grid))
        return lp_norm(resid, 2.0), partial

    x = f.grid
    phi = _design_matrix(x, n)
    c = partial.coeff_vector()
    resid = f.samples - phi @ c
    scale = 2.0 * np.pi / f.size
    err = (scale * np.sum(np.abs(resid) ** q)) ** (1.0 / q)
    eps = 1e-12 * max(1.0, np.max(np.abs(f.samples)))
    step = 1.0 if q <= 2.0 else min(1.0, 2.0 / q)

    converged = err == 0.0
    iterations = 0
    for iterations in range(1, IRLS_MAX_ITER + 1):
        if converged:
            break
        w = np.maximum(np.abs(resid), eps) ** (q - 2.0)
        wphi = phi * w[:, None]
        c_ls = np.linalg.solve(phi.T @ wphi, wphi.T @ f.samples)
        # Damped update with backtracking so the L_q error never increases.
        alpha = step
        for _ in range(40):
            c_try = c + alpha * (c_ls - c)
            resid_try = f.samples - phi @ c_try
            err_try = (scale * np.sum(np.abs(resid_try) ** q)) ** (1.0 / q)
            if err_try <= err or alpha < 1e-8:
                break
            alpha *= 0.5
        improvement = err - err_try
        c, resid, err = c_try, resid_try, err_try
        if improvement <= IRLS_TOL * max(err, 1e-30):
            converged = True
    if not converged:
        raise NonconvergenceError(
            "best_approx IRLS did not converge",
            diagnostics={"iterations": iterations, "error": err, "q": q, "n": n},
        )
    return float(err), _coeffs_to_poly(c, n)


@dataclass(frozen=True)
class DiscretizedPoly:
    """Values of a degree-m polynomial at 2pi k/(2m+1), k = 1..2m+1, with the
    m^{-1/p} scale that makes the l_p norm comparable to the continuous one."""

    values: np.ndarray
    scale: float
    p: float

    def scaled_lp_norm(self):
        return float(self.scale * np.sum(np.abs(self.values) ** self.p) ** (1.0 / self.p))


def mz_sample(t, p, degree=None):
    """Sample t on the 2m+1 equispaced points used by the two-sided l_p comparison."""
    m = t.degree if degree is None else degree
    if m < 1:
        raise InvalidExponentError("sampling needs degree m >= 1")
    if not 1.0 < p < np.inf:
        raise InvalidExponentError(f"p must lie in (1, inf), got {p}")
    points = 2.0 * np.pi * np.arange(1, 2 * m + 2) / (2 * m + 1)
    return DiscretizedPoly(eval_poly(t, points), float(m ** (-1.0 / p)), p)


def _random_unit_polys(m, trials, rng):
    """Coefficient vectors drawn uniformly from the unit sphere in R^{2m+1}."""
    coeffs = rng.standard_normal((trials, 2 * m + 1))
    coeffs /= np.linalg.norm(coeffs, axis=1, keepdims=True)
    return coeffs


def mz_ratio_stats(m, p, trials, seed):
    """Extremes of scaled-discrete-norm / continuous-norm over random polynomials.

    Deterministic given the seed; brackets the two-sided sampling constants
    empirically for one (m, p) cell.
    """
    if trials < 1:
        raise InvalidExponentError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    coeffs = _random_unit_polys(m, trials, rng)
    a0 = coeffs[:, 0]
    a = coeffs[:, 1 : m + 1]
    b = coeffs[:, m + 1 :]

    # Discrete side, all trials at once.
    points = 2.0 * np.pi * np.arange(1, 2 * m + 2) / (2 * m + 1)
    k = np.arange(1, m + 1)
    kx = np.multiply.outer(points, k)
    values = a0[:, None] + a @ np.cos(kx).T + b @ np.sin(kx).T
    discrete = m ** (-1.0 / p) * np.sum(np.abs(values) ** p, axis=1) ** (1.0 / p)

    # Continuous side on a doubling grid shared by the whole batch.
    n_grid = max(256, 4 * (m + 1))
    prev = _batch_lp_norms(a0, a, b, n_grid, p)
    if not (p == int(p) and int(p) % 2 == 0):
        while n_grid < QUADRATURE_CAP:
            n_grid *= 2
            cur = _batch_lp_norms(a0, a, b, n_grid, p)
            if np.max(np.abs(cur - prev) / np.maximum(cur, 1e-300)) <= QUADRATURE_TOL:
                prev = cur
                break
            prev = cur
    ratios = discrete / prev
    return float(np.min(ratios)), float(np.max(ratios))


def _batch_lp_norms(a0, a, b, n_grid, p):
    m = a.shape[1]
    spec = np.zeros((len(a0), n_grid // 2 + 1), dtype=complex)
    spec[:, 0] = a0
    spec[:, 1 : m + 1] = 0.5 * (a - 1j * b)
    samples = np.fft.irfft(spec * n_grid, n=n_grid, axis=1)
    return (2.0 * np.pi / n_grid * np.sum(np.abs(samples) ** p, axis=1)) ** (1.0 / p)
