"""Asymptotic rate tables for convolution classes, optimality verdicts, and
log-space fitting of measured sequences to the three rate families.

Families: "sobolev" (coefficients k^-r), "exponential" (exp(-mu k^r); r >= 1
is the analytic/entire regime), and "polylog" (the slow-decay family
k^{-(1/p-1/q)_+} ln(k+1)^{-gamma}).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateDataError, InvalidExponentError, UncoveredRegimeError

FIT_MIN_POINTS = 6
FIT_MIN_N = 8
RESIDUAL_FLOOR = 1e-14
PARSIMONY_RATIO = 10.0


@dataclass(frozen=True)
class RateModel:
    """c * n^-a, c * n^-a (ln n)^-g, or c * exp(-mu n^r) n^b."""

    kind: str  # 'poly', 'polylog' or 'exp'
    c: float = 1.0
    a: float = 0.0
    g: float = 0.0
    mu: float = 0.0
    r: float = 0.0
    b: float = 0.0

    def __call__(self, n):
        n = np.asarray(n, dtype=float)
        if self.kind == "poly":
            return self.c * n ** (-self.a)
        if self.kind == "polylog":
            return self.c * n ** (-self.a) * np.log(n) ** (-self.g)
        return self.c * np.exp(-self.mu * n**self.r) * n**self.b

    def describe(self):
        if self.kind == "poly":
            return f"n^{-self.a:g}"
        if self.kind == "polylog":
            if self.a == 0:
                return f"(ln n)^{-self.g:g}"
            return f"n^{-self.a:g}·(ln n)^{-self.g:g}"
        body = f"exp(-{self.mu:g}·n^{self.r:g})"
        return body if self.b == 0 else f"{body}·n^{self.b:g}"

    def same_order(self, other):
        """True when the two models share family and exponents (constants ignored)."""
        if self.kind != other.kind:
            return False
        tol = 1e-12
        if self.kind == "poly":
            return abs(self.a - other.a) < tol
        if self.kind == "polylog":
            return abs(self.a - other.a) < tol and abs(self.g - other.g) < tol
        return (
            abs(self.mu - other.mu) < tol
            and abs(self.r - other.r) < tol
            and abs(self.b - other.b) < tol
        )


@dataclass(frozen=True)
class RegimeVerdict:
    width_rate: RateModel
    en_rate: RateModel
    optimal: str  # 'optimal', 'not-optimal' or 'optimal-up-to-constants'
    regime: str
    critical_beta: Optional[float] = None


def _check_pq(p, q):
    if not (1.0 < p < np.inf and 1.0 < q < np.inf):
        raise InvalidExponentError(f"need 1 < p, q < inf, got ({p}, {q})")


def _small_smoothness_beta(p, q):
    if p == q:
        return 0.0
    return (1.0 / p - 1.0 / q) / (2.0 * (0.5 - 1.0 / q))


def _sobolev_regime(p, q, r):
    """Classify a Sobolev cell into a table row tag, or raise."""
    if q < p:
        if r > 0:
            return "sobolev q<p"
        raise UncoveredRegimeError(f"sobolev needs r > 0 for q < p, got r={r}")
    if q <= 2.0:  # p <= q <= 2
        if r > 1.0 / p - 1.0 / q:
            return "sobolev p<=q<=2"
        raise UncoveredRegimeError(f"sobolev needs r > 1/p - 1/q, got r={r}")
    if p < 2.0:  # p < 2 < q
        if r > 1.0 / p:
            return "sobolev p<=2<=q"
        if 1.0 / p - 1.0 / q < r < 1.0 / p:
            return "small-smoothness p<2<q"
        raise UncoveredRegimeError(f"sobolev cell (p={p}, q={q}, r={r}) not covered")
    # 2 <= p <= q
    if r > 1.0 / p:
        return "sobolev 2<=p<=q"
    if 1.0 / p - 1.0 / q < r < 1.0 / p:
        if r == _small_smoothness_beta(p, q):
            raise UncoveredRegimeError("small smoothness excluded at the critical exponent")
        return "small-smoothness 2<=p<=q"
    raise UncoveredRegimeError(f"sobolev cell (p={p}, q={q}, r={r}) not covered")


def width_rate(family, p, q, r=None, mu=None, gamma=None):
    """Width order for the family at (p, q); constants are normalized to 1."""
    _check_pq(p, q)
    if family == "sobolev":
        regime = _sobolev_regime(p, q, r)
        if regime == "sobolev q<p":
            return RateModel("poly", a=r)
        if regime == "sobolev p<=q<=2":
            return RateModel("poly", a=r - (1.0 / p - 1.0 / q))
        if regime == "sobolev p<=2<=q":
            return RateModel("poly", a=r - 1.0 / p + 0.5)
        if regime == "sobolev 2<=p<=q":
            return RateModel("poly", a=r)
        if regime == "small-smoothness p<2<q":
            return RateModel("poly", a=q * (r - 1.0 / p + 1.0 / q) / 2.0)
        # small smoothness, 2 <= p <= q
        exponent = max(-r, q * (-r + 1.0 / p - 1.0 / q) / 2.0)
        return RateModel("poly", a=-exponent)
    if family == "exponential":
        if r is None or mu is None or r <= 0 or mu <= 0:
            raise UncoveredRegimeError("exponential family needs mu > 0, r > 0")
        if r >= 1.0:
            return RateModel("exp", mu=mu, r=r)
        if q <= p <= 2.0 or (p >= 2.0 and q >= 2.0):
            return RateModel("exp", mu=mu, r=r)
        if p <= q <= 2.0:
            return RateModel("exp", mu=mu, r=r, b=(1.0 - r) * (1.0 / p - 1.0 / q))
        if p <= 2.0 <= q:
            return RateModel("exp", mu=mu, r=r, b=(1.0 - r) * (1.0 / p - 0.5))
        raise UncoveredRegimeError(f"exponential cell (p={p}, q={q}) not covered")
    if family == "polylog":
        if gamma is None or gamma < 0:
            raise UncoveredRegimeError("polylog family needs gamma >= 0")
        return RateModel("polylog", g=gamma)
    raise UncoveredRegimeError(f"unknown family {family!r}")


def en_rate(family, p, q, r=None, mu=None, gamma=None):
    """Order of the worst-case T_n approximation error for the family."""
    _check_pq(p, q)
    gap = max(0.0, 1.0 / p - 1.0 / q)
    if family == "sobolev":
        if r is None or r <= gap:
            raise UncoveredRegimeError(f"sobolev error rate needs r > (1/p - 1/q)_+")
        return RateModel("poly", a=r - gap)
    if family == "exponential":
        if r is None or mu is None or r <= 0 or mu <= 0:
            raise UncoveredRegimeError("exponential family needs mu > 0, r > 0")
        return RateModel("exp", mu=mu, r=r, b=max(0.0, 1.0 - r) * gap)
    if family == "polylog":
        if gamma is None or gamma < 0:
            raise UncoveredRegimeError("polylog family needs gamma >= 0")
        return RateModel("polylog", g=gamma)
    raise UncoveredRegimeError(f"unknown family {family!r}")


def optimality_verdict(family, p, q, r=None, mu=None, gamma=None):
    """Is the trigonometric sequence order-optimal for this cell?"""
    _check_pq(p, q)
    wr = width_rate(family, p, q, r=r, mu=mu, gamma=gamma)
    er = en_rate(family, p, q, r=r, mu=mu, gamma=gamma)
    critical_beta = None
    if family == "sobolev":
        regime = _sobolev_regime(p, q, r)
        if regime in ("sobolev q<p", "sobolev p<=q<=2"):
            optimal = "optimal"
        elif regime in ("sobolev p<=2<=q", "sobolev 2<=p<=q", "small-smoothness p<2<q"):
            optimal = "not-optimal"
        else:  # small smoothness, 2 <= p <= q: decided by exponent comparison
            critical_beta = _small_smoothness_beta(p, q)
            optimal = "optimal" if wr.same_order(er) else "not-optimal"
        if regime == "small-smoothness p<2<q":
            critical_beta = None
    elif family == "exponential":
        if r >= 1.0:
            regime = "analytic-entire"
            optimal = "optimal"
        else:
            if (p >= 2.0 and q >= 2.0) or p <= 2.0 <= q:
                optimal = "not-optimal"
            else:
                optimal = "optimal"
            regime = "exponential 0<r<1"
    else:
        regime = "polylog slow decay"
        optimal = "optimal"
    return RegimeVerdict(wr, er, optimal, regime, critical_beta)


def catalog_record(family, p, q, r=None, mu=None, gamma=None):
    """One machine-readable catalog record for a single parameter cell."""
    verdict = optimality_verdict(family, p, q, r=r, mu=mu, gamma=gamma)
    params = {}
    if r is not None:
        params["r"] = r
    if mu is not None:
        params["mu"] = mu
    if gamma is not None:
        params["gamma"] = gamma
    record = {
        "family": family,
        "params": params,
        "p": p,
        "q": q,
        "width_rate": verdict.width_rate.describe(),
        "en_rate": verdict.en_rate.describe(),
        "verdict": verdict.optimal,
        "regime": verdict.regime,
    }
    if verdict.critical_beta is not None:
        record["critical_beta"] = verdict.critical_beta
    return record


def catalog_records():
    """Records over a standard grid of cells, one per covered regime."""
    cells = []
    for p, q in [(1.5, 1.2), (4.0, 2.0), (1.5, 1.8), (1.2, 2.0), (1.5, 3.0), (2.5, 4.0), (3.0, 3.0)]:
        for r in (0.5, 1.0, 2.0):
            cells.append(("sobolev", p, q, {"r": r}))
    for p, q in [(1.5, 1.2), (1.2, 1.8), (1.5, 3.0), (3.0, 4.0), (3.0, 3.0)]:
        for r in (0.5, 1.0, 2.0):
            cells.append(("exponential", p, q, {"mu": 1.0, "r": r}))
    for p, q in [(1.5, 3.0), (3.0, 1.5), (2.5, 4.0), (3.0, 3.0)]:
        cells.append(("polylog", p, q, {"gamma": 1.0}))
    records = []
    for family, p, q, params in cells:
        try:
            records.append(catalog_record(family, p, q, **params))
        except UncoveredRegimeError as exc:
            records.append(
                {
                    "family": family,
                    "params": params,
                    "p": p,
                    "q": q,
                    "verdict": "uncovered",
                    "regime": str(exc),
                }
            )
    return records


def _lstsq(design, target):
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    resid = target - design @ coef
    return coef, float(np.sqrt(np.mean(resid**2)))


def _fit_exp_at_r(r, n, logv):
    design = np.column_stack([np.ones_like(n), -(n**r), np.log(n)])
    return _lstsq(design, logv)


def fit_rate(points):
    """Least-squares fit in log space over the three families.

    Returns (model, residual) for the winning family.  Simpler families win
    ties: a richer family is chosen only when it beats the simpler one's
    residual by a factor of 10.
    """
    pts = sorted(points)
    if len(pts) < FIT_MIN_POINTS:
        raise DegenerateDataError(f"need at least {FIT_MIN_POINTS} points, got {len(pts)}")
    n = np.asarray([x for x, _ in pts], dtype=float)
    v = np.asarray([y for _, y in pts], dtype=float)
    if np.any(v <= 0):
        raise DegenerateDataError("values must be positive")
    if np.all(v == v[0]):
        raise DegenerateDataError("constant values carry no rate information")
    if np.any(np.diff(n) <= 0):
        raise DegenerateDataError("n must be strictly increasing")
    mask = n >= FIT_MIN_N
    if np.count_nonzero(mask) >= FIT_MIN_POINTS:
        n, v = n[mask], v[mask]
    logv = np.log(v)
    logn = np.log(n)

    coef_p, res_p = _lstsq(np.column_stack([np.ones_like(n), -logn]), logv)
    poly = RateModel("poly", c=math.exp(coef_p[0]), a=coef_p[1])

    coef_l, res_l = _lstsq(
        np.column_stack([np.ones_like(n), -logn, -np.log(logn)]), logv
    )
    polylog = RateModel("polylog", c=math.exp(coef_l[0]), a=coef_l[1], g=coef_l[2])

    grid = np.linspace(0.05, 2.0, 40)
    grid_res = [_fit_exp_at_r(r, n, logv)[1] for r in grid]
    best_idx = int(np.argmin(grid_res))
    lo = grid[max(best_idx - 1, 0)]
    hi = grid[min(best_idx + 1, len(grid) - 1)]
    opt = minimize_scalar(
        lambda r: _fit_exp_at_r(r, n, logv)[1], bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-10},
    )
    r_best = float(opt.x)
    coef_e, res_e = _fit_exp_at_r(r_best, n, logv)
    exp_model = RateModel(
        "exp", c=math.exp(coef_e[0]), mu=coef_e[1], r=r_best, b=coef_e[2]
    )

    # The exponential family is only a genuine candidate when its decay term
    # actually spans the data range; otherwise it degenerates into a smooth
    # log-polynomial absorber and would shadow the simpler families.
    exp_span = exp_model.mu * (n[-1] ** r_best - n[0] ** r_best)
    if not exp_span >= 0.5:
        res_e = np.inf

    fp = max(res_p, RESIDUAL_FLOOR)
    fl = max(res_l, RESIDUAL_FLOOR)
    fe = max(res_e, RESIDUAL_FLOOR)
    if fp <= PARSIMONY_RATIO * min(fl, fe):
        return poly, res_p
    if fl <= PARSIMONY_RATIO * fe:
        return polylog, res_l
    return exp_model, res_e
