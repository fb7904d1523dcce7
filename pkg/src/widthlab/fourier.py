"""Trigonometric polynomials, multiplier kernels and periodic convolution.

Everything is real-valued and lives on the circle [0, 2pi) with the
unnormalized Lebesgue measure.  A degree-n polynomial is stored by its
cosine/sine coefficients; grids are always uniform with spacing 2pi/N, on
which the trapezoidal rule integrates trig polynomials of degree <= N-1
exactly.
"""

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import (
    GridMismatchError,
    GridTooCoarseError,
    TruncationExceededError,
)

TRUNCATION_CAP = 4096
TRUNCATION_DROP = 1e-14


def _freeze(arr):
    arr = np.asarray(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class TrigPoly:
    """a0 + sum_{k=1}^{degree} a_k cos kx + b_k sin kx."""

    a0: float
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _freeze(self.a)
        b = _freeze(self.b)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("cosine and sine coefficient arrays must match")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def degree(self):
        return len(self.a)

    @classmethod
    def zero(cls, degree=0):
        return cls(0.0, np.zeros(degree), np.zeros(degree))

    @classmethod
    def harmonic(cls, k, cos_amp=1.0, sin_amp=0.0):
        """Single harmonic cos_amp*cos(kx) + sin_amp*sin(kx)."""
        if k == 0:
            return cls(cos_amp, np.zeros(0), np.zeros(0))
        a = np.zeros(k)
        b = np.zeros(k)
        a[k - 1] = cos_amp
        b[k - 1] = sin_amp
        return cls(0.0, a, b)

    def coeff_vector(self):
        """Flat coefficient vector (a0, a_1..a_n, b_1..b_n)."""
        return np.concatenate(([self.a0], self.a, self.b))

    def truncate(self, degree):
        if degree >= self.degree:
            pad = degree - self.degree
            return TrigPoly(self.a0, np.pad(self.a, (0, pad)), np.pad(self.b, (0, pad)))
        return TrigPoly(self.a0, self.a[:degree], self.b[:degree])


@dataclass(frozen=True)
class GridFunction:
    """Samples on the uniform grid x_j = 2pi j / N, j = 0..N-1."""

    samples: np.ndarray

    def __post_init__(self):
        samples = _freeze(self.samples)
        if samples.ndim != 1 or len(samples) < 1:
            raise ValueError("samples must be a nonempty 1-d array")
        object.__setattr__(self, "samples", samples)

    @property
    def size(self):
        return len(self.samples)

    @property
    def grid(self):
        return 2.0 * np.pi * np.arange(self.size) / self.size


class Polynomial:
    """lambda_k = k^{-r}."""

    def __init__(self, r):
        self.r = float(r)

    def lambdas(self, n):
        return np.arange(1, n + 1, dtype=float) ** (-self.r)


class PolyLog:
    """lambda_k = k^{-rho} * ln(k+1)^{-gamma}.

    ln(k+1) rather than ln k keeps lambda_1 finite; same asymptotic order.
    """

    def __init__(self, rho, gamma):
        self.rho = float(rho)
        self.gamma = float(gamma)

    def lambdas(self, n):
        k = np.arange(1, n + 1, dtype=float)
        return k ** (-self.rho) * np.log(k + 1.0) ** (-self.gamma)


class Exponential:
    """lambda_k = exp(-mu * k^r)."""

    def __init__(self, mu, r):
        self.mu = float(mu)
        self.r = float(r)

    def lambdas(self, n):
        k = np.arange(1, n + 1, dtype=float)
        return np.exp(-self.mu * k**self.r)


class Table:
    """Explicit finite coefficient table lambda_1..lambda_N."""

    def __init__(self, values):
        self.values = _freeze(values)

    def lambdas(self, n):
        if n > len(self.values):
            out = np.zeros(n)
            out[: len(self.values)] = self.values
            return out
        return self.values[:n].copy()


Family = Union[Polynomial, PolyLog, Exponential, Table]


def _auto_truncation(family):
    if isinstance(family, Table):
        return len(family.values)
    lam = family.lambdas(TRUNCATION_CAP + 1)
    small = np.nonzero(lam < TRUNCATION_DROP * lam[0])[0]
    if len(small):
        return max(int(small[0]), 1)
    return TRUNCATION_CAP


@dataclass(frozen=True)
class MultiplierKernel:
    """Coefficient decay family plus the phase shift beta*pi/2 per harmonic."""

    family: Family
    beta: float = 0.0
    truncation: int = field(default=0)

    def __post_init__(self):
        if self.truncation <= 0:
            object.__setattr__(self, "truncation", _auto_truncation(self.family))
        lam = self.family.lambdas(min(self.truncation, 64))
        if np.any(lam[: len(lam)] < 0):
            raise ValueError("multiplier coefficients must be nonnegative")

    def lambdas(self, n=None):
        if n is None:
            n = self.truncation
        return self.family.lambdas(n)


def eval_poly(t, x):
    """Evaluate t at scalar or array x."""
    x = np.asarray(x, dtype=float)
    k = np.arange(1, t.degree + 1)
    kx = np.multiply.outer(x, k)
    return t.a0 + np.cos(kx) @ t.a + np.sin(kx) @ t.b


def synthesize(t, n_grid=None):
    """Sample t on a uniform grid (default fine enough for exact round trips)."""
    if n_grid is None:
        n_grid = default_grid_size(t.degree)
    if n_grid < 2 * t.degree + 1:
        raise GridTooCoarseError(
            f"grid of {n_grid} points cannot resolve degree {t.degree}"
        )
    # Inverse FFT of the half-complex spectrum: c_0 = a0, c_k = (a_k - i b_k)/2.
    spec = np.zeros(n_grid // 2 + 1, dtype=complex)
    spec[0] = t.a0
    spec[1 : t.degree + 1] = 0.5 * (t.a - 1j * t.b)
    return GridFunction(np.fft.irfft(spec * n_grid, n=n_grid))


def default_grid_size(degree):
    """Oversampled default: exact for the degree plus headroom for |.|^p integrands."""
    return max(256, 8 * (degree + 1))


def analyze(f, m):
    """Degree-m Fourier partial sum of f by discrete quadrature (projection S_m)."""
    n = f.size
    if n < 2 * m + 1:
        raise GridTooCoarseError(f"need at least {2 * m + 1} samples for degree {m}, got {n}")
    spec = np.fft.rfft(f.samples) / n
    a0 = spec[0].real
    a = 2.0 * spec[1 : m + 1].real
    b = -2.0 * spec[1 : m + 1].imag
    if m > len(spec) - 1:  # unreachable given the guard, but keep shapes honest
        a = np.pad(a, (0, m - len(a)))
        b = np.pad(b, (0, m - len(b)))
    return TrigPoly(a0, a, b)


def apply_multiplier(kernel, phi, keep_constant=False):
    """Coefficientwise multiplier action with phase rotation theta = beta*pi/2.

    The constant term is dropped by default (the harmonic sums start at k=1).
    """
    if phi.degree > kernel.truncation:
        raise TruncationExceededError(
            f"degree {phi.degree} exceeds kernel truncation {kernel.truncation}"
        )
    lam = kernel.lambdas(phi.degree)
    theta = kernel.beta * np.pi / 2.0
    c, s = np.cos(theta), np.sin(theta)
    a = lam * (phi.a * c - phi.b * s)
    b = lam * (phi.a * s + phi.b * c)
    return TrigPoly(phi.a0 if keep_constant else 0.0, a, b)


def synthesize_kernel(kernel, n_grid):
    """Grid samples of K(x) = sum_k lambda_k cos(kx - beta*pi/2), truncated."""
    n_terms = kernel.truncation
    if n_grid < 2 * n_terms + 1:
        raise GridTooCoarseError(
            f"grid of {n_grid} points cannot resolve truncation {n_terms}"
        )
    lam = kernel.lambdas()
    theta = kernel.beta * np.pi / 2.0
    t = TrigPoly(0.0, lam * np.cos(theta), lam * np.sin(theta))
    return synthesize(t, n_grid)


def convolve(kernel_samples, phi):
    """Periodic convolution (1/2pi) int K(x-y) phi(y) dy on a shared grid."""
    if kernel_samples.size != phi.size:
        raise GridMismatchError(
            f"grid sizes differ: {kernel_samples.size} vs {phi.size}"
        )
    n = phi.size
    out = np.fft.irfft(
        np.fft.rfft(kernel_samples.samples) * np.fft.rfft(phi.samples), n=n
    )
    return GridFunction(out / n)


_CONV_CONST = None


def convolution_constant():
    """Ratio of convolution coefficients to the raw multiplier action.

    The value is fixed once by quadrature over a few independent harmonics and
    asserted to be a single constant (it is 1/2 under the unnormalized norm).
    """
    global _CONV_CONST
    if _CONV_CONST is None:
        ratios = []
        for k, beta, lam in [(1, 0.0, 1.0), (2, 0.0, 0.7), (3, 1.0, 1.3)]:
            kern = MultiplierKernel(Table(np.eye(1, k, k - 1)[0] * lam), beta=beta)
            phi = TrigPoly.harmonic(k, cos_amp=1.0, sin_amp=0.4)
            grid = default_grid_size(k)
            conv = analyze(convolve(synthesize_kernel(kern, grid), synthesize(phi, grid)), k)
            mult = apply_multiplier(kern, phi)
            ratios.append(conv.a[k - 1] / mult.a[k - 1])
            ratios.append(conv.b[k - 1] / mult.b[k - 1])
        ratios = np.asarray(ratios)
        assert np.allclose(ratios, ratios[0], rtol=1e-12, atol=1e-13), ratios
        _CONV_CONST = float(ratios[0])
    return _CONV_CONST
