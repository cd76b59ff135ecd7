"""Relaxation kernels, their cosine transforms and admissibility checks.

A kernel is the shear relaxation function ``mu(s)``; its derivative
``mu'(s)`` is the memory kernel of the Boltzmann-Volterra law.  Kernels are
spatially homogeneous and immutable.

Families
--------
- ``exponential``: ``mu0 * exp(-rate * s)``
- ``prony``: sum of exponentials ``sum_i a_i exp(-l_i s)``
- ``polynomial``: ``mu0 * (1 + s) ** (-exponent)``
- ``tabulated``: monotone cubic interpolation of ``(s, mu)`` samples
- ``callable``: arbitrary user functions (used for counterexamples)
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, special
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

DECAY_RATIO = 1e-10
XI_RTOL = 1e-3


class InadmissibleKernelError(ValueError):
    """Raised when a kernel violates integrability or positivity requirements."""


# ---------------------------------------------------------------------------
# special functions


SERIES_RADIUS = 4.0


def _expint_cf(n: float, z: np.ndarray, maxiter: int = 5000) -> np.ndarray:
    # modified Lentz evaluation of the continued fraction for E_n(z), |z| >= 1
    tiny = 1e-300
    b = z + n
    c = np.full_like(z, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    live = np.arange(z.size)
    for i in range(1, maxiter):
        an = -i * (n - 1.0 + i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h[live] = h[live] * delta
        going = np.abs(delta - 1.0) >= 1e-15
        if not going.any():
            break
        live, b, c, d = live[going], b[going], c[going], d[going]
    return h * np.exp(-z)


def _expint_small(n: float, z: np.ndarray) -> np.ndarray:
    if float(n).is_integer():
        e = special.exp1(z)
        for m in range(1, int(n)):
            e = (np.exp(-z) - z * e) / m
        return e
    # power series, valid for non-integer order
    total = np.zeros_like(z)
    term = np.ones_like(z)
    for k in range(90):
        if k > 0:
            term = term * (-z) / k
        total = total + term / (k + 1.0 - n)
    return z ** (n - 1.0) * special.gamma(1.0 - n) - total


def expint(n: float, z) -> np.ndarray:
    """Generalized exponential integral ``E_n(z)`` for complex ``z``, ``Re z >= 0``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty_like(z)
    big = np.abs(z) >= SERIES_RADIUS
    if big.any():
        out[big] = _expint_cf(n, z[big])
    if (~big).any():
        out[~big] = _expint_small(n, z[~big])
    return out


# ---------------------------------------------------------------------------
# numerical helpers


def finite_difference(f: Callable, s, order: int = 1, h: float = 1e-3) -> np.ndarray:
    """Fourth-order central difference of ``f`` at ``s``."""
    s = np.asarray(s, dtype=float)
    if order == 1:
        return (f(s - 2 * h) - 8 * f(s - h) + 8 * f(s + h) - f(s + 2 * h)) / (12 * h)
    if order == 2:
        return (
            -f(s - 2 * h) + 16 * f(s - h) - 30 * f(s) + 16 * f(s + h) - f(s + 2 * h)
        ) / (12 * h * h)
    raise ValueError("order must be 1 or 2")


def graded_segments(end: float, scale: float = 1.0, first: float = 0.25) -> list[tuple[float, float]]:
    """Geometric segmentation of ``[0, end]``: each segment doubles the previous."""
    edges = [0.0]
    b = first * scale
    while b < end:
        edges.append(b)
        b *= 2.0
    edges.append(end)
    return list(zip(edges[:-1], edges[1:]))


def graded_grid(end: float, scale: float = 1.0, panels: int = 64) -> np.ndarray:
    """Points of a graded grid with ``2 * panels`` uniform intervals per segment."""
    pts = [np.linspace(a, b, 2 * panels + 1)[:-1] for a, b in graded_segments(end, scale)]
    return np.concatenate(pts + [np.array([end])])


def _filon_moments(theta: np.ndarray, h: float):
    small = np.abs(theta) < 0.1
    t = np.where(small, 1.0, theta)
    st, ct = np.sin(t), np.cos(t)
    w = t / h
    i0 = 2 * st / w
    i1 = 2 * (st - t * ct) / w**2
    i2 = 2 * ((t * t - 2) * st + 2 * t * ct) / w**3
    th2 = theta * theta
    i0s = 2 * h * (1 - th2 / 6 + th2**2 / 120 - th2**3 / 5040)
    i1s = 2 * h * h * theta * (1 / 3 - th2 / 30 + th2**2 / 840)
    i2s = 2 * h**3 * (1 / 3 - th2 / 10 + th2**2 / 168 - th2**3 / 6480)
    return (
        np.where(small, i0s, i0),
        -1j * np.where(small, i1s, i1),
        np.where(small, i2s, i2),
    )


def filon_fourier(f: Callable, segments, omega, panels: int = 512) -> np.ndarray:
    """``int f(s) exp(-i w s) ds`` over the union of ``segments`` by Filon-Simpson.

    Each segment carries ``panels`` uniform quadratic panels; the oscillatory
    factor is integrated exactly against the piecewise quadratic interpolant,
    so the rule is accurate independently of ``w`` and reduces to composite
    Simpson at ``w = 0``.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    out = np.zeros(omega.shape, dtype=complex)
    for a, b in segments:
        h = (b - a) / (2 * panels)
        x = a + h * np.arange(2 * panels + 1)
        y = np.asarray(f(x), dtype=float)
        f0, f1, f2 = y[0:-1:2], y[1::2], y[2::2]
        mid = x[1::2]
        lin = (f2 - f0) / (2 * h)
        quad = (f2 - 2 * f1 + f0) / (2 * h * h)
        for chunk in np.array_split(np.arange(omega.size), max(1, omega.size // 256)):
            w = omega[chunk]
            i0, i1, i2 = _filon_moments(w * h, h)
            phase = np.exp(-1j * np.outer(w, mid))
            out[chunk] += i0 * (phase @ f1) + i1 * (phase @ lin) + i2 * (phase @ quad)
    return out


# ---------------------------------------------------------------------------
# kernels


@dataclass(frozen=True)
class Kernel:
    """Base class; subclasses supply ``mu``, derivatives and the running integral."""

    family: str = field(init=False, default="base")

    @property
    def tau_max(self) -> float:
        raise NotImplementedError

    @property
    def time_scale(self) -> float:
        return 1.0

    @property
    def integrable(self) -> bool:
        return True

    def mu(self, s):
        raise NotImplementedError

    def dmu(self, s):
        return finite_difference(self.mu, s, 1, self._fd_step)

    def d2mu(self, s):
        return finite_difference(self.mu, s, 2, self._fd_step)

    @property
    def _fd_step(self) -> float:
        return 1e-3 * self.time_scale

    @cached_property
    def _integral_spline(self) -> CubicHermiteSpline:
        # 8-point Gauss-Legendre per interval, Hermite interpolation with M' = mu
        grid = graded_grid(self.tau_max, self.time_scale, panels=256)
        x, w = np.polynomial.legendre.leggauss(8)
        a, b = grid[:-1, None], grid[1:, None]
        inc = (0.5 * (b - a) * w * self.mu(0.5 * (b - a) * x + 0.5 * (a + b))).sum(axis=1)
        return CubicHermiteSpline(grid, np.concatenate([[0.0], np.cumsum(inc)]), self.mu(grid))

    def integral(self, s):
        """Running integral ``M(s) = int_0^s mu`` (held constant beyond ``tau_max``)."""
        s = np.asarray(s, dtype=float)
        spline = self._integral_spline
        return spline(np.clip(s, 0.0, spline.x[-1]))

    def total(self) -> float:
        return float(self.integral(self.tau_max))

    def tail_fourier(self, start: float, omega) -> Optional[np.ndarray]:
        """Analytic ``int_start^inf mu(s) exp(-i w s) ds``; ``None`` if unavailable."""
        return None

    def fourier(self, omega) -> np.ndarray:
        """Half-line Fourier transform ``mu_F(w) = mu_c(w) - i mu_s(w)``."""
        return fourier_quadrature(self, omega)

    def mu_c(self, omega) -> np.ndarray:
        return self.fourier(omega).real

    @property
    def is_degenerate(self) -> bool:
        return bool(self.mu(np.array([0.0]))[0] == 0.0)


@dataclass(frozen=True)
class PronyKernel(Kernel):
    amplitudes: tuple = (1.0,)
    rates: tuple = (1.0,)
    family: str = field(init=False, default="prony")

    def __post_init__(self):
        if len(self.amplitudes) != len(self.rates):
            raise ValueError("amplitudes and rates differ in length")
        if any(r <= 0 for r in self.rates):
            raise InadmissibleKernelError("prony rates must be positive")
        object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))

    def _terms(self, s):
        s = np.asarray(s, dtype=float)[..., None]
        a, r = np.array(self.amplitudes), np.array(self.rates)
        return a, r, np.exp(-r * s)

    def mu(self, s):
        a, r, e = self._terms(s)
        return (a * e).sum(-1)

    def dmu(self, s):
        a, r, e = self._terms(s)
        return (-a * r * e).sum(-1)

    def d2mu(self, s):
        a, r, e = self._terms(s)
        return (a * r * r * e).sum(-1)

    def integral(self, s):
        a, r, e = self._terms(s)
        return (a / r * -np.expm1(-r * np.asarray(s, dtype=float)[..., None])).sum(-1)

    def total(self) -> float:
        return float(sum(a / r for a, r in zip(self.amplitudes, self.rates)))

    @property
    def time_scale(self) -> float:
        return 1.0 / max(self.rates)

    @property
    def tau_max(self) -> float:
        m0 = sum(self.amplitudes)
        if m0 == 0.0:
            return 0.0
        slow = min(self.rates)
        hi = math.log(1.0 / DECAY_RATIO) / slow * 4
        from scipy.optimize import brentq

        return float(brentq(lambda s: float(self.mu(s)) - DECAY_RATIO * m0, 0.0, hi))

    def fourier(self, omega):
        w = np.asarray(omega, dtype=float)[..., None]
        return (np.array(self.amplitudes) / (np.array(self.rates) + 1j * w)).sum(-1)

    def tail_fourier(self, start, omega):
        w = np.asarray(omega, dtype=float)[..., None]
        z = np.array(self.rates) + 1j * w
        return (np.array(self.amplitudes) * np.exp(-z * start) / z).sum(-1)


@dataclass(frozen=True)
class ExponentialKernel(PronyKernel):
    mu0: float = 1.0
    rate: float = 1.0
    family: str = field(init=False, default="exponential")

    def __init__(self, mu0: float = 1.0, rate: float = 1.0):
        object.__setattr__(self, "mu0", float(mu0))
        object.__setattr__(self, "rate", float(rate))
        object.__setattr__(self, "amplitudes", (float(mu0),))
        object.__setattr__(self, "rates", (float(rate),))
        object.__setattr__(self, "family", "exponential")
        if rate <= 0:
            raise InadmissibleKernelError("exponential rate must be positive")

    @property
    def tau_max(self) -> float:
        return math.log(1.0 / DECAY_RATIO) / self.rate


@dataclass(frozen=True)
class PolynomialKernel(Kernel):
    mu0: float = 1.0
    exponent: float = 2.0
    horizon: Optional[float] = None
    family: str = field(init=False, default="polynomial")

    @property
    def integrable(self) -> bool:
        return self.exponent > 1.0

    @property
    def tau_max(self) -> float:
        if self.horizon is not None:
            return float(self.horizon)
        return DECAY_RATIO ** (-1.0 / self.exponent) - 1.0

    def mu(self, s):
        return self.mu0 * (1.0 + np.asarray(s, dtype=float)) ** (-self.exponent)

    def dmu(self, s):
        c = self.exponent
        return -c * self.mu0 * (1.0 + np.asarray(s, dtype=float)) ** (-c - 1.0)

    def d2mu(self, s):
        c = self.exponent
        return c * (c + 1.0) * self.mu0 * (1.0 + np.asarray(s, dtype=float)) ** (-c - 2.0)

    def integral(self, s):
        c = self.exponent
        s = np.asarray(s, dtype=float)
        if c == 1.0:
            return self.mu0 * np.log1p(s)
        return self.mu0 * (1.0 - (1.0 + s) ** (1.0 - c)) / (c - 1.0)

    def total(self) -> float:
        if not self.integrable:
            return math.inf
        return self.mu0 / (self.exponent - 1.0)

    def fourier(self, omega):
        if not self.integrable:
            raise InadmissibleKernelError("polynomial kernel with exponent <= 1 is not integrable")
        w = np.asarray(omega, dtype=float)
        out = np.empty(w.shape, dtype=complex)
        zero = w == 0.0
        out[zero] = self.total()
        wn = w[~zero]
        out[~zero] = self.mu0 * np.exp(1j * wn) * expint(self.exponent, 1j * wn)
        return out

    def tail_fourier(self, start, omega):
        if not self.integrable:
            return None
        w = np.asarray(omega, dtype=float)
        a = 1.0 + start
        c = self.exponent
        out = np.empty(w.shape, dtype=complex)
        zero = w == 0.0
        out[zero] = self.mu0 * a ** (1.0 - c) / (c - 1.0)
        wn = w[~zero]
        out[~zero] = self.mu0 * np.exp(1j * wn) * a ** (1.0 - c) * expint(c, 1j * wn * a)
        return out


@dataclass(frozen=True, eq=False)
class TabulatedKernel(Kernel):
    s: np.ndarray = None
    values: np.ndarray = None
    family: str = field(init=False, default="tabulated")

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if s.ndim != 1 or s.shape != v.shape or s.size < 4:
            raise ValueError("tabulated kernel needs matching 1-d arrays with >= 4 samples")
        if s[0] != 0.0 or np.any(np.diff(s) <= 0):
            raise ValueError("tabulated abscissae must start at 0 and increase strictly")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_interp", PchipInterpolator(s, v, extrapolate=True))
        object.__setattr__(self, "_anti", self._interp.antiderivative())

    @classmethod
    def from_csv(cls, path) -> "TabulatedKernel":
        path = Path(path)
        with open(path) as fh:
            first = fh.readline().split(",")[0].strip()
        try:
            float(first)
            skip = 0
        except ValueError:
            skip = 1  # header row
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2, skiprows=skip)
        return cls(s=data[:, 0], values=data[:, 1])

    @property
    def tau_max(self) -> float:
        return float(self.s[-1])

    @property
    def time_scale(self) -> float:
        return float(min(self.s[-1] / 16, 1.0))

    @property
    def _fd_step(self) -> float:
        return 0.05 * float(np.min(np.diff(self.s)))

    @property
    def integrable(self) -> bool:
        v0 = abs(self.values[0])
        return v0 == 0.0 or abs(self.values[-1]) <= 1e-6 * v0

    def mu(self, s):
        s = np.asarray(s, dtype=float)
        inside = s <= self.s[-1]
        out = np.where(inside, self._interp(np.clip(s, 0.0, self.s[-1])), 0.0)
        if not self.integrable:
            out = np.where(inside, out, self.values[-1])
        return out

    def integral(self, s):
        s = np.clip(np.asarray(s, dtype=float), 0.0, self.s[-1])
        return self._anti(s) - self._anti(0.0)

    def total(self) -> float:
        if not self.integrable:
            return math.inf
        return float(self.integral(self.s[-1]))

    def tail_fourier(self, start, omega):
        return np.zeros(np.shape(omega), dtype=complex)


@dataclass(frozen=True, eq=False)
class CallableKernel(Kernel):
    func: Callable = None
    dfunc: Optional[Callable] = None
    d2func: Optional[Callable] = None
    horizon: float = 50.0
    finite_integral: bool = True
    family: str = field(init=False, default="callable")

    @property
    def tau_max(self) -> float:
        return float(self.horizon)

    @property
    def integrable(self) -> bool:
        return self.finite_integral

    def mu(self, s):
        return np.asarray(self.func(np.asarray(s, dtype=float)), dtype=float) + 0.0 * np.asarray(s)

    def dmu(self, s):
        if self.dfunc is None:
            return super().dmu(s)
        return np.asarray(self.dfunc(np.asarray(s, dtype=float)), dtype=float) + 0.0 * np.asarray(s)

    def d2mu(self, s):
        if self.d2func is None:
            return super().d2mu(s)
        return np.asarray(self.d2func(np.asarray(s, dtype=float)), dtype=float) + 0.0 * np.asarray(s)

    def total(self) -> float:
        if not self.integrable:
            return math.inf
        return super().total()


def exponential(mu0: float = 1.0, rate: float = 1.0) -> ExponentialKernel:
    return ExponentialKernel(mu0, rate)


def prony(amplitudes: Sequence[float], rates: Sequence[float]) -> PronyKernel:
    return PronyKernel(tuple(amplitudes), tuple(rates))


def polynomial(mu0: float = 1.0, exponent: float = 2.0, horizon: Optional[float] = None) -> PolynomialKernel:
    return PolynomialKernel(mu0, exponent, horizon)


def tabulated(s, values) -> TabulatedKernel:
    return TabulatedKernel(s=s, values=values)


def from_callable(func, dfunc=None, d2func=None, horizon=50.0, integrable=True) -> CallableKernel:
    return CallableKernel(func=func, dfunc=dfunc, d2func=d2func, horizon=horizon,
                          finite_integral=integrable)


# ---------------------------------------------------------------------------
# operations


def fourier_quadrature(k: Kernel, omega, panels: int = 512) -> np.ndarray:
    """Graded Filon-Simpson quadrature of ``mu_F`` on ``[0, tau_max]`` plus analytic tail."""
    if not k.integrable:
        raise InadmissibleKernelError(f"{k.family} kernel is not integrable")
    omega = np.asarray(omega, dtype=float)
    end = k.tau_max
    if end <= 0.0:
        return np.zeros(omega.shape, dtype=complex)
    body = filon_fourier(k.mu, graded_segments(end, k.time_scale), omega.ravel(), panels)
    tail = k.tail_fourier(end, omega.ravel())
    if tail is not None:
        body = body + tail
    return body.reshape(omega.shape)


def cosine_transform(k: Kernel, omega_grid) -> np.ndarray:
    """``mu_c(w) = int_0^inf mu(s) cos(w s) ds`` by quadrature with tail correction."""
    omega_grid = np.asarray(omega_grid, dtype=float)
    if np.any(omega_grid < 0) or not np.all(np.isfinite(omega_grid)):
        raise ValueError("omega grid must be finite and non-negative")
    return fourier_quadrature(k, omega_grid).real


def total_viscosity(k: Kernel) -> float:
    """Long-time effective viscosity ``int_0^inf mu``."""
    if not k.integrable:
        raise InadmissibleKernelError(f"{k.family} kernel is not integrable")
    value = k.total()
    if value == 0.0:
        warnings.warn("degenerate kernel: total viscosity is zero", RuntimeWarning, stacklevel=2)
    return value


@dataclass(frozen=True, eq=False)
class XiProfile:
    """Rate function bounding the kernel curvature: ``mu'' >= -xi mu'``.

    ``kind`` is ``constant`` (``xi = c``), ``inverse_linear``
    (``xi = c / (1 + t)``) or ``general`` (piecewise linear samples).
    """

    kind: str
    c: float = 0.0
    t: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None

    @classmethod
    def constant(cls, c: float) -> "XiProfile":
        return cls("constant", float(c))

    @classmethod
    def inverse_linear(cls, c: float) -> "XiProfile":
        return cls("inverse_linear", float(c))

    @classmethod
    def sampled(cls, t, values) -> "XiProfile":
        return cls("general", 0.0, np.asarray(t, float), np.asarray(values, float))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.full(t.shape, self.c)
        if self.kind == "inverse_linear":
            return self.c / (1.0 + t)
        return np.interp(t, self.t, self.values)

    def integral(self, t):
        """``int_0^t xi``."""
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return self.c * t
        if self.kind == "inverse_linear":
            return self.c * np.log1p(t)
        cum = integrate.cumulative_trapezoid(self.values, self.t, initial=0.0)
        inside = np.interp(np.minimum(t, self.t[-1]), self.t, cum)
        return inside + self.values[-1] * np.maximum(t - self.t[-1], 0.0)

    def is_monotone(self, grid=None) -> bool:
        grid = self.t if grid is None else np.asarray(grid)
        if grid is None:
            return True
        v = self(grid)
        return bool(np.all(v > 0) and np.all(np.diff(v) <= 1e-12 * np.abs(v[:-1])))

    @property
    def monotone(self) -> bool:
        return self.is_monotone(np.linspace(0.0, 100.0, 1001) if self.t is None else None)


@dataclass(frozen=True)
class AdmissibilityReport:
    integrable: bool
    cosine_positive: bool
    min_cosine: float
    mu_prime_negative: bool
    mu_second_nonneg: bool
    xi_bound: bool
    tightest_xi: Optional[XiProfile]
    decay_class: str
    derivatives_available: bool = True

    @property
    def curvature_ok(self) -> bool:
        return self.mu_prime_negative and self.mu_second_nonneg and self.xi_bound

    @property
    def admissible(self) -> bool:
        return self.integrable and self.cosine_positive and self.curvature_ok

    def as_dict(self) -> dict:
        xi = self.tightest_xi
        return {
            "integrable": self.integrable,
            "cosine_positive": self.cosine_positive,
            "min_cosine": self.min_cosine,
            "curvature": [self.mu_prime_negative, self.mu_second_nonneg, self.xi_bound],
            "curvature_ok": self.curvature_ok,
            "decay_class": self.decay_class,
            "tightest_xi": None if xi is None else {"kind": xi.kind, "c": xi.c},
            "admissible": self.admissible,
        }


def _relative_variation(v: np.ndarray) -> float:
    scale = np.max(np.abs(v))
    return float(np.ptp(v) / scale) if scale > 0 else 0.0


def tightest_xi(k: Kernel, tau=None) -> XiProfile:
    """Largest non-increasing ``xi`` with ``xi <= mu''/(-mu')``, with its class."""
    if tau is None:
        tau = sample_grid(k)
    ratio = k.d2mu(tau) / -k.dmu(tau)
    env = np.minimum.accumulate(ratio)
    if _relative_variation(env) <= XI_RTOL:
        return XiProfile.constant(float(env.min()))
    scaled = env * (1.0 + tau)
    if _relative_variation(scaled) <= XI_RTOL:
        return XiProfile.inverse_linear(float(scaled.min()))
    return XiProfile.sampled(tau, env)


def sample_grid(k: Kernel, n: int = 2000) -> np.ndarray:
    end = k.tau_max
    g = graded_grid(end, k.time_scale, panels=8)
    return np.unique(np.concatenate([g, np.linspace(0.0, end, n)]))


def check_admissibility(k: Kernel, xi: Optional[XiProfile] = None,
                        omega_grid=None) -> AdmissibilityReport:
    """Verify positivity of the cosine transform and the three curvature conditions."""
    if omega_grid is None:
        omega_grid = np.linspace(0.0, 50.0, 200)
    integrable = k.integrable
    if integrable:
        mc = cosine_transform(k, omega_grid)
        min_c = float(mc.min())
        cos_ok = bool(min_c > 0.0)
    else:
        min_c, cos_ok = float("nan"), False
    tau = sample_grid(k)
    try:
        d1, d2 = k.dmu(tau), k.d2mu(tau)
        if not (np.all(np.isfinite(d1)) and np.all(np.isfinite(d2))):
            raise FloatingPointError("non-finite derivative")
    except (FloatingPointError, ValueError):
        return AdmissibilityReport(integrable, cos_ok, min_c, False, False, False,
                                   None, "other", derivatives_available=False)
    scale = max(np.max(np.abs(d2)), 1e-300)
    neg = bool(np.all(d1 < 0.0))
    convex = bool(np.all(d2 >= -1e-9 * scale))
    tight = tightest_xi(k, tau) if neg else None
    profile = xi if xi is not None else tight
    if profile is None or not neg:
        bound = False
    else:
        bound = bool(np.all(profile(tau) > 0.0) and np.all(d2 >= -profile(tau) * d1 - 1e-9 * scale))
    if tight is None:
        cls = "other"
    else:
        cls = {"constant": "exponential", "inverse_linear": "polynomial"}.get(tight.kind, "other")
    return AdmissibilityReport(integrable, cos_ok, min_c, neg, convex, bound, tight, cls)
