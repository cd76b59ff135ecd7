"""Half-line Fourier transforms and the frequency-domain quadratic forms.

Samples of a :class:`HalfLineSignal` sit at ``t_n = (n + offset) * dt`` and
the signal is extended by zero outside the grid.  The forward transform is
non-unitary with kernel ``exp(-i w t)``::

    F(w) = dt * sum_n s_n exp(-i w t_n)

With the default ``offset = 0.5`` this is the midpoint rule on the cells
``[n dt, (n+1) dt)``.  The discrete Parseval identity

    sum_n |s_n|^2 dt = (1 / 2 pi) sum_m |F(w_m)|^2 dw

then holds exactly on the padded FFT grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .kernel import InadmissibleKernelError, Kernel

PAD_DECAY = 1e-7
MAX_PAD = 1 << 22
POWER_TAIL = 1e-16
DIVERGENCE_RATIO = 10**-1.5
NEGLIGIBLE = 1e-12
ALIASES = 64


@dataclass(frozen=True, eq=False)
class HalfLineSignal:
    dt: float
    values: np.ndarray
    offset: float = 0.5

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if self.dt <= 0 or v.shape[0] < 2:
            raise ValueError("need dt > 0 and at least two samples")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def times(self) -> np.ndarray:
        return (np.arange(self.n) + self.offset) * self.dt

    @classmethod
    def sample(cls, func, dt: float, n: int, offset: float = 0.5) -> "HalfLineSignal":
        t = (np.arange(n) + offset) * dt
        return cls(dt, np.asarray(func(t), dtype=float), offset)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Complex samples on an angular-frequency grid (FFT ordering)."""

    omega: np.ndarray
    values: np.ndarray
    hermitian: bool = True

    @property
    def domega(self) -> float:
        return float(abs(self.omega[1] - self.omega[0]))

    def at(self, omega: float) -> np.ndarray:
        return self.values[int(np.argmin(np.abs(self.omega - omega)))]


def _pad_length(n: int, extra: int = 0, factor: int = 1) -> int:
    m = max(factor * n, n + extra)
    return int(min(1 << int(np.ceil(np.log2(max(m, 2)))), MAX_PAD))


def forward_transform(s: HalfLineSignal, n_pad: int | None = None) -> Spectrum:
    """Discrete half-line Fourier transform on a zero-padded grid."""
    n_pad = _pad_length(s.n, factor=2) if n_pad is None else int(n_pad)
    omega = 2 * np.pi * np.fft.fftfreq(n_pad, s.dt)
    vals = np.fft.fft(s.values, n=n_pad, axis=0) * s.dt
    shift = np.exp(-1j * omega * s.offset * s.dt)
    vals = vals * shift.reshape((-1,) + (1,) * (vals.ndim - 1))
    return Spectrum(omega, vals)


def inverse_transform(spec: Spectrum, n: int, dt: float, offset: float = 0.5) -> HalfLineSignal:
    """Inverse of :func:`forward_transform`, truncated to the first ``n`` samples."""
    shift = np.exp(1j * spec.omega * offset * dt)
    vals = spec.values * shift.reshape((-1,) + (1,) * (spec.values.ndim - 1))
    out = np.fft.ifft(vals, axis=0) / dt
    return HalfLineSignal(dt, out[:n].real, offset)


def kernel_decay_time(k: Kernel, ratio: float = PAD_DECAY) -> float:
    """First time where ``mu`` falls below ``ratio * mu(0)`` (capped at ``tau_max``)."""
    m0 = float(k.mu(np.array([0.0]))[0])
    if m0 <= 0.0:
        return 0.0
    lo, hi = 0.0, k.tau_max
    if float(k.mu(np.array([hi]))[0]) > ratio * m0:
        return hi
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if float(k.mu(np.array([mid]))[0]) > ratio * m0:
            lo = mid
        else:
            hi = mid
    return hi


def _component_power(values: np.ndarray) -> np.ndarray:
    p = np.abs(values) ** 2
    return p.reshape(p.shape[0], -1).sum(axis=1)


def _half_grid(n_pad: int, dt: float) -> tuple[np.ndarray, np.ndarray]:
    # one-sided grid with weights that fold the symmetric integral
    m = np.arange(n_pad // 2 + 1)
    omega = 2 * np.pi * m / (n_pad * dt)
    fold = np.full(m.shape, 2.0)
    fold[0] = 1.0
    if n_pad % 2 == 0:
        fold[-1] = 1.0
    return omega, fold


def _lag_weights(k: Kernel, dt: float, n: int) -> np.ndarray:
    """``W_l = int int mu(|t - t'|)`` over two cells ``l`` apart (Gauss-Legendre, 8 nodes)."""
    x, w = np.polynomial.legendre.leggauss(8)
    u = 0.5 * dt * (x + 1.0)
    wu = 0.5 * dt * w * (dt - u)
    lag = np.arange(n)[:, None] * dt
    out = wu @ (k.mu(lag + u) + k.mu(np.abs(lag - u))).T
    return np.asarray(out, dtype=float)


def h_mu_norm_time(k: Kernel, grad_v: HalfLineSignal) -> float:
    """``int int mu(|t - t'|) g(t) . g(t') dt dt'`` for the piecewise-constant signal, exactly in the cells."""
    g = grad_v.values.reshape(grad_v.n, -1)
    n = grad_v.n
    lags = _lag_weights(k, grad_v.dt, n)
    sym = np.concatenate([lags[:0:-1], lags])
    total = 0.0
    for col in g.T:
        if not np.any(col):
            continue
        conv = np.convolve(col, sym)[n - 1: 2 * n - 1]
        total += float(col @ conv)
    return total


def h_mu_norm_freq(k: Kernel, grad_v: HalfLineSignal) -> float:
    """``(1/pi) int mu_c(w) |g_F(w)|^2 dw`` for the piecewise-constant signal.

    The cell transform is the sample transform times ``sinc(w dt / 2)``; the
    integral over the whole line is folded onto the base band with
    ``ALIASES`` periodic images on each side.
    """
    dt = grad_v.dt
    extra = int(np.ceil(kernel_decay_time(k) / dt))
    n_pad = _pad_length(grad_v.n, extra=extra, factor=2)
    vals = np.fft.rfft(grad_v.values, n=n_pad, axis=0) * dt
    power = _component_power(vals)
    total = power.sum()
    if total == 0.0:
        return 0.0
    omega, fold = _half_grid(n_pad, dt)
    # drop the band whose cumulative power is negligible
    tail = np.cumsum(power[::-1])[::-1]
    keep = tail > POWER_TAIL * total
    cut = int(np.nonzero(keep)[0].max()) + 1
    period = 2 * np.pi / dt
    images = omega[:cut, None] + period * np.arange(-ALIASES, ALIASES + 1)[None, :]
    a = np.abs(images)
    weight = k.mu_c(a.ravel()).reshape(a.shape) * np.sinc(images * dt / (2 * np.pi)) ** 2
    dw = 2 * np.pi / (n_pad * dt)
    return float(np.sum(fold[:cut] * weight.sum(axis=1) * power[:cut]) * dw / np.pi)


class QuadraticForm(NamedTuple):
    value: float
    divergent: bool


def s_mu_integrand(k: Kernel, i0: HalfLineSignal, pad_factor: int = 4):
    """Frequencies, fold weights and the integrand ``|I_F|^2 / mu_c`` (one-sided)."""
    dt = i0.dt
    n_pad = _pad_length(i0.n, factor=pad_factor)
    vals = np.fft.rfft(i0.values, n=n_pad, axis=0) * dt
    power = _component_power(vals)
    omega, fold = _half_grid(n_pad, dt)
    mc = k.mu_c(omega)
    if np.any(mc <= 0.0):
        raise InadmissibleKernelError("cosine transform is not positive on the frequency grid")
    return omega, fold, power / mc


def s_mu_norm_freq(k: Kernel, i0: HalfLineSignal) -> QuadraticForm:
    """``(1/pi) int |I_F(w)|^2 / mu_c(w) dw`` with a membership diagnostic.

    The integral is flagged divergent when the integrand's mean over the top
    decade of the resolved band is at least ``10**-1.5`` of its mean over the
    decade below, i.e. it decays no faster than about ``w**-1.5``.
    """
    omega, fold, integrand = s_mu_integrand(k, i0)
    dw = omega[1] - omega[0]
    value = float(np.sum(fold * integrand) * dw / np.pi)
    if value == 0.0:
        return QuadraticForm(0.0, False)
    wmax = omega[-1]
    top = integrand[omega >= 0.1 * wmax].mean()
    below = integrand[(omega >= 0.01 * wmax) & (omega < 0.1 * wmax)].mean()
    if below <= NEGLIGIBLE * integrand.max():
        return QuadraticForm(value, False)
    divergent = bool(top >= DIVERGENCE_RATIO * below)
    return QuadraticForm(value, divergent)
