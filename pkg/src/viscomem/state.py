"""Minimal states: construction from past histories, transport, equivalence.

A state is stored on a uniform ``tau``-grid ``tau_i = i * dtau`` (``i = 0..P``)
with one field per grid point.  Evolution is an exact index shift when the
time step equals ``dtau``; the source is integrated exactly for a strain rate
held constant over the step::

    I^{t+dt}(tau) = I^t(tau + dt) - 2 G [M(tau + dt) - M(tau)],   M(s) = int_0^s mu

Values beyond the grid end are produced by an exact tail evaluator: the
initial state's own evaluator (or zero) shifted by the elapsed time, plus the
recorded sources.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np

from .field import Field, Mesh
from .kernel import Kernel, graded_segments

GL_NODES = 48
DT_RTOL = 1e-12


# -- histories ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class History:
    """Relative strain history ``E_r(x, s) = E(t - s) - E(t)`` at the state locations.

    ``evaluator`` maps an array of ``s`` values (shape ``(q,)``) to an array of
    shape ``(q, *shape)``.  ``breakpoints`` lists kinks or jumps that the
    quadrature must respect.  Beyond the quadrature horizon the history is
    held at its last value.
    """

    mesh: Mesh
    evaluator: Callable[[np.ndarray], np.ndarray]
    breakpoints: tuple = ()
    exact: Optional[Callable[[Kernel, np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        e0 = self(np.array([0.0]))
        if e0.shape[1:] != self.shape:
            raise ValueError(f"history shape {e0.shape[1:]} does not match mesh {self.shape}")
        if np.any(np.abs(e0) > 1e-12 * max(1.0, float(np.abs(self(np.array([1.0]))).max()))):
            raise ValueError("relative history must vanish at s = 0")

    @property
    def shape(self) -> tuple:
        return self.mesh.gradient_shape

    def __call__(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.asarray(self.evaluator(s), dtype=float).reshape((s.size,) + self.shape)

    def exact_state(self, k: Kernel, tau) -> Optional[np.ndarray]:
        return None if self.exact is None else self.exact(k, np.atleast_1d(np.asarray(tau, float)))

    def __add__(self, other: "History") -> "History":
        if other.mesh != self.mesh:
            raise ValueError("histories live on different meshes")
        ex = None
        if self.exact is not None and other.exact is not None:
            a, b = self.exact, other.exact
            ex = lambda k, tau: a(k, tau) + b(k, tau)
        f, g = self.evaluator, other.evaluator
        return History(self.mesh, lambda s: f(s) + g(s),
                       tuple(sorted(set(self.breakpoints) | set(other.breakpoints))), ex)

    def __mul__(self, c: float) -> "History":
        f = self.evaluator
        ex = None if self.exact is None else (lambda k, tau, e=self.exact: c * e(k, tau))
        return History(self.mesh, lambda s: c * f(s), self.breakpoints, ex)

    __rmul__ = __mul__

    def __sub__(self, other: "History") -> "History":
        return self + (-1.0) * other

    # constructors

    @classmethod
    def zero(cls, mesh: Mesh) -> "History":
        shape = mesh.gradient_shape
        return cls(mesh, lambda s: np.zeros((np.size(s),) + shape),
                   exact=lambda k, tau: np.zeros((tau.size,) + shape))

    @classmethod
    def separable(cls, mesh: Mesh, temporal: Callable, profile, breakpoints: Sequence[float] = ()) -> "History":
        """``E_r(x, s) = temporal(s) * profile(x)``."""
        p = np.broadcast_to(np.asarray(profile, dtype=float), mesh.gradient_shape).copy()
        return cls(mesh, lambda s: np.multiply.outer(np.asarray(temporal(s), float), p),
                   tuple(float(b) for b in breakpoints))

    @classmethod
    def block(cls, mesh: Mesh, profile, start: float, end: float = np.inf) -> "History":
        """``E_r = profile`` for ``s`` in ``[start, end)``, zero elsewhere.

        A strain ``E0`` switched on at time ``-d`` and held since is
        ``block(-E0, d)``.
        """
        if not 0.0 < start < end:
            raise ValueError("need 0 < start < end")
        p = np.broadcast_to(np.asarray(profile, dtype=float), mesh.gradient_shape).copy()

        def temporal(s):
            return ((s >= start) & (s < end)).astype(float)

        def exact(k, tau):
            upper = 0.0 if np.isinf(end) else k.mu(tau + end)
            return np.multiply.outer(-2.0 * (upper - k.mu(tau + start)), p)

        bps = (start,) if np.isinf(end) else (start, end)
        return cls(mesh, lambda s: np.multiply.outer(temporal(s), p), bps, exact)

    @classmethod
    def tabulated(cls, mesh: Mesh, s, values) -> "History":
        """Piecewise-linear history through ``(s_q, values_q)``; constant beyond the table."""
        s = np.asarray(s, dtype=float)
        v = np.asarray(values, dtype=float).reshape((s.size,) + mesh.gradient_shape)
        if s[0] != 0.0 or np.any(np.diff(s) <= 0):
            raise ValueError("table must start at s = 0 and increase")
        flat = v.reshape(s.size, -1)

        def ev(q):
            out = np.empty((q.size, flat.shape[1]))
            for c in range(flat.shape[1]):
                out[:, c] = np.interp(q, s, flat[:, c])
            return out

        return cls(mesh, ev, tuple(s[1:]))

    @classmethod
    def from_past_strain(cls, mesh: Mesh, strain: Callable, breakpoints: Sequence[float] = ()) -> "History":
        """Relative history from a past strain ``E(t)`` given for ``t <= 0``."""
        shape = mesh.gradient_shape
        now = np.asarray(strain(np.array([0.0])), float).reshape((1,) + shape)
        return cls(mesh, lambda s: np.asarray(strain(-np.asarray(s)), float).reshape((np.size(s),) + shape) - now,
                   tuple(float(b) for b in breakpoints))


def _gauss_segments(k: Kernel, end: float, breakpoints: Sequence[float], order: int = GL_NODES):
    cuts = {a for a, _ in graded_segments(end, k.time_scale)} | {end}
    cuts |= {float(b) for b in breakpoints if 0.0 < b < end}
    edges = np.array(sorted(cuts | {0.0}))
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    weights = (0.5 * (b - a) * w).ravel()
    return nodes, weights


def history_integral(k: Kernel, h: History, tau) -> np.ndarray:
    """``-2 int_0^inf mu'(xi + tau) E_r(xi) d xi`` at each ``tau``.

    Piecewise Gauss-Legendre on graded segments up to the kernel horizon, split
    at history breakpoints, plus ``2 mu(X + tau) E_r(X)`` for the frozen tail.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    end = k.tau_max
    xi, w = _gauss_segments(k, end, h.breakpoints)
    e = h(xi).reshape(xi.size, -1)
    e_end = h(np.array([end])).reshape(1, -1)
    out = np.empty((tau.size, e.shape[1]))
    chunk = max(1, 4_000_000 // max(xi.size, 1))
    for lo in range(0, tau.size, chunk):
        t = tau[lo:lo + chunk]
        dm = k.dmu(xi[None, :] + t[:, None])
        out[lo:lo + chunk] = -2.0 * (dm * w) @ e + 2.0 * k.mu(t + end)[:, None] * e_end
    return out.reshape((tau.size,) + h.shape)


# -- minimal state ------------------------------------------------------------

class _SourceLog:
    """Append-only record of the strain rates applied since construction."""

    def __init__(self, shape: tuple):
        self.shape = shape
        self.rates = np.zeros((16,) + shape)
        self.starts = np.zeros(16)
        self.ends = np.zeros(16)
        self.n = 0
        self.impulses: list[tuple[float, np.ndarray]] = []

    def fork(self, n: int, n_imp: int) -> "_SourceLog":
        new = _SourceLog(self.shape)
        cap = max(16, 2 * n)
        new.rates = np.zeros((cap,) + self.shape)
        new.starts = np.zeros(cap)
        new.ends = np.zeros(cap)
        new.rates[:n], new.starts[:n], new.ends[:n] = self.rates[:n], self.starts[:n], self.ends[:n]
        new.n = n
        new.impulses = list(self.impulses[:n_imp])
        return new

    def append(self, rate: np.ndarray, a: float, b: float) -> None:
        if self.n == self.rates.shape[0]:
            grow = lambda x: np.concatenate([x, np.zeros_like(x)])
            self.rates, self.starts, self.ends = grow(self.rates), grow(self.starts), grow(self.ends)
        self.rates[self.n], self.starts[self.n], self.ends[self.n] = rate, a, b
        self.n += 1


@dataclass(frozen=True, eq=False)
class MinimalState:
    """``I^t(x, tau)`` on a uniform ``tau``-grid at time ``time``.

    ``values`` has shape ``(P + 1, *mesh.gradient_shape)``.  ``initial`` is an
    optional evaluator of the state at construction time (``tau -> values``)
    used beyond the grid end; without it the state is zero-extended.
    """

    mesh: Mesh
    dtau: float
    values: np.ndarray
    time: float = 0.0
    kernel: Optional[Kernel] = None
    initial: Optional[Callable[[np.ndarray], np.ndarray]] = None
    origin: float = 0.0
    _log: Optional[_SourceLog] = dc_field(default=None, repr=False)
    _count: int = 0
    _imp: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape[1:] != self.mesh.gradient_shape:
            raise ValueError(f"state shape {v.shape[1:]} does not match mesh {self.mesh.gradient_shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("state values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def P(self) -> int:
        return self.values.shape[0] - 1

    @property
    def tau(self) -> np.ndarray:
        return np.arange(self.P + 1) * self.dtau

    @property
    def horizon(self) -> float:
        return self.P * self.dtau

    @property
    def pristine(self) -> bool:
        return self._count == 0 and self._imp == 0 and self.time == self.origin

    def scaled(self, c: float) -> "MinimalState":
        if not self.pristine:
            raise ValueError("only unevolved states can be rescaled")
        ini = None if self.initial is None else (lambda tau, f=self.initial: c * f(tau))
        return MinimalState(self.mesh, self.dtau, c * self.values, self.time, self.kernel, ini, self.origin)

    def tail(self, tau) -> np.ndarray:
        """Exact state values at arbitrary ``tau`` from the initial evaluator and the source record."""
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        shape = self.mesh.gradient_shape
        elapsed = self.time - self.origin
        if self.initial is not None:
            out = np.asarray(self.initial(tau + elapsed), float).reshape((tau.size,) + shape).copy()
        else:
            out = np.zeros((tau.size,) + shape)
        if self._log is None or (self._count == 0 and self._imp == 0):
            return out
        k = self.kernel
        log = self._log
        n = self._count
        if n:
            lag = tau[:, None] + self.time
            w = k.integral(lag - log.starts[None, :n]) - k.integral(lag - log.ends[None, :n])
            out -= 2.0 * np.tensordot(w, log.rates[:n], axes=(1, 0))
        for s, e in log.impulses[:self._imp]:
            out -= 2.0 * np.multiply.outer(k.mu(tau + self.time - s), e)
        return out

    def evaluate(self, tau) -> np.ndarray:
        """State at arbitrary ``tau >= 0``: exact where an evaluator exists, else interpolated."""
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        if self.initial is not None and self.pristine:
            return self.tail(tau)
        out = np.empty((tau.size,) + self.mesh.gradient_shape)
        inside = tau <= self.horizon
        if np.any(inside):
            pos = tau[inside] / self.dtau
            i = np.minimum(np.floor(pos).astype(int), self.P - 1)
            f = (pos - i).reshape((-1,) + (1,) * len(self.mesh.gradient_shape))
            out[inside] = (1 - f) * self.values[i] + f * self.values[i + 1]
        if np.any(~inside):
            out[~inside] = self.tail(tau[~inside])
        return out

    def _with(self, values, time, log, count, imp) -> "MinimalState":
        return MinimalState(self.mesh, self.dtau, values, time, self.kernel, self.initial,
                            self.origin, log, count, imp)

    def _writable_log(self) -> _SourceLog:
        if self._log is None:
            return _SourceLog(self.mesh.gradient_shape)
        if self._log.n != self._count or len(self._log.impulses) != self._imp:
            return self._log.fork(self._count, self._imp)
        return self._log

    def snapshot_rows(self, stride: int = 1):
        """Rows ``(x..., tau, component values...)`` for CSV export."""
        m = self.mesh
        if m.is_channel:
            coords = [m.centres]
        else:
            x, y = m.grid
            coords = [x.ravel(), y.ravel()]
        npts = coords[0].size
        for i in range(0, self.P + 1, stride):
            comps = self.values[i].reshape(-1, npts)
            for p in range(npts):
                yield [float(c[p]) for c in coords] + [float(self.tau[i])] + [float(v) for v in comps[:, p]]


def state_from_function(mesh: Mesh, func: Callable[[np.ndarray], np.ndarray], dtau: float,
                        horizon: float, kernel: Optional[Kernel] = None, tabulated: bool = False) -> MinimalState:
    """State sampled from ``func(tau) -> (n, *shape)``; ``func`` also serves as tail unless ``tabulated``."""
    P = int(round(horizon / dtau))
    tau = np.arange(P + 1) * dtau
    shape = mesh.gradient_shape
    vals = np.asarray(func(tau), dtype=float).reshape((P + 1,) + shape)
    f = None if tabulated else (lambda t: np.asarray(func(t), float).reshape((np.size(t),) + shape))
    return MinimalState(mesh, dtau, vals, 0.0, kernel, f)


def zero_state(mesh: Mesh, dtau: float, horizon: float, kernel: Optional[Kernel] = None) -> MinimalState:
    P = int(round(horizon / dtau))
    return MinimalState(mesh, dtau, np.zeros((P + 1,) + mesh.gradient_shape), 0.0, kernel,
                        lambda t: np.zeros((np.size(t),) + mesh.gradient_shape))


def build_state_from_history(k: Kernel, h: History, dtau: float = 0.05,
                             horizon: Optional[float] = None) -> MinimalState:
    """``I(tau) = -2 int mu'(xi + tau) E_r(xi) d xi`` on a uniform grid up to ``horizon``."""
    horizon = k.tau_max if horizon is None else float(horizon)
    if not np.isfinite(horizon):
        raise ValueError("kernel without finite horizon needs an explicit state horizon")
    P = int(round(horizon / dtau))
    tau = np.arange(P + 1) * dtau
    vals = history_integral(k, h, tau)
    if not np.all(np.isfinite(vals)):
        raise ValueError("history integral diverges against this kernel")
    return MinimalState(h.mesh, dtau, vals, 0.0, k, lambda t: history_integral(k, h, t))


def _strain_rate(st: MinimalState, grad_v) -> np.ndarray:
    g = np.asarray(grad_v.values if isinstance(grad_v, Field) else grad_v, dtype=float)
    if g.shape != st.mesh.gradient_shape:
        raise ValueError(f"gradient shape {g.shape} does not match {st.mesh.gradient_shape}")
    return st.mesh.strain_rate(g)


_WEIGHTS: dict = {}


def _source_weights(k: Kernel, tau: np.ndarray, dt: float) -> np.ndarray:
    # M(tau + dt) - M(tau), cached per kernel and grid
    key = (id(k), float(dt), float(tau[-1]), tau.size)
    hit = _WEIGHTS.get(key)
    if hit is not None and hit[0] is k:
        return hit[1]
    w = k.integral(tau + dt) - k.integral(tau)
    if len(_WEIGHTS) > 64:
        _WEIGHTS.clear()
    _WEIGHTS[key] = (k, w)
    return w


def _successor(st: MinimalState, k: Kernel, values, time, log, count, imp) -> MinimalState:
    return MinimalState(st.mesh, st.dtau, values, time, k, st.initial, st.origin, log, count, imp)


def evolve_state(st: MinimalState, k: Kernel, grad_v_now, dt: float) -> MinimalState:
    """One transport step with the velocity gradient held constant over ``(t, t + dt]``."""
    if dt > st.dtau * (1 + DT_RTOL):
        raise ValueError(f"dt = {dt} exceeds the state grid step {st.dtau}")
    if dt <= 0:
        raise ValueError("dt must be positive")
    if st.kernel is not None and st.kernel is not k:
        raise ValueError("state was built for a different kernel")
    rate = _strain_rate(st, grad_v_now)
    log = st._writable_log()
    log.append(rate, st.time, st.time + dt)
    tau = st.tau
    if abs(dt - st.dtau) <= DT_RTOL * st.dtau:
        vals = np.empty_like(st.values)
        vals[:-1] = st.values[1:]
    else:
        # linear upwind interpolation for steps shorter than the grid
        frac = dt / st.dtau
        vals = (1 - frac) * st.values
        vals[:-1] += frac * st.values[1:]
    vals += -2.0 * np.multiply.outer(_source_weights(k, tau, dt), rate)
    new = _successor(st, k, vals, st.time + dt, log, st._count + 1, st._imp)
    vals[-1] = new.tail(np.array([st.horizon]))[0]
    return new


def apply_impulse(st: MinimalState, k: Kernel, grad_jump) -> MinimalState:
    """State after an instantaneous displacement with gradient ``grad_jump`` at the current time.

    With ``E`` the symmetric part of ``grad_jump`` the state becomes ``I - 2 mu(tau) E``.
    """
    e = _strain_rate(st, grad_jump)
    log = st._writable_log()
    log.impulses.append((st.time, e.copy()))
    vals = st.values - 2.0 * np.multiply.outer(k.mu(st.tau), e)
    return _successor(st, k, vals, st.time, log, st._count, st._imp + 1)


def extra_stress(st: MinimalState) -> Field:
    """``T_E = -I^t(., 0)``."""
    return Field(st.mesh, -st.values[0], "cell" if st.mesh.is_channel else "node")


def states_equivalent(k: Kernel, h1: History, h2: History, tol: float = 1e-10, tau=None) -> bool:
    """Whether two relative histories induce the same minimal state on a ``tau``-grid."""
    tau = np.linspace(0.0, k.tau_max, 2001) if tau is None else np.asarray(tau, float)
    i1 = history_integral(k, h1, tau)
    i2 = history_integral(k, h2, tau)
    diff = history_integral(k, h1 - h2, tau)
    scale = max(1.0, float(np.abs(i1).max()), float(np.abs(i2).max()))
    return bool(np.abs(diff).max() <= tol * scale)
