"""Energy of the minimal state, its dissipation and the decay envelope.

The energy is evaluated on the staggered ``tau``-grid: with differences
``d_i = (I_{i+1} - I_i) / dtau`` at midpoints ``m_i = (i + 1/2) dtau``,

    Psi = 1/4 sum_i dtau <d_i, d_i> / |mu'(m_i)|

Under a pure shift each term is multiplied by ``|mu'(m_{i+1})| / |mu'(m_i)|``,
so monotonicity of ``Psi`` does not depend on the time step.  The boundary
contribution at ``tau = 0`` uses the one-sided difference ``d_0``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .kernel import InadmissibleKernelError, Kernel, XiProfile, tightest_xi
from .solver import Scenario, force_free_step, solve_time_domain
from .state import MinimalState

GROWTH_FRACTION = 0.1
GROWTH_RATIO = 1e-3


def _weights(st: MinimalState, k: Kernel) -> tuple[np.ndarray, np.ndarray]:
    mid = (np.arange(st.P) + 0.5) * st.dtau
    dm = np.asarray(k.dmu(mid), dtype=float)
    if np.any(dm > 0.0):
        raise InadmissibleKernelError("mu' must be non-positive on the state grid")
    return mid, dm


def energy_density(st: MinimalState, k: Kernel) -> np.ndarray:
    """Per-midpoint integrand ``<d_i, d_i> / |mu'(m_i)|`` summed over space."""
    _, dm = _weights(st, k)
    d = np.diff(st.values, axis=0) / st.dtau
    sq = st.mesh.inner(d, d)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(sq == 0.0, 0.0, sq / np.abs(dm))
    return out


def energy(st: MinimalState, k: Kernel) -> float:
    """``Psi = -1/4 int int |d_tau I|^2 / mu'``."""
    return 0.25 * st.dtau * float(np.sum(energy_density(st, k)))


def boundary_term(st: MinimalState, k: Kernel) -> float:
    """``1/4 |d_tau I(0)|^2 / mu'(0)`` (non-positive)."""
    d0 = (st.values[1] - st.values[0]) / st.dtau
    dm0 = float(k.dmu(np.array([0.0]))[0])
    sq = float(st.mesh.inner(d0, d0))
    if sq == 0.0:
        return 0.0
    return 0.25 * sq / dm0 if dm0 < 0 else -math.inf


class DissipationStep(NamedTuple):
    dpsi: float
    bound: float
    boundary: float
    work: float


def dissipation_bound(st: MinimalState, k: Kernel, xi: XiProfile) -> float:
    """``1/4 int int xi(tau) / mu'(tau) |d_tau I|^2`` (non-positive)."""
    mid, _ = _weights(st, k)
    return -0.25 * st.dtau * float(np.sum(xi(mid) * energy_density(st, k)))


def energy_dissipation_step(st: MinimalState, k: Kernel, xi: XiProfile, dt: float) -> DissipationStep:
    """One force-free step from a balanced state: ``(Psi(t + dt) - Psi(t)) / dt`` and its bound.

    ``work`` is the discrete stress power ``-<I(0), E>`` of the step, which
    vanishes in the continuum and is reported rather than assumed zero.
    """
    nxt, v = force_free_step(st, k, dt)
    dpsi = (energy(nxt, k) - energy(st, k)) / dt
    e = st.mesh.strain_rate(st.mesh.grad(v))
    work = -float(st.mesh.inner(nxt.values[0], e))
    return DissipationStep(dpsi, dissipation_bound(st, k, xi), boundary_term(st, k), work)


def alpha_ratio(st: MinimalState, k: Kernel, t: float, T0: float = 0.0) -> float:
    """``Psi / Psi_[0, t]`` with the truncated integral over midpoints below ``t``."""
    if t < T0:
        raise ValueError("alpha ratio is defined for t >= T0")
    mid, _ = _weights(st, k)
    dens = energy_density(st, k)
    total = float(np.sum(dens))
    part = float(np.sum(dens[mid < t]))
    if total == 0.0:
        return 1.0
    if part == 0.0:
        return math.inf
    return total / part


class Membership(NamedTuple):
    value: float
    finite: bool


def f_mu_membership(i0: MinimalState, k: Kernel) -> Membership:
    """``int int |d_tau I|^2 / (-mu')`` with a tail-growth diagnostic.

    The integral is declared infinite when the integrand averaged over the last
    tenth of the grid exceeds ``1e-3`` of its maximum.
    """
    dens = energy_density(i0, k)
    if not np.all(np.isfinite(dens)):
        return Membership(math.inf, False)
    value = i0.dtau * float(np.sum(dens))
    if value == 0.0:
        return Membership(0.0, True)
    tail = dens[int((1 - GROWTH_FRACTION) * dens.size):]
    return Membership(value, bool(tail.mean() <= GROWTH_RATIO * dens.max()))


@dataclass(frozen=True, eq=False)
class EnergyTrace:
    """Energy history of a run.  ``psi[0]`` is the energy before the jump at ``t = 0``."""

    t: np.ndarray
    psi: np.ndarray
    ratio: np.ndarray
    dissipation_bound: np.ndarray
    boundary: np.ndarray
    T0: float = 1.0
    xi: Optional[XiProfile] = None
    envelope: Optional[np.ndarray] = None
    alpha: float = math.nan
    beta: float = math.nan

    @property
    def dpsi_dt(self) -> np.ndarray:
        out = np.full(self.t.shape, math.nan)
        out[1:] = np.diff(self.psi) / np.diff(self.t)
        return out

    @property
    def alpha_running(self) -> np.ndarray:
        out = np.full(self.t.shape, math.nan)
        late = self.t > self.T0
        if np.any(late):
            out[late] = np.maximum.accumulate(self.ratio[late])
        return out

    def with_envelope(self, xi: XiProfile) -> "EnergyTrace":
        if not np.any(self.t > self.T0):
            return self
        alpha, beta, _ = decay_envelope_check(self, xi, self.T0)
        env = beta * self.psi[0] * np.exp(-xi.integral(self.t) / alpha) if np.isfinite(alpha) else None
        return EnergyTrace(self.t, self.psi, self.ratio, self.dissipation_bound, self.boundary,
                           self.T0, xi, env, alpha, beta)

    def to_csv(self, path) -> None:
        env = self.envelope if self.envelope is not None else np.full(self.t.shape, math.nan)
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "Psi", "dPsi_dt", "bound", "alpha_running"])
            for row in zip(self.t, self.psi, self.dpsi_dt, env, self.alpha_running):
                w.writerow([repr(float(x)) for x in row])


def run_with_energy(sc: Scenario, xi: Optional[XiProfile] = None, T0: Optional[float] = None,
                    snapshots=()) -> tuple[EnergyTrace, "VelocityTrace", "StateTrajectory"]:
    """Time-domain solve recording ``Psi``, the truncation ratio and the dissipation bound per step."""
    k = sc.kernel
    xi = tightest_xi(k) if xi is None else xi
    T0 = sc.T0 if T0 is None else T0
    n = sc.steps
    psi = np.empty(n + 1)
    ratio = np.empty(n + 1)
    bound = np.empty(n + 1)
    bdry = np.empty(n + 1)

    def record(j, t, st):
        mid, _ = _weights(st, k)
        dens = energy_density(st, k)
        total = float(np.sum(dens))
        part = float(np.sum(dens[mid < t]))
        psi[j] = 0.25 * st.dtau * total
        ratio[j] = 1.0 if total == 0.0 else (math.inf if part == 0.0 else total / part)
        bound[j] = -0.25 * st.dtau * float(np.sum(xi(mid) * dens))
        bdry[j] = boundary_term(st, k)

    v, traj = solve_time_domain(sc, observers=[record], snapshots=snapshots)
    t = np.arange(n + 1) * sc.dt
    return EnergyTrace(t, psi, ratio, bound, bdry, T0, xi).with_envelope(xi), v, traj


def energy_trace(sc: Scenario, xi: Optional[XiProfile] = None, T0: Optional[float] = None) -> EnergyTrace:
    return run_with_energy(sc, xi, T0)[0]


class EnvelopeCheck(NamedTuple):
    alpha: float
    beta: float
    holds: bool


def decay_envelope_check(tr: EnergyTrace, xi: XiProfile, T0: float, rtol: float = 1e-9) -> EnvelopeCheck:
    """Empirical ``alpha``, ``beta`` and whether ``Psi(t_j) <= beta Psi(0) exp(-int_0^t xi / alpha)``."""
    late = tr.t > T0
    if not np.any(late):
        raise ValueError("trace does not extend beyond T0")
    if tr.psi[0] == 0.0:
        return EnvelopeCheck(1.0, 1.0, bool(np.all(tr.psi == 0.0)))
    alpha = float(np.max(tr.ratio[late]))
    if not np.isfinite(alpha):
        return EnvelopeCheck(alpha, math.inf, True)
    beta = math.exp(float(xi.integral(T0)) / alpha)
    env = beta * tr.psi[0] * np.exp(-xi.integral(tr.t[late]) / alpha)
    holds = bool(np.all(tr.psi[late] <= env * (1 + rtol)))
    return EnvelopeCheck(alpha, beta, holds)


@dataclass(frozen=True)
class DecayFit:
    cls: str
    slope: float
    intercept: float
    residual: float
    window: tuple
    points: int
    shrunk: bool = False

    @property
    def rate(self) -> float:
        return -self.slope

    def as_dict(self) -> dict:
        return {"class": self.cls, "slope": self.slope, "rate": self.rate, "intercept": self.intercept,
                "residual": self.residual, "window": list(self.window), "points": self.points,
                "window_shrunk": self.shrunk}


def fit_decay(tr, cls: str, T0: Optional[float] = None, t=None, psi=None) -> DecayFit:
    """Least-squares slope of ``log Psi`` against ``t`` (exponential) or ``log(1 + t)`` (polynomial)."""
    if cls not in ("exponential", "polynomial"):
        raise ValueError("class must be 'exponential' or 'polynomial'")
    t = np.asarray(tr.t if t is None else t, float)
    psi = np.asarray(tr.psi if psi is None else psi, float)
    T0 = (tr.T0 if tr is not None else 1.0) if T0 is None else T0
    window = t >= T0
    positive = window & (psi > 0)
    shrunk = bool(np.any(window & ~positive))
    if shrunk:
        # keep the leading run of positive values
        idx = np.nonzero(window)[0]
        bad = idx[~positive[idx]]
        window = window & (np.arange(t.size) < bad[0])
    if np.count_nonzero(window) < 20:
        raise ValueError("need at least 20 positive samples past T0")
    x = t[window] if cls == "exponential" else np.log1p(t[window])
    y = np.log(psi[window])
    (slope, icpt), res, *_ = np.polyfit(x, y, 1, full=True)
    resid = float(np.sqrt(res[0] / x.size)) if res.size else 0.0
    return DecayFit(cls, float(slope), float(icpt), resid, (float(t[window][0]), float(t[window][-1])),
                    int(x.size), shrunk)
