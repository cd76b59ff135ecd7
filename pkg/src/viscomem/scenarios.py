"""Scenario configuration and the built-in catalog.

A configuration is a plain dict (loaded from JSON by the CLI)::

    {"id": "...", "mesh": {"kind": "channel1d", "M": 32, "L": 1.0},
     "kernel": {"family": "exponential", "mu0": 1.0, "rate": 1.0},
     "history": {"family": "block", "start": 0.5, "end": 2.0, "profile": "sin"},
     "forcing": {"kind": "pulse", "duration": 4.0, "profile": "sin"},
     "T": 20.0, "dt": 0.05, "T0": 1.0, "state_horizon": null}

Kernel families: exponential, prony, polynomial, tabulated (``path`` to a CSV
with columns ``s, mu``), affine (``a + b s``, a non-admissible example).
History families: zero, block, table (``path`` to a CSV with columns
``s, value`` scaling the profile), direct (``I0(tau) = amplitude * tau^p *
exp(-tau / scale) * profile``, a state given without a history).
Forcing kinds: none, constant, pulse (``sin^4`` bump of given duration).
"""

from __future__ import annotations

import copy
import csv
import json
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import kernel as kmod
from .field import Mesh
from .kernel import Kernel
from .solver import Forcing, Scenario
from .state import History, build_state_from_history, state_from_function, zero_state


class ConfigError(ValueError):
    """Malformed or inconsistent scenario configuration."""


def _req(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"missing '{key}' in {where}")
    return d[key]


def make_mesh(cfg: dict) -> Mesh:
    try:
        return Mesh(str(_req(cfg, "kind", "mesh")), int(cfg.get("M", 32)), float(cfg.get("L", 1.0)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _read_table(path, base: Path | None) -> tuple[np.ndarray, np.ndarray]:
    p = Path(path)
    if base is not None and not p.is_absolute():
        p = base / p
    try:
        with open(p, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise ConfigError(f"cannot read table {p}: {exc}") from exc
    try:
        start = 0 if _is_number(rows[0][0]) else 1
        data = np.array([[float(x) for x in r[:2]] for r in rows[start:]])
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"table {p} must have two numeric columns") from exc
    return data[:, 0], data[:, 1]


def _is_number(x: str) -> bool:
    try:
        float(x)
        return True
    except ValueError:
        return False


def make_kernel(cfg: dict, base: Path | None = None) -> Kernel:
    fam = str(_req(cfg, "family", "kernel"))
    try:
        if fam == "exponential":
            return kmod.exponential(float(cfg.get("mu0", 1.0)), float(cfg.get("rate", 1.0)))
        if fam == "prony":
            return kmod.prony([float(a) for a in _req(cfg, "amplitudes", "kernel")],
                              [float(r) for r in _req(cfg, "rates", "kernel")])
        if fam == "polynomial":
            hz = cfg.get("horizon")
            return kmod.polynomial(float(cfg.get("mu0", 1.0)), float(cfg.get("exponent", 2.0)),
                                   None if hz is None else float(hz))
        if fam == "tabulated":
            if "path" in cfg:
                s, v = _read_table(cfg["path"], base)
            else:
                s, v = np.asarray(_req(cfg, "s", "kernel"), float), np.asarray(_req(cfg, "mu", "kernel"), float)
            return kmod.tabulated(s, v)
        if fam == "affine":
            a, b = float(cfg.get("a", 1.0)), float(cfg.get("b", 1.0))
            return kmod.from_callable(lambda s: a + b * s, lambda s: b + 0.0 * s, lambda s: 0.0 * s,
                                      horizon=float(cfg.get("horizon", 50.0)), integrable=False)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad kernel parameters: {exc}") from exc
    raise ConfigError(f"unknown kernel family {fam!r}")


def profile(mesh: Mesh, name: str, where: str = "cell", mode: int = 1) -> np.ndarray:
    """Named spatial profile: a scalar at cells/nodes (channel) or a symmetric tensor (periodic)."""
    if mesh.is_channel:
        y = mesh.centres if where == "cell" else mesh.nodes
        table = {
            "uniform": lambda: np.ones_like(y),
            "sin": lambda: np.sin(mode * np.pi * y / mesh.L),
            "cos": lambda: np.cos(mode * np.pi * y / mesh.L),
            "mixed": lambda: np.sin(np.pi * y / mesh.L) + 0.3 * np.cos(3 * np.pi * y / mesh.L),
        }
        if name not in table:
            raise ConfigError(f"unknown channel profile {name!r}")
        return table[name]()
    x, y = mesh.grid
    q = 2 * np.pi * mode / mesh.L
    if where == "force":
        table = {
            "kolmogorov": lambda: np.stack([np.sin(q * y), np.zeros_like(x)]),
            # solenoidal shear plus a pure gradient that the pressure absorbs
            "mixed": lambda: np.stack([np.sin(q * y) - q * np.sin(q * x), np.cos(q * x) + 0.5 * np.cos(q * (x + y))]),
        }
    else:
        table = {
            "shear": lambda: np.stack([np.sin(q * y), np.zeros_like(x)]),
            "mixed": lambda: np.stack([np.sin(q * y) + 0.5 * np.cos(2 * q * y), np.sin(q * x) * np.cos(q * y)]),
        }
    if name not in table:
        raise ConfigError(f"unknown periodic profile {name!r}")
    field = table[name]()
    if where == "force":
        return field
    return mesh.strain_rate(mesh.grad(field))


def make_history_state(cfg: dict, mesh: Mesh, k: Kernel, dt: float, horizon: float | None,
                       base: Path | None = None):
    fam = str(cfg.get("family", "zero"))
    hz = horizon if horizon is not None else k.tau_max
    if not np.isfinite(hz):
        raise ConfigError("kernel has no finite horizon; set state_horizon")
    amp = float(cfg.get("amplitude", 1.0))
    prof = None
    if fam != "zero":
        prof = amp * profile(mesh, str(cfg.get("profile", "sin" if mesh.is_channel else "shear")),
                             "cell", int(cfg.get("mode", 1)))
    if fam == "zero":
        return zero_state(mesh, dt, hz, k), History.zero(mesh)
    if fam == "block":
        start = float(cfg.get("start", 0.5))
        end = float(cfg.get("end", np.inf)) if cfg.get("end") is not None else np.inf
        try:
            h = History.block(mesh, prof, start, end)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return build_state_from_history(k, h, dt, hz), h
    if fam == "table":
        s, v = _read_table(_req(cfg, "path", "history"), base)
        try:
            h = History.tabulated(mesh, s, np.multiply.outer(v, prof))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return build_state_from_history(k, h, dt, hz), h
    if fam == "direct":
        p = float(cfg.get("power", 0.0))
        scale = float(cfg.get("scale", 1.0))
        f = lambda tau: np.multiply.outer(tau**p * np.exp(-np.asarray(tau) / scale), prof)
        return state_from_function(mesh, f, dt, hz, k), None
    raise ConfigError(f"unknown history family {fam!r}")


def make_forcing(cfg: dict | None, mesh: Mesh) -> Forcing | None:
    if not cfg or cfg.get("kind", "none") == "none":
        return None
    kind = cfg["kind"]
    amp = float(cfg.get("amplitude", 1.0))
    name = str(cfg.get("profile", "uniform" if mesh.is_channel else "kolmogorov"))
    mode = int(cfg.get("mode", 1))
    if kind == "constant":
        temporal: Callable = lambda t: amp * np.ones_like(np.asarray(t, float))
        support = np.inf
    elif kind == "pulse":
        dur = float(cfg.get("duration", 4.0))
        temporal = lambda t: amp * np.where((t >= 0) & (t < dur), np.sin(np.pi * np.asarray(t) / dur) ** 4, 0.0)
        support = dur
    else:
        raise ConfigError(f"unknown forcing kind {kind!r}")
    if mesh.is_channel:
        return Forcing.channel(mesh, profile(mesh, name, "node", mode), temporal, support)
    return Forcing.periodic(mesh, profile(mesh, name, "force", mode), temporal, support)


def scenario_from_config(cfg: dict, base: Path | None = None) -> Scenario:
    """Build a :class:`Scenario` from a configuration dict."""
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a JSON object")
    mesh = make_mesh(_req(cfg, "mesh", "config"))
    k = make_kernel(_req(cfg, "kernel", "config"), base)
    try:
        T, dt = float(_req(cfg, "T", "config")), float(_req(cfg, "dt", "config"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad T/dt: {exc}") from exc
    hz = cfg.get("state_horizon")
    st, _ = make_history_state(cfg.get("history", {"family": "zero"}), mesh, k, dt,
                               None if hz is None else float(hz), base)
    try:
        return Scenario(str(cfg.get("id", "custom")), mesh, k, st, T, dt,
                        make_forcing(cfg.get("forcing"), mesh), float(cfg.get("T0", 1.0)),
                        str(cfg.get("description", "")))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> tuple[dict, Path]:
    p = Path(path)
    try:
        return json.loads(p.read_text()), p.parent
    except OSError as exc:
        raise ConfigError(f"cannot read {p}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {p}: {exc}") from exc


_CH = {"kind": "channel1d", "M": 32, "L": 1.0}
_PER = {"kind": "periodic2d", "M": 16, "L": 2 * np.pi}
_EXP = {"family": "exponential", "mu0": 1.0, "rate": 1.0}
_POLY = {"family": "polynomial", "mu0": 1.0, "exponent": 3.0}
_PRONY = {"family": "prony", "amplitudes": [0.5, 1.0], "rates": [0.5, 3.0]}
_RELAX = {"family": "block", "start": 0.5, "end": 2.0, "profile": "mixed"}

BUILTIN: dict[str, dict[str, Any]] = {
    "channel-exp-steady": {
        "mesh": _CH, "kernel": _EXP, "history": {"family": "zero"},
        "forcing": {"kind": "constant", "profile": "uniform"}, "T": 20.0, "dt": 0.05,
        "description": "unit body force from rest; tends to the Poisson profile y(1-y)/2",
    },
    "channel-exp-pulse": {
        "mesh": _CH, "kernel": _EXP, "history": {"family": "zero"},
        "forcing": {"kind": "pulse", "duration": 4.0, "profile": "sin"}, "T": 20.0, "dt": 0.05,
        "description": "sin^4 pulse from rest; time-compact, solved in both domains",
    },
    "channel-poly-pulse": {
        "mesh": _CH, "kernel": _POLY, "history": {"family": "zero"}, "state_horizon": 40.0,
        "forcing": {"kind": "pulse", "duration": 4.0, "profile": "sin"}, "T": 20.0, "dt": 0.05,
        "description": "sin^4 pulse from rest with algebraic memory",
    },
    "channel-exp-relax": {
        "mesh": _CH, "kernel": _EXP, "history": _RELAX, "T": 20.0, "dt": 0.05,
        "description": "force-free relaxation of a block strain history",
    },
    "channel-prony-relax": {
        "mesh": _CH, "kernel": _PRONY, "history": _RELAX, "T": 30.0, "dt": 0.05,
        "description": "force-free relaxation with a two-mode kernel",
    },
    "channel-poly-relax": {
        "mesh": _CH, "kernel": _POLY, "history": _RELAX, "state_horizon": 400.0, "T": 100.0, "dt": 0.05,
        "description": "force-free relaxation with algebraic memory; polynomial energy decay",
    },
    "periodic-prony-relax": {
        "mesh": _PER, "kernel": _PRONY, "history": {**_RELAX, "profile": "mixed"}, "T": 15.0, "dt": 0.05,
        "description": "force-free relaxation of a periodic shear history",
    },
    "periodic-exp-pulse": {
        "mesh": _PER, "kernel": _EXP, "history": {"family": "zero"},
        "forcing": {"kind": "pulse", "duration": 4.0, "profile": "mixed"}, "T": 15.0, "dt": 0.05,
        "description": "pulse with curl and gradient parts; the gradient part is absorbed by pressure",
    },
    "channel-exp-notfmu": {
        "mesh": _CH, "kernel": _EXP,
        "history": {"family": "direct", "power": 0.0, "scale": 4.0, "amplitude": 1.0, "profile": "sin"},
        "state_horizon": 40.0, "T": 10.0, "dt": 0.05,
        "description": "initial state decaying slower than the kernel; outside the finite-energy class",
    },
}


def list_builtin() -> list[str]:
    return list(BUILTIN)


def builtin_config(name: str, **overrides) -> dict:
    if name not in BUILTIN:
        raise ConfigError(f"unknown scenario {name!r}")
    cfg = copy.deepcopy(BUILTIN[name])
    cfg["id"] = name
    cfg.update(overrides)
    return cfg


def builtin(name: str, **overrides) -> Scenario:
    return scenario_from_config(builtin_config(name, **overrides))
