"""Command-line driver: ``viscomem run | list-scenarios | check-kernel``.

Exit codes: 0 success, 1 an enabled check failed, 2 configuration error,
3 inadmissible input (kernel fails the admissibility conditions).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .analysis import decay_envelope_check, f_mu_membership, fit_decay, run_with_energy
from .kernel import InadmissibleKernelError, check_admissibility
from .scenarios import (
    BUILTIN, ConfigError, builtin_config, load_config, make_kernel, scenario_from_config,
)
from .solver import (
    apriori_bound_check, convolution_stress, random_test_trace, solve_frequency_domain,
    trace_norm, weak_residual,
)

CHECKS = ("admissibility", "apriori", "envelope", "cross-method")
EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_INADMISSIBLE = 0, 1, 2, 3
CROSS_TOL = 1e-3
SNAPSHOT_ROWS = 64


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        f = float(x)
        return f if math.isfinite(f) else str(f)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def _parse_checks(text: str | None) -> list[str]:
    if text is None or text == "all":
        return list(CHECKS)
    if text == "none":
        return []
    items = [c.strip() for c in text.split(",") if c.strip()]
    bad = [c for c in items if c not in CHECKS]
    if bad:
        raise ConfigError(f"unknown checks {bad}; choose from {', '.join(CHECKS)}")
    return items


def _write_snapshots(path: Path, states: dict) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = None
        for j, st in sorted(states.items()):
            stride = max(1, st.P // SNAPSHOT_ROWS)
            for row in st.snapshot_rows(stride):
                if header is None:
                    ncoord = 1 if st.mesh.is_channel else 2
                    coords = ["y"] if ncoord == 1 else ["x", "y"]
                    header = ["t"] + coords + ["tau"] + [f"c{i}" for i in range(len(row) - ncoord - 1)]
                    w.writerow(header)
                w.writerow([repr(float(st.time))] + [repr(x) for x in row])


def run(cfg: dict, out: Path, checks: list[str], seed: int, base: Path | None = None) -> int:
    """Full pipeline for one scenario; returns the exit code."""
    kernel_cfg = cfg.get("kernel")
    if kernel_cfg is None:
        raise ConfigError("missing 'kernel' in config")
    k = make_kernel(kernel_cfg, base)
    report: dict = {"scenario": cfg.get("id", "custom"), "checks": {}}
    verdicts: dict = {}

    adm = check_admissibility(k)
    report["admissibility"] = adm.as_dict()
    if "admissibility" in checks:
        verdicts["admissibility"] = adm.admissible
        if not adm.admissible:
            out.mkdir(parents=True, exist_ok=True)
            _write_json(out / "report.json", report)
            _write_manifest(out, cfg, seed, verdicts)
            print(f"inadmissible kernel: {json.dumps(_jsonable(adm.as_dict()))}", file=sys.stderr)
            return EXIT_INADMISSIBLE

    sc = scenario_from_config(cfg, base)
    out.mkdir(parents=True, exist_ok=True)
    fm = f_mu_membership(sc.initial, k)
    report["f_mu"] = {"value": fm.value, "finite": fm.finite}

    tr, v, traj = run_with_energy(sc, snapshots=(0, sc.steps))
    tr.to_csv(out / "energy.csv")
    v.to_csv(out / "velocity.csv")
    _write_snapshots(out / "state_snapshots.csv", traj.snapshots)

    rng = np.random.default_rng(seed)
    w = random_test_trace(sc.mesh, v.n, v.dt, rng)
    norm = trace_norm(v) * trace_norm(w)
    wr = weak_residual(sc, v, w)
    cs = convolution_stress(sc, v)
    scale = max(float(np.abs(cs).max()), 1e-300)
    report["solver"] = {
        "steps": sc.steps, "dt": sc.dt, "T": sc.T, "mesh": {"kind": sc.mesh.kind, "M": sc.mesh.M, "L": sc.mesh.L},
        "diagonal_weight": v.diagnostics["diagonal_weight"],
        "weak_residual": wr, "weak_residual_relative": wr / norm if norm > 0 else 0.0,
        "stress_consistency": float(np.abs(cs - traj.stress).max()) / scale,
        "impulse_norm": float(np.abs(v.impulse).max()),
    }

    if "cross-method" in checks:
        if sc.time_compact:
            vf = solve_frequency_domain(sc)
            ref = np.linalg.norm(v.velocity)
            err = float(np.linalg.norm(v.velocity - vf.velocity) / ref) if ref > 0 else float(np.abs(vf.velocity).max())
            d = vf.diagnostics
            report["checks"]["cross-method"] = {
                "relative_l2": err, "tolerance": CROSS_TOL, "k1_min": float(d["k1"].min()),
                "k2_max": float(d["k2"].max()), "n_omega": int(d["omega"].size),
            }
            verdicts["cross-method"] = err <= CROSS_TOL and bool(np.all(d["k1"] > 0))
        else:
            report["checks"]["cross-method"] = {"skipped": "data not time-compact"}

    if "apriori" in checks:
        ap = apriori_bound_check(sc, v)
        report["checks"]["apriori"] = ap._asdict()
        verdicts["apriori"] = ap.holds

    xi = tr.xi
    cls = {"constant": "exponential", "inverse_linear": "polynomial"}.get(xi.kind)
    decay: dict = {"class": cls or "other", "xi": {"kind": xi.kind, "c": xi.c}}
    if "envelope" in checks:
        if sc.forcing is not None:
            decay["envelope"] = {"skipped": "forced run"}
        elif not fm.finite:
            decay["envelope"] = {"skipped": "initial state outside the finite-energy class"}
        elif not np.any(tr.t > sc.T0):
            decay["envelope"] = {"skipped": "run shorter than T0"}
        else:
            ec = decay_envelope_check(tr, xi, sc.T0)
            decay["envelope"] = {"alpha": ec.alpha, "beta": ec.beta, "holds": ec.holds, "T0": sc.T0}
            verdicts["envelope"] = ec.holds
            if cls is not None and tr.psi[-1] > 0:
                try:
                    decay["fit"] = fit_decay(tr, cls).as_dict()
                except ValueError as exc:
                    decay["fit"] = {"skipped": str(exc)}
    increments = np.diff(tr.psi[1:])
    decay["max_increment_relative"] = float(increments.max() / tr.psi[0]) if tr.psi[0] > 0 and increments.size else 0.0
    report["decay"] = decay
    report["verdicts"] = verdicts
    _write_json(out / "report.json", report)
    _write_manifest(out, cfg, seed, verdicts)
    failed = [name for name, ok in verdicts.items() if not ok]
    for name in checks:
        state = "skipped" if name not in verdicts else ("pass" if verdicts[name] else "FAIL")
        print(f"{name:14s} {state}")
    return EXIT_CHECK if failed else EXIT_OK


def _write_manifest(out: Path, cfg: dict, seed: int, verdicts: dict) -> None:
    canon = json.dumps(_jsonable(cfg), sort_keys=True, separators=(",", ":"))
    _write_json(out / "manifest.json", {
        "config_sha256": hashlib.sha256(canon.encode()).hexdigest(),
        "config": cfg,
        "seed": seed,
        "versions": {"viscomem": __version__, "python": platform.python_version(),
                     "numpy": np.__version__, "scipy": scipy.__version__},
        "verdicts": verdicts,
    })


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="viscomem", description="Quasi-static viscoelastic flows with minimal states.")
    sub = p.add_subparsers(dest="verb", required=True)
    r = sub.add_parser("run", help="solve one scenario and write traces and reports")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="scenario JSON file")
    src.add_argument("--scenario", help="built-in scenario id")
    r.add_argument("--out", type=Path, default=None, help="output directory (default: out/<id>)")
    r.add_argument("--seed", type=int, default=0, help="seed for random test fields")
    r.add_argument("--checks", default="all", help=f"comma list from {','.join(CHECKS)}, 'all' or 'none'")
    sub.add_parser("list-scenarios", help="list built-in scenarios")
    c = sub.add_parser("check-kernel", help="report kernel admissibility")
    csrc = c.add_mutually_exclusive_group(required=True)
    csrc.add_argument("--config", type=Path, help="JSON file with a 'kernel' entry or a bare kernel object")
    csrc.add_argument("--kernel", help="inline kernel JSON, e.g. '{\"family\": \"exponential\"}'")
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.verb == "list-scenarios":
            for name, cfg in BUILTIN.items():
                print(f"{name:24s} {cfg.get('description', '')}")
            return EXIT_OK
        if args.verb == "check-kernel":
            if args.config is not None:
                obj, base = load_config(args.config)
            else:
                try:
                    obj, base = json.loads(args.kernel), None
                except json.JSONDecodeError as exc:
                    raise ConfigError(f"invalid kernel JSON: {exc}") from exc
            kcfg = obj.get("kernel", obj) if isinstance(obj, dict) else obj
            if not isinstance(kcfg, dict):
                raise ConfigError("kernel must be a JSON object")
            rep = check_admissibility(make_kernel(kcfg, base))
            print(json.dumps(_jsonable(rep.as_dict()), indent=2, sort_keys=True))
            return EXIT_OK if rep.admissible else EXIT_INADMISSIBLE
        if args.config is not None:
            cfg, base = load_config(args.config)
        else:
            cfg, base = builtin_config(args.scenario), None
        checks = _parse_checks(args.checks)
        out = args.out if args.out is not None else Path("out") / str(cfg.get("id", "custom"))
        return run(cfg, out, checks, args.seed, base)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InadmissibleKernelError as exc:
        print(f"inadmissible input: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE


if __name__ == "__main__":
    sys.exit(main())
