import csv
import json

import numpy as np
import pytest

from viscomem.cli import EXIT_CHECK, EXIT_CONFIG, EXIT_INADMISSIBLE, EXIT_OK, main
from viscomem.scenarios import (
    BUILTIN, ConfigError, builtin, builtin_config, list_builtin, make_kernel, profile, scenario_from_config,
)
from viscomem.field import Mesh


def test_catalog_builds():
    assert len(list_builtin()) == 9
    for name in BUILTIN:
        sc = builtin(name)
        assert sc.id == name and sc.steps > 0


@pytest.mark.parametrize("cfg, msg", [
    ({"family": "nope"}, "unknown kernel"),
    ({"family": "prony", "amplitudes": [1.0], "rates": [1.0, 2.0]}, "bad kernel"),
    ({"family": "tabulated"}, "missing"),
])
def test_kernel_config_errors(cfg, msg):
    with pytest.raises(ConfigError, match=msg):
        make_kernel(cfg)


def test_tabulated_kernel_inline_and_file(tmp_path):
    s = np.linspace(0, 1, 51)
    k1 = make_kernel({"family": "tabulated", "s": s.tolist(), "mu": ((1 - s) ** 3).tolist()})
    (tmp_path / "k.csv").write_text("s,mu\n" + "\n".join(f"{a},{(1 - a) ** 3}" for a in s))
    k2 = make_kernel({"family": "tabulated", "path": "k.csv"}, tmp_path)
    assert k1.total() == pytest.approx(k2.total())


def test_profile_errors_and_shapes():
    ch, per = Mesh("channel1d", 8), Mesh("periodic2d", 8, 2 * np.pi)
    assert profile(ch, "mixed").shape == (8,)
    assert profile(per, "shear").shape == (2, 2, 8, 8)
    assert profile(per, "kolmogorov", "force").shape == (2, 8, 8)
    with pytest.raises(ConfigError):
        profile(ch, "kolmogorov")


@pytest.mark.parametrize("patch", [
    {"T": 1.0, "dt": 0.3},
    {"mesh": {"kind": "torus"}},
    {"history": {"family": "spiral"}},
    {"forcing": {"kind": "gust"}},
    {"history": {"family": "block", "start": 2.0, "end": 1.0}},
])
def test_scenario_config_errors(patch):
    cfg = builtin_config("channel-exp-pulse")
    cfg.update(patch)
    with pytest.raises(ConfigError):
        scenario_from_config(cfg)


def test_unknown_builtin():
    with pytest.raises(ConfigError):
        builtin("nope")


def test_cli_list(capsys):
    assert main(["list-scenarios"]) == EXIT_OK
    out = capsys.readouterr().out
    assert all(name in out for name in BUILTIN)


def test_cli_check_kernel(capsys):
    assert main(["check-kernel", "--kernel", '{"family": "polynomial", "exponent": 2}']) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["admissible"]
    assert main(["check-kernel", "--kernel", '{"family": "affine"}']) == EXIT_INADMISSIBLE
    assert main(["check-kernel", "--kernel", "{oops"]) == EXIT_CONFIG


def test_cli_config_errors(tmp_path, capsys):
    assert main(["run", "--scenario", "nope"]) == EXIT_CONFIG
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    (tmp_path / "bad.json").write_text("{")
    assert main(["run", "--config", str(tmp_path / "bad.json")]) == EXIT_CONFIG
    assert main(["run", "--scenario", "channel-exp-pulse", "--checks", "vibes"]) == EXIT_CONFIG
    assert main(["frobnicate"]) == EXIT_CONFIG


def test_cli_run_inadmissible(tmp_path):
    cfg = builtin_config("channel-exp-pulse", T=1.0)
    cfg["kernel"] = {"family": "affine"}
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    assert main(["run", "--config", str(tmp_path / "c.json"), "--out", str(tmp_path / "o")]) == EXIT_INADMISSIBLE
    assert json.loads((tmp_path / "o" / "manifest.json").read_text())["verdicts"] == {"admissibility": False}


def test_cli_run_outputs(tmp_path):
    cfg = builtin_config("channel-exp-pulse", T=6.0)
    cfg["mesh"] = {**cfg["mesh"], "M": 16}
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    out = tmp_path / "o"
    assert main(["run", "--config", str(tmp_path / "c.json"), "--out", str(out)]) == EXIT_OK
    for f in ["energy.csv", "velocity.csv", "state_snapshots.csv", "report.json", "manifest.json"]:
        assert (out / f).exists()
    rep = json.loads((out / "report.json").read_text())
    assert rep["verdicts"] == {"admissibility": True, "cross-method": True, "apriori": True}
    assert rep["solver"]["stress_consistency"] < 1e-10
    with open(out / "energy.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "Psi", "dPsi_dt", "bound", "alpha_running"] and len(rows) == 122
    man1 = (out / "manifest.json").read_text()
    assert main(["run", "--config", str(tmp_path / "c.json"), "--out", str(out)]) == EXIT_OK
    assert (out / "manifest.json").read_text() == man1


def test_cli_run_relax_reports_decay(tmp_path):
    out = tmp_path / "r"
    assert main(["run", "--scenario", "channel-exp-relax", "--out", str(out), "--checks", "envelope"]) == EXIT_OK
    rep = json.loads((out / "report.json").read_text())
    assert rep["decay"]["envelope"]["holds"]
    assert rep["decay"]["fit"]["class"] == "exponential"
    assert rep["decay"]["max_increment_relative"] <= 1e-8


def test_cli_run_check_failure(tmp_path, monkeypatch):
    import viscomem.cli as cli

    monkeypatch.setattr(cli, "CROSS_TOL", 1e-12)
    cfg = builtin_config("channel-exp-pulse", T=4.0)
    cfg["mesh"] = {**cfg["mesh"], "M": 8}
    (tmp_path / "c.json").write_text(json.dumps(cfg))
    code = main(["run", "--config", str(tmp_path / "c.json"), "--out", str(tmp_path / "o"), "--checks", "cross-method"])
    assert code == EXIT_CHECK
