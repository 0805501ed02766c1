import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from ctcbilliard import nls
from ctcbilliard.cli import main


def run(tmp_path, *argv):
    return main(["--output-dir", str(tmp_path), *argv])


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_eq21_root_plus(tmp_path, capsys):
    assert run(tmp_path, "eq21-root", "--sign", "plus", "--rhs", "1") == 0
    value = float(capsys.readouterr().out.split("=")[1])
    assert abs(value - 0.5337543) < 1e-4
    assert json.loads((tmp_path / "eq21_root.json").read_text())["a"] == value


def test_eq21_root_out_of_range(tmp_path, capsys):
    assert run(tmp_path, "eq21-root", "--sign", "minus", "--rhs", "1") == 2
    assert "range" in capsys.readouterr().err


def test_unknown_command_and_missing_config(tmp_path):
    assert run(tmp_path, "frobnicate") == 2
    assert run(tmp_path, "fixed-point", "--config", str(tmp_path / "nope.json")) == 2
    assert run(tmp_path, "fixed-point") == 2


def test_bad_field_is_named(tmp_path, capsys):
    cfg = write(tmp_path, "k.json", {"packet": {"a": -1.0}, "points": [{"k_prime": 1.0}]})
    assert run(tmp_path, "kernel-eval", "--config", cfg) == 2
    assert "packet.a" in capsys.readouterr().err
    cfg = write(tmp_path, "k2.json", {"packet": {"a": 1.0}, "kernel": {"epsilon": 1.5}, "points": [{"k_prime": 1.0}]})
    assert run(tmp_path, "kernel-eval", "--config", cfg) == 2
    assert "kernel.epsilon" in capsys.readouterr().err


def test_eval(capsys):
    assert main(["eval", "beta", "0.5", "0.5"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(np.pi)
    assert main(["eval", "kummer", "1", "1", "2"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(np.exp(2.0))
    assert main(["eval", "nosuch", "1"]) == 2
    assert main(["eval", "binomial", "4"]) == 2
    assert main(["eval", "i0", "-1"]) == 2


def test_kernel_eval_csv(tmp_path):
    cfg = write(tmp_path, "k.json", {
        "packet": {"a": 1.0, "normalize": True}, "kernel": {"epsilon": 0.1},
        "points": [{"k_prime": 1.0}, {"k_prime": 1.5, "p": [0.2, -0.1], "q": [0.3, 0.1]}]})
    assert run(tmp_path, "kernel-eval", "--config", cfg) == 0
    rows = read_csv(tmp_path / "kernel_eval.csv")
    assert rows[0] == ["k_prime", "p_x", "p_y", "q_x", "q_y", "re_closed", "im_closed",
                       "pv_part", "re_pole", "im_pole"]
    assert len(rows) == 3
    assert float(rows[2][3]) == 0.3


def test_kernel_eval_rejects_complex_c_and_zero_k(tmp_path):
    cfg = write(tmp_path, "k.json", {"packet": {"a": 1.0, "c_im": 0.5}, "points": [{"k_prime": 1.0}]})
    assert run(tmp_path, "kernel-eval", "--config", cfg) == 2
    cfg = write(tmp_path, "k.json", {"packet": {"a": 1.0}, "points": [{"k_prime": 0.0}]})
    assert run(tmp_path, "kernel-eval", "--config", cfg) == 2


def test_gaussian_solve(tmp_path):
    assert run(tmp_path, "gaussian-solve", "--a", "2.0", "--epsilon", "0.2") == 0
    out = json.loads((tmp_path / "gaussian_solve.json").read_text())
    assert out["packet"]["a"] == 2.0
    assert out["kernel"]["epsilon"] == 0.2
    assert out["alpha_plus"] ** 2 - 2.0 * out["alpha_plus"] == pytest.approx(np.sqrt(2.0))
    assert out["width_condition_roots"]["plus"]["a"] == pytest.approx(0.53378, abs=1e-4)


def test_gaussian_solve_zero_coupling(tmp_path):
    assert run(tmp_path, "gaussian-solve", "--a", "1.0", "--coupling", "0") == 0
    out = json.loads((tmp_path / "gaussian_solve.json").read_text())
    assert out["b0"] is None


FP_BASE = {"packet": {"a": 1.0, "normalize": True}, "grid": {"n": 16, "k_max": 2.0, "angular_nodes": 16}}


def test_fixed_point_converges(tmp_path):
    cfg = write(tmp_path, "fp.json", dict(FP_BASE, initial={"kind": "gaussian", "scale": 1e-2}))
    assert run(tmp_path, "fixed-point", "--config", cfg, "--tol", "1e-14") == 0
    rows = read_csv(tmp_path / "fixed_point_trace.csv")
    assert rows[0] == ["iter", "k", "re_c", "im_c", "delta"]
    assert json.loads((tmp_path / "fixed_point.json").read_text())["status"] == "converged"


def test_fixed_point_max_iters_exit_1_with_trace(tmp_path):
    cfg = write(tmp_path, "fp.json", dict(FP_BASE, initial={"kind": "gaussian", "scale": 1e-2},
                                          iteration={"max_iters": 3, "tol": 1e-30}))
    assert run(tmp_path, "fixed-point", "--config", cfg) == 1
    rows = read_csv(tmp_path / "fixed_point_trace.csv")
    assert len(rows) == 1 + 4 * 16
    assert rows[-1][0] == "3"


def test_fixed_point_flag_overrides_config(tmp_path):
    cfg = write(tmp_path, "fp.json", dict(FP_BASE, initial={"kind": "gaussian", "scale": 1e-2},
                                          iteration={"max_iters": 3, "tol": 1e-30}))
    assert run(tmp_path, "fixed-point", "--config", cfg, "--max-iters", "5") == 1
    assert read_csv(tmp_path / "fixed_point_trace.csv")[-1][0] == "5"


def test_fixed_point_divergence_exit_1(tmp_path):
    cfg = write(tmp_path, "fp.json", {"packet": {"a": 1.0, "normalize": True}, "grid": {"n": 16}})
    assert run(tmp_path, "fixed-point", "--config", cfg) == 1
    assert json.loads((tmp_path / "fixed_point.json").read_text())["status"] == "diverged"


def test_fixed_point_values_initial(tmp_path):
    cfg = write(tmp_path, "fp.json", dict(FP_BASE, initial={"kind": "values", "re": [0.0] * 16}))
    assert run(tmp_path, "fixed-point", "--config", cfg) == 0
    cfg = write(tmp_path, "fp.json", dict(FP_BASE, initial={"kind": "values", "re": [0.0] * 3}))
    assert run(tmp_path, "fixed-point", "--config", cfg) == 2


def test_audit_byte_identical(tmp_path):
    cfg = write(tmp_path, "a.json", {"a": 1.0, "kernel": {"epsilon": 0.1, "coupling": 1.0}})
    assert run(tmp_path / "r1", "audit", "--config", cfg) == 0
    assert run(tmp_path / "r2", "audit", "--config", cfg) == 0
    one = (tmp_path / "r1" / "audit.json").read_bytes()
    assert one == (tmp_path / "r2" / "audit.json").read_bytes()
    rep = json.loads(one)
    assert rep["discrepancies"]


def test_stability_scan(tmp_path):
    assert run(tmp_path, "stability-scan", "--a-min", "0.1", "--a-max", "10", "--count", "100") == 0
    lines = (tmp_path / "stability_scan.csv").read_text().splitlines()
    assert lines[0] == "a,alpha,b0,lambda0,max_lambda,classification"
    assert len(lines) == 102
    footer = json.loads(lines[-1][2:])
    assert 1.7 < footer["critical_a"] < 1.9


def test_stability_scan_bad_range(tmp_path):
    assert run(tmp_path, "stability-scan", "--a-min", "2", "--a-max", "1") == 2
    assert run(tmp_path, "stability-scan", "--convention", "bogus") == 2


NLS_CFG = {"dims": 1, "grid": 256, "box": 40.0, "dt": 0.001, "t_final": 0.2, "sample_every": 50,
           "initial": {"kind": "sech"}, "w": {"kind": "constant", "value": -1.0}}


def test_nls_run(tmp_path):
    cfg = write(tmp_path, "n.json", dict(NLS_CFG, snapshot_every=100))
    assert run(tmp_path, "nls-run", "--config", cfg) == 0
    rows = read_csv(tmp_path / "nls_series.csv")
    assert rows[0] == ["t", "norm", "energy"]
    assert len(rows) == 1 + 5
    snaps = sorted(tmp_path.glob("nls_snapshot_*.bin"))
    assert len(snaps) == 3
    last = nls.read_snapshot(snaps[-1])
    assert last.time == pytest.approx(0.2)


def test_nls_run_rejects_complex_w(tmp_path, capsys):
    cfg = write(tmp_path, "n.json", dict(NLS_CFG, w={"kind": "constant", "value": -1.0, "im": 0.5}))
    assert run(tmp_path, "nls-run", "--config", cfg) == 2
    assert "complex" in capsys.readouterr().err
    np.save(tmp_path / "w.npy", np.ones(256, dtype=complex))
    cfg = write(tmp_path, "n.json", dict(NLS_CFG, w={"kind": "file", "path": str(tmp_path / "w.npy")}))
    assert run(tmp_path, "nls-run", "--config", cfg) == 2


def test_nls_run_tabulated_and_gaussian(tmp_path):
    np.save(tmp_path / "w.npy", -np.ones(256))
    cfg = write(tmp_path, "n.json", dict(NLS_CFG, w={"kind": "file", "path": str(tmp_path / "w.npy")}))
    assert run(tmp_path / "t", "nls-run", "--config", cfg) == 0
    cfg = write(tmp_path, "n2.json", dict(NLS_CFG))
    assert run(tmp_path / "c", "nls-run", "--config", cfg) == 0
    assert (tmp_path / "t" / "nls_series.csv").read_bytes() == (tmp_path / "c" / "nls_series.csv").read_bytes()
    cfg = write(tmp_path, "n3.json", dict(NLS_CFG, initial={"kind": "gaussian", "width": 1.5},
                                          w={"kind": "gaussian", "amplitude": -1.0, "width": 2.0}))
    assert run(tmp_path / "g", "nls-run", "--config", cfg) == 0


def test_nls_run_bad_grid(tmp_path):
    cfg = write(tmp_path, "n.json", dict(NLS_CFG, grid=100))
    assert run(tmp_path, "nls-run", "--config", cfg) == 2
    cfg = write(tmp_path, "n.json", dict(NLS_CFG, t_final=0.2005, dt=0.001))
    assert run(tmp_path, "nls-run", "--config", cfg) == 2


SWEEP = {"command": "stability-scan", "sweep": {"parameter": "a", "start": 0.1, "stop": 10.0, "count": 100},
         "base": {"convention": "sqrt_pi_over_alpha"}}


def test_sweep_stability_transitions_once(tmp_path):
    cfg = write(tmp_path, "s.json", SWEEP)
    assert main(["--output-dir", str(tmp_path), "--workers", "2", "sweep", "--config", cfg]) == 0
    rows = read_csv(tmp_path / "sweep_stability-scan.csv")[1:]
    assert len(rows) == 100
    labels = [r[5] for r in rows]
    assert sum(1 for u, v in zip(labels, labels[1:]) if u != v) == 1
    a = [float(r[0]) for r in rows]
    assert a == sorted(a)


def test_sweep_deterministic_across_workers(tmp_path):
    cfg = write(tmp_path, "s.json", dict(SWEEP, sweep={"parameter": "a", "values": [3.0, 0.5, 1.0, 2.0]}))
    assert main(["--output-dir", str(tmp_path / "w1"), "--workers", "1", "sweep", "--config", cfg]) == 0
    assert main(["--output-dir", str(tmp_path / "w3"), "--workers", "3", "sweep", "--config", cfg]) == 0
    assert ((tmp_path / "w1" / "sweep_stability-scan.csv").read_bytes()
            == (tmp_path / "w3" / "sweep_stability-scan.csv").read_bytes())


def test_single_point_sweep_matches_direct(tmp_path):
    cfg = write(tmp_path, "s.json", dict(SWEEP, sweep={"parameter": "a", "values": [0.5]}))
    assert run(tmp_path, "sweep", "--config", cfg) == 0
    swept = read_csv(tmp_path / "sweep_stability-scan.csv")[1]
    assert run(tmp_path, "stability-scan", "--a-min", "0.5", "--a-max", "1.0", "--count", "2") == 0
    direct = read_csv(tmp_path / "stability_scan.csv")[1]
    assert swept[:6] == direct


def test_sweep_failed_point_flagged(tmp_path):
    cfg = write(tmp_path, "s.json", {"command": "eq21-root", "base": {"sign": "plus"},
                                     "sweep": {"parameter": "rhs", "values": [2.0, -1.0, 1.0]}})
    assert main(["--output-dir", str(tmp_path), "--workers", "1", "sweep", "--config", cfg]) == 1
    rows = read_csv(tmp_path / "sweep_eq21-root.csv")
    assert rows[0] == ["rhs", "a", "ok", "error"]
    assert [r[2] for r in rows[1:]] == ["false", "true", "true"]
    assert rows[1][3].startswith("NoRootError")


def test_sweep_bad_config(tmp_path):
    cfg = write(tmp_path, "s.json", {"command": "nls-run", "sweep": {"values": [1.0]}})
    assert run(tmp_path, "sweep", "--config", cfg) == 2
    cfg = write(tmp_path, "s.json", dict(SWEEP, sweep={"parameter": "b", "values": [1.0]}))
    assert run(tmp_path, "sweep", "--config", cfg) == 2


def test_workers_env(tmp_path, monkeypatch):
    monkeypatch.setenv("CTCBILLIARD_WORKERS", "zero")
    cfg = write(tmp_path, "s.json", dict(SWEEP, sweep={"parameter": "a", "values": [1.0, 2.0]}))
    assert run(tmp_path, "sweep", "--config", cfg) == 2
    monkeypatch.setenv("CTCBILLIARD_WORKERS", "1")
    assert run(tmp_path, "sweep", "--config", cfg) == 0


def test_quiet_flag(tmp_path, capsys):
    assert main(["--quiet", "--output-dir", str(tmp_path), "stability-scan", "--count", "3"]) == 0
    assert capsys.readouterr().out == ""
    assert main(["--output-dir", str(tmp_path), "stability-scan", "--count", "3", "--quiet"]) == 0
    assert capsys.readouterr().out == ""


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ctcbilliard", "--output-dir", str(tmp_path),
                           "eq21-root", "--sign", "plus", "--rhs", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("a = 0.5337")
