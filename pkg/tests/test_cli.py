import json

import numpy as np
import pytest

from sppa.cli import main

from conftest import seeded_eq_qp


def _write(tmp_path, name, cfg):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def _read_csv(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


SPPA_CFG = {
    "algorithm": "sppa",
    "seed": 3,
    "problem": {"kind": "random_qp", "n": 6},
    "metric": {"kind": "identity"},
    "schedule": {"family": "constant_ratio", "c": 1.0, "r": 4},
    "K": 120,
}


def test_run_sppa_writes_trace_summary_and_plots(tmp_path):
    cfg = _write(tmp_path, "cfg.json", SPPA_CFG)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    header, rows = _read_csv(out / "trace.csv")
    assert header == ["k", "f_gap", "E", "E_alpha", "sum22_prefix", "sum23_prefix",
                      "tilde_grad_norm_sq", "bound21_rhs"]
    assert len(rows) == 121
    summary = json.loads((out / "summary.json").read_text())
    assert summary["algorithm"] == "sppa"
    assert "certificates" in summary
    for name in ("gap_loglog.svg", "lyapunov.svg", "scaled_gap.svg"):
        assert (out / name).exists()


def test_run_reruns_are_byte_identical(tmp_path):
    cfg = _write(tmp_path, "cfg.json", SPPA_CFG)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["run", "--config", cfg, "--out", str(out2)]) == 0
    assert (out1 / "trace.csv").read_bytes() == (out2 / "trace.csv").read_bytes()
    assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()


def test_csv_floats_roundtrip_at_17_digits(tmp_path):
    cfg = _write(tmp_path, "cfg.json", SPPA_CFG)
    out = tmp_path / "out"
    main(["run", "--config", cfg, "--out", str(out)])
    header, rows = _read_csv(out / "trace.csv")
    gap_col = header.index("f_gap")
    text = rows[3][gap_col]
    assert float(repr(float(text))) == float(text)
    # 17 significant digits reproduce the double exactly
    assert f"{float(text):.17g}" == text


def test_run_figure1_emits_three_csvs_and_phase_plot(tmp_path):
    cfg = _write(tmp_path, "fig1.json",
                 {"algorithm": "figure1", "step": 0.1, "n_steps": 300})
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    for name in ("explicit.csv", "symplectic.csv", "implicit.csv"):
        header, rows = _read_csv(out / name)
        assert header == ["t", "p", "q"]
        assert len(rows) == 301
    assert (out / "phase_portrait.svg").exists()


def test_run_ode_trajectory_columns(tmp_path):
    cfg = _write(tmp_path, "ode.json", {
        "algorithm": "ode",
        "problem": {"kind": "quadratic", "Q": [[1.0, 0.0], [0.0, 2.0]]},
        "metric": {"kind": "identity"},
        "schedule": {"family": "polynomial", "p": 2, "d": 1.0},
        "x0": [1.0, -1.0],
        "step": 0.01,
        "T": 2.0,
    })
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    header, rows = _read_csv(out / "trajectory.csv")
    assert header == ["t", "X0", "X1", "Z0", "Z1", "E", "G"]
    assert len(rows) == 201


def test_run_salm_trace_columns(tmp_path):
    p = seeded_eq_qp()
    cfg = _write(tmp_path, "salm.json", {
        "algorithm": "salm",
        "problem": p.to_config(),
        "metric": {"kind": "identity"},
        "schedule": {"family": "constant_ratio", "c": 1.0, "r": 4},
        "K": 100,
    })
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    header, rows = _read_csv(out / "trace.csv")
    assert header == ["k", "dual_gap", "u_norm_sq_L", "sum_u_prefix",
                      "corollary_rhs", "lemma2_residual"]
    summary = json.loads((out / "summary.json").read_text())
    assert summary["multiplier_error"] <= 1e-8


def test_corrupted_rhos_exits_one_with_field_message(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.json", {
        "algorithm": "ppa",
        "problem": {"kind": "quadratic", "Q": [[1.0]]},
        "x0": [1.0],
        "rhos": [1.0, 1.0, 1.0, -2.0],
        "K": 4,
    })
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert "rhos[3] must be positive" in capsys.readouterr().err


def test_missing_field_exits_one_naming_field(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.json", {
        "algorithm": "sppa",
        "problem": {"kind": "quadratic", "Q": [[1.0]]},
        "x0": [1.0],
        "K": 4,
    })
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert "schedule is required" in capsys.readouterr().err


def test_certify_exit_codes(tmp_path):
    ok = _write(tmp_path, "ok.json",
                {"schedule": {"family": "constant_ratio", "c": 1.0, "r": 4},
                 "horizon": 1000, "theorem": "T6"})
    assert main(["certify", "--config", ok]) == 0
    bad = _write(tmp_path, "bad.json",
                 {"schedule": {"family": "polynomial", "p": 2, "d": 1.0}})
    assert main(["certify", "--config", bad, "--theorem", "T6",
                 "--horizon", "1000"]) == 2
    guler = _write(tmp_path, "guler.json",
                   {"schedule": {"family": "guler", "rhos": {"const": 1.0}},
                    "horizon": 1000, "theorem": "T4"})
    assert main(["certify", "--config", guler]) == 0


def test_compare_appa_vs_sppa_bounds(tmp_path):
    cfg = _write(tmp_path, "cmp.json", {
        "seed": 5,
        "problem": {"kind": "random_qp", "n": 5},
        "metric": {"kind": "identity"},
        "K": 150,
        "algorithms": [
            {"algorithm": "appa", "rhos": {"const": 1.0}, "A": 1.0},
            {"algorithm": "sppa", "schedule": {"family": "guler",
                                               "rhos": {"const": 1.0}}},
        ],
    })
    out = tmp_path / "out"
    assert main(["compare", "--config", cfg, "--out", str(out)]) == 0
    header, rows = _read_csv(out / "compare.csv")
    assert header == ["k", "gap_appa", "bound_appa", "gap_sppa", "bound_sppa"]
    assert (out / "overlay.svg").exists()
    # the symplectic bound is finer than the accelerated one for A <= 2
    for row in rows[1:]:
        assert float(row[4]) <= float(row[2]) * (1 + 1e-12)


def test_compare_ppa_vs_sppa_emits_both(tmp_path):
    cfg = _write(tmp_path, "cmp.json", {
        "seed": 5,
        "problem": {"kind": "random_qp", "n": 4},
        "K": 50,
        "rhos": {"const": 1.0},
        "algorithms": [
            {"algorithm": "ppa"},
            {"algorithm": "sppa", "schedule": {"family": "constant_ratio",
                                               "c": 1.0, "r": 4}},
        ],
    })
    out = tmp_path / "out"
    assert main(["compare", "--config", cfg, "--out", str(out)]) == 0
    header, _ = _read_csv(out / "compare.csv")
    assert "gap_ppa" in header and "gap_sppa" in header


def test_compare_empty_algorithm_list_exits_one(tmp_path, capsys):
    cfg = _write(tmp_path, "cmp.json", {
        "problem": {"kind": "quadratic", "Q": [[1.0]]},
        "x0": [1.0], "K": 5, "algorithms": [],
    })
    assert main(["compare", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert "non-empty" in capsys.readouterr().err


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SPPA_OUT_DIR", str(tmp_path / "envout"))
    monkeypatch.chdir(tmp_path)
    cfg = _write(tmp_path, "fig1.json",
                 {"algorithm": "figure1", "n_steps": 50})
    assert main(["run", "--config", cfg]) == 0
    assert (tmp_path / "envout" / "phase_portrait.svg").exists()


def test_strict_certificates_flag_controls_exit(tmp_path):
    # a short run fails the little-o proxy: lenient exit 0, strict exit 2
    cfg = _write(tmp_path, "cfg.json", dict(SPPA_CFG, K=120))
    out = tmp_path / "s1"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert not summary["certificates"]["passed"]
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "s2"),
                 "--strict-certificates"]) == 2


def test_missing_config_file_exits_one(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.json")]) == 1
    assert "not found" in capsys.readouterr().err


def test_run_appa_via_cli(tmp_path):
    cfg = _write(tmp_path, "appa.json", {
        "algorithm": "appa", "seed": 2,
        "problem": {"kind": "random_qp", "n": 5},
        "rhos": {"const": 1.0}, "A": 1.0, "K": 80,
    })
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["certificates"]["passed"]
    header, rows = _read_csv(out / "trace.csv")
    assert len(rows) == 81


def test_run_sppa_on_l1_problem_via_cli(tmp_path):
    cfg = _write(tmp_path, "l1.json", {
        "algorithm": "sppa",
        "problem": {"kind": "l1", "weight": 0.8, "dim": 4},
        "metric": {"kind": "diagonal", "values": [1.0, 2.0, 0.5, 1.0]},
        "schedule": {"family": "guler", "rhos": {"const": 1.0}},
        "x0": [2.0, -3.0, 0.5, 1.5], "K": 60,
    })
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    rows = {r["name"]: r["status"] for r in summary["certificates"]["rows"]}
    assert rows["lyapunov monotone"] == "PASS"
    assert rows["rate bound"] == "PASS"


def test_certify_writes_report_json(tmp_path):
    cfg = _write(tmp_path, "cert.json",
                 {"schedule": {"family": "guler", "rhos": {"const": 1.0}}})
    out = tmp_path / "out"
    assert main(["certify", "--config", cfg, "--theorem", "T4",
                 "--horizon", "500", "--out", str(out)]) == 0
    report = json.loads((out / "certification.json").read_text())
    assert report["passed"]
    assert report["theorem"] == "T4"
