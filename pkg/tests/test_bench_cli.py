"""Tests for the benchmark harness and the command-line interface."""

import hashlib
import math
import os

import numpy as np
import pytest

from alignclust.bench import (
    AXIS_COMMENT,
    BENCHMARK_SOLVER,
    DEFAULT_NOISE_LEVELS,
    BenchmarkConfig,
    derive_seed,
    paired_sign_test,
    preset_config,
    run_benchmark,
    sign_test_pvalue,
    summarize,
    write_results_csv,
    write_summary_csv,
)
from alignclust.cli import main, read_edge_list
from alignclust.sdp_core import SolverConfig
from alignclust.signals import generate_dataset, read_dataset, write_dataset

QUICK_SOLVER = SolverConfig(max_iterations=600, tol_feasibility=1e-4, tol_objective=1e-5)

TINY = dict(
    num_classes=2,
    copies_per_class=2,
    bandwidth=1,
    noise_levels=(0.0, 0.3),
    trials=2,
    methods=("nug", "bispectrum"),
    seed=7,
    solver=QUICK_SOLVER,
)


# ---------------------------------------------------------------------------
# seed derivation
# ---------------------------------------------------------------------------


def test_derive_seed_frozen_values():
    assert derive_seed(0, 0, 0) == 5392659312917859048
    assert derive_seed(42, "nug") == 424096755273508851


def test_derive_seed_matches_documented_construction():
    for parts in ((0, 0, 0), (3, 1, 4), ("acceptance", "criterion5", 2)):
        digest = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
        expected = int.from_bytes(digest[:8], "little") & (2**63 - 1)
        assert derive_seed(*parts) == expected
        assert 0 <= expected < 2**63


def test_derive_seed_part_sensitivity():
    assert derive_seed(1, 2) != derive_seed(2, 1)
    assert derive_seed(12) != derive_seed(1, 2)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def test_benchmark_config_defaults():
    cfg = BenchmarkConfig()
    assert cfg.num_classes == 4
    assert cfg.copies_per_class == 15
    assert cfg.bandwidth == 5
    assert cfg.noise_levels == DEFAULT_NOISE_LEVELS
    assert cfg.trials == 20
    assert cfg.methods == ("nug", "bispectrum")
    assert cfg.balanced is True
    assert cfg.solver.max_iterations == BENCHMARK_SOLVER.max_iterations
    assert cfg.solver.tol_feasibility == BENCHMARK_SOLVER.tol_feasibility
    assert cfg.solver.relaxation == BENCHMARK_SOLVER.relaxation


def test_benchmark_config_validation():
    with pytest.raises(ValueError):
        BenchmarkConfig(trials=0)
    with pytest.raises(ValueError):
        BenchmarkConfig(noise_levels=())
    with pytest.raises(ValueError):
        BenchmarkConfig(noise_levels=(-0.1,))
    with pytest.raises(ValueError):
        BenchmarkConfig(methods=("nug", "fft"))


def test_preset_config():
    full = preset_config("full")
    assert full == BenchmarkConfig()
    reduced = preset_config("reduced")
    assert reduced.copies_per_class == 6
    assert reduced.trials == 10
    assert reduced.num_classes == 4
    override = preset_config("reduced", trials=3, seed=9)
    assert override.trials == 3
    assert override.seed == 9
    with pytest.raises(ValueError):
        preset_config("huge")


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def test_run_benchmark_row_order_and_determinism():
    cfg = BenchmarkConfig(**TINY)
    rows_a = run_benchmark(cfg)
    rows_b = run_benchmark(cfg)
    expected_keys = [
        (sigma, trial, method)
        for sigma in cfg.noise_levels
        for trial in range(cfg.trials)
        for method in cfg.methods
    ]
    got_keys = [(r["noise_level"], r["trial"], r["method"]) for r in rows_a]
    assert got_keys == expected_keys
    for a, b in zip(rows_a, rows_b):
        for col in ("noise_level", "trial", "method", "converged"):
            assert a[col] == b[col]
        for col in ("classification_error", "objective"):
            if math.isnan(a[col]):
                assert math.isnan(b[col])
            else:
                assert a[col] == b[col]
    for row in rows_a:
        if row["method"] == "bispectrum":
            assert math.isnan(row["objective"])
            assert row["converged"] is True
        else:
            assert math.isfinite(row["objective"])
        assert row["wall_time"] >= 0


def test_run_benchmark_noiseless_tiny_is_exact():
    cfg = BenchmarkConfig(**{**TINY, "noise_levels": (0.0,), "trials": 3})
    rows = run_benchmark(cfg)
    for row in rows:
        assert row["classification_error"] == 0.0


def test_run_benchmark_records_failures_and_continues(monkeypatch):
    import alignclust.bench as bench

    real = bench.run_method

    def flaky(dataset, method, seed, balanced=False, solver_config=None):
        if method == "bispectrum":
            raise RuntimeError("boom")
        return real(dataset, method, seed, balanced, solver_config)

    monkeypatch.setattr(bench, "run_method", flaky)
    cfg = BenchmarkConfig(**{**TINY, "noise_levels": (0.0,), "trials": 2})
    messages = []
    rows = run_benchmark(cfg, progress=messages.append)
    assert len(rows) == 4
    failed = [r for r in rows if r["method"] == "bispectrum"]
    assert len(failed) == 2
    for row in failed:
        assert math.isnan(row["classification_error"])
        assert row["converged"] is False
    assert any("failed: boom" in m for m in messages)


# ---------------------------------------------------------------------------
# summaries and tables
# ---------------------------------------------------------------------------


def rows_for_summary():
    return [
        {"noise_level": 0.1, "trial": 0, "method": "nug",
         "classification_error": 0.0, "objective": -1.0, "converged": True, "wall_time": 0.1},
        {"noise_level": 0.1, "trial": 1, "method": "nug",
         "classification_error": 0.5, "objective": -2.0, "converged": True, "wall_time": 0.1},
        {"noise_level": 0.1, "trial": 2, "method": "nug",
         "classification_error": float("nan"), "objective": float("nan"),
         "converged": False, "wall_time": 0.1},
        {"noise_level": 0.1, "trial": 0, "method": "bispectrum",
         "classification_error": 0.25, "objective": float("nan"),
         "converged": True, "wall_time": 0.0},
    ]


def test_summarize_drops_nan_and_counts():
    summary = summarize(rows_for_summary())
    assert [(r["noise_level"], r["method"]) for r in summary] == [
        (0.1, "nug"),
        (0.1, "bispectrum"),
    ]
    nug = summary[0]
    assert nug["mean_error"] == pytest.approx(0.25)
    assert nug["n_trials"] == 2
    expected_stderr = np.std([0.0, 0.5], ddof=1) / np.sqrt(2)
    assert nug["stderr"] == pytest.approx(expected_stderr)
    single = summary[1]
    assert single["n_trials"] == 1
    assert single["stderr"] == 0.0


def test_summarize_all_failed_group():
    rows = [rows_for_summary()[2]]
    summary = summarize(rows)
    assert summary[0]["n_trials"] == 0
    assert math.isnan(summary[0]["mean_error"])


def test_csv_writers_roundtrip(tmp_path):
    rows = rows_for_summary()
    results = tmp_path / "results.csv"
    write_results_csv(results, rows)
    lines = results.read_text().splitlines()
    assert lines[0] == AXIS_COMMENT
    assert lines[1] == (
        "noise_level,trial,method,classification_error,objective,converged,wall_time"
    )
    assert len(lines) == 2 + len(rows)
    fields = lines[2].split(",")
    assert float(fields[0]) == 0.1
    assert fields[2] == "nug"
    assert fields[5] == "true"
    assert lines[4].split(",")[5] == "false"

    summary = summarize(rows)
    spath = tmp_path / "summary.csv"
    write_summary_csv(spath, summary)
    slines = spath.read_text().splitlines()
    assert slines[0] == AXIS_COMMENT
    assert slines[1] == "noise_level,method,mean_error,stderr,n_trials"
    assert slines[2].split(",")[4] == "2"


# ---------------------------------------------------------------------------
# sign test
# ---------------------------------------------------------------------------


def test_sign_test_pvalue_frozen():
    assert sign_test_pvalue(9, 0) == 0.001953125
    assert sign_test_pvalue(7, 1) == 0.03515625
    assert sign_test_pvalue(10, 0) == 0.0009765625
    assert sign_test_pvalue(6, 1) == 0.0625
    assert sign_test_pvalue(0, 0) == 1.0
    assert sign_test_pvalue(0, 5) == 1.0
    with pytest.raises(ValueError):
        sign_test_pvalue(-1, 0)


def test_paired_sign_test_drops_ties_and_nan():
    def row(trial, method, err, level=0.1):
        return {"noise_level": level, "trial": trial, "method": method,
                "classification_error": err, "objective": 0.0,
                "converged": True, "wall_time": 0.0}

    rows = [
        row(0, "nug", 0.0), row(0, "bispectrum", 0.5),
        row(1, "nug", 0.5), row(1, "bispectrum", 0.0),
        row(2, "nug", 0.2), row(2, "bispectrum", 0.2),
        row(3, "nug", float("nan")), row(3, "bispectrum", 0.1),
        row(4, "nug", 0.1),
        row(5, "nug", 0.0, level=0.9), row(5, "bispectrum", 1.0, level=0.9),
    ]
    wins, losses, p = paired_sign_test(rows, 0.1, "nug", "bispectrum")
    assert (wins, losses) == (1, 1)
    assert p == 0.75


# ---------------------------------------------------------------------------
# CLI: generate
# ---------------------------------------------------------------------------


def test_cli_generate_roundtrip(tmp_path, capsys):
    out = tmp_path / "data.txt"
    code = main(["generate", "--classes", "2", "--copies", "3", "--bandwidth", "2",
                 "--sigma", "0.1", "--seed", "11", "--output", str(out)])
    assert code == 0
    assert "wrote" in capsys.readouterr().out
    ds = read_dataset(str(out))
    assert ds.n == 6
    assert ds.num_classes == 2
    assert ds.bandwidth == 2


def test_cli_generate_rejects_bad_values(tmp_path, capsys):
    out = str(tmp_path / "x.txt")
    assert main(["generate", "--classes", "1", "--output", out]) == 2
    assert main(["generate", "--copies", "0", "--output", out]) == 2
    assert main(["generate", "--sigma", "-1", "--output", out]) == 2
    assert main(["generate", "--seed", "-3", "--output", out]) == 2
    assert main(["generate", "--classes", "2", "--copies", "2"]) == 2
    err = capsys.readouterr().err
    assert "--output" in err


def test_cli_generate_unwritable_output(tmp_path, capsys):
    code = main(["generate", "--classes", "2", "--copies", "2",
                 "--output", str(tmp_path)])
    assert code == 1
    assert "cannot write" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# CLI: solve and baseline
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def tiny_dataset_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "tiny.txt"
    write_dataset(generate_dataset(2, 2, 1, 0.0, 5), str(path))
    return str(path)


SOLVE_FLAGS = ["--max-iterations", "4000", "--tol-feasibility", "1e-4",
               "--tol-objective", "1e-5"]


def test_cli_solve_reports_and_writes(tiny_dataset_path, tmp_path, capsys):
    out = tmp_path / "report.csv"
    trace = tmp_path / "trace.csv"
    code = main(["solve", tiny_dataset_path, *SOLVE_FLAGS,
                 "--output", str(out), "--trace", str(trace)])
    captured = capsys.readouterr()
    assert code == 0
    assert "classification_error: 0" in captured.out
    assert "converged: true" in captured.out
    header = out.read_text().splitlines()[0]
    assert header == "n,classification_error,alignment_rms,objective,converged,labels,shifts"
    trace_header = trace.read_text().splitlines()[0]
    assert trace_header == "iteration,objective,primal_residual,dual_residual,max_violation,rho"


def test_cli_solve_nonconvergence_exit_code(tiny_dataset_path, tmp_path, capsys):
    out = tmp_path / "report.csv"
    code = main(["solve", tiny_dataset_path, "--max-iterations", "50",
                 "--output", str(out)])
    captured = capsys.readouterr()
    assert code == 3
    assert "converged: false" in captured.out
    assert "not converged" in captured.err
    assert out.exists()


def test_cli_solve_input_errors(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "absent.txt")]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("not a dataset\n")
    assert main(["solve", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "not found" in err
    assert "bad.txt" in err


def test_cli_solve_grid_size_validation(tiny_dataset_path, capsys):
    assert main(["solve", tiny_dataset_path, "--grid-size", "3"]) == 2
    assert "grid-size" in capsys.readouterr().err


def test_cli_baseline(tiny_dataset_path, capsys):
    code = main(["baseline", tiny_dataset_path, "--method", "autocorrelation"])
    captured = capsys.readouterr()
    assert code == 0
    assert "method: autocorrelation" in captured.out
    assert "classification_error:" in captured.out
    with pytest.raises(SystemExit):
        main(["baseline", tiny_dataset_path, "--method", "fft"])


# ---------------------------------------------------------------------------
# CLI: maxkcut
# ---------------------------------------------------------------------------


def write_graph(tmp_path, text, name="graph.txt"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_read_edge_list_accumulates_and_skips(tmp_path):
    path = write_graph(tmp_path, "# comment\n0 1 1.0\n\n1 0 0.5  # tail\n1 2 2.0\n")
    W = read_edge_list(path)
    assert W.shape == (3, 3)
    assert W[0, 1] == 1.5
    assert W[1, 0] == 1.5
    assert W[1, 2] == 2.0
    assert W[0, 0] == 0.0


def test_read_edge_list_rejections(tmp_path, capsys):
    cases = [
        ("0 1\n", "expected 'i j w'"),
        ("0 a 1.0\n", "malformed"),
        ("0 0 1.0\n", "self loop"),
        ("-1 1 1.0\n", "negative vertex"),
        ("0 1 -2.0\n", "weight"),
        ("# only comments\n", "no edges"),
    ]
    for text, fragment in cases:
        path = write_graph(tmp_path, text)
        code = main(["maxkcut", path, "--classes", "2"])
        assert code == 2
        assert fragment in capsys.readouterr().err
    assert main(["maxkcut", str(tmp_path / "none.txt"), "--classes", "2"]) == 2


def test_cli_maxkcut_triangle(tmp_path, capsys):
    path = write_graph(tmp_path, "0 1 1.0\n1 2 1.0\n0 2 1.0\n")
    out = tmp_path / "Y.txt"
    code = main(["maxkcut", path, "--classes", "3", "--output", str(out),
                 "--max-iterations", "4000", "--tol-feasibility", "1e-5"])
    captured = capsys.readouterr()
    assert code == 0
    assert "vertices: 3  classes: 3" in captured.out
    assert "retained intra-cluster weight: 0" in captured.out
    assert "cut weight: 3" in captured.out
    Y = np.loadtxt(str(out))
    assert Y.shape == (3, 3)
    assert np.allclose(np.diag(Y), 1.0)


def test_cli_maxkcut_usage_errors(tmp_path, capsys):
    path = write_graph(tmp_path, "0 1 1.0\n")
    assert main(["maxkcut", path]) == 2
    assert "--classes" in capsys.readouterr().err
    assert main(["maxkcut", path, "--classes", "1"]) == 2
    assert main(["maxkcut", path, "--classes", "5"]) == 2
    assert "exceeds vertex count" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# CLI: benchmark
# ---------------------------------------------------------------------------

BENCH_FLAGS = ["--classes", "2", "--copies", "2", "--bandwidth", "1",
               "--levels", "0.0", "--trials", "1",
               "--max-iterations", "600", "--tol-feasibility", "1e-4",
               "--tol-objective", "1e-5"]


def test_cli_benchmark_writes_tables_and_figure(tmp_path, capsys):
    outdir = tmp_path / "bench"
    code = main(["benchmark", *BENCH_FLAGS, "--methods", "nug,bispectrum",
                 "--outdir", str(outdir)])
    assert code == 0
    assert (outdir / "results.csv").exists()
    assert (outdir / "summary.csv").exists()
    png = (outdir / "benchmark.png").read_bytes()
    assert png[:8] == b"\x89PNG\r\n\x1a\n"
    out = capsys.readouterr().out
    assert "wrote" in out
    lines = (outdir / "results.csv").read_text().splitlines()
    assert len(lines) == 2 + 2  # comment, header, 1 trial x 2 methods


def test_cli_benchmark_no_figure(tmp_path):
    outdir = tmp_path / "bench2"
    code = main(["benchmark", *BENCH_FLAGS, "--methods", "bispectrum",
                 "--no-figure", "--outdir", str(outdir)])
    assert code == 0
    assert (outdir / "results.csv").exists()
    assert not (outdir / "benchmark.png").exists()


def test_cli_benchmark_rejects_unknown_method(tmp_path, capsys):
    code = main(["benchmark", *BENCH_FLAGS, "--methods", "fft",
                 "--outdir", str(tmp_path)])
    assert code == 2
    assert "unknown method" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# CLI: config files and environment
# ---------------------------------------------------------------------------


def test_cli_config_file_merge_and_override(tmp_path):
    outdir = tmp_path / "fromconfig"
    config = tmp_path / "bench.cfg"
    config.write_text(
        "# benchmark settings\n"
        "classes = 2\n"
        "copies = 2\n"
        "bandwidth = 1\n"
        "levels = 0.0\n"
        "trials = 5\n"
        "methods = bispectrum\n"
        "no-figure = true\n"
        f"outdir = {outdir}\n"
    )
    code = main(["benchmark", "--config", str(config), "--trials", "1"])
    assert code == 0
    lines = (outdir / "results.csv").read_text().splitlines()
    assert len(lines) == 3  # the CLI --trials 1 overrode the file's 5
    assert not (outdir / "benchmark.png").exists()


def test_cli_config_file_errors(tmp_path, capsys):
    bad_key = tmp_path / "bad.cfg"
    bad_key.write_text("bogus = 3\n")
    assert main(["benchmark", "--config", str(bad_key)]) == 2
    assert "unknown config key" in capsys.readouterr().err

    no_eq = tmp_path / "noeq.cfg"
    no_eq.write_text("just words\n")
    assert main(["benchmark", "--config", str(no_eq)]) == 2
    assert "expected 'key = value'" in capsys.readouterr().err

    assert main(["benchmark", "--config", str(tmp_path / "absent.cfg")]) == 2
    assert "config file not found" in capsys.readouterr().err

    bad_value = tmp_path / "badval.cfg"
    bad_value.write_text("trials = soon\n")
    assert main(["benchmark", "--config", str(bad_value)]) == 2
    assert "trials" in capsys.readouterr().err


def test_cli_outdir_env_rebases_relative_outputs(tmp_path, monkeypatch):
    base = tmp_path / "rebased"
    base.mkdir()
    monkeypatch.setenv("ALIGNCLUST_OUTDIR", str(base))
    code = main(["generate", "--classes", "2", "--copies", "2",
                 "--output", "data.txt"])
    assert code == 0
    assert (base / "data.txt").exists()
    absolute = tmp_path / "direct.txt"
    code = main(["generate", "--classes", "2", "--copies", "2",
                 "--output", str(absolute)])
    assert code == 0
    assert absolute.exists()


def test_cli_version_and_help(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    assert "alignclust" in out

    with pytest.raises(SystemExit) as info:
        main(["solve", "--help"])
    assert info.value.code == 0
    help_text = capsys.readouterr().out
    assert "exit codes:" in help_text
    assert "3  solver failure" in help_text
