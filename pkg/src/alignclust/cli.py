"""Command-line front end.

Subcommands
-----------
generate    write a synthetic dataset file
solve       run the full SDP pipeline on a dataset and score it
baseline    cluster a dataset by a shift-invariant signature
benchmark   noise sweep comparing methods; CSV tables plus a figure
maxkcut     solve the cut SDP on a weighted graph and round a partition

Exit codes: 0 success; 1 I/O failure writing outputs; 2 usage, parse, or
input-file errors; 3 solver failure or non-convergence (outputs are still
written).  Every command accepts ``--config FILE`` with flat ``key = value``
lines mirroring its long options (dashes as underscores); command-line flags
override config values.  The environment variable ``ALIGNCLUST_OUTDIR``
rebases relative output paths; input paths are never rebased.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from .baseline import baseline_cluster
from .bench import (
    BENCHMARK_SOLVER,
    BenchmarkConfig,
    PRESETS,
    run_benchmark,
    summarize,
    write_results_csv,
    write_summary_csv,
)
from .figures import render_benchmark_figure
from .rounding import (
    SolveReport,
    classification_error,
    cluster_from_C,
    report_csv_header,
    report_csv_row,
)
from .sdp_core import (
    NumericalError,
    SolverConfig,
    maxkcut_sdp,
    partition_retained_weight,
    retained_weight_bound,
)
from .signals import DatasetFormatError, generate_dataset, read_dataset, write_dataset

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_NOCONV = 3

_EXIT_HELP = """\
exit codes:
  0  success
  1  I/O failure writing outputs
  2  usage, parse, or input-file errors
  3  solver failure or non-convergence (outputs still written)

config file (--config): flat 'key = value' lines; keys are this command's
long option names with dashes replaced by underscores; '#' starts a comment;
command-line flags override the file.  ALIGNCLUST_OUTDIR rebases relative
output paths.
"""

_SOLVER_DEFAULTS = SolverConfig()


class _Fail(Exception):
    """Internal control flow: print a message, exit with a code."""

    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_levels(text: str) -> tuple:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ValueError(f"expected comma-separated numbers, got {text!r}")


def _parse_methods(text: str) -> tuple:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _out_path(path):
    """Apply ALIGNCLUST_OUTDIR to a relative output path."""
    if path is None:
        return None
    base = os.environ.get("ALIGNCLUST_OUTDIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _read_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except FileNotFoundError:
        raise _Fail(EXIT_USAGE, f"config file not found: {path}")
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read config file {path}: {exc}")
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _Fail(EXIT_USAGE, f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        entries[key.strip().replace("-", "_")] = value.strip()
    return entries


def _merge_options(ns, spec: dict, command: str) -> dict:
    """Resolve each option as CLI flag, else config entry, else default."""
    cfg = _read_config_file(ns.config) if ns.config else {}
    unknown = sorted(set(cfg) - set(spec))
    if unknown:
        raise _Fail(
            EXIT_USAGE,
            f"unknown config key(s) for {command}: {', '.join(unknown)}",
        )
    merged = {}
    for dest, (convert, default) in spec.items():
        cli_value = getattr(ns, dest)
        if cli_value is not None:
            merged[dest] = cli_value
        elif dest in cfg:
            try:
                merged[dest] = convert(cfg[dest])
            except ValueError as exc:
                raise _Fail(EXIT_USAGE, f"config key {dest}: {exc}")
        else:
            merged[dest] = default
    return merged


def _require(merged: dict, dest: str, command: str):
    if merged[dest] is None:
        raise _Fail(EXIT_USAGE, f"{command}: missing required option --{dest.replace('_', '-')}")
    return merged[dest]


def _load_dataset(path: str):
    try:
        return read_dataset(path)
    except FileNotFoundError:
        raise _Fail(EXIT_USAGE, f"dataset file not found: {path}")
    except DatasetFormatError as exc:
        raise _Fail(EXIT_USAGE, f"{path}: {exc}")
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read {path}: {exc}")


def _solver_config(opts: dict, base: SolverConfig, trace_path=None) -> SolverConfig:
    try:
        return replace(
            base,
            max_iterations=opts["max_iterations"],
            tol_feasibility=opts["tol_feasibility"],
            tol_objective=opts["tol_objective"],
            rho=opts["rho"],
            trace_path=trace_path,
        )
    except ValueError as exc:
        raise _Fail(EXIT_USAGE, str(exc))


def _add_solver_flags(parser):
    parser.add_argument("--max-iterations", type=int, default=None, metavar="N")
    parser.add_argument("--tol-feasibility", type=float, default=None, metavar="TOL")
    parser.add_argument("--tol-objective", type=float, default=None, metavar="TOL")
    parser.add_argument("--rho", type=float, default=None, metavar="RHO")


def _solver_spec(base: SolverConfig) -> dict:
    return {
        "max_iterations": (int, base.max_iterations),
        "tol_feasibility": (float, base.tol_feasibility),
        "tol_objective": (float, base.tol_objective),
        "rho": (float, base.rho),
    }


_SOLVER_SPEC = _solver_spec(_SOLVER_DEFAULTS)


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

_GENERATE_SPEC = {
    "classes": (int, 4),
    "copies": (int, 15),
    "bandwidth": (int, 5),
    "sigma": (float, 0.0),
    "seed": (int, 0),
    "output": (str, None),
}


def _cmd_generate(ns) -> int:
    opts = _merge_options(ns, _GENERATE_SPEC, "generate")
    output = _out_path(_require(opts, "output", "generate"))
    if opts["classes"] < 2:
        raise _Fail(EXIT_USAGE, "--classes must be >= 2")
    if opts["copies"] < 1:
        raise _Fail(EXIT_USAGE, "--copies must be >= 1")
    if opts["bandwidth"] < 0:
        raise _Fail(EXIT_USAGE, "--bandwidth must be >= 0")
    if opts["sigma"] < 0:
        raise _Fail(EXIT_USAGE, "--sigma must be >= 0")
    if opts["seed"] < 0:
        raise _Fail(EXIT_USAGE, "--seed must be >= 0")
    try:
        dataset = generate_dataset(
            opts["classes"], opts["copies"], opts["bandwidth"], opts["sigma"], opts["seed"]
        )
    except ValueError as exc:
        raise _Fail(EXIT_USAGE, str(exc))
    try:
        write_dataset(dataset, output)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot write {output}: {exc}")
    print(
        f"wrote {output}: n={dataset.n} classes={dataset.num_classes} "
        f"bandwidth={dataset.bandwidth} sigma={dataset.noise_sigma:g} seed={dataset.seed}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

_SOLVE_SPEC = {
    "balanced": (_parse_bool, False),
    "grid_size": (int, None),
    "seed": (int, 0),
    "trace": (str, None),
    "output": (str, None),
    **_SOLVER_SPEC,
}


def _print_report(report: SolveReport) -> None:
    print(f"classification_error: {report.classification_error:.6g}")
    for label in sorted(report.alignment_rms):
        print(f"alignment_rms[class {label}]: {report.alignment_rms[label]:.6g}")
    print(f"objective: {report.objective:.10g}")
    print(f"converged: {'true' if report.converged else 'false'}")
    print("labels: " + " ".join(str(v) for v in report.labels))
    print("shifts: " + " ".join(f"{v:.6f}" for v in report.shifts))


def _write_report(path, report: SolveReport) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(",".join(report_csv_header()) + "\n")
            fh.write(",".join(report_csv_row(report)) + "\n")
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot write {path}: {exc}")


def _cmd_solve(ns) -> int:
    opts = _merge_options(ns, _SOLVE_SPEC, "solve")
    dataset = _load_dataset(ns.dataset)
    trace = _out_path(opts["trace"])
    config = _solver_config(opts, _SOLVER_DEFAULTS, trace_path=trace)
    if opts["seed"] < 0:
        raise _Fail(EXIT_USAGE, "--seed must be >= 0")
    if opts["grid_size"] is not None and opts["grid_size"] < 2 * dataset.bandwidth + 2:
        raise _Fail(EXIT_USAGE, "--grid-size below 2*bandwidth + 2")
    try:
        from .sdp_core import NugSdpProblem, solve as solve_sdp
        from .rounding import align_from_R, alignment_error

        problem = NugSdpProblem.from_dataset(
            dataset, balanced=opts["balanced"], grid_size=opts["grid_size"]
        )
        solution = solve_sdp(problem, config)
        labels = cluster_from_C(solution.variables.C, dataset.num_classes, opts["seed"])
        if dataset.bandwidth >= 1:
            shifts = align_from_R(solution.variables.R[0], labels)
        else:
            shifts = np.zeros(dataset.n)
        report = SolveReport(
            labels=labels,
            shifts=shifts,
            classification_error=classification_error(
                labels, dataset.true_labels, dataset.num_classes
            ),
            alignment_rms=alignment_error(
                shifts, dataset.true_shifts, labels, dataset.true_labels
            ),
            objective=solution.objective,
            converged=solution.converged,
        )
    except NumericalError as exc:
        raise _Fail(EXIT_NOCONV, f"solver failed: {exc}")
    _print_report(report)
    if not report.converged:
        worst = max(solution.residuals.values())
        print(f"warning: not converged after {solution.iterations} iterations "
              f"(worst violation {worst:.3g})", file=sys.stderr)
    output = _out_path(opts["output"])
    if output:
        _write_report(output, report)
    return EXIT_OK if report.converged else EXIT_NOCONV


# ---------------------------------------------------------------------------
# baseline
# ---------------------------------------------------------------------------

_BASELINE_SPEC = {
    "method": (str, "bispectrum"),
    "seed": (int, 0),
    "output": (str, None),
}


def _cmd_baseline(ns) -> int:
    opts = _merge_options(ns, _BASELINE_SPEC, "baseline")
    if opts["method"] not in ("bispectrum", "autocorrelation"):
        raise _Fail(EXIT_USAGE, "--method must be bispectrum or autocorrelation")
    if opts["seed"] < 0:
        raise _Fail(EXIT_USAGE, "--seed must be >= 0")
    dataset = _load_dataset(ns.dataset)
    labels = baseline_cluster(dataset, opts["method"], dataset.num_classes, opts["seed"])
    error = classification_error(labels, dataset.true_labels, dataset.num_classes)
    report = SolveReport(
        labels=labels,
        shifts=np.zeros(dataset.n),
        classification_error=error,
        alignment_rms={},
        objective=float("nan"),
        converged=True,
    )
    print(f"method: {opts['method']}")
    print(f"classification_error: {error:.6g}")
    print("labels: " + " ".join(str(v) for v in labels))
    output = _out_path(opts["output"])
    if output:
        _write_report(output, report)
    return EXIT_OK


# ---------------------------------------------------------------------------
# benchmark
# ---------------------------------------------------------------------------

_BENCHMARK_SPEC = {
    "preset": (str, "full"),
    "classes": (int, None),
    "copies": (int, None),
    "bandwidth": (int, None),
    "trials": (int, None),
    "levels": (_parse_levels, None),
    "methods": (_parse_methods, None),
    "seed": (int, None),
    "balanced": (_parse_bool, None),
    "outdir": (str, "."),
    "no_figure": (_parse_bool, False),
    **_solver_spec(BENCHMARK_SOLVER),
}


def _cmd_benchmark(ns) -> int:
    opts = _merge_options(ns, _BENCHMARK_SPEC, "benchmark")
    if opts["preset"] not in PRESETS:
        raise _Fail(
            EXIT_USAGE, f"--preset must be one of {', '.join(sorted(PRESETS))}"
        )
    overrides = dict(PRESETS[opts["preset"]])
    for dest, field in (
        ("classes", "num_classes"),
        ("copies", "copies_per_class"),
        ("bandwidth", "bandwidth"),
        ("trials", "trials"),
        ("levels", "noise_levels"),
        ("methods", "methods"),
        ("seed", "seed"),
        ("balanced", "balanced"),
    ):
        if opts[dest] is not None:
            overrides[field] = opts[dest]
    overrides["solver"] = _solver_config(opts, BENCHMARK_SOLVER)
    try:
        config = BenchmarkConfig(**overrides)
    except ValueError as exc:
        raise _Fail(EXIT_USAGE, str(exc))
    outdir = _out_path(opts["outdir"])
    try:
        os.makedirs(outdir, exist_ok=True)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot create {outdir}: {exc}")
    rows = run_benchmark(config, progress=print)
    summary = summarize(rows)
    results_path = os.path.join(outdir, "results.csv")
    summary_path = os.path.join(outdir, "summary.csv")
    try:
        write_results_csv(results_path, rows)
        write_summary_csv(summary_path, summary)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot write benchmark tables: {exc}")
    written = [results_path, summary_path]
    if not opts["no_figure"]:
        figure_path = os.path.join(outdir, "benchmark.png")
        try:
            render_benchmark_figure(
                summary, figure_path, title=f"preset {opts['preset']}"
            )
        except OSError as exc:
            raise _Fail(EXIT_IO, f"cannot write {figure_path}: {exc}")
        written.append(figure_path)
    print("wrote " + ", ".join(written))
    return EXIT_OK


# ---------------------------------------------------------------------------
# maxkcut
# ---------------------------------------------------------------------------

_MAXKCUT_SPEC = {
    "classes": (int, None),
    "balanced": (_parse_bool, False),
    "seed": (int, 0),
    "output": (str, None),
    **_SOLVER_SPEC,
}


def read_edge_list(path: str) -> np.ndarray:
    """Parse a weighted edge list: one ``i j w`` triple per line, 0-indexed.

    Blank lines and '#' comments are skipped; duplicate edges accumulate
    weight; self loops and negative weights are rejected.
    """
    try:
        with open(path) as fh:
            text = fh.read()
    except FileNotFoundError:
        raise _Fail(EXIT_USAGE, f"graph file not found: {path}")
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read {path}: {exc}")
    edges = []
    max_index = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise _Fail(
                EXIT_USAGE, f"{path}:{lineno}: expected 'i j w', got {len(parts)} fields"
            )
        try:
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2])
        except ValueError:
            raise _Fail(EXIT_USAGE, f"{path}:{lineno}: malformed edge {line!r}")
        if i < 0 or j < 0:
            raise _Fail(EXIT_USAGE, f"{path}:{lineno}: negative vertex index")
        if i == j:
            raise _Fail(EXIT_USAGE, f"{path}:{lineno}: self loop on vertex {i}")
        if not np.isfinite(w) or w < 0:
            raise _Fail(EXIT_USAGE, f"{path}:{lineno}: weight must be finite and >= 0")
        edges.append((i, j, w))
        max_index = max(max_index, i, j)
    if not edges:
        raise _Fail(EXIT_USAGE, f"{path}: no edges")
    n = max_index + 1
    W = np.zeros((n, n))
    for i, j, w in edges:
        W[i, j] += w
        W[j, i] += w
    return W


def _cmd_maxkcut(ns) -> int:
    opts = _merge_options(ns, _MAXKCUT_SPEC, "maxkcut")
    M = _require(opts, "classes", "maxkcut")
    if opts["seed"] < 0:
        raise _Fail(EXIT_USAGE, "--seed must be >= 0")
    W = read_edge_list(ns.graph)
    n = W.shape[0]
    if M < 2:
        raise _Fail(EXIT_USAGE, "--classes must be >= 2")
    if M > n:
        raise _Fail(EXIT_USAGE, f"--classes {M} exceeds vertex count {n}")
    config = _solver_config(opts, _SOLVER_DEFAULTS)
    try:
        solution = maxkcut_sdp(W, M, balanced=opts["balanced"], config=config)
    except NumericalError as exc:
        raise _Fail(EXIT_NOCONV, f"solver failed: {exc}")
    Y = solution.variables.C
    labels = cluster_from_C(Y, M, opts["seed"])
    retained = partition_retained_weight(W, labels)
    total = float(np.triu(W, k=1).sum())
    bound = retained_weight_bound(solution.objective, W, M)
    print(f"vertices: {n}  classes: {M}")
    print(f"sdp objective: {solution.objective:.10g}")
    print(f"retained weight lower bound: {bound:.10g}")
    print("partition: " + " ".join(str(v) for v in labels))
    print(f"retained intra-cluster weight: {retained:.10g}")
    print(f"cut weight: {total - retained:.10g}")
    if not solution.converged:
        worst = max(solution.residuals.values())
        print(f"warning: not converged after {solution.iterations} iterations "
              f"(worst violation {worst:.3g})", file=sys.stderr)
    output = _out_path(opts["output"])
    if output:
        try:
            np.savetxt(output, Y)
        except OSError as exc:
            raise _Fail(EXIT_IO, f"cannot write {output}: {exc}")
    return EXIT_OK if solution.converged else EXIT_NOCONV


# ---------------------------------------------------------------------------
# parser assembly
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    from . import __version__

    parser = argparse.ArgumentParser(
        prog="alignclust",
        description="Joint alignment and classification of band-limited "
        "signals by a product-group SDP relaxation.",
        epilog=_EXIT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, help_text):
        p = sub.add_parser(
            name,
            help=help_text,
            description=help_text,
            epilog=_EXIT_HELP,
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        p.add_argument("--config", default=None, metavar="FILE",
                       help="flat key = value option file")
        return p

    p = add("generate", "Write a synthetic dataset of noisy shifted class copies.")
    p.add_argument("--classes", type=int, default=None, metavar="M")
    p.add_argument("--copies", type=int, default=None, metavar="N")
    p.add_argument("--bandwidth", type=int, default=None, metavar="K")
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", default=None, metavar="FILE")
    p.set_defaults(func=_cmd_generate)

    p = add("solve", "Run the SDP pipeline on a dataset and score the result.")
    p.add_argument("dataset", metavar="DATASET")
    p.add_argument("--balanced", action="store_const", const=True, default=None,
                   help="enforce equal class sizes in the relaxation")
    p.add_argument("--grid-size", type=int, default=None, metavar="L")
    p.add_argument("--seed", type=int, default=None, help="k-means rounding seed")
    p.add_argument("--trace", default=None, metavar="FILE",
                   help="write per-checkpoint solver trace CSV")
    p.add_argument("--output", default=None, metavar="FILE",
                   help="write the report as a one-row CSV")
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_solve)

    p = add("baseline", "Cluster a dataset by a shift-invariant signature.")
    p.add_argument("dataset", metavar="DATASET")
    p.add_argument("--method", choices=("bispectrum", "autocorrelation"), default=None)
    p.add_argument("--seed", type=int, default=None, help="k-means seed")
    p.add_argument("--output", default=None, metavar="FILE")
    p.set_defaults(func=_cmd_baseline)

    p = add("benchmark", "Noise sweep comparing the SDP pipeline to baselines.")
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)
    p.add_argument("--classes", type=int, default=None, metavar="M")
    p.add_argument("--copies", type=int, default=None, metavar="N")
    p.add_argument("--bandwidth", type=int, default=None, metavar="K")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--levels", type=_parse_levels, default=None,
                   help="comma-separated noise sigmas")
    p.add_argument("--methods", type=_parse_methods, default=None,
                   help="comma-separated subset of nug,bispectrum,autocorrelation")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--balanced", dest="balanced", action="store_const",
                       const=True, default=None)
    group.add_argument("--unbalanced", dest="balanced", action="store_const",
                       const=False)
    p.add_argument("--outdir", default=None, metavar="DIR")
    p.add_argument("--no-figure", dest="no_figure", action="store_const",
                   const=True, default=None, help="skip the rendered plot")
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_benchmark)

    p = add("maxkcut", "Solve the cut SDP on an edge-list graph and round it.")
    p.add_argument("graph", metavar="EDGELIST", help="lines of 'i j w', 0-indexed")
    p.add_argument("--classes", type=int, default=None, metavar="M")
    p.add_argument("--balanced", action="store_const", const=True, default=None,
                   help="enforce equal cluster sizes in the relaxation")
    p.add_argument("--seed", type=int, default=None, help="k-means rounding seed")
    p.add_argument("--output", default=None, metavar="FILE",
                   help="write the relaxed matrix Y")
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_maxkcut)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except _Fail as exc:
        print(f"alignclust: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
