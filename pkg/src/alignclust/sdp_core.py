"""Symmetry-reduced SDP relaxation for joint alignment and classification.

Variables
---------
The lifted problem keeps one real symmetric classification block ``C`` (the
shared value of all nontrivial class-frequency blocks) and one complex
Hermitian alignment block ``R_k`` per circle frequency ``k = 1..K`` (the
``-k`` blocks are implicit conjugates, and the trivial block is the all-ones
matrix).  The physical embedding of a labeling/alignment has
``C_ij = 1`` (same class) or ``-1/(M-1)`` (different), and
``R_k(i,j) = e^{ik(g_i - g_j)}`` (same class) or ``0``.

Constraints: every block PSD with unit diagonal, ``C_ij >= -1/(M-1)``,
sampled nonnegativity of the lifted pair function

    q_ij(g_t) = 1 + (M-1) C_ij + M sum_{k>=1} w_k 2 Re(e^{-i k g_t} R_k(i,j))

on a uniform angle grid with Fejer weights ``w_k`` (taken inside the
inequality), and optionally zero row sums of ``C`` (balanced classes).

Objective: ``(1/M) tr(F0 J) + ((M-1)/M) tr(F0 C) + sum_k 2 Re tr(Fk R_k)``
with the penalty coefficient matrices ``Fk``.

Solver
------
Consensus ADMM over four constraint families (PSD blocks; coordinatewise
bounds and unit diagonals; an affine coupling between slack samples and the
matrix entries; balanced row sums), each a cheap exact projection.  Every
family keeps a local copy and a scaled dual; the consensus average absorbs
the linear objective.  The penalty parameter follows residual balancing
(factor 2 whenever the primal/dual residual ratio exceeds 10, checked every
``adapt_every`` iterations).  The iteration is fully deterministic: same
problem and config give a bit-identical iterate sequence.  The PSD projections of distinct blocks touch disjoint state and
could run concurrently; they are computed sequentially here.

Termination: worst true constraint violation below ``tol_feasibility``
together with a relative objective stall below ``tol_objective`` between
consecutive checkpoints (every ``check_every`` iterations), or
``max_iterations``.  Non-convergence still returns the iterate with its
per-family residual report.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np

from .harmonics import fejer_weights, so2_grid
from .penalty import PenaltyCoefficients, build_coefficient_matrices
from .signals import Dataset


class NumericalError(RuntimeError):
    """Linear-algebra failure inside the solver (with diagnostics)."""


@dataclass
class NugSdpProblem:
    """Problem data for the reduced SDP.

    Attributes
    ----------
    coefficients : PenaltyCoefficients
        Pairwise penalty coefficient matrices (frequency 0 block real).
    num_classes : int
        M >= 2 classes.
    weights : array, shape (2K+1,)
        Kernel weights indexed like the coefficient matrices; Fejer by
        default.
    grid_size : int
        Number of nonnegativity sample angles, at least 2K+2.
    balanced : bool
        Enforce zero row sums of C (equal class sizes).
    """

    coefficients: PenaltyCoefficients
    num_classes: int
    weights: np.ndarray
    grid_size: int
    balanced: bool = False

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        K = self.coefficients.bandwidth
        if self.num_classes < 2:
            raise ValueError("num_classes must be >= 2")
        if self.weights.shape != (2 * K + 1,):
            raise ValueError("weights must have one entry per frequency")
        if self.grid_size < 2 * K + 2:
            raise ValueError(
                f"grid_size {self.grid_size} below 2K+2 = {2 * K + 2}"
            )
        mats = self.coefficients.mats
        herm_dev = float(np.max(np.abs(mats - np.conj(np.swapaxes(mats, 1, 2)))))
        if herm_dev > 1e-8 * (1.0 + float(np.max(np.abs(mats)))):
            raise ValueError("coefficient matrices must be Hermitian")

    @classmethod
    def from_dataset(
        cls,
        dataset: Dataset,
        balanced: bool = False,
        grid_size: int | None = None,
    ) -> "NugSdpProblem":
        coefficients = build_coefficient_matrices(dataset)
        K = coefficients.bandwidth
        if grid_size is None:
            grid_size = max(2 * K + 2, 16)
        return cls(
            coefficients,
            dataset.num_classes,
            fejer_weights(K),
            grid_size,
            balanced,
        )

    @property
    def n(self) -> int:
        return self.coefficients.n

    @property
    def bandwidth(self) -> int:
        return self.coefficients.bandwidth

    @property
    def lower_bound(self) -> float:
        """Elementwise lower bound -1/(M-1) on the off-diagonal of C."""
        return -1.0 / (self.num_classes - 1)


@dataclass
class NugSdpVariables:
    """The lifted variables: C real symmetric, R[k-1] Hermitian for k=1..K."""

    C: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        self.C = np.asarray(self.C, dtype=float)
        self.R = np.asarray(self.R, dtype=complex)
        n = self.C.shape[0]
        if self.C.ndim != 2 or self.C.shape != (n, n):
            raise ValueError("C must be square")
        if self.R.ndim != 3 or self.R.shape[1:] != (n, n):
            raise ValueError("R must have shape (K, n, n)")

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @property
    def bandwidth(self) -> int:
        return self.R.shape[0]


@dataclass
class SolverConfig:
    """Splitting-solver settings.

    ``tol_feasibility`` bounds the worst true constraint violation and
    ``tol_objective`` the relative objective change between checkpoints.
    ``relaxation`` is the over-relaxation factor applied to the local
    projections before the consensus average (1 disables it).  ``seed`` is
    reserved for randomized components; the splitting scheme itself is
    deterministic and never draws from it.
    """

    max_iterations: int = 20000
    tol_feasibility: float = 1e-6
    tol_objective: float = 1e-7
    check_every: int = 25
    rho: float = 1.0
    relaxation: float = 1.7
    adapt_ratio: float = 10.0
    adapt_factor: float = 2.0
    adapt_every: int = 50
    seed: int = 0
    trace_path: str | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        for name in ("tol_feasibility", "tol_objective", "rho"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.check_every < 1:
            raise ValueError("check_every must be >= 1")
        if not 0.0 < self.relaxation < 2.0:
            raise ValueError("relaxation must lie in (0, 2)")
        if self.adapt_ratio <= 1 or self.adapt_factor <= 1:
            raise ValueError("adaptation parameters must exceed 1")
        if self.adapt_every < 1:
            raise ValueError("adapt_every must be >= 1")


@dataclass
class NugSdpSolution:
    """Solver output; residuals are reported even on non-convergence."""

    variables: NugSdpVariables
    objective: float
    residuals: dict
    iterations: int
    converged: bool
    trace: list = field(default_factory=list, repr=False)


TRACE_COLUMNS = [
    "iteration",
    "objective",
    "primal_residual",
    "dual_residual",
    "max_violation",
    "rho",
]


def reduced_objective(variables: NugSdpVariables, problem: NugSdpProblem) -> float:
    """Objective of the reduced SDP at the given variables.

    Equals ``(1/M) tr(F0 J) + ((M-1)/M) tr(F0 C) + sum_{k>=1} 2 Re tr(Fk Rk)``,
    which the test suite validates against the explicit double sum over all
    (frequency, class) pairs on symmetry-expanded variables.
    """
    if variables.n != problem.n or variables.bandwidth != problem.bandwidth:
        raise ValueError("variable shapes do not match the problem")
    M = problem.num_classes
    F0 = problem.coefficients.mat(0).real
    total = F0.sum() / M + (M - 1) / M * float(np.sum(F0 * variables.C))
    for k in range(1, problem.bandwidth + 1):
        Fk = problem.coefficients.mat(k)
        total += 2.0 * float(np.real(np.sum(Fk * variables.R[k - 1].T)))
    return total


def project_psd(H) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm: clip negative eigenvalues.

    The input is symmetrized (Hermitian part) first; a real input returns a
    real array.  Eigensolver failures raise NumericalError.
    """
    H = np.asarray(H)
    real_in = np.isrealobj(H)
    A = (H + H.conj().T) / 2.0
    if not np.all(np.isfinite(A)):
        raise NumericalError("non-finite entries in PSD projection input")
    try:
        vals, vecs = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    vals = np.maximum(vals, 0.0)
    out = (vecs * vals) @ vecs.conj().T
    out = (out + out.conj().T) / 2.0
    return out.real if real_in else out


@dataclass
class SampledNonnegativity:
    """Evaluator of the collapsed nonnegativity rows q_ij(g_t).

    ``design`` has one row per grid angle with columns
    ``[(M-1), 2M w_k cos(k g_t) ..., 2M w_k sin(k g_t) ...]`` acting on the
    entry vector ``(C_ij, Re R_k(i,j) ..., Im R_k(i,j) ...)``; the evaluated
    value is ``1 + design @ entries``.
    """

    angles: np.ndarray
    design: np.ndarray
    num_classes: int

    def evaluate(self, variables: NugSdpVariables) -> np.ndarray:
        """All sample values, shape (grid, n, n)."""
        K = variables.bandwidth
        n = variables.n
        if self.design.shape[1] != 1 + 2 * K:
            raise ValueError("variable bandwidth does not match this evaluator")
        rows = np.empty((1 + 2 * K, n * n))
        rows[0] = variables.C.ravel()
        if K:
            rows[1 : K + 1] = variables.R.real.reshape(K, -1)
            rows[K + 1 :] = variables.R.imag.reshape(K, -1)
        return (1.0 + self.design @ rows).reshape(-1, n, n)

    def min_value(self, variables: NugSdpVariables) -> float:
        return float(self.evaluate(variables).min())


def nonnegativity_rows(problem: NugSdpProblem) -> SampledNonnegativity:
    """Build the sampled nonnegativity evaluator for a problem.

    The collapse of the full (frequency, class) sum at the identity class
    element to this single-angle form is validated against the explicit
    double sum in the test suite.
    """
    K = problem.bandwidth
    M = problem.num_classes
    angles = so2_grid(problem.grid_size)
    cols = [np.full(problem.grid_size, M - 1.0)]
    for k in range(1, K + 1):
        w = problem.weights[K + k]
        cols.append(2.0 * M * w * np.cos(k * angles))
    for k in range(1, K + 1):
        w = problem.weights[K + k]
        cols.append(2.0 * M * w * np.sin(k * angles))
    return SampledNonnegativity(angles, np.column_stack(cols), M)


def certify_physical(labels, shifts, problem: NugSdpProblem) -> NugSdpVariables:
    """Lift a known labeling/alignment to feasible SDP variables.

    Same-class entries take C = 1 and R_k = e^{ik(g_i - g_j)}; different-class
    entries take C = -1/(M-1) and R_k = 0.  The output satisfies every solver
    constraint (including balanced row sums when classes are balanced), which
    makes it both a feasibility certificate and an objective upper bound.
    """
    labels = np.asarray(labels, dtype=int)
    shifts = np.asarray(shifts, dtype=float)
    n = labels.size
    if shifts.shape != (n,):
        raise ValueError("labels and shifts must have equal length")
    if n != problem.n:
        raise ValueError("instance size does not match the problem")
    if labels.min() < 0 or labels.max() >= problem.num_classes:
        raise ValueError("labels outside [0, num_classes)")
    same = labels[:, None] == labels[None, :]
    C = np.where(same, 1.0, problem.lower_bound)
    K = problem.bandwidth
    delta = shifts[:, None] - shifts[None, :]
    R = np.empty((K, n, n), dtype=complex)
    for k in range(1, K + 1):
        R[k - 1] = np.where(same, np.exp(1j * k * delta), 0.0)
    return NugSdpVariables(C, R)


def redundancy_audit(
    variables: NugSdpVariables, problem: NugSdpProblem, grid_size: int = 128
) -> float:
    """Worst value of the weighted lifted sum at non-identity class elements.

    Evaluates the explicit (frequency, class) double sum at every grid angle
    and every class element a != e; for variables satisfying the solver's
    constraint set the result collapses to 1 - C_ij and is nonnegative, so
    this audit should never fall below about -1e-9 after a successful solve.
    """
    K = problem.bandwidth
    M = problem.num_classes
    angles = so2_grid(grid_size)
    n = variables.n
    J = np.ones((n, n))
    worst = np.inf
    for a in range(1, M):
        total = np.zeros((grid_size, n, n), dtype=complex)
        for k in range(-K, K + 1):
            if k == 0:
                block_sum = J + 0j
                for m in range(1, M):
                    block_sum = block_sum + np.exp(-2j * np.pi * a * m / M) * variables.C
                total += problem.weights[K] * block_sum[None, :, :]
                continue
            block = variables.R[k - 1] if k > 0 else np.conj(variables.R[-k - 1])
            eta_sum = sum(np.exp(-2j * np.pi * a * m / M) for m in range(M))
            phase = np.exp(-1j * k * angles)
            total += problem.weights[K + k] * eta_sum * phase[:, None, None] * block[None, :, :]
        worst = min(worst, float(total.real.min()))
    return worst


# ---------------------------------------------------------------------------
# Consensus ADMM engine (shared by solve and maxkcut_sdp)
# ---------------------------------------------------------------------------


class _State:
    """One consensus iterate: C (real), R (complex, maybe empty), S (slacks)."""

    __slots__ = ("C", "R", "S")

    def __init__(self, C, R, S):
        self.C = C
        self.R = R
        self.S = S

    def copy(self) -> "_State":
        return _State(
            self.C.copy(), self.R.copy(), None if self.S is None else self.S.copy()
        )

    def __sub__(self, other: "_State") -> "_State":
        return _State(
            self.C - other.C,
            self.R - other.R,
            None if self.S is None else self.S - other.S,
        )

    def __add__(self, other: "_State") -> "_State":
        return _State(
            self.C + other.C,
            self.R + other.R,
            None if self.S is None else self.S + other.S,
        )

    def scale_inplace(self, a: float) -> None:
        self.C *= a
        self.R *= a
        if self.S is not None:
            self.S *= a

    def add_inplace(self, other: "_State") -> None:
        self.C += other.C
        self.R += other.R
        if self.S is not None:
            self.S += other.S

    def norm2(self) -> float:
        total = float(np.sum(self.C * self.C)) + float(
            np.sum(self.R.real**2 + self.R.imag**2)
        )
        if self.S is not None:
            total += float(np.sum(self.S * self.S))
        return total


def _offdiag_min(C: np.ndarray) -> float:
    masked = C + np.diag(np.full(C.shape[0], np.inf))
    return float(masked.min())


class _Engine:
    """Consensus ADMM over exact projection families with a linear objective."""

    def __init__(
        self,
        n: int,
        bandwidth: int,
        lower_bound: float,
        grad_C: np.ndarray,
        grad_R: np.ndarray,
        constant: float,
        evaluator: SampledNonnegativity | None,
        balanced: bool,
        config: SolverConfig,
    ):
        self.n = n
        self.K = bandwidth
        self.lb = lower_bound
        self.grad_C = grad_C
        self.grad_R = grad_R
        self.constant = constant
        self.evaluator = evaluator
        self.balanced = balanced
        self.config = config
        self.use_slack = evaluator is not None and bandwidth >= 1
        if self.use_slack:
            A = evaluator.design
            # Internal slacks store q / gamma, with gamma the RMS tie-row
            # norm, so the tie subspace is not tilted against the unit-sized
            # matrix entries; reported violations always use physical q.
            self.gamma = float(np.sqrt(np.mean(np.sum(A * A, axis=1))))
            self.A = A / self.gamma
            self.offset = 1.0 / self.gamma
            self.P = np.linalg.inv(np.eye(A.shape[1]) + self.A.T @ self.A)
        self.families = ["psd", "coord"]
        if self.use_slack:
            self.families.append("slack")
        if balanced:
            self.families.append("balanced")

    # -- projections -------------------------------------------------------

    def _project(self, name: str, state: _State) -> _State:
        if name == "psd":
            C = project_psd(state.C)
            R = np.empty_like(state.R)
            for k in range(self.K):
                R[k] = project_psd(state.R[k])
            S = None if state.S is None else state.S.copy()
            return _State(C, R, S)
        if name == "coord":
            C = np.maximum(state.C, self.lb)
            np.fill_diagonal(C, 1.0)
            R = state.R.copy()
            for k in range(self.K):
                np.fill_diagonal(R[k], 1.0 + 0.0j)
            S = None if state.S is None else np.maximum(state.S, 0.0)
            return _State(C, R, S)
        if name == "slack":
            K, n = self.K, self.n
            rows = np.empty((1 + 2 * K, n * n))
            rows[0] = state.C.ravel()
            rows[1 : K + 1] = state.R.real.reshape(K, -1)
            rows[K + 1 :] = state.R.imag.reshape(K, -1)
            shifted = rows + self.A.T @ (state.S.reshape(len(self.A), -1) - self.offset)
            new_rows = self.P @ shifted
            S = (self.offset + self.A @ new_rows).reshape(state.S.shape)
            C = new_rows[0].reshape(n, n)
            R = (new_rows[1 : K + 1] + 1j * new_rows[K + 1 :]).reshape(K, n, n)
            return _State(C, R.astype(complex), S)
        if name == "balanced":
            r = state.C.sum(axis=1)
            mu = -2.0 * r / self.n + r.sum() / self.n**2
            C = state.C + (mu[:, None] + mu[None, :]) / 2.0
            S = None if state.S is None else state.S.copy()
            return _State(C, state.R.copy(), S)
        raise AssertionError(name)

    # -- diagnostics ---------------------------------------------------------

    def violations(self, z: _State) -> dict:
        out = {}
        blocks = [z.C] + [z.R[k] for k in range(self.K)]
        min_eig = min(float(np.linalg.eigvalsh((b + b.conj().T) / 2.0)[0]) for b in blocks)
        out["psd"] = max(0.0, -min_eig)
        diag_dev = max(float(np.max(np.abs(np.diag(b) - 1.0))) for b in blocks)
        out["diagonal"] = diag_dev
        out["box"] = max(0.0, self.lb - _offdiag_min(z.C))
        if self.use_slack:
            q = self.evaluator.evaluate(NugSdpVariables(z.C, z.R))
            out["nonnegativity"] = max(0.0, -float(q.min()))
        if self.balanced:
            out["balanced"] = float(np.max(np.abs(z.C.sum(axis=1))))
        return out

    def objective(self, z: _State) -> float:
        total = self.constant + float(np.sum(self.grad_C * z.C))
        for k in range(self.K):
            total += float(np.real(np.sum(np.conj(self.grad_R[k]) * z.R[k])))
        return total

    # -- main loop -----------------------------------------------------------

    def run(self):
        cfg = self.config
        n, K = self.n, self.K
        C0 = np.eye(n)
        R0 = np.tile(np.eye(n, dtype=complex), (K, 1, 1))
        if self.use_slack:
            S0 = self.evaluator.evaluate(NugSdpVariables(C0, R0)) / self.gamma
        else:
            S0 = None
        z = _State(C0, R0, S0)
        locals_ = {name: z.copy() for name in self.families}
        duals = {name: z.copy() for name in self.families}
        for u in duals.values():
            u.scale_inplace(0.0)

        rho = cfg.rho
        nf = len(self.families)
        trace = []
        prev_obj = None
        converged = False
        iteration = 0
        primal = dual = 0.0

        alpha = cfg.relaxation
        for iteration in range(1, cfg.max_iterations + 1):
            for name in self.families:
                v = self._project(name, z - duals[name])
                if alpha != 1.0:
                    # Over-relaxation: blend the projection with the previous
                    # consensus point before averaging.
                    v.scale_inplace(alpha)
                    blend = z.copy()
                    blend.scale_inplace(1.0 - alpha)
                    v.add_inplace(blend)
                locals_[name] = v

            z_old = z
            mean = None
            for name in self.families:
                term = locals_[name] + duals[name]
                if mean is None:
                    mean = term
                else:
                    mean.add_inplace(term)
            mean.scale_inplace(1.0 / nf)
            step = 1.0 / (rho * nf)
            mean.C -= step * self.grad_C
            if K:
                mean.R -= step * self.grad_R
            # Cheap re-symmetrization kills floating-point drift; every
            # projection family preserves these structures exactly in exact
            # arithmetic.
            mean.C = (mean.C + mean.C.T) / 2.0
            for k in range(K):
                mean.R[k] = (mean.R[k] + mean.R[k].conj().T) / 2.0
            z = mean

            primal2 = 0.0
            for name in self.families:
                diff = locals_[name] - z
                primal2 += diff.norm2()
                duals[name].add_inplace(diff)
            primal = float(np.sqrt(primal2))
            dual = rho * float(np.sqrt(nf * (z - z_old).norm2()))

            # Residual balancing, checked only every adapt_every iterations:
            # per-iteration rescaling can lock small instances into a limit
            # cycle where each rho kick regenerates the residual it reacts to.
            if iteration % cfg.adapt_every == 0:
                if primal > cfg.adapt_ratio * dual and rho < 1e6:
                    rho *= cfg.adapt_factor
                    for u in duals.values():
                        u.scale_inplace(1.0 / cfg.adapt_factor)
                elif dual > cfg.adapt_ratio * primal and rho > 1e-6:
                    rho /= cfg.adapt_factor
                    for u in duals.values():
                        u.scale_inplace(cfg.adapt_factor)

            if iteration % cfg.check_every == 0 or iteration == cfg.max_iterations:
                viols = self.violations(z)
                obj = self.objective(z)
                worst = max(viols.values())
                trace.append((iteration, obj, primal, dual, worst, rho))
                if (
                    prev_obj is not None
                    and worst <= cfg.tol_feasibility
                    and abs(obj - prev_obj) <= cfg.tol_objective * max(1.0, abs(obj))
                ):
                    converged = True
                    break
                prev_obj = obj

        viols = self.violations(z)
        return z, self.objective(z), viols, iteration, converged, trace


def _write_trace(path: str, trace: list) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for row in trace:
            writer.writerow(
                [str(row[0])] + [repr(float(v)) for v in row[1:5]] + [repr(float(row[5]))]
            )


def solve(problem: NugSdpProblem, config: SolverConfig | None = None) -> NugSdpSolution:
    """Solve the reduced SDP by consensus ADMM.

    Returns an approximately optimal solution; on non-convergence the last
    iterate is returned with ``converged=False`` and the per-family residual
    report.  Deterministic given (problem, config).
    """
    if config is None:
        config = SolverConfig()
    M = problem.num_classes
    K = problem.bandwidth
    F0 = problem.coefficients.mat(0).real
    grad_C = (M - 1) / M * F0
    grad_R = np.empty((K, problem.n, problem.n), dtype=complex)
    for k in range(1, K + 1):
        grad_R[k - 1] = 2.0 * problem.coefficients.mat(k)
    evaluator = nonnegativity_rows(problem) if K >= 1 else None
    engine = _Engine(
        problem.n,
        K,
        problem.lower_bound,
        grad_C,
        grad_R,
        F0.sum() / M,
        evaluator,
        problem.balanced,
        config,
    )
    z, objective, residuals, iterations, converged, trace = engine.run()
    if config.trace_path:
        _write_trace(config.trace_path, trace)
    variables = NugSdpVariables(z.C, z.R)
    return NugSdpSolution(variables, objective, residuals, iterations, converged, trace)


def maxkcut_sdp(
    W,
    num_classes: int,
    balanced: bool = False,
    config: SolverConfig | None = None,
) -> NugSdpSolution:
    """The max-k-cut SDP relaxation: minimize tr(W Y).

    Constraints: Y PSD, unit diagonal, entries >= -1/(M-1), optional zero row
    sums.  This is the alignment problem with no alignment blocks, solved by
    the same splitting engine; the relaxed matrix is ``solution.variables.C``
    and ``solution.objective`` is tr(W Y).
    """
    if config is None:
        config = SolverConfig()
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    if W.ndim != 2 or W.shape != (n, n):
        raise ValueError("W must be square")
    if not np.allclose(W, W.T, atol=1e-12, rtol=0.0):
        raise ValueError("W must be symmetric")
    if np.any(np.abs(np.diag(W)) > 0):
        raise ValueError("W must have zero diagonal")
    if np.any(W < 0):
        raise ValueError("W must be elementwise nonnegative")
    if num_classes < 2:
        raise ValueError("num_classes must be >= 2")
    W = (W + W.T) / 2.0
    engine = _Engine(
        n,
        0,
        -1.0 / (num_classes - 1),
        W,
        np.zeros((0, n, n), dtype=complex),
        0.0,
        None,
        balanced,
        config,
    )
    z, objective, residuals, iterations, converged, trace = engine.run()
    if config.trace_path:
        _write_trace(config.trace_path, trace)
    variables = NugSdpVariables(z.C, z.R)
    return NugSdpSolution(variables, objective, residuals, iterations, converged, trace)


def partition_retained_weight(W, labels) -> float:
    """Total weight kept inside clusters: sum over same-label pairs i < j."""
    W = np.asarray(W, dtype=float)
    labels = np.asarray(labels, dtype=int)
    same = labels[:, None] == labels[None, :]
    return float(np.sum(np.triu(W * same, k=1)))


def retained_weight_bound(objective: float, W, num_classes: int) -> float:
    """Map the SDP objective tr(W Y) to a lower bound on retained weight.

    For the physical Y of any labeling, tr(W Y) and the labeling's retained
    intra-cluster weight are related linearly; applying the same map to the
    SDP minimum gives a bound no feasible partition can beat.
    """
    W = np.asarray(W, dtype=float)
    M = num_classes
    return ((M - 1) * objective + float(W.sum())) / (2.0 * M)


def solver_config_with(config: SolverConfig | None, **overrides) -> SolverConfig:
    """A copy of ``config`` (or defaults) with the given fields replaced."""
    base = SolverConfig() if config is None else config
    return replace(base, **overrides)
