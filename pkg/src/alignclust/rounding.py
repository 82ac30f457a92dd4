"""Rounding of lifted SDP variables to labels and rotations, plus scoring.

Labels come from k-means over the columns of the classification block C;
rotations come from the principal eigenvector phases of each cluster's
sub-block of the first alignment block R_1 (standard phase synchronization).
Scores are the permutation-minimized misclassification rate and per-cluster
RMS angular deviation after removing each cluster's global offset.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .harmonics import TWO_PI, reduce_angle


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            idx = int(np.argmax(d2))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[c] = points[idx]
        d2 = np.minimum(d2, np.sum((points - centers[c]) ** 2, axis=1))
    return centers


def _lloyd(points: np.ndarray, centers: np.ndarray, max_iter: int):
    n, k = points.shape[0], centers.shape[0]
    labels = np.full(n, -1)
    for _ in range(max_iter):
        d2 = (
            np.sum(points**2, axis=1)[:, None]
            - 2.0 * points @ centers.T
            + np.sum(centers**2, axis=1)[None, :]
        )
        new_labels = np.argmin(d2, axis=1)
        # Re-seed empty clusters at the point farthest from its center.
        for c in range(k):
            if not np.any(new_labels == c):
                current = d2[np.arange(n), new_labels]
                idx = int(np.argmax(current))
                centers[c] = points[idx]
                d2[:, c] = np.sum((points - centers[c]) ** 2, axis=1)
                new_labels = np.argmin(d2, axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            members = points[labels == c]
            if members.size:
                centers[c] = members.mean(axis=0)
    d2 = np.sum((points - centers[labels]) ** 2, axis=1)
    return labels, float(d2.sum())


def kmeans(
    points,
    n_clusters: int,
    rng_seed: int,
    restarts: int = 10,
    max_iter: int = 300,
) -> np.ndarray:
    """Deterministic k-means labels: k-means++ init, best of ``restarts`` runs.

    Restart r uses the stream ``SeedSequence([rng_seed, r])``; the lowest
    inertia wins, earliest restart on ties.  Distance ties in assignment
    resolve to the lowest cluster index.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError("points must be a 2-D array")
    if n_clusters < 1 or n_clusters > points.shape[0]:
        raise ValueError("need 1 <= n_clusters <= number of points")
    rng_seed = int(rng_seed)
    if rng_seed < 0:
        raise ValueError("rng seed must be >= 0")
    best_labels, best_inertia = None, np.inf
    for r in range(restarts):
        rng = np.random.default_rng(np.random.SeedSequence([rng_seed, r]))
        centers = _kmeans_pp_init(points, n_clusters, rng)
        labels, inertia = _lloyd(points, centers.copy(), max_iter)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return best_labels


def cluster_from_C(C, num_classes: int, rng_seed: int) -> np.ndarray:
    """k-means labels over the columns of the classification block C."""
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError("C must be square")
    return kmeans(C.T.copy(), num_classes, rng_seed)


def align_from_R(R1, labels) -> np.ndarray:
    """Per-signal rotations from the first alignment block.

    For each cluster, the principal eigenvector v of the cluster's sub-block
    of R_1 carries the phases: shift_i = arg(v_i), referenced so the first
    cluster member gets shift 0.  Each cluster's global rotation is
    unidentifiable, so only relative shifts within a cluster are meaningful.
    Size-one clusters get shift 0.
    """
    R1 = np.asarray(R1)
    labels = np.asarray(labels, dtype=int)
    n = labels.size
    if R1.shape != (n, n):
        raise ValueError("R1 shape must match label count")
    shifts = np.zeros(n)
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if idx.size == 1:
            continue
        block = R1[np.ix_(idx, idx)]
        vals, vecs = np.linalg.eigh((block + block.conj().T) / 2.0)
        v = vecs[:, -1]
        phases = np.angle(v)
        shifts[idx] = reduce_angle(phases - phases[0])
    return shifts


def _best_permutation(labels, truth, num_classes: int) -> np.ndarray:
    """Permutation p (class relabeling) minimizing mismatches of p[labels] vs truth."""
    labels = np.asarray(labels, dtype=int)
    truth = np.asarray(truth, dtype=int)
    confusion = np.zeros((num_classes, num_classes), dtype=int)
    np.add.at(confusion, (labels, truth), 1)
    if num_classes <= 8:
        best, best_hits = None, -1
        for perm in itertools.permutations(range(num_classes)):
            hits = sum(confusion[m, perm[m]] for m in range(num_classes))
            if hits > best_hits:
                best, best_hits = perm, hits
        return np.array(best)
    rows, cols = linear_sum_assignment(-confusion)
    perm = np.empty(num_classes, dtype=int)
    perm[rows] = cols
    return perm


def classification_error(labels, truth, num_classes: int) -> float:
    """Misclassified fraction, minimized over all relabelings of the classes.

    Exact permutation enumeration for num_classes <= 8; the equivalent
    optimal-assignment formulation above that.
    """
    labels = np.asarray(labels, dtype=int)
    truth = np.asarray(truth, dtype=int)
    if labels.shape != truth.shape:
        raise ValueError("label vectors must have equal length")
    for name, arr in (("labels", labels), ("truth", truth)):
        if arr.min() < 0 or arr.max() >= num_classes:
            raise ValueError(f"{name} outside [0, {num_classes})")
    perm = _best_permutation(labels, truth, num_classes)
    return float(np.mean(perm[labels] != truth))


def _wrap_pi(x: np.ndarray) -> np.ndarray:
    """Wrap to the principal interval (-pi, pi]."""
    return np.pi - (np.pi - np.asarray(x)) % TWO_PI


def alignment_error(shifts, true_shifts, labels, truth_labels) -> dict:
    """Per-cluster RMS angular deviation of recovered vs true shifts.

    Only correctly classified signals (after the optimal label permutation)
    contribute; each true class's circular-mean offset is removed first.
    Classes with no correctly classified member are absent from the result.
    """
    shifts = np.asarray(shifts, dtype=float)
    true_shifts = np.asarray(true_shifts, dtype=float)
    labels = np.asarray(labels, dtype=int)
    truth_labels = np.asarray(truth_labels, dtype=int)
    num_classes = int(max(labels.max(), truth_labels.max())) + 1
    perm = _best_permutation(labels, truth_labels, num_classes)
    correct = perm[labels] == truth_labels
    diffs = _wrap_pi(shifts - true_shifts)
    out = {}
    for m in range(num_classes):
        mask = correct & (truth_labels == m)
        if not np.any(mask):
            continue
        d = diffs[mask]
        mean_offset = float(np.angle(np.sum(np.exp(1j * d))))
        dev = _wrap_pi(d - mean_offset)
        out[m] = float(np.sqrt(np.mean(dev**2)))
    return out


@dataclass
class SolveReport:
    """End-to-end result of one solve-and-round run."""

    labels: np.ndarray
    shifts: np.ndarray
    classification_error: float
    alignment_rms: dict
    objective: float
    converged: bool


REPORT_COLUMNS = [
    "n",
    "classification_error",
    "alignment_rms",
    "objective",
    "converged",
    "labels",
    "shifts",
]


def report_csv_header() -> list:
    """Column names of the one-row SolveReport CSV serialization.

    ``alignment_rms`` holds semicolon-joined ``class:rms`` pairs; ``labels``
    and ``shifts`` are semicolon-joined per-signal values.
    """
    return list(REPORT_COLUMNS)


def report_csv_row(report: SolveReport) -> list:
    rms = ";".join(f"{m}:{report.alignment_rms[m]!r}" for m in sorted(report.alignment_rms))
    return [
        str(len(report.labels)),
        repr(float(report.classification_error)),
        rms,
        repr(float(report.objective)),
        str(bool(report.converged)),
        ";".join(str(int(v)) for v in report.labels),
        ";".join(repr(float(v)) for v in report.shifts),
    ]
