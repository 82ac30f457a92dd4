"""Pairwise alignment penalties and their Fourier coefficient matrices.

The penalty between signals i and j at relative rotation g is the squared
coefficient-domain distance

    f_ij(g) = || shat_i - phases(g) * shat_j ||^2,

which is exactly band-limited to the signal bandwidth K, so it has the finite
expansion f_ij(g) = sum_k fhat_ij(k) e^{i k g}.  Writing
c_k = shat_i(k) * conj(shat_j(k)), the coefficients are

    fhat_ij(0) = ||shat_i||^2 + ||shat_j||^2 - 2 Re(c_0)
    fhat_ij(k) = -(c_k + conj(c_{-k}))          for k != 0.

The closed form is validated against a numeric oracle (DFT of grid samples)
in the test suite before anything downstream trusts it.

Coefficient matrices follow the transpose convention: entry (i, j) of the
frequency-k matrix is fhat_{ji}(k), which makes every matrix Hermitian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signals import Dataset, Signal, frequencies


def pairwise_penalty(s_i: Signal, s_j: Signal, g) -> float:
    """Alignment penalty || shat_i - e^{-ikg} shat_j ||^2 at rotation g.

    Symmetric under swapping the signals and negating g.
    """
    if s_i.bandwidth != s_j.bandwidth:
        raise ValueError(
            f"bandwidth mismatch: {s_i.bandwidth} vs {s_j.bandwidth}"
        )
    phases = np.exp(-1j * frequencies(s_j.bandwidth) * float(g))
    diff = s_i.coeffs - phases * s_j.coeffs
    return float(np.real(np.vdot(diff, diff)))


def penalty_fourier(s_i: Signal, s_j: Signal) -> np.ndarray:
    """Fourier coefficients fhat_ij(k), k in {-K, ..., K}, of the penalty.

    Returns a complex array of length 2K+1 with frequency k at index K + k;
    conjugate symmetry fhat(-k) = conj(fhat(k)) holds exactly.
    """
    if s_i.bandwidth != s_j.bandwidth:
        raise ValueError(
            f"bandwidth mismatch: {s_i.bandwidth} vs {s_j.bandwidth}"
        )
    K = s_i.bandwidth
    c = s_i.coeffs * np.conj(s_j.coeffs)
    out = -(c + np.conj(c[::-1]))
    norms = np.real(np.vdot(s_i.coeffs, s_i.coeffs) + np.vdot(s_j.coeffs, s_j.coeffs))
    out[K] = norms - 2.0 * np.real(c[K])
    return out


@dataclass
class PenaltyCoefficients:
    """The stacked coefficient matrices of all pairwise penalties.

    Attributes
    ----------
    mats : complex array, shape (2K+1, n, n)
        ``mats[K + k][i, j] = fhat_{ji}(k)``.  Each frequency slice is
        Hermitian; the slice at -k is the elementwise conjugate of the one
        at k, and the k = 0 slice is real.
    """

    mats: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.mats, dtype=complex)
        if arr.ndim != 3 or arr.shape[0] % 2 == 0 or arr.shape[1] != arr.shape[2]:
            raise ValueError("expected shape (2K+1, n, n)")
        self.mats = arr

    @property
    def n(self) -> int:
        return self.mats.shape[1]

    @property
    def bandwidth(self) -> int:
        return (self.mats.shape[0] - 1) // 2

    def mat(self, k: int) -> np.ndarray:
        """The n-by-n coefficient matrix at frequency k."""
        K = self.bandwidth
        if not -K <= k <= K:
            raise ValueError(f"frequency {k} outside band [-{K}, {K}]")
        return self.mats[K + k]


def build_coefficient_matrices(dataset: Dataset) -> PenaltyCoefficients:
    """Assemble fhat_{ji}(k) for all pairs of dataset signals.

    Entry (i, j) of the frequency-k matrix is the k-th Fourier coefficient of
    f_{ji}; the symmetry f_ij(g) = f_ji(-g) makes every matrix Hermitian.
    """
    if dataset.n < 2:
        raise ValueError("need at least two signals")
    S = dataset.coefficient_matrix()  # (n, 2K+1)
    K = dataset.bandwidth
    # cross[j, i, k] = shat_j(k) * conj(shat_i(k))
    cross = S[:, None, :] * np.conj(S[None, :, :])
    sq = np.real(np.sum(S * np.conj(S), axis=1))
    mats = np.empty((2 * K + 1, dataset.n, dataset.n), dtype=complex)
    for k in range(-K, K + 1):
        if k == 0:
            mats[K] = sq[:, None] + sq[None, :] - 2.0 * np.real(cross[:, :, K]).T
        else:
            # fhat_{ji}(k) = -(cross[j,i,k] + conj(cross[j,i,-k])), entry (i,j)
            mats[K + k] = -(cross[:, :, K + k] + np.conj(cross[:, :, K - k])).T
    return PenaltyCoefficients(mats)


@dataclass
class ProductCoefficients:
    """Product-group coefficients, represented by one shared scale factor.

    Every (k, m) coefficient matrix equals ``scale * base.mat(k)`` with
    ``scale = 1/M``; no M-fold copies are materialized.
    """

    base: PenaltyCoefficients
    num_classes: int

    def __post_init__(self):
        if self.num_classes < 2:
            raise ValueError("num_classes must be >= 2")

    @property
    def scale(self) -> float:
        return 1.0 / self.num_classes

    def coefficient(self, k: int, m: int) -> np.ndarray:
        """The (k, m) coefficient matrix, materialized on demand."""
        if not 0 <= m < self.num_classes:
            raise ValueError(f"class index {m} outside [0, {self.num_classes})")
        return self.scale * self.base.mat(k)


def product_coefficients(
    coefficients: PenaltyCoefficients, num_classes: int
) -> ProductCoefficients:
    """Lift alignment coefficients to the product group: one 1/M scale."""
    return ProductCoefficients(coefficients, num_classes)


def write_coefficients(coefficients: PenaltyCoefficients, path) -> None:
    """Debug dump in the dataset text style.

    Header line ``n K``; then, for each frequency k from -K to K and each row
    i, one line ``k i re im re im ...`` with the n entries of row i.
    """
    K = coefficients.bandwidth
    lines = [f"{coefficients.n} {K}"]
    for k in range(-K, K + 1):
        mat = coefficients.mat(k)
        for i in range(coefficients.n):
            parts = [str(k), str(i)]
            for value in mat[i]:
                parts.append(repr(float(value.real)))
                parts.append(repr(float(value.imag)))
            lines.append(" ".join(parts))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
