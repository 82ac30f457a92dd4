"""Shift-invariant signature baselines: autocorrelation and bispectrum.

Both signatures are exactly invariant to rotations of the signal, so k-means
over them classifies without solving any alignment problem.  The
autocorrelation |shat(k)|^2 is blind to relative phases between frequencies
(signals with equal magnitude spectra collide); the bispectrum
B(k1, k2) = shat(k1) shat(k2) conj(shat(k1+k2)) retains phase information and
is the headline baseline.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .rounding import kmeans
from .signals import Dataset, Signal


class SignatureKind(enum.Enum):
    BISPECTRUM = "bispectrum"
    AUTOCORRELATION = "autocorrelation"


@dataclass
class Signature:
    """A shift-invariant feature vector for one signal."""

    values: np.ndarray
    kind: SignatureKind


def autocorrelation_signature(s: Signal) -> Signature:
    """values[K + k] = |shat(k)|^2 for k in {-K, ..., K}."""
    return Signature(np.abs(s.coeffs) ** 2, SignatureKind.AUTOCORRELATION)


def bispectrum_indices(bandwidth: int) -> list:
    """Lexicographic (k1, k2) pairs with k1, k2, k1+k2 all inside the band."""
    K = bandwidth
    return [
        (k1, k2)
        for k1 in range(-K, K + 1)
        for k2 in range(-K, K + 1)
        if -K <= k1 + k2 <= K
    ]


def bispectrum_signature(s: Signal) -> Signature:
    """B(k1, k2) = shat(k1) shat(k2) conj(shat(k1+k2)) over in-band pairs.

    The phase factors e^{-i k1 g} e^{-i k2 g} e^{+i (k1+k2) g} of a rotated
    signal cancel, so the signature is shift-invariant.
    """
    K = s.bandwidth
    c = s.coeffs
    values = np.array(
        [c[K + k1] * c[K + k2] * np.conj(c[K + k1 + k2]) for k1, k2 in bispectrum_indices(K)]
    )
    return Signature(values, SignatureKind.BISPECTRUM)


def _feature_vector(sig: Signature) -> np.ndarray:
    if sig.kind is SignatureKind.BISPECTRUM:
        vec = np.concatenate([sig.values.real, sig.values.imag])
    else:
        vec = np.asarray(sig.values, dtype=float)
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else vec


def baseline_cluster(
    dataset: Dataset,
    kind: SignatureKind,
    num_classes: int,
    rng_seed: int,
) -> np.ndarray:
    """k-means labels over unit-normalized signature vectors.

    Complex signatures contribute real and imaginary parts concatenated; the
    k-means engine and seed policy match the SDP rounding path, so baseline
    and solver comparisons differ only in the features.
    """
    if not isinstance(kind, SignatureKind):
        kind = SignatureKind(kind)
    make = (
        bispectrum_signature
        if kind is SignatureKind.BISPECTRUM
        else autocorrelation_signature
    )
    features = np.array([_feature_vector(make(s)) for s in dataset.signals])
    return kmeans(features, num_classes, rng_seed)
