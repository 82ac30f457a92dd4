"""Scalar harmonics on the circle, the cyclic class group, and their product.

Conventions used throughout the package:

* Rotations are angles in radians, reduced to ``[0, 2*pi)``.
* The scalar irreducible representations are ``e^{i k g}`` for the circle
  (integer frequency ``k``) and ``e^{i 2 pi a m / M}`` for the cyclic group
  of order ``M``.  Product-group representations are the products of the two.
* The cyclic Fourier transform is Haar-normalized: the analysis direction
  carries the ``1/M`` factor and synthesis carries none, so a function is
  recovered as ``f(a) = sum_m fhat(m) e^{i 2 pi a m / M}``.
* Band limits are plain integers ``K >= 0``; a band-limited signal keeps the
  ``2K + 1`` frequencies ``k in {-K, ..., K}``.

Roots of unity at multiples of ``pi/6`` and ``pi/4`` are returned exactly
(and conjugate pairs are bitwise conjugate), so full-group character sums
over Z_M cancel to exact zero for the small class counts used here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

#: Default tolerance for angular equality comparisons, in radians.
ANGLE_TOL = 1e-9

_HALF_SQRT3 = np.sqrt(3.0) / 2.0
_HALF_SQRT2 = np.sqrt(2.0) / 2.0

# e^{2 pi i t / 8} for t = 0..4 (the rest follow by conjugation).
_EIGHTH_ROOTS = (
    1.0 + 0.0j,
    _HALF_SQRT2 + 1.0j * _HALF_SQRT2,
    1.0j,
    -_HALF_SQRT2 + 1.0j * _HALF_SQRT2,
    -1.0 + 0.0j,
)

# e^{2 pi i t / 12} for the t in 1..5 not already on the eighth grid.
_TWELFTH_ROOTS = {
    1: _HALF_SQRT3 + 0.5j,
    2: 0.5 + 1.0j * _HALF_SQRT3,
    4: -0.5 + 1.0j * _HALF_SQRT3,
    5: -_HALF_SQRT3 + 0.5j,
}


def reduce_angle(radians):
    """Reduce an angle (or array of angles) to the interval [0, 2*pi)."""
    reduced = np.asarray(radians, dtype=float) % TWO_PI
    # Tiny negative inputs can round to exactly 2*pi under %.
    reduced = np.where(reduced >= TWO_PI, 0.0, reduced)
    if np.ndim(radians) == 0:
        return float(reduced)
    return reduced


def angles_close(a, b, tol: float = ANGLE_TOL) -> bool:
    """True when two angles agree modulo 2*pi within ``tol`` radians."""
    d = reduce_angle(float(a) - float(b))
    return min(d, TWO_PI - d) <= tol


class Bandwidth(int):
    """Retained frequency band: circle frequencies k in {-K, ..., K}.

    A validated integer, so it can be passed anywhere a plain bandwidth
    int is accepted.
    """

    def __new__(cls, value):
        v = int(value)
        if v < 0:
            raise ValueError("bandwidth must be >= 0")
        return super().__new__(cls, v)

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-int(self), int(self) + 1)

    @property
    def size(self) -> int:
        """Number of retained coefficients, 2K+1."""
        return 2 * int(self) + 1


@dataclass(frozen=True)
class RotationAngle:
    """A rotation of the circle, stored reduced to [0, 2*pi)."""

    radians: float

    def __post_init__(self):
        object.__setattr__(self, "radians", reduce_angle(self.radians))

    def __mul__(self, other: "RotationAngle") -> "RotationAngle":
        return RotationAngle(self.radians + other.radians)

    def inverse(self) -> "RotationAngle":
        return RotationAngle(-self.radians)

    def isclose(self, other: "RotationAngle", tol: float = ANGLE_TOL) -> bool:
        return angles_close(self.radians, other.radians, tol)

    def __float__(self) -> float:
        return self.radians


@dataclass(frozen=True)
class CyclicElement:
    """An element of the cyclic group Z_M, ``0 <= value < modulus``."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError(f"cyclic modulus must be >= 2, got {self.modulus}")
        if not 0 <= self.value < self.modulus:
            raise ValueError(
                f"cyclic element {self.value} outside range [0, {self.modulus})"
            )

    def __mul__(self, other: "CyclicElement") -> "CyclicElement":
        if self.modulus != other.modulus:
            raise ValueError("cyclic elements from different groups")
        return CyclicElement((self.value + other.value) % self.modulus, self.modulus)

    def inverse(self) -> "CyclicElement":
        return CyclicElement((-self.value) % self.modulus, self.modulus)


@dataclass(frozen=True)
class ProductElement:
    """An element (g, a) of the product of the circle with Z_M."""

    rotation: RotationAngle
    class_shift: CyclicElement

    def __mul__(self, other: "ProductElement") -> "ProductElement":
        return ProductElement(
            self.rotation * other.rotation,
            self.class_shift * other.class_shift,
        )

    def inverse(self) -> "ProductElement":
        return ProductElement(self.rotation.inverse(), self.class_shift.inverse())


def _unit_root(t: int, modulus: int) -> complex:
    """e^{2 pi i t / modulus}, exact on the pi/6 and pi/4 grids.

    Conjugate pairs (t and modulus - t) return bitwise conjugate values,
    which makes full-group character sums cancel exactly.
    """
    t = t % modulus
    if 2 * t > modulus:
        return complex(np.conj(_unit_root(modulus - t, modulus)))
    if (8 * t) % modulus == 0:
        return _EIGHTH_ROOTS[(8 * t) // modulus]
    if (12 * t) % modulus == 0:
        return _TWELFTH_ROOTS[(12 * t) // modulus]
    return complex(np.exp(2j * np.pi * t / modulus))


def irrep_cyclic(m: int, a: CyclicElement) -> complex:
    """Scalar irreducible representation of Z_M: e^{i 2 pi a m / M}.

    Parameters
    ----------
    m : int
        Representation index, ``0 <= m < a.modulus``.
    a : CyclicElement
        Group element.
    """
    if not 0 <= m < a.modulus:
        raise ValueError(f"representation index {m} outside [0, {a.modulus})")
    return _unit_root(m * a.value, a.modulus)


def _as_radians(g):
    if isinstance(g, RotationAngle):
        return g.radians
    return g


def irrep_so2(k: int, g):
    """Scalar irreducible representation of the circle: e^{i k g}.

    ``g`` may be a RotationAngle, a float in radians, or an array of floats;
    the return value is a complex scalar or array accordingly.
    """
    rad = np.asarray(_as_radians(g), dtype=float)
    out = np.exp(1j * k * rad)
    if np.ndim(_as_radians(g)) == 0:
        return complex(out)
    return out


def irrep_product(k: int, m: int, x: ProductElement) -> complex:
    """Product-group representation: irrep_so2(k, g) * irrep_cyclic(m, a)."""
    return complex(irrep_so2(k, x.rotation)) * irrep_cyclic(m, x.class_shift)


def dft_cyclic(values) -> np.ndarray:
    """Haar-normalized DFT on Z_M: fhat(m) = (1/M) sum_a f(a) e^{-i2pi a m/M}.

    The inverse is :func:`idft_cyclic`; synthesis carries no normalization,
    so ``f(a) = sum_m fhat(m) e^{i 2 pi a m / M}``.
    """
    arr = np.atleast_1d(np.asarray(values))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("dft_cyclic expects a non-empty 1-D array")
    return np.fft.fft(arr) / arr.size


def idft_cyclic(coefficients) -> np.ndarray:
    """Inverse of :func:`dft_cyclic`: f(a) = sum_m fhat(m) e^{i 2 pi a m/M}."""
    arr = np.atleast_1d(np.asarray(coefficients))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("idft_cyclic expects a non-empty 1-D array")
    return np.fft.ifft(arr) * arr.size


def fejer_weights(bandwidth: int) -> np.ndarray:
    """Triangular kernel weights w_k = 1 - |k|/(K+1) for k in {-K, ..., K}.

    The weighted exponential sum sum_k w_k e^{i k g} is a nonnegative
    kernel for every K, which is what makes the sampled nonnegativity
    constraints of the SDP consistent with lifted physical solutions.
    """
    if bandwidth < 0:
        raise ValueError("bandwidth must be >= 0")
    k = np.arange(-bandwidth, bandwidth + 1)
    return 1.0 - np.abs(k) / (bandwidth + 1.0)


def fejer_kernel(bandwidth: int, angles) -> np.ndarray:
    """Evaluate sum_k w_k e^{i k g} (real-valued) at the given angles."""
    rad = np.atleast_1d(np.asarray(_as_radians(angles), dtype=float))
    k = np.arange(-bandwidth, bandwidth + 1)
    vals = fejer_weights(bandwidth) @ np.exp(1j * np.outer(k, rad))
    out = vals.real
    if np.ndim(_as_radians(angles)) == 0:
        return float(out[0])
    return out


def so2_grid(size: int) -> np.ndarray:
    """Uniform angle grid 2*pi*t/size for t = 0..size-1."""
    if size < 1:
        raise ValueError("grid size must be >= 1")
    return TWO_PI * np.arange(size) / size
