"""Band-limited complex signals on the circle and heterogeneous datasets.

A signal is stored by its Fourier coefficients ``shat(k)`` for
``k in {-K, ..., K}`` (index ``i`` of the array holds frequency ``i - K``).
Rotating a signal by ``g`` multiplies coefficient ``k`` by ``e^{-i k g}``,
matching the action ``(g . s)(x) = s(x - g)``.

Datasets bundle ``n`` signals with hidden ground-truth class labels and
shifts, plus the generation parameters, and serialize to a line-oriented
text format (see :func:`write_dataset`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .harmonics import TWO_PI, reduce_angle


@dataclass
class Signal:
    """Fourier coefficients of a band-limited signal.

    Parameters
    ----------
    coeffs : complex array, shape (2K+1,)
        Coefficient ``shat(k)`` at index ``K + k``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.ndim != 1 or arr.size % 2 == 0:
            raise ValueError("signal needs a 1-D coefficient array of odd length")
        self.coeffs = arr

    @property
    def bandwidth(self) -> int:
        return (self.coeffs.size - 1) // 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Signal):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)


def frequencies(bandwidth: int) -> np.ndarray:
    """Frequency index vector (-K, ..., K)."""
    return np.arange(-bandwidth, bandwidth + 1)


def synthesize(s: Signal, theta):
    """Evaluate the signal at angle(s) theta: sum_k shat(k) e^{i k theta}."""
    rad = np.atleast_1d(np.asarray(theta, dtype=float))
    k = frequencies(s.bandwidth)
    vals = np.exp(1j * np.outer(rad, k)) @ s.coeffs
    if np.ndim(theta) == 0:
        return complex(vals[0])
    return vals


def shift(s: Signal, g) -> Signal:
    """Rotate the signal by angle g: coefficient k picks up e^{-i k g}."""
    g = float(g)
    return Signal(s.coeffs * np.exp(-1j * frequencies(s.bandwidth) * g))


def _as_generator(rng_seed) -> np.random.Generator:
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return np.random.default_rng(rng_seed)


def random_prototype(bandwidth: int, rng_seed) -> Signal:
    """Draw a unit-norm signal with i.i.d. complex-Gaussian coefficients.

    ``rng_seed`` may be anything ``numpy.random.default_rng`` accepts, or an
    existing Generator (consumed in place).
    """
    if bandwidth < 0:
        raise ValueError("bandwidth must be >= 0")
    rng = _as_generator(rng_seed)
    n = 2 * bandwidth + 1
    coeffs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return Signal(coeffs / np.linalg.norm(coeffs))


def add_noise(s: Signal, sigma: float, rng_seed) -> Signal:
    """Add complex Gaussian noise, standard deviation ``sigma`` per coefficient.

    Each coefficient receives independent noise with variance sigma**2
    (sigma/sqrt(2) per real component).
    """
    if sigma < 0:
        raise ValueError("noise sigma must be >= 0")
    rng = _as_generator(rng_seed)
    n = s.coeffs.size
    noise = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return Signal(s.coeffs + (sigma / np.sqrt(2.0)) * noise)


@dataclass
class Dataset:
    """Signals plus hidden ground truth and generation parameters."""

    signals: list
    true_labels: np.ndarray
    true_shifts: np.ndarray
    num_classes: int
    noise_sigma: float
    seed: int = field(default=0)

    def __post_init__(self):
        self.true_labels = np.asarray(self.true_labels, dtype=int)
        self.true_shifts = np.asarray(self.true_shifts, dtype=float)
        n = len(self.signals)
        if n == 0:
            raise ValueError("dataset needs at least one signal")
        if self.true_labels.shape != (n,) or self.true_shifts.shape != (n,):
            raise ValueError("labels/shifts length must match signal count")
        if self.num_classes < 2:
            raise ValueError("num_classes must be >= 2")
        if n < self.num_classes:
            raise ValueError("need at least one signal per class")
        if self.true_labels.min() < 0 or self.true_labels.max() >= self.num_classes:
            raise ValueError("labels must lie in [0, num_classes)")
        bands = {s.bandwidth for s in self.signals}
        if len(bands) != 1:
            raise ValueError("all signals must share one bandwidth")
        if self.noise_sigma < 0:
            raise ValueError("noise sigma must be >= 0")

    @property
    def n(self) -> int:
        return len(self.signals)

    @property
    def bandwidth(self) -> int:
        return self.signals[0].bandwidth

    def coefficient_matrix(self) -> np.ndarray:
        """All coefficients stacked as an (n, 2K+1) array."""
        return np.array([s.coeffs for s in self.signals])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.num_classes == other.num_classes
            and self.noise_sigma == other.noise_sigma
            and self.seed == other.seed
            and np.array_equal(self.true_labels, other.true_labels)
            and np.array_equal(self.true_shifts, other.true_shifts)
            and len(self.signals) == len(other.signals)
            and all(a == b for a, b in zip(self.signals, other.signals))
        )


def generate_dataset(
    num_classes: int,
    copies_per_class: int,
    bandwidth: int,
    sigma: float,
    seed: int,
) -> Dataset:
    """Generate a balanced heterogeneous dataset.

    One unit-norm prototype is drawn per class; each of the
    ``num_classes * copies_per_class`` signals is a uniformly rotated copy of
    its class prototype plus complex Gaussian noise of level ``sigma``.

    Every prototype and every signal consumes an independent RNG stream
    derived from ``seed`` (streams ``SeedSequence([seed, 0, m])`` for
    prototype ``m`` and ``SeedSequence([seed, 1, i])`` for signal ``i``, which
    draws the shift first and the noise second), so generation is
    reproducible and order-independent.
    """
    if num_classes < 2:
        raise ValueError("num_classes must be >= 2")
    if copies_per_class < 1:
        raise ValueError("copies_per_class must be >= 1")
    if sigma < 0:
        raise ValueError("noise sigma must be >= 0")
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be >= 0")

    prototypes = [
        random_prototype(
            bandwidth, np.random.default_rng(np.random.SeedSequence([seed, 0, m]))
        )
        for m in range(num_classes)
    ]

    n = num_classes * copies_per_class
    signals = []
    labels = np.empty(n, dtype=int)
    shifts = np.empty(n, dtype=float)
    for i in range(n):
        m = i // copies_per_class
        rng = np.random.default_rng(np.random.SeedSequence([seed, 1, i]))
        g = reduce_angle(rng.uniform(0.0, TWO_PI))
        labels[i] = m
        shifts[i] = g
        signals.append(add_noise(shift(prototypes[m], g), sigma, rng))
    return Dataset(signals, labels, shifts, num_classes, float(sigma), seed)


class DatasetFormatError(ValueError):
    """Raised when a dataset file cannot be parsed; carries line diagnostics."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def write_dataset(dataset: Dataset, path) -> None:
    """Write the text dataset format.

    Header line: ``n M K sigma seed``.  One record per signal follows:
    ``label shift re(shat(-K)) im(shat(-K)) ... re(shat(K)) im(shat(K))``,
    whitespace-separated.  Floats use round-trip-exact decimal formatting, so
    read_dataset(write_dataset(d)) == d holds bitwise.
    """
    lines = [
        f"{dataset.n} {dataset.num_classes} {dataset.bandwidth} "
        f"{float(dataset.noise_sigma)!r} {dataset.seed}"
    ]
    for sig, label, g in zip(dataset.signals, dataset.true_labels, dataset.true_shifts):
        parts = [str(int(label)), repr(float(g))]
        for c in sig.coeffs:
            parts.append(repr(float(c.real)))
            parts.append(repr(float(c.imag)))
        lines.append(" ".join(parts))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_int(token: str, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise DatasetFormatError(line, f"{what}: expected integer, got {token!r}") from None


def _parse_float(token: str, line: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise DatasetFormatError(line, f"{what}: expected number, got {token!r}") from None
    if not np.isfinite(value):
        raise DatasetFormatError(line, f"{what}: non-finite value {token!r}")
    return value


def read_dataset(path) -> Dataset:
    """Parse a dataset file written by :func:`write_dataset`.

    Malformed input raises DatasetFormatError naming the offending line and
    field; nothing is returned for truncated files.
    """
    with open(path) as fh:
        raw = fh.readlines()
    numbered = [(i + 1, line.strip()) for i, line in enumerate(raw)]
    content = [(no, line) for no, line in numbered if line]
    if not content:
        raise DatasetFormatError(1, "empty dataset file")

    head_no, head = content[0]
    tokens = head.split()
    if len(tokens) != 5:
        raise DatasetFormatError(
            head_no, f"header must be 'n M K sigma seed' (5 fields, got {len(tokens)})"
        )
    n = _parse_int(tokens[0], head_no, "signal count n")
    num_classes = _parse_int(tokens[1], head_no, "class count M")
    bandwidth = _parse_int(tokens[2], head_no, "bandwidth K")
    sigma = _parse_float(tokens[3], head_no, "noise sigma")
    seed = _parse_int(tokens[4], head_no, "seed")
    if n < 1:
        raise DatasetFormatError(head_no, f"signal count must be >= 1, got {n}")
    if num_classes < 2:
        raise DatasetFormatError(head_no, f"class count must be >= 2, got {num_classes}")
    if n < num_classes:
        raise DatasetFormatError(head_no, f"need n >= M, got n={n} M={num_classes}")
    if bandwidth < 0:
        raise DatasetFormatError(head_no, f"bandwidth must be >= 0, got {bandwidth}")
    if sigma < 0:
        raise DatasetFormatError(head_no, f"noise sigma must be >= 0, got {sigma}")

    records = content[1:]
    if len(records) < n:
        last = records[-1][0] if records else head_no
        raise DatasetFormatError(
            last, f"truncated dataset: header promises {n} records, found {len(records)}"
        )
    if len(records) > n:
        raise DatasetFormatError(
            records[n][0], f"unexpected extra record (header promises {n})"
        )

    width = 2 * (2 * bandwidth + 1)
    signals = []
    labels = np.empty(n, dtype=int)
    shifts = np.empty(n, dtype=float)
    for idx, (no, line) in enumerate(records):
        tokens = line.split()
        if len(tokens) != 2 + width:
            raise DatasetFormatError(
                no,
                f"record {idx}: expected {2 + width} fields "
                f"(label, shift, {width} coefficient components), got {len(tokens)}",
            )
        label = _parse_int(tokens[0], no, f"record {idx} label")
        if not 0 <= label < num_classes:
            raise DatasetFormatError(
                no, f"record {idx}: label {label} outside [0, {num_classes})"
            )
        g = _parse_float(tokens[1], no, f"record {idx} shift")
        if not 0.0 <= g < TWO_PI:
            raise DatasetFormatError(
                no, f"record {idx}: shift {g} outside [0, 2*pi)"
            )
        comps = [
            _parse_float(tok, no, f"record {idx} coefficient {j // 2}")
            for j, tok in enumerate(tokens[2:])
        ]
        re = np.array(comps[0::2])
        im = np.array(comps[1::2])
        labels[idx] = label
        shifts[idx] = g
        signals.append(Signal(re + 1j * im))
    return Dataset(signals, labels, shifts, num_classes, sigma, seed)
