"""Grid likelihoods over the phase, circular statistics and estimators.

The phase lives on a circle, so the posterior is kept on ``K`` equal bins
``theta_k = theta0 + 2*pi*k/K`` and summarised with circular moments rather
than linear ones. Log values are stored as a log *density*: a normalised grid
satisfies ``sum(exp(log_values)) * 2*pi/K == 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyCountsError, GridMismatchError, UndefinedMeanError
from .qubit import TAGS, TWO_PI, StateTag, wrap, wrap_signed

DEFAULT_K = 2048
MIN_K = 1000
UNDEFINED_R = 1e-12


@dataclass(frozen=True)
class CountVector:
    """Outcome counts ``n1..n8`` for one pass count.

    Index ``2*i`` holds ``+1`` outcomes and ``2*i + 1`` holds ``-1`` outcomes
    for the ``i``-th state of ``X+, X-, Y+, Y-``.
    """

    counts: tuple[int, ...]
    passes: int = 1

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != 8:
            raise ValueError(f"expected 8 counts, got {len(counts)}")
        if any(c < 0 for c in counts):
            raise ValueError("counts must be nonnegative")
        if self.passes < 1:
            raise ValueError(f"passes must be >= 1, got {self.passes}")
        object.__setattr__(self, "counts", counts)

    @property
    def mu(self) -> int:
        return sum(self.counts)

    @staticmethod
    def cell(tag: StateTag, outcome: int) -> int:
        return 2 * tag.index + (0 if outcome == 1 else 1)

    @classmethod
    def from_outcomes(cls, pairs: Iterable[tuple[StateTag, int]], passes: int = 1) -> "CountVector":
        counts = [0] * 8
        for tag, outcome in pairs:
            counts[cls.cell(tag, outcome)] += 1
        return cls(tuple(counts), passes)

    def __add__(self, other: "CountVector") -> "CountVector":
        if self.passes != other.passes:
            raise ValueError("cannot add count vectors with different pass counts")
        return CountVector(tuple(a + b for a, b in zip(self.counts, other.counts)), self.passes)

    def exponents(self) -> tuple[int, int, int, int]:
        """Exponents of ``(1+sin), (1-sin), (1+cos), (1-cos)`` in the likelihood."""
        n = self.counts
        return (n[0] + n[3], n[1] + n[2], n[4] + n[7], n[5] + n[6])


@dataclass(frozen=True, eq=False)
class LikelihoodGrid:
    log_values: np.ndarray
    theta0: float = 0.0
    normalized: bool = True

    def __post_init__(self):
        values = np.asarray(self.log_values, dtype=float)
        if values.ndim != 1 or values.size < MIN_K:
            raise ValueError(f"grid needs at least {MIN_K} bins, got {values.size}")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "log_values", values)

    @property
    def k_bins(self) -> int:
        return self.log_values.size

    @property
    def bin_width(self) -> float:
        return TWO_PI / self.k_bins

    @property
    def thetas(self) -> np.ndarray:
        return self.theta0 + self.bin_width * np.arange(self.k_bins)

    def density(self) -> np.ndarray:
        return np.exp(self.log_values)

    def masses(self) -> np.ndarray:
        """Probability mass per bin (sums to one when normalised)."""
        return np.exp(self.log_values) * self.bin_width

    def same_geometry(self, other: "LikelihoodGrid") -> bool:
        return self.k_bins == other.k_bins and math.isclose(
            self.theta0, other.theta0, rel_tol=0.0, abs_tol=1e-12
        )

    def normalize(self) -> "LikelihoodGrid":
        return LikelihoodGrid(_normalize_log(self.log_values), self.theta0, True)

    def rotate_bins(self, shift: int) -> "LikelihoodGrid":
        """Grid whose value at bin ``k`` is this grid's value at bin ``k + shift``."""
        return LikelihoodGrid(np.roll(self.log_values, -shift), self.theta0, self.normalized)

    @classmethod
    def uniform(cls, k_bins: int = DEFAULT_K, theta0: float = 0.0) -> "LikelihoodGrid":
        return cls(np.full(k_bins, -math.log(TWO_PI)), theta0, True)

    @classmethod
    def from_masses(cls, masses: np.ndarray, theta0: float = 0.0) -> "LikelihoodGrid":
        masses = np.asarray(masses, dtype=float)
        with np.errstate(divide="ignore"):
            logs = np.log(masses)
        return cls(_normalize_log(logs), theta0, True)


def _normalize_log(log_values: np.ndarray) -> np.ndarray:
    top = np.max(log_values)
    if not np.isfinite(top):
        raise ValueError("likelihood vanishes on every bin")
    k = log_values.size
    log_mass = top + math.log(np.sum(np.exp(log_values - top)) * TWO_PI / k)
    return log_values - log_mass


def grid_thetas(k_bins: int = DEFAULT_K, theta0: float = 0.0) -> np.ndarray:
    return theta0 + (TWO_PI / k_bins) * np.arange(k_bins)


def _xlogy(n: int, y: np.ndarray) -> np.ndarray:
    if n == 0:
        return np.zeros_like(y)
    with np.errstate(divide="ignore"):
        return n * np.log(y)


def log_likelihood_values(
    counts: CountVector, thetas: np.ndarray, offset: float = 0.0
) -> np.ndarray:
    """Unnormalised log-likelihood of ``counts`` at each phase in ``thetas``.

    The table model is evaluated at ``passes * theta + offset``.
    """
    a, b, c, d = counts.exponents()
    x = counts.passes * thetas + offset
    s, co = np.sin(x), np.cos(x)
    return _xlogy(a, 1.0 + s) + _xlogy(b, 1.0 - s) + _xlogy(c, 1.0 + co) + _xlogy(d, 1.0 - co)


def likelihood_from_counts(
    counts: CountVector,
    k_bins: int = DEFAULT_K,
    theta0: float = 0.0,
    offset: float = 0.0,
) -> LikelihoodGrid:
    """Normalised grid posterior (uniform prior) for a set of outcome counts."""
    if counts.mu == 0:
        raise EmptyCountsError("likelihood needs at least one observation")
    logs = log_likelihood_values(counts, grid_thetas(k_bins, theta0), offset)
    return LikelihoodGrid(_normalize_log(logs), theta0, True)


def flip_outcomes(counts: CountVector) -> CountVector:
    """Swap every ``+1``/``-1`` pair of cells, as a spoofer flipping all results would."""
    n = counts.counts
    flipped = (n[1], n[0], n[3], n[2], n[5], n[4], n[7], n[6])
    return CountVector(flipped, counts.passes)


def combine(grids: Sequence[LikelihoodGrid]) -> LikelihoodGrid:
    """Product of independent likelihoods on a common grid, renormalised."""
    if not grids:
        raise ValueError("nothing to combine")
    first = grids[0]
    total = np.zeros(first.k_bins)
    for g in grids:
        if not first.same_geometry(g):
            raise GridMismatchError(
                f"grid geometry mismatch: K={first.k_bins}/{g.k_bins}, "
                f"theta0={first.theta0!r}/{g.theta0!r}"
            )
        total = total + g.log_values
    return LikelihoodGrid(_normalize_log(total), first.theta0, True)


@dataclass(frozen=True)
class CircularSummary:
    mean_direction: float | None
    resultant_length: float
    circ_std: float

    @property
    def defined(self) -> bool:
        return self.mean_direction is not None


def circular_summary_from_masses(thetas: np.ndarray, masses: np.ndarray) -> CircularSummary:
    rho = complex(np.sum(masses * np.exp(1j * thetas)) / np.sum(masses))
    r = min(1.0, abs(rho))
    if r < UNDEFINED_R:
        return CircularSummary(None, r, math.inf)
    nu = 0.0 if r >= 1.0 else math.sqrt(-2.0 * math.log(r))
    return CircularSummary(wrap(math.atan2(rho.imag, rho.real)), r, nu)


def circular_summary(grid: LikelihoodGrid) -> CircularSummary:
    """Mean direction, mean resultant length and circular standard deviation.

    The mean resultant vector weighs each bin by its normalised probability
    mass, so the resultant length always lies in ``[0, 1]``.
    """
    return circular_summary_from_masses(grid.thetas, grid.masses())


def map_estimate(grid: LikelihoodGrid) -> float:
    """Phase of the highest bin; ties go to the lowest index."""
    return float(wrap(grid.theta0 + grid.bin_width * int(np.argmax(grid.log_values))))


def circular_mean(angles: Sequence[float] | np.ndarray) -> tuple[float, float]:
    """``(mean direction in (-pi, pi], mean resultant length)`` of sample angles."""
    angles = np.asarray(angles, dtype=float)
    if angles.size == 0:
        raise ValueError("need at least one angle")
    z = np.mean(np.exp(1j * angles))
    return wrap_signed(math.atan2(z.imag, z.real)), float(abs(z))


def estimator_bias(true_phi: float, estimates: Sequence[float]) -> float:
    """Circular mean of ``estimate - true_phi``, reported in ``(-pi, pi]``."""
    diffs = np.asarray(estimates, dtype=float) - true_phi
    direction, r = circular_mean(diffs)
    if r < UNDEFINED_R:
        raise UndefinedMeanError("estimate errors have no preferred direction")
    return direction


def find_peaks(grid: LikelihoodGrid, rel_height: float = 1e-3) -> np.ndarray:
    """Bin indices of circular local maxima at least ``rel_height`` of the global max.

    A plateau counts once, at its first bin.
    """
    v = grid.log_values
    left = np.roll(v, 1)
    right = np.roll(v, -1)
    is_peak = (v > left) & (v >= right)
    floor = np.max(v) + math.log(rel_height)
    return np.flatnonzero(is_peak & (v >= floor))


def mean_likelihood(grids: Sequence[LikelihoodGrid]) -> LikelihoodGrid:
    """Pointwise average of normalised probability masses, renormalised."""
    if not grids:
        raise ValueError("nothing to average")
    first = grids[0]
    acc = np.zeros(first.k_bins)
    for g in grids:
        if not first.same_geometry(g):
            raise GridMismatchError("grids must share K and theta0")
        acc += g.normalize().masses() if not g.normalized else g.masses()
    return LikelihoodGrid.from_masses(acc / len(grids), first.theta0)


def marginalize_offset(grid: LikelihoodGrid, offset_masses: np.ndarray) -> LikelihoodGrid:
    """Posterior over ``phi`` from a grid over ``phi - offset`` and a prior on ``offset``.

    ``offset_masses[j]`` is the prior mass of an offset of ``j`` bins; the
    result is the circular convolution of the two mass vectors.
    """
    offset_masses = np.asarray(offset_masses, dtype=float)
    if offset_masses.size != grid.k_bins:
        raise GridMismatchError("offset prior must use the same bin count as the grid")
    conv = np.real(np.fft.ifft(np.fft.fft(grid.masses()) * np.fft.fft(offset_masses)))
    conv = np.clip(conv, 0.0, None)
    return LikelihoodGrid.from_masses(conv, grid.theta0)


# Per-cell probability of the eight outcomes at phase ``x`` (after passes/offset).
def cell_probabilities(x: float, state_weights: Sequence[float] = (0.25, 0.25, 0.25, 0.25)) -> np.ndarray:
    """Joint probability of (state, outcome) for the eight table cells.

    ``state_weights`` are Alice's sending probabilities for ``X+, X-, Y+, Y-``.
    """
    s, c = math.sin(x), math.cos(x)
    plus = (0.5 * (1 + s), 0.5 * (1 - s), 0.5 * (1 + c), 0.5 * (1 - c))
    probs = np.empty(8)
    for i, w in enumerate(state_weights):
        probs[2 * i] = w * plus[i]
        probs[2 * i + 1] = w * (1.0 - plus[i])
    return np.clip(probs, 0.0, None)


def simulate_counts(
    rng: np.random.Generator,
    phi: float,
    mu: int,
    passes: int = 1,
    state_weights: Sequence[float] = (0.25, 0.25, 0.25, 0.25),
    offset: float = 0.0,
) -> CountVector:
    """Draw D1 outcome counts for ``mu`` qubits directly from the table model."""
    probs = cell_probabilities(passes * phi + offset, state_weights)
    return CountVector(tuple(rng.multinomial(mu, probs / probs.sum())), passes)


__all__ = [
    "CountVector",
    "LikelihoodGrid",
    "CircularSummary",
    "likelihood_from_counts",
    "flip_outcomes",
    "combine",
    "circular_summary",
    "map_estimate",
    "estimator_bias",
    "find_peaks",
    "mean_likelihood",
    "marginalize_offset",
    "simulate_counts",
    "TAGS",
]
