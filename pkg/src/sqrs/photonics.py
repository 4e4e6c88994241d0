"""Weak coherent pulse source and photon-number-splitting exposure accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NonPositiveMeanPhotonError
from .information import splitting_ratio_bb84, splitting_ratio_sqrs


@dataclass(frozen=True)
class CoherentSource:
    kbar: float

    def __post_init__(self):
        if not self.kbar > 0.0:
            raise NonPositiveMeanPhotonError(f"mean photon number must be positive, got {self.kbar!r}")

    def pmf(self, k: int) -> float:
        return math.exp(-self.kbar + k * math.log(self.kbar) - math.lgamma(k + 1))

    @property
    def p_nonempty(self) -> float:
        return -math.expm1(-self.kbar)

    @property
    def p_two(self) -> float:
        return self.pmf(2)

    @property
    def p_three_plus(self) -> float:
        return 1.0 - self.pmf(0) - self.pmf(1) - self.pmf(2)


@dataclass(frozen=True)
class PulseRecord:
    qubit_id: int
    photon_count: int

    @property
    def delivered(self) -> bool:
        return self.photon_count >= 1


def sample_photon_count(rng: np.random.Generator, source: CoherentSource) -> int:
    return int(rng.poisson(source.kbar))


def sample_photon_counts(rng: np.random.Generator, source: CoherentSource, n: int) -> np.ndarray:
    return rng.poisson(source.kbar, size=n)


@dataclass(frozen=True)
class ExposureReport:
    kbar: float
    pulses: int
    delivered: int
    two_photon_captures: int
    multi_photon_captures: int
    bound_bb84: float
    bound_sqrs: float
    f_e: float = 0.25
    captured_ids: tuple[int, ...] = field(default=(), repr=False)

    @property
    def delivered_fraction(self) -> float:
        return self.delivered / self.pulses if self.pulses else math.nan


def exposure_report(
    pulses: Sequence[PulseRecord], captures=None, kbar: float | None = None, f_e: float = 0.25
) -> ExposureReport:
    """Summarise a session's pulse statistics next to the analytic leak bounds.

    ``captures`` maps qubit id to whatever Eve recorded; only the ids are used.
    ``kbar`` defaults to the empirical mean photon number, and must be given
    explicitly for an empty session.
    """
    counts = np.array([p.photon_count for p in pulses], dtype=int)
    if kbar is None:
        if counts.size == 0:
            raise ValueError("kbar is required when there are no pulses")
        kbar = float(counts.mean())
    if captures is None:
        # every multi-photon pulse is assumed split
        captured_counts = counts
        captured = tuple(p.qubit_id for p in pulses if p.photon_count >= 2)
    else:
        captured = tuple(sorted(captures))
        ids = set(captured)
        captured_counts = np.array([p.photon_count for p in pulses if p.qubit_id in ids], dtype=int)
    return ExposureReport(
        kbar=kbar,
        pulses=int(counts.size),
        delivered=int(np.count_nonzero(counts >= 1)),
        two_photon_captures=int(np.count_nonzero(captured_counts == 2)),
        multi_photon_captures=int(np.count_nonzero(captured_counts >= 3)),
        bound_bb84=splitting_ratio_bb84(kbar),
        bound_sqrs=splitting_ratio_sqrs(kbar, f_e),
        f_e=f_e,
        captured_ids=captured,
    )
