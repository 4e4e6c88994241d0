"""Fisher information, Cramer-Rao bounds and the eavesdropper's information budget."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DegenerateDenominatorError,
    DegenerateProbabilityError,
    InvalidBlochError,
    NonPositiveFisherError,
    NonPositiveMeanPhotonError,
)
from .qubit import TAGS, StateTag

PROB_CUTOFF = 1e-9
FD_STEP = 1e-6


@dataclass(frozen=True)
class OutcomeFamily:
    """``P(+1 | phi)`` for state ``(alpha, beta)`` measured in basis ``(gamma, eps)``.

    ``offset`` is ``beta - eps`` so that ``zeta = offset + passes * phi``.
    Carries its own analytic derivative, which :func:`classical_fisher_binary`
    uses instead of finite differences.
    """

    alpha: float
    gamma: float
    offset: float = 0.0
    passes: int = 1

    def __call__(self, phi: float) -> float:
        zeta = self.offset + self.passes * phi
        return 0.5 * (
            1.0
            + math.cos(self.alpha) * math.cos(self.gamma)
            + math.sin(self.alpha) * math.sin(self.gamma) * math.cos(zeta)
        )

    def derivative(self, phi: float) -> float:
        zeta = self.offset + self.passes * phi
        return -0.5 * self.passes * math.sin(self.alpha) * math.sin(self.gamma) * math.sin(zeta)


def central_difference(f: Callable[[float], float], x: float, h: float = FD_STEP) -> float:
    return (f(x + h) - f(x - h)) / (2.0 * h)


def classical_fisher_binary(p_plus: Callable[[float], float], phi: float, h: float = FD_STEP) -> float:
    """Classical Fisher information of a two-outcome measurement at ``phi``.

    ``p_plus`` gives the probability of the ``+1`` outcome. If it exposes a
    ``derivative`` attribute that is used, otherwise a central difference with
    step ``h``.
    """
    p = p_plus(phi)
    deriv = getattr(p_plus, "derivative", None)
    dp = deriv(phi) if deriv is not None else central_difference(p_plus, phi, h)
    total = 0.0
    for prob, dprob in ((p, dp), (1.0 - p, -dp)):
        if dprob == 0.0:
            continue
        if prob < PROB_CUTOFF:
            raise DegenerateProbabilityError(
                f"outcome probability {prob:.3e} below {PROB_CUTOFF} at phi={phi!r}"
            )
        total += dprob * dprob / prob
    return total


def general_cfi(alpha: float, gamma: float, zeta: float) -> float:
    """Closed-form Fisher information of the general qubit phase measurement.

    The denominator is ``1 - A**2`` with ``A = cos(a)cos(g) + sin(a)sin(g)cos(z)``,
    i.e. ``4 P(+1) P(-1)``.
    """
    ca, sa = math.cos(alpha), math.sin(alpha)
    cg, sg = math.cos(gamma), math.sin(gamma)
    cz, sz = math.cos(zeta), math.sin(zeta)
    numerator = sa * sa * sg * sg * sz * sz
    denominator = 1.0 - ca * ca * cg * cg - sa * sa * sg * sg * cz * cz - 2.0 * ca * cg * sa * sg * cz
    if denominator <= 1e-12:
        raise DegenerateDenominatorError(
            f"Fisher denominator {denominator:.3e} is degenerate at "
            f"alpha={alpha!r}, gamma={gamma!r}, zeta={zeta!r}"
        )
    return numerator / denominator


def cramer_rao(fisher: float, mu: int) -> float:
    """Lower bound ``1/sqrt(mu * I)`` on the phase uncertainty after ``mu`` shots."""
    if fisher <= 0.0:
        raise NonPositiveFisherError(f"Fisher information must be positive, got {fisher!r}")
    if mu < 1:
        raise ValueError(f"mu must be >= 1, got {mu!r}")
    return 1.0 / math.sqrt(mu * fisher)


@dataclass(frozen=True)
class BlochVector:
    rx: float
    ry: float
    rz: float

    def __post_init__(self):
        if self.norm() > 1.0 + 1e-12:
            raise InvalidBlochError(f"Bloch vector norm {self.norm()!r} exceeds 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.rx, self.ry, self.rz])

    def norm(self) -> float:
        return math.sqrt(self.rx * self.rx + self.ry * self.ry + self.rz * self.rz)

    def density_matrix(self) -> np.ndarray:
        return 0.5 * np.array(
            [[1 + self.rz, self.rx - 1j * self.ry], [self.rx + 1j * self.ry, 1 - self.rz]]
        )


def qfi_qubit(bloch: BlochVector, dbloch: BlochVector) -> float:
    """Quantum Fisher information of a qubit from its Bloch vector and derivative.

    Uses ``|dr|^2 + (r.dr)^2 / (1 - |r|^2)`` for mixed states; for pure states
    only the first term survives (``r.dr`` must vanish).
    """
    r, dr = bloch.as_array(), dbloch.as_array()
    purity_gap = 1.0 - float(r @ r)
    radial = float(r @ dr)
    tangential = float(dr @ dr)
    if purity_gap < -1e-12:
        raise InvalidBlochError("Bloch vector outside the unit ball")
    if purity_gap <= 1e-12:
        if abs(radial) > 1e-9:
            raise InvalidBlochError("pure state with a radial derivative is not a valid path")
        return tangential
    return tangential + radial * radial / purity_gap


def pure_state_qfi(alpha: float, passes: int = 1) -> float:
    """QFI for a phase gate acting on ``(alpha, beta)``: ``passes**2 * sin(alpha)**2``.

    Unity only on the equator.
    """
    return passes * passes * math.sin(alpha) ** 2


def eve_split_bloch(delta: float, gamma: float, phi: float) -> BlochVector:
    """Bloch vector of Eve's best guess of Bob's qubit after one split-photon measurement."""
    a = 0.5 * math.sin(delta)
    return BlochVector(a * math.cos(phi + gamma), a * math.sin(phi + gamma), 0.0)


def eve_split_bloch_derivative(delta: float, gamma: float, phi: float) -> BlochVector:
    a = 0.5 * math.sin(delta)
    return BlochVector(-a * math.sin(phi + gamma), a * math.cos(phi + gamma), 0.0)


def eve_split_qfi(delta: float, gamma: float, phi: float) -> float:
    return qfi_qubit(eve_split_bloch(delta, gamma, phi), eve_split_bloch_derivative(delta, gamma, phi))


def eve_likelihoods(delta: float, gamma: float, outcome: int = 1, shift: float = 0.0) -> dict[StateTag, float]:
    """``P(E_outcome | state)`` for each of the four states, rotated by ``shift``."""
    s = math.sin(delta)
    return {
        tag: 0.5 * (1.0 + outcome * s * math.cos(tag.base_beta + shift - gamma))
        for tag in TAGS
    }


def eve_posterior(
    delta: float,
    gamma: float,
    outcome: int = 1,
    prior: dict[StateTag, float] | None = None,
    shift: float = 0.0,
) -> dict[StateTag, float]:
    """Eve's posterior over Alice's four states after projecting a split photon.

    The projector's ``+1`` element is ``cos(delta/2)|0> + sin(delta/2) e^{i gamma}|1>``.
    With the default uniform prior the result reduces to
    ``P(X+-|E+1) = (1 +- sin(delta)cos(gamma))/4`` and
    ``P(Y+-|E+1) = (1 +- sin(delta)sin(gamma))/4``.
    """
    if outcome not in (1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")
    if prior is None:
        prior = {tag: 0.25 for tag in TAGS}
    like = eve_likelihoods(delta, gamma, outcome, shift)
    joint = {tag: like[tag] * prior[tag] for tag in TAGS}
    evidence = sum(joint.values())
    return {tag: joint[tag] / evidence for tag in TAGS}


def _check_kbar(kbar: float) -> None:
    if not kbar > 0.0:
        raise NonPositiveMeanPhotonError(f"mean photon number must be positive, got {kbar!r}")


def splitting_ratio_bb84(kbar: float) -> float:
    """Upper bound on Eve/Alice information rate for BB84 with a coherent source."""
    _check_kbar(kbar)
    em1 = math.expm1(kbar)
    return (em1 - kbar) / em1


def splitting_ratio_sqrs(kbar: float, f_e: float = 0.25) -> float:
    """Upper bound on Eve/Alice information rate for the remote-sensing scheme.

    Two-photon pulses leak only ``f_e`` (Eve's single-copy QFI, at most 1/4);
    three or more photons are counted as full leakage.
    """
    _check_kbar(kbar)
    if not 0.0 <= f_e <= 1.0:
        raise ValueError(f"f_e must lie in [0, 1], got {f_e!r}")
    em1 = math.expm1(kbar)
    return (em1 - kbar - 0.5 * (1.0 - f_e) * kbar * kbar) / em1
