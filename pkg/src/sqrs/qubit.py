"""Single-qubit pure states on the Bloch sphere and projective measurements.

States are stored as Bloch angles ``(alpha, beta)`` for
``cos(alpha/2)|0> + sin(alpha/2) e^{i beta}|1>``. Phase encoding is then a
modular addition on ``beta`` and outcome probabilities have a closed form,
so nothing here touches amplitudes or matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap(angle):
    """Reduce an angle (scalar or array) into ``[0, 2*pi)``."""
    if isinstance(angle, np.ndarray):
        return np.mod(angle, TWO_PI)
    r = math.fmod(angle, TWO_PI)
    r = r + TWO_PI * (r < 0.0)
    # fmod of a tiny negative number can round back up to exactly 2*pi
    return 0.0 if r >= TWO_PI else r


def wrap_signed(angle: float) -> float:
    """Reduce an angle into ``(-pi, pi]``."""
    r = wrap(angle)
    return r - TWO_PI if r > math.pi else r


def angular_distance(a: float, b: float) -> float:
    """Shortest distance between two angles on the circle."""
    d = abs(wrap(a) - wrap(b))
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class QubitState:
    """Pure qubit ``cos(alpha/2)|0> + sin(alpha/2) e^{i beta}|1>``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (0.0 <= self.alpha <= math.pi):
            raise ValueError(f"alpha must lie in [0, pi], got {self.alpha!r}")
        object.__setattr__(self, "beta", wrap(float(self.beta)))

    @classmethod
    def equatorial(cls, beta: float) -> "QubitState":
        return cls(math.pi / 2, beta)

    def bloch(self) -> tuple[float, float, float]:
        s = math.sin(self.alpha)
        return (s * math.cos(self.beta), s * math.sin(self.beta), math.cos(self.alpha))


@dataclass(frozen=True)
class MeasurementBasis:
    """Projective basis whose ``+1`` element is the state ``(gamma, epsilon_m)``.

    The ``-1`` element is ``sin(gamma/2)|0> - cos(gamma/2) e^{i epsilon_m}|1>``.
    """

    gamma: float
    epsilon_m: float

    def __post_init__(self):
        if not (0.0 <= self.gamma <= math.pi):
            raise ValueError(f"gamma must lie in [0, pi], got {self.gamma!r}")
        object.__setattr__(self, "epsilon_m", wrap(float(self.epsilon_m)))

    @classmethod
    def equatorial(cls, epsilon_m: float) -> "MeasurementBasis":
        return cls(math.pi / 2, epsilon_m)


SIGMA_X = MeasurementBasis.equatorial(0.0)
SIGMA_Y = MeasurementBasis.equatorial(math.pi / 2)


class StateTag(Enum):
    """The four-state alphabet: eigenstates of sigma_x and sigma_y."""

    X_PLUS = "X+"
    X_MINUS = "X-"
    Y_PLUS = "Y+"
    Y_MINUS = "Y-"

    @property
    def base_beta(self) -> float:
        return _BASE_BETA[self]

    @property
    def basis(self) -> str:
        return "x" if self in (StateTag.X_PLUS, StateTag.X_MINUS) else "y"

    @property
    def sign(self) -> int:
        return 1 if self in (StateTag.X_PLUS, StateTag.Y_PLUS) else -1

    @property
    def index(self) -> int:
        return _TAG_ORDER.index(self)

    @classmethod
    def from_basis(cls, basis: str, sign: int) -> "StateTag":
        if basis == "x":
            return cls.X_PLUS if sign > 0 else cls.X_MINUS
        if basis == "y":
            return cls.Y_PLUS if sign > 0 else cls.Y_MINUS
        raise ValueError(f"unknown basis {basis!r}")


_BASE_BETA = {
    StateTag.X_PLUS: 0.0,
    StateTag.X_MINUS: math.pi,
    StateTag.Y_PLUS: math.pi / 2,
    StateTag.Y_MINUS: 3 * math.pi / 2,
}
# Row order of the outcome table: n1/n2 for X+, n3/n4 for X-, n5/n6 for Y+, n7/n8 for Y-.
_TAG_ORDER = (StateTag.X_PLUS, StateTag.X_MINUS, StateTag.Y_PLUS, StateTag.Y_MINUS)
TAGS = _TAG_ORDER


@dataclass(frozen=True)
class StateLabel:
    """Alice's private record of what she sent: tag plus the offset added to beta."""

    tag: StateTag
    shift: float = 0.0

    @property
    def beta(self) -> float:
        return wrap(self.tag.base_beta + self.shift)

    def state(self) -> QubitState:
        return QubitState.equatorial(self.beta)


def encode_phase(state: QubitState, phi: float, passes: int = 1) -> QubitState:
    """Apply the phase gate ``passes`` times: ``beta -> beta + passes*phi``."""
    if passes < 1:
        raise ValueError(f"passes must be >= 1, got {passes}")
    return QubitState(state.alpha, state.beta + passes * phi)


def plus_probability(state: QubitState, basis: MeasurementBasis) -> float:
    zeta = state.beta - basis.epsilon_m
    p = 0.5 * (
        1.0
        + math.cos(state.alpha) * math.cos(basis.gamma)
        + math.sin(state.alpha) * math.sin(basis.gamma) * math.cos(zeta)
    )
    # cos products can overshoot [0, 1] by an ulp
    return min(1.0, max(0.0, p))


def outcome_probability(state: QubitState, basis: MeasurementBasis, outcome: int) -> float:
    """Probability of ``outcome`` (+1 or -1) when ``state`` is measured in ``basis``."""
    p = plus_probability(state, basis)
    if outcome == 1:
        return p
    if outcome == -1:
        return 1.0 - p
    raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")


def sample_outcome(state: QubitState, basis: MeasurementBasis, rng: np.random.Generator) -> int:
    return 1 if rng.random() < plus_probability(state, basis) else -1
