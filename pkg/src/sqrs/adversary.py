"""Eavesdropper strategies and the analytics that go with them.

Strategies subclass :class:`~sqrs.protocol.ChannelAttack` and plug into
:func:`~sqrs.protocol.run_session`. Whatever Eve learns about individual
qubits is kept as :class:`Capture` objects in an :class:`EveKnowledge`, from
which :func:`eve_accumulate` builds her posterior over the phase using only
the public classical stream.
"""

from __future__ import annotations

from collections import Counter
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .estimation import DEFAULT_K, LikelihoodGrid, _normalize_log, grid_thetas, likelihood_from_counts, marginalize_offset
from .information import eve_posterior
from .photonics import CoherentSource
from .protocol import (
    AliceConfig,
    BobConfig,
    ChannelAttack,
    CheckResult,
    ClassicalMessage,
    Detector,
    MessageKind,
    QubitRecord,
    alice_check,
    alice_prepare,
    bob_measure,
    bob_route,
    counts_from_stream,
)
from .qubit import TAGS, MeasurementBasis, QubitState, StateLabel, StateTag, angular_distance, plus_probability


class AttackKind(str, Enum):
    NONE = "None"
    MEASURE_RESEND = "MeasureResend"
    PHOTON_SPLIT = "PhotonSplit"
    SPOOF_FLIP = "SpoofFlip"
    MITM_RELABEL = "MitmRelabel"
    IMPERSONATE_ALICE = "ImpersonateAlice"
    IMPERSONATE_BOB = "ImpersonateBob"


@dataclass(frozen=True)
class Capture:
    """Eve's belief about the state Bob received for one qubit.

    ``betas``/``weights`` give a distribution over equatorial states. ``kind``
    is ``"label"`` (exact copy knowledge), ``"soft"`` (single split photon) or
    ``"resent"`` (Eve's own resent state).
    """

    qubit_id: int
    kind: str
    betas: tuple[float, ...]
    weights: tuple[float, ...]
    correct: bool | None = None


@dataclass
class EveKnowledge:
    captures: dict[int, Capture] = field(default_factory=dict)

    def add(self, capture: Capture) -> None:
        self.captures[capture.qubit_id] = capture

    def posterior(
        self, stream: Iterable[ClassicalMessage], passes: int = 1, d1_epsilon: float = 0.0, k_bins: int = DEFAULT_K
    ) -> LikelihoodGrid:
        return eve_accumulate(stream, self.captures, passes, d1_epsilon, k_bins)


def _eve_basis(basis: str, shift: float) -> MeasurementBasis:
    return MeasurementBasis.equatorial(shift + (0.0 if basis == "x" else math.pi / 2))


@dataclass(frozen=True)
class MeasureResendResult:
    resent: QubitState
    guess: StateTag
    basis: str
    correct: bool


def measure_resend(
    state: QubitState, rng: np.random.Generator, eve_basis: str | None = None, shift: float = 0.0
) -> MeasureResendResult:
    """Measure in the sigma_x or sigma_y basis (random if unspecified) and resend the outcome state.

    ``shift`` is Eve's guess of Alice's secret rotation. ``correct`` is true
    when the resent state equals the one Alice sent.
    """
    if eve_basis is None:
        eve_basis = "x" if rng.random() < 0.5 else "y"
    basis = _eve_basis(eve_basis, shift)
    outcome = 1 if rng.random() < plus_probability(state, basis) else -1
    guess = StateTag.from_basis(eve_basis, outcome)
    resent = StateLabel(guess, shift).state()
    return MeasureResendResult(resent, guess, eve_basis, angular_distance(resent.beta, state.beta) < 1e-9)


def photon_split(
    photons: int,
    state: QubitState,
    rng: np.random.Generator,
    delta: float = math.pi / 2,
    gamma: float = 0.0,
    qubit_id: int = 0,
    shift: float = 0.0,
) -> Capture | None:
    """What Eve learns from the surplus photons of one pulse.

    One photon leaves nothing to split. With two, Eve projects her copy onto
    ``cos(delta/2)|0> + sin(delta/2) e^{i gamma}|1>`` and keeps the Bayesian
    posterior over the four states; with three or more she is granted the
    exact state.
    """
    if photons <= 1:
        return None
    if photons >= 3:
        return Capture(qubit_id, "label", (state.beta,), (1.0,), True)
    basis = MeasurementBasis(delta, gamma)
    outcome = 1 if rng.random() < plus_probability(state, basis) else -1
    post = eve_posterior(delta, gamma, outcome, shift=shift)
    return Capture(
        qubit_id,
        "soft",
        tuple(tag.base_beta + shift for tag in TAGS),
        tuple(post[tag] for tag in TAGS),
    )


class MeasureResend(ChannelAttack):
    """Intercept a fraction of qubits, measure and resend.

    With ``swap_test_labels`` Eve also swaps D2/D3 in the reveal message when
    the real detector's basis differs from the one she measured in.
    """

    kind = AttackKind.MEASURE_RESEND.value

    def __init__(self, fraction: float = 1.0, basis: str | None = None, shift: float = 0.0, swap_test_labels: bool = False):
        if not 0.0 <= fraction <= 1.0:
            raise ValueError(f"attack fraction must lie in [0, 1], got {fraction!r}")
        self.fraction = fraction
        self.basis = basis
        self.shift = shift
        self.swap_test_labels = swap_test_labels
        self.knowledge = EveKnowledge()
        self._bases: dict[int, str] = {}

    def intercept(self, qubit_id, state, rng, photons=1):
        if self.fraction < 1.0 and rng.random() >= self.fraction:
            return state, False
        res = measure_resend(state, rng, self.basis, self.shift)
        self._bases[qubit_id] = res.basis
        self.knowledge.add(Capture(qubit_id, "resent", (res.resent.beta,), (1.0,), res.correct))
        return res.resent, True

    def tamper_reveal(self, qubit_id, detector):
        if not self.swap_test_labels or qubit_id not in self._bases or not detector.is_test:
            return detector
        if detector.basis == self._bases[qubit_id]:
            return detector
        return Detector.D3 if detector is Detector.D2 else Detector.D2


class PhotonSplit(ChannelAttack):
    """Split every multi-photon pulse; never disturbs the photon Bob gets."""

    kind = AttackKind.PHOTON_SPLIT.value

    def __init__(self, delta: float = math.pi / 2, gamma: float = 0.0, shift: float = 0.0):
        self.delta = delta
        self.gamma = gamma
        self.shift = shift
        self.knowledge = EveKnowledge()

    def intercept(self, qubit_id, state, rng, photons=1):
        cap = photon_split(photons, state, rng, self.delta, self.gamma, qubit_id, self.shift)
        if cap is None:
            return state, False
        self.knowledge.add(cap)
        return state, True


class SpoofFlip(ChannelAttack):
    """Flip reported outcomes in flight.

    Before the detector is revealed Eve cannot tell D1 results from test
    results, so the in-session hook flips every result (and is caught by the
    test checks). The worst case where only D1 results are flipped is
    :func:`spoof_flip`, applied to a finished stream.
    """

    kind = AttackKind.SPOOF_FLIP.value

    def __init__(self, pre_reveal: bool = True):
        self.pre_reveal = pre_reveal

    def tamper_result(self, qubit_id, outcome):
        return -outcome if self.pre_reveal else outcome


def spoof_flip(stream: Sequence[ClassicalMessage], flip: str | Iterable[int] = "all") -> list[ClassicalMessage]:
    """Flip the outcomes of D1 results in a public stream.

    ``flip`` is ``"all"``, ``"none"`` or an explicit collection of qubit ids
    (only D1 ids among them are touched).
    """
    d1 = {m.qubit_id for m in stream if m.kind is MessageKind.REVEAL and m.detector is Detector.D1}
    if flip == "all":
        targets = d1
    elif flip == "none":
        targets = set()
    else:
        targets = d1 & set(flip)
    return [
        ClassicalMessage(m.qubit_id, m.kind, -m.outcome, m.detector)
        if m.kind is MessageKind.RESULT and m.qubit_id in targets
        else m
        for m in stream
    ]


@dataclass(frozen=True)
class MitmBudget:
    """How many qubits Eve can measure and hide behind relabelled tests."""

    p: float
    mu: float
    sigma: float
    eve_measured: float
    eve_info: float
    alice_info: float

    @property
    def info_ratio(self) -> float:
        return self.eve_info / self.alice_info


# Alice's information-gaining counts quoted for the man-in-the-middle figure.
QUOTED_ALICE_INFO = {0.8: 20, 0.9: 90, 0.95: 280}


def mitm_budget(p: float, mu: float | None = None) -> MitmBudget:
    """Eve's hiding budget for test fraction ``p``.

    Relabelling more than ``sigma = sqrt(mu p (1-p))`` tests would skew the
    declared detector counts, so Eve can measure ``sigma / p`` qubits and gains
    information from the ``(1 - p)`` of those that land on D1. Without ``mu``
    the session length that leaves Eve exactly one such qubit,
    ``p / (1-p)**3``, is used.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p!r}")
    if mu is None:
        mu = p / (1.0 - p) ** 3
    sigma = math.sqrt(mu * p * (1.0 - p))
    measured = math.sqrt(mu * (1.0 - p) / p)
    return MitmBudget(p, mu, sigma, measured, (1.0 - p) * measured, mu * (1.0 - p))


def quoted_alice_info_discrepancies(tol: float = 0.5) -> list[tuple[float, float, int]]:
    """``(p, computed, quoted)`` for every quoted Alice count the formula does not reproduce."""
    out = []
    for p, quoted in QUOTED_ALICE_INFO.items():
        computed = mitm_budget(p).alice_info
        if abs(computed - quoted) > tol:
            out.append((p, computed, quoted))
    return out


class MitmRelabel(ChannelAttack):
    """Measure-and-resend a chosen set of qubits and hide the ones Bob tests.

    When a targeted qubit is revealed as a test, Eve rewrites the reveal to
    D1 (up to ``budget`` times) so Alice never checks it.
    """

    kind = AttackKind.MITM_RELABEL.value

    def __init__(self, targets: Iterable[int], budget: int, basis: str | None = None, shift: float = 0.0):
        if budget < 0:
            raise ValueError("relabel budget must be nonnegative")
        self.targets = frozenset(int(t) for t in targets)
        self.budget = int(budget)
        self.basis = basis
        self.shift = shift
        self.knowledge = EveKnowledge()
        self.relabeled: list[int] = []

    @classmethod
    def for_session(cls, mu: int, p: float, rng: np.random.Generator, **kw) -> "MitmRelabel":
        b = mitm_budget(p, mu)
        n = min(mu, int(round(b.eve_measured)))
        targets = rng.choice(mu, size=n, replace=False) if n else []
        return cls(targets, int(math.floor(b.sigma)), **kw)

    def intercept(self, qubit_id, state, rng, photons=1):
        if qubit_id not in self.targets:
            return state, False
        res = measure_resend(state, rng, self.basis, self.shift)
        self.knowledge.add(Capture(qubit_id, "resent", (res.resent.beta,), (1.0,), res.correct))
        return res.resent, True

    def tamper_reveal(self, qubit_id, detector):
        if qubit_id in self.targets and detector.is_test and len(self.relabeled) < self.budget:
            self.relabeled.append(qubit_id)
            return Detector.D1
        return detector


def mitm_relabel(
    stream: Sequence[ClassicalMessage], budget: int, measured_ids: Iterable[int]
) -> list[ClassicalMessage]:
    """Rewrite test reveals of measured qubits to D1, at most ``budget`` of them, in stream order."""
    measured = set(measured_ids)
    left = budget
    out = []
    for m in stream:
        if (
            left > 0
            and m.kind is MessageKind.REVEAL
            and m.qubit_id in measured
            and m.detector is not Detector.D1
        ):
            out.append(ClassicalMessage(m.qubit_id, m.kind, m.outcome, Detector.D1))
            left -= 1
        else:
            out.append(m)
    return out


def eve_accumulate(
    stream: Iterable[ClassicalMessage],
    captures: dict[int, Capture],
    passes: int = 1,
    d1_epsilon: float = 0.0,
    k_bins: int = DEFAULT_K,
) -> LikelihoodGrid:
    """Eve's posterior over the phase from public D1 results and her captures.

    For an uncaptured qubit both outcomes have probability 1/2 whatever the
    phase, so it contributes nothing. ``d1_epsilon`` is Eve's belief about
    Bob's D1 orientation.
    """
    results: dict[int, int] = {}
    d1_ids: list[int] = []
    for m in stream:
        if m.kind is MessageKind.RESULT:
            results[m.qubit_id] = m.outcome
        elif m.kind is MessageKind.REVEAL and m.detector is Detector.D1:
            d1_ids.append(m.qubit_id)
    # identical captures with the same outcome contribute identical terms
    multiplicity: Counter = Counter()
    for q in d1_ids:
        cap = captures.get(q)
        if cap is None or q not in results:
            continue
        multiplicity[(tuple(cap.betas), tuple(cap.weights), results[q])] += 1
    thetas = grid_thetas(k_bins)
    logs = np.zeros(k_bins)
    base = passes * thetas - d1_epsilon - math.pi / 2
    for (betas, weights, o), n in multiplicity.items():
        prob = np.zeros(k_bins)
        for beta, w in zip(betas, weights):
            prob += w * 0.5 * (1.0 + o * np.cos(beta + base))
        with np.errstate(divide="ignore"):
            logs += n * np.log(np.clip(prob, 0.0, None))
    return LikelihoodGrid(_normalize_log(logs), 0.0, True)


@dataclass(frozen=True)
class BobImpersonation:
    sent: int
    matched_tests: int
    fails: int
    first_fail: int | None

    @property
    def fail_rate(self) -> float:
        return self.fails / self.matched_tests if self.matched_tests else math.nan


def impersonate_bob(
    alice: AliceConfig, p_test: float, eps_guess: float, mu: int, rng: np.random.Generator
) -> BobImpersonation:
    """Eve poses as Bob without the test secret and reports honest-looking test results.

    Every qubit is processed (no early stop) so the per-test failure rate can
    be measured; ``first_fail`` is where Alice would have aborted.
    """
    fake_bob = BobConfig(p_test=p_test, epsilon=eps_guess, epsilon_tilde=eps_guess)
    real_bob = BobConfig(p_test=p_test, epsilon=alice.epsilon, epsilon_tilde=alice.epsilon_tilde)
    matched = fails = 0
    first = None
    for q in range(mu):
        label, state = alice_prepare(rng, alice)
        route = bob_route(rng, fake_bob)
        outcome = bob_measure(route, state, fake_bob, 0.0, rng)
        rec = QubitRecord(q, label, False, route, outcome)
        rec.messages = [
            ClassicalMessage(q, MessageKind.RESULT, outcome=outcome),
            ClassicalMessage(q, MessageKind.ACK),
            ClassicalMessage(q, MessageKind.REVEAL, detector=route),
        ]
        result = alice_check(rec, alice, real_bob)
        if route.is_test and route.basis == label.tag.basis:
            matched += 1
        if result is CheckResult.FAIL:
            fails += 1
            if first is None:
                first = q
    return BobImpersonation(mu, matched, fails, first)


@dataclass(frozen=True)
class AliceImpersonation:
    relative: LikelihoodGrid
    marginal: LikelihoodGrid


def impersonate_alice(
    bob: BobConfig,
    phi: float,
    mu: int,
    rng: np.random.Generator,
    k_bins: int = DEFAULT_K,
    offset_prior: np.ndarray | None = None,
) -> AliceImpersonation:
    """Eve poses as Alice, sending the four canonical states, and reads Bob's D1 results.

    ``relative`` is her posterior over ``phi - epsilon_tilde`` (single pass);
    ``marginal`` folds in her prior on Bob's D1 secret (uniform by default).
    """
    eve = AliceConfig()
    labels: dict[int, StateLabel] = {}
    stream: list[ClassicalMessage] = []
    for q in range(mu):
        label, state = alice_prepare(rng, eve)
        route = bob_route(rng, bob)
        outcome = bob_measure(route, state, bob, phi, rng)
        labels[q] = label
        stream.append(ClassicalMessage(q, MessageKind.RESULT, outcome=outcome))
        stream.append(ClassicalMessage(q, MessageKind.REVEAL, detector=route))
    counts = counts_from_stream(stream, labels, bob.passes)
    relative = likelihood_from_counts(counts, k_bins) if counts.mu else LikelihoodGrid.uniform(k_bins)
    if offset_prior is None:
        offset_prior = np.full(k_bins, 1.0 / k_bins)
    return AliceImpersonation(relative, marginalize_offset(relative, offset_prior))


@dataclass(frozen=True)
class FisherRatioEstimate:
    eve_fisher: float
    alice_fisher: float
    ratio: float
    ratio_se: float
    delivered: int


def _d1_prob_and_derivative(beta: np.ndarray, outcome: np.ndarray, phi: float):
    x = beta + phi - math.pi / 2
    return 0.5 * (1.0 + outcome * np.cos(x)), -0.5 * outcome * np.sin(x)


def split_attack_fisher(
    kbar: float,
    pulses: int,
    rng: np.random.Generator,
    phi: float = 0.4 * math.pi,
    delta: float = math.pi / 2,
    gamma: float = 0.0,
) -> FisherRatioEstimate:
    """Monte Carlo estimate of Eve's Fisher information relative to Alice's under photon splitting.

    Each pulse is followed to a single-pass D1 measurement. Fisher information
    is estimated as the mean squared score at the true phase, for Alice (who
    knows every state) and for Eve (who knows only what she split off). The
    standard error of the ratio uses the delta method.
    """
    source = CoherentSource(kbar)
    k = rng.poisson(source.kbar, size=pulses)
    k = k[k >= 1]
    n = k.size
    if n < 2:
        return FisherRatioEstimate(math.nan, math.nan, math.nan, math.nan, int(n))
    tag_idx = rng.integers(0, 4, size=n)
    base = np.array([t.base_beta for t in TAGS])
    beta = base[tag_idx]
    p_plus, _ = _d1_prob_and_derivative(beta, np.ones(n), phi)
    outcome = np.where(rng.random(n) < p_plus, 1, -1)
    p_obs, dp_obs = _d1_prob_and_derivative(beta, outcome, phi)
    score_a = np.where(p_obs > 0, dp_obs / np.where(p_obs > 0, p_obs, 1.0), 0.0)

    # two-photon pulses: soft knowledge from projecting one copy
    s = math.sin(delta)
    e_plus = 0.5 * (1.0 + s * np.cos(beta - gamma))
    e_out = np.where(rng.random(n) < e_plus, 1, -1)
    like = 0.5 * (1.0 + e_out[:, None] * s * np.cos(base[None, :] - gamma))
    post = like / like.sum(axis=1, keepdims=True)
    pj, dpj = _d1_prob_and_derivative(base[None, :], outcome[:, None], phi)
    p_soft = (post * pj).sum(axis=1)
    dp_soft = (post * dpj).sum(axis=1)
    score_soft = dp_soft / p_soft

    score_e = np.where(k >= 3, score_a, np.where(k == 2, score_soft, 0.0))
    a = score_a ** 2
    e = score_e ** 2
    mean_a, mean_e = a.mean(), e.mean()
    ratio = mean_e / mean_a
    cov = np.cov(np.vstack([e, a]), ddof=1) / n
    var = cov[0, 0] / mean_a**2 + mean_e**2 * cov[1, 1] / mean_a**4 - 2 * mean_e * cov[0, 1] / mean_a**3
    return FisherRatioEstimate(float(mean_e), float(mean_a), float(ratio), float(math.sqrt(max(var, 0.0))), int(n))
