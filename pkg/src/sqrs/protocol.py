"""Alice and Bob as a sequential state machine over one sensing session.

Per qubit the pipeline is fixed:

    prepare -> channel (Eve may act) -> route -> measure
            -> Result -> Ack -> DetectorReveal -> check

Bob picks the detector only after the channel step, and reveals it only after
Alice has acknowledged the result. Alice stops at the first failed check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import OrderingViolationError
from .estimation import DEFAULT_K, CountVector, LikelihoodGrid, likelihood_from_counts
from .photonics import CoherentSource, PulseRecord
from .qubit import (
    TAGS,
    MeasurementBasis,
    QubitState,
    StateLabel,
    encode_phase,
    outcome_probability,
    plus_probability,
)

IMPOSSIBLE = 1e-9


class Detector(str, Enum):
    D1 = "D1"
    D2 = "D2"
    D3 = "D3"

    @property
    def is_test(self) -> bool:
        return self is not Detector.D1

    @property
    def basis(self) -> str | None:
        """Which eigenbasis a test detector checks (D2: sigma_y, D3: sigma_x)."""
        return {Detector.D1: None, Detector.D2: "y", Detector.D3: "x"}[self]


class MessageKind(str, Enum):
    RESULT = "Result"
    ACK = "Ack"
    REVEAL = "DetectorReveal"


class CheckResult(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    UNINFORMATIVE = "uninformative"


class Verdict(str, Enum):
    CONSISTENT = "consistent"
    SUSPICIOUS = "suspicious"


@dataclass(frozen=True)
class AliceConfig:
    """Alice's secrets and sending distribution.

    ``epsilon`` is shared with Bob for the test detectors, ``epsilon_tilde``
    for D1. ``eta`` is Alice's private operating-point shift.
    """

    epsilon: float = 0.0
    epsilon_tilde: float = 0.0
    eta: float = 0.0
    state_probabilities: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)

    def __post_init__(self):
        probs = tuple(float(p) for p in self.state_probabilities)
        if len(probs) != 4 or any(p < 0 for p in probs):
            raise ValueError("state_probabilities must be four nonnegative numbers")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError(f"state_probabilities must sum to 1, got {sum(probs)!r}")
        object.__setattr__(self, "state_probabilities", probs)
        object.__setattr__(self, "_cumulative", tuple(np.cumsum(probs)))
        labels = tuple(StateLabel(tag, self.epsilon - self.eta) for tag in TAGS)
        object.__setattr__(self, "_prepared", tuple((lab, lab.state()) for lab in labels))

    @property
    def shift(self) -> float:
        return self.epsilon - self.eta

    @property
    def analysis_offset(self) -> float:
        """Offset that maps D1 data onto the table model evaluated at the true phase."""
        return self.epsilon - self.epsilon_tilde - self.eta


@dataclass(frozen=True)
class BobConfig:
    p_test: float = 0.5
    passes: int = 1
    epsilon: float = 0.0
    epsilon_tilde: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.p_test < 1.0:
            raise ValueError(f"p_test must lie strictly between 0 and 1, got {self.p_test!r}")
        if self.passes < 1:
            raise ValueError(f"passes must be >= 1, got {self.passes!r}")
        bases = {
            # D1 is a sigma_y measurement rotated by the D1 secret
            Detector.D1: MeasurementBasis.equatorial(self.epsilon_tilde + math.pi / 2),
            Detector.D2: MeasurementBasis.equatorial(self.epsilon + math.pi / 2),
            Detector.D3: MeasurementBasis.equatorial(self.epsilon),
        }
        object.__setattr__(self, "_bases", bases)

    @property
    def route_probabilities(self) -> tuple[float, float, float]:
        return (1.0 - self.p_test, self.p_test / 2, self.p_test / 2)

    def basis(self, detector: Detector) -> MeasurementBasis:
        return self._bases[detector]


@dataclass(frozen=True, slots=True)
class ClassicalMessage:
    qubit_id: int
    kind: MessageKind
    outcome: int | None = None
    detector: Detector | None = None

    def to_dict(self) -> dict:
        d = {"id": self.qubit_id, "kind": self.kind.value}
        if self.outcome is not None:
            d["outcome"] = self.outcome
        if self.detector is not None:
            d["detector"] = self.detector.value
        return d


# timeline step names
PREPARE, CHANNEL, ROUTE, MEASURE, RESULT, ACK, REVEAL, CHECK = (
    "prepare", "channel", "route", "measure", "result", "ack", "reveal", "check",
)


@dataclass(slots=True)
class QubitRecord:
    qubit_id: int
    label: StateLabel | None
    attacked: bool
    route: Detector
    outcome: int
    messages: list[ClassicalMessage] = field(default_factory=list)
    check: CheckResult | None = None
    timeline: list[str] = field(default_factory=list)
    photons: int | None = None

    def message(self, kind: MessageKind) -> ClassicalMessage | None:
        for m in self.messages:
            if m.kind is kind:
                return m
        return None

    @property
    def complete(self) -> bool:
        return [m.kind for m in self.messages] == [MessageKind.RESULT, MessageKind.ACK, MessageKind.REVEAL]

    @property
    def reported_outcome(self) -> int | None:
        m = self.message(MessageKind.RESULT)
        return None if m is None else m.outcome

    @property
    def revealed_detector(self) -> Detector | None:
        m = self.message(MessageKind.REVEAL)
        return None if m is None else m.detector


@dataclass(frozen=True)
class Abort:
    qubit_id: int
    reason: str


@dataclass
class SessionTranscript:
    alice: AliceConfig
    bob: BobConfig
    records: list[QubitRecord] = field(default_factory=list)
    abort: Abort | None = None
    pulses: list[PulseRecord] = field(default_factory=list)

    @property
    def aborted(self) -> bool:
        return self.abort is not None

    def public_stream(self) -> list[ClassicalMessage]:
        return [m for r in self.records for m in r.messages]

    def labels(self) -> dict[int, StateLabel]:
        return {r.qubit_id: r.label for r in self.records if r.label is not None}

    def alice_counts(self) -> CountVector:
        return counts_from_stream(self.public_stream(), self.labels(), self.bob.passes)

    def alice_likelihood(self, k_bins: int = DEFAULT_K) -> LikelihoodGrid:
        return likelihood_from_counts(self.alice_counts(), k_bins, offset=self.alice.analysis_offset)

    def test_count(self) -> int:
        """Number of qubits Bob *declared* as tests."""
        return sum(1 for r in self.records if r.revealed_detector in (Detector.D2, Detector.D3))

    def check_counts(self) -> dict[CheckResult, int]:
        out = {c: 0 for c in CheckResult}
        for r in self.records:
            if r.check is not None:
                out[r.check] += 1
        return out

    def to_lines(self, public: bool = False) -> list[str]:
        """Line-delimited JSON export; ``public`` drops Alice's private labels."""
        lines = []
        for r in self.records:
            rec = {"id": r.qubit_id}
            if not public:
                rec["label"] = None if r.label is None else r.label.tag.value
            rec["route"] = r.route.value
            rec["detector"] = None if r.revealed_detector is None else r.revealed_detector.value
            rec["outcome"] = r.reported_outcome
            rec["attacked"] = r.attacked
            if r.check is not None:
                rec["check"] = r.check.value
            lines.append(json.dumps(rec))
        if self.abort is not None:
            lines.append(json.dumps({"abort": {"id": self.abort.qubit_id, "reason": self.abort.reason}}))
        return lines


def counts_from_stream(
    stream: Iterable[ClassicalMessage], labels: dict[int, StateLabel], passes: int = 1
) -> CountVector:
    """Alice's D1 counts: results whose revealed detector is D1, paired with her labels."""
    results: dict[int, int] = {}
    detectors: dict[int, Detector] = {}
    for m in stream:
        if m.kind is MessageKind.RESULT:
            results[m.qubit_id] = m.outcome
        elif m.kind is MessageKind.REVEAL:
            detectors[m.qubit_id] = m.detector
    pairs = (
        (labels[q].tag, results[q])
        for q, det in detectors.items()
        if det is Detector.D1 and q in results and q in labels
    )
    return CountVector.from_outcomes(pairs, passes)


class ChannelAttack:
    """Hook points for an eavesdropper. The base class is the honest channel."""

    kind = "None"

    def intercept(self, qubit_id: int, state: QubitState, rng: np.random.Generator, photons: int = 1):
        """Act on the qubit in flight; return ``(state delivered to Bob, attacked?)``."""
        return state, False

    def tamper_result(self, qubit_id: int, outcome: int) -> int:
        return outcome

    def tamper_reveal(self, qubit_id: int, detector: Detector) -> Detector:
        return detector


NO_ATTACK = ChannelAttack()


def alice_prepare(rng: np.random.Generator, config: AliceConfig) -> tuple[StateLabel, QubitState]:
    u = rng.random()
    cum = config._cumulative
    idx = 0
    while idx < 3 and u >= cum[idx]:
        idx += 1
    return config._prepared[idx]


def bob_route(rng: np.random.Generator, config: BobConfig) -> Detector:
    u = rng.random()
    if u < 1.0 - config.p_test:
        return Detector.D1
    return Detector.D2 if u < 1.0 - config.p_test / 2 else Detector.D3


def bob_measure(
    route: Detector, state: QubitState, config: BobConfig, phi: float, rng: np.random.Generator
) -> int:
    if route is Detector.D1:
        state = encode_phase(state, phi, config.passes)
    return 1 if rng.random() < plus_probability(state, config.basis(route)) else -1


def alice_check(record: QubitRecord, alice: AliceConfig, bob: BobConfig | None = None) -> CheckResult:
    """Compare a revealed test result against what Alice's sent state allows.

    Fails only when the declared detector measures in the eigenbasis of the
    sent state and the reported outcome is impossible for that state.
    """
    if not record.complete:
        raise OrderingViolationError(
            f"qubit {record.qubit_id}: check needs Result, Ack, DetectorReveal in order, "
            f"have {[m.kind.value for m in record.messages]}"
        )
    detector = record.revealed_detector
    if detector is Detector.D1 or record.label is None:
        return CheckResult.UNINFORMATIVE
    if record.label.tag.basis != detector.basis:
        return CheckResult.UNINFORMATIVE
    if bob is None:
        bob = BobConfig(epsilon=alice.epsilon, epsilon_tilde=alice.epsilon_tilde)
    p = outcome_probability(record.label.state(), bob.basis(detector), record.reported_outcome)
    return CheckResult.FAIL if p < IMPOSSIBLE else CheckResult.PASS


def run_session(
    alice: AliceConfig,
    bob: BobConfig,
    phi: float,
    mu: int,
    attack: ChannelAttack | None = None,
    rng: np.random.Generator | None = None,
    source: CoherentSource | None = None,
) -> SessionTranscript:
    """Run ``mu`` delivered qubits through the protocol, stopping at the first failed check.

    With a coherent ``source`` every pulse gets a Poisson photon number; empty
    pulses are logged in ``pulses`` but never reach Bob.
    """
    if mu < 1:
        raise ValueError(f"mu must be >= 1, got {mu}")
    attack = attack or NO_ATTACK
    rng = rng if rng is not None else np.random.default_rng()
    transcript = SessionTranscript(alice, bob)
    delivered = 0
    pulse_id = 0
    while delivered < mu:
        qid = pulse_id
        pulse_id += 1
        photons = None
        if source is not None:
            photons = int(rng.poisson(source.kbar))
            transcript.pulses.append(PulseRecord(qid, photons))
            if photons == 0:
                continue
        delivered += 1

        label, state = alice_prepare(rng, alice)
        timeline = [PREPARE]
        state, attacked = attack.intercept(qid, state, rng, 1 if photons is None else photons)
        timeline.append(CHANNEL)
        route = bob_route(rng, bob)
        timeline.append(ROUTE)
        outcome = bob_measure(route, state, bob, phi, rng)
        timeline.append(MEASURE)
        record = QubitRecord(qid, label, attacked, route, outcome, timeline=timeline, photons=photons)
        transcript.records.append(record)

        record.messages.append(
            ClassicalMessage(qid, MessageKind.RESULT, outcome=attack.tamper_result(qid, outcome))
        )
        timeline.append(RESULT)
        record.messages.append(ClassicalMessage(qid, MessageKind.ACK))
        timeline.append(ACK)
        record.messages.append(
            ClassicalMessage(qid, MessageKind.REVEAL, detector=attack.tamper_reveal(qid, route))
        )
        timeline.append(REVEAL)
        record.check = alice_check(record, alice, bob)
        timeline.append(CHECK)
        if record.check is CheckResult.FAIL:
            transcript.abort = Abort(qid, "fidelity check contradiction")
            break
    return transcript


def detector_count_zscore(transcript: SessionTranscript, p_test: float) -> float:
    mu = len(transcript.records)
    sigma = math.sqrt(mu * p_test * (1.0 - p_test))
    return (transcript.test_count() - mu * p_test) / sigma


def detector_distribution_test(
    transcript: SessionTranscript, p_test: float, significance_sigma: float = 3.0
) -> Verdict:
    """Binomial check on how many qubits Bob declared as tests."""
    if transcript.aborted:
        raise ValueError("distribution test needs a complete (non-aborted) transcript")
    z = detector_count_zscore(transcript, p_test)
    return Verdict.SUSPICIOUS if abs(z) > significance_sigma else Verdict.CONSISTENT


def route_check_table(transcripts: Sequence[SessionTranscript]) -> np.ndarray:
    """Counts over (revealed test detector, sent tag, reported outcome) cells, shape (2, 4, 2)."""
    table = np.zeros((2, 4, 2), dtype=int)
    for t in transcripts:
        for r in t.records:
            det = r.revealed_detector
            if det is None or det is Detector.D1 or r.label is None:
                continue
            table[0 if det is Detector.D2 else 1, r.label.tag.index, 0 if r.reported_outcome == 1 else 1] += 1
    return table
