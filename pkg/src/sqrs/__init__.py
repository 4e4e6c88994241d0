"""Simulator and analysis toolkit for secure quantum remote sensing."""

from .adversary import (
    AttackKind,
    Capture,
    EveKnowledge,
    MeasureResend,
    MitmRelabel,
    PhotonSplit,
    SpoofFlip,
    eve_accumulate,
    impersonate_alice,
    impersonate_bob,
    measure_resend,
    mitm_budget,
    mitm_relabel,
    photon_split,
    spoof_flip,
)
from .errors import ConfigError, SqrsError
from .estimation import (
    CircularSummary,
    CountVector,
    LikelihoodGrid,
    circular_summary,
    combine,
    estimator_bias,
    flip_outcomes,
    likelihood_from_counts,
    map_estimate,
    mean_likelihood,
)
from .harness import AggregateResult, ExperimentConfig, run
from .information import (
    BlochVector,
    classical_fisher_binary,
    cramer_rao,
    eve_posterior,
    eve_split_bloch,
    general_cfi,
    qfi_qubit,
    splitting_ratio_bb84,
    splitting_ratio_sqrs,
)
from .photonics import CoherentSource, PulseRecord, exposure_report, sample_photon_count
from .protocol import (
    AliceConfig,
    BobConfig,
    ClassicalMessage,
    Detector,
    SessionTranscript,
    alice_check,
    alice_prepare,
    bob_measure,
    bob_route,
    detector_distribution_test,
    run_session,
)
from .qubit import MeasurementBasis, QubitState, StateLabel, StateTag, encode_phase, outcome_probability, sample_outcome

__version__ = "0.1.0"
