"""Seeded Monte Carlo experiments behind each figure-style scenario.

Every trial gets its own generator derived from ``(master_seed, scenario,
sweep index, trial index)``, so results do not depend on execution order and
a rerun with the same config reproduces every number bit for bit.
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Callable

import numpy as np

from .adversary import (
    QUOTED_ALICE_INFO,
    MeasureResend,
    MitmRelabel,
    PhotonSplit,
    SpoofFlip,
    mitm_budget,
    split_attack_fisher,
)
from .errors import ConfigError
from .estimation import (
    DEFAULT_K,
    MIN_K,
    UNDEFINED_R,
    CountVector,
    LikelihoodGrid,
    _normalize_log,
    circular_summary,
    combine,
    estimator_bias,
    find_peaks,
    grid_thetas,
    likelihood_from_counts,
    map_estimate,
    mean_likelihood,
    simulate_counts,
)
from .information import splitting_ratio_bb84, splitting_ratio_sqrs
from .protocol import AliceConfig, BobConfig, ChannelAttack, run_session
from .qubit import TAGS, TWO_PI, wrap_signed

SCENARIOS = (
    "fig2-identifiability",
    "fig3-circ-std",
    "fig4-bias",
    "fig5-multipass",
    "fig6-pass-sweep",
    "fig7-splitting",
    "fig8-mitm",
    "eq12-detection",
    "custom",
)

STATE_SETS = {"xy": (0.25, 0.25, 0.25, 0.25), "x": (0.5, 0.5, 0.0, 0.0), "y": (0.0, 0.0, 0.5, 0.5)}

ATTACKS = ("none", "measure-resend", "photon-split", "spoof-flip", "mitm-relabel")


def trial_rng(master_seed: int, scenario: str, sweep_idx: int, trial_idx: int) -> np.random.Generator:
    key = (zlib.crc32(scenario.encode()), sweep_idx, trial_idx)
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


def phi_grid(n: int) -> tuple[float, ...]:
    """``n`` phases at bin centres, avoiding exact multiples of pi/2."""
    return tuple((k + 0.5) * TWO_PI / n for k in range(n))


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    trials: int = 1000
    master_seed: int = 0
    k_bins: int = DEFAULT_K
    true_phi: float = 0.4 * math.pi
    mu: tuple[int, ...] = (100,)
    p_test: tuple[float, ...] = (0.5,)
    passes: tuple[int, ...] = (1,)
    qubits: tuple[int, ...] = (30,)
    phis: tuple[float, ...] = ()
    n_phi: int = 16
    kbar: tuple[float, ...] = (0.1,)
    f_e: float = 0.25
    states: tuple[str, ...] = ("xy",)
    attack: str = "none"
    attack_fraction: float = 1.0
    eve_delta: float = math.pi / 2
    eve_gamma: float = 0.0
    epsilon: float = 0.0
    epsilon_tilde: float = 0.0
    eta: float = 0.0
    random_secrets: bool = False

    def __post_init__(self):
        for name in ("mu", "p_test", "passes", "qubits", "phis", "kbar", "states"):
            value = getattr(self, name)
            if not isinstance(value, tuple):
                value = tuple(value) if isinstance(value, (list, np.ndarray)) else (value,)
                object.__setattr__(self, name, value)
        self.validate()

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {', '.join(SCENARIOS)}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.k_bins < MIN_K:
            raise ConfigError(f"k_bins must be >= {MIN_K}, got {self.k_bins}")
        if any(m < 1 for m in self.mu):
            raise ConfigError("mu values must be >= 1")
        if any(not 0.0 < p < 1.0 for p in self.p_test):
            raise ConfigError("p_test values must lie strictly between 0 and 1")
        if any(m < 1 for m in self.passes):
            raise ConfigError("passes must be >= 1")
        if any(q < 1 for q in self.qubits):
            raise ConfigError("qubits must be >= 1")
        if any(k <= 0.0 for k in self.kbar):
            raise ConfigError("kbar values must be positive")
        if not 0.0 <= self.f_e <= 1.0:
            raise ConfigError("f_e must lie in [0, 1]")
        if self.n_phi < 1:
            raise ConfigError("n_phi must be >= 1")
        for s in self.states:
            if s not in STATE_SETS:
                raise ConfigError(f"unknown state set {s!r}; expected one of {', '.join(STATE_SETS)}")
        if self.attack not in ATTACKS:
            raise ConfigError(f"unknown attack {self.attack!r}; expected one of {', '.join(ATTACKS)}")
        if not 0.0 <= self.attack_fraction <= 1.0:
            raise ConfigError("attack_fraction must lie in [0, 1]")

    @property
    def phi_values(self) -> tuple[float, ...]:
        return self.phis if self.phis else phi_grid(self.n_phi)

    @classmethod
    def for_scenario(cls, scenario: str, **overrides) -> "ExperimentConfig":
        base = dict(_SCENARIO_DEFAULTS.get(scenario, {}))
        base.update(overrides)
        return cls(scenario=scenario, **base)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in d.items()})


_SCENARIO_DEFAULTS: dict[str, dict[str, Any]] = {
    "fig2-identifiability": dict(mu=(100,), states=("xy", "x"), trials=1000),
    "fig3-circ-std": dict(mu=(25, 100, 400), trials=1000),
    "fig4-bias": dict(mu=(25, 100, 400), trials=1000),
    "fig5-multipass": dict(qubits=(30,), passes=(4,), trials=1000),
    "fig6-pass-sweep": dict(qubits=(20,), passes=tuple(range(1, 11)), trials=1000),
    "fig7-splitting": dict(kbar=(0.001, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0), trials=10000),
    "fig8-mitm": dict(p_test=(0.8, 0.9, 0.95), trials=1000, random_secrets=True),
    "eq12-detection": dict(mu=(20, 100, 100), p_test=(0.5, 0.5, 0.9), trials=1000, attack="measure-resend"),
    "custom": dict(mu=(100,), p_test=(0.5,), trials=100),
}


@dataclass
class AggregateResult:
    """Per-sweep-point statistics; ``rows`` follow ``columns`` order.

    ``curves`` maps a curve name to a probability-mass vector over the grid.
    """

    scenario: str
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    curves: dict[str, np.ndarray] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    config: ExperimentConfig | None = None

    def column(self, name: str) -> list[Any]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def records(self) -> list[dict[str, Any]]:
        return [dict(zip(self.columns, r)) for r in self.rows]

    def to_dict(self, include_curves: bool = False) -> dict[str, Any]:
        d = {
            "scenario": self.scenario,
            "master_seed": None if self.config is None else self.config.master_seed,
            "config": None if self.config is None else self.config.to_dict(),
            "columns": list(self.columns),
            "rows": [[_jsonable(v) for v in r] for r in self.rows],
            "notes": list(self.notes),
        }
        if include_curves:
            d["curves"] = {k: [float(x) for x in v] for k, v in self.curves.items()}
        return d

    def to_json(self, include_curves: bool = False) -> str:
        return json.dumps(self.to_dict(include_curves), indent=2, sort_keys=True)


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def _mean_se(values) -> tuple[float, float]:
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        return math.nan, math.nan
    mean = float(a.mean())
    se = float(a.std(ddof=1) / math.sqrt(a.size)) if a.size > 1 else math.nan
    return mean, se


# Circular std at the resultant-length floor; stands in for the infinite
# sentinel when averaging, so one flat posterior cannot swamp a mean.
NU_CAP = math.sqrt(-2.0 * math.log(UNDEFINED_R))


def _nu(grid: LikelihoodGrid) -> float:
    return min(circular_summary(grid).circ_std, NU_CAP)


def run(config: ExperimentConfig) -> AggregateResult:
    config.validate()
    result = _RUNNERS[config.scenario](config)
    result.config = config
    return result


def _fig2(cfg: ExperimentConfig) -> AggregateResult:
    res = AggregateResult(cfg.scenario, ["states", "mu", "n_peaks", "peak_ratio", "mean_nu", "mean_nu_se"])
    for si, (states, mu) in enumerate((s, m) for s in cfg.states for m in cfg.mu):
        grids, nus = [], []
        for t in range(cfg.trials):
            rng = trial_rng(cfg.master_seed, cfg.scenario, si, t)
            g = likelihood_from_counts(simulate_counts(rng, cfg.true_phi, mu, 1, STATE_SETS[states]), cfg.k_bins)
            grids.append(g)
            nus.append(_nu(g))
        mean = mean_likelihood(grids)
        peaks = find_peaks(mean, rel_height=0.05)
        heights = np.sort(mean.log_values[peaks])[::-1]
        ratio = float(math.exp(heights[1] - heights[0])) if heights.size > 1 else 0.0
        res.rows.append([states, mu, int(peaks.size), ratio, *_mean_se(nus)])
        res.curves[f"{states}_mu{mu}"] = mean.masses()
    return res


def _phi_mu_sweep(cfg: ExperimentConfig, with_bias: bool) -> AggregateResult:
    cols = ["mu", "phi", "mean_nu", "mean_nu_se"]
    if with_bias:
        cols += ["bias", "bias_se"]
    res = AggregateResult(cfg.scenario, cols)
    si = 0
    for mu in cfg.mu:
        for phi in cfg.phi_values:
            nus, ests = [], []
            for t in range(cfg.trials):
                rng = trial_rng(cfg.master_seed, cfg.scenario, si, t)
                g = likelihood_from_counts(simulate_counts(rng, phi, mu), cfg.k_bins)
                nus.append(_nu(g))
                ests.append(map_estimate(g))
            row = [mu, phi, *_mean_se(nus)]
            if with_bias:
                errs = np.array([wrap_signed(e - phi) for e in ests])
                try:
                    bias = estimator_bias(phi, ests)
                except ValueError:
                    bias = math.nan
                se = float(errs.std(ddof=1) / math.sqrt(errs.size)) if errs.size > 1 else math.nan
                row += [bias, se]
            res.rows.append(row)
            si += 1
    return res


def _fig3(cfg):
    return _phi_mu_sweep(cfg, with_bias=False)


def _fig4(cfg):
    return _phi_mu_sweep(cfg, with_bias=True)


def _fig5(cfg: ExperimentConfig) -> AggregateResult:
    res = AggregateResult(
        cfg.scenario,
        [
            "qubits", "passes",
            "nu_single", "nu_single_se",
            "nu_multi", "nu_multi_se",
            "nu_combined", "nu_combined_se",
            "nu_gain", "nu_gain_se",
            "multi_peaks", "peak_spacing_error_bins",
        ],
    )
    si = 0
    for q in cfg.qubits:
        for m in cfg.passes:
            single, multi, comb = [], [], []
            g_single, g_multi, g_comb = [], [], []
            for t in range(cfg.trials):
                rng = trial_rng(cfg.master_seed, cfg.scenario, si, t)
                a = simulate_counts(rng, cfg.true_phi, q)
                b = simulate_counts(rng, cfg.true_phi, q)
                c = simulate_counts(rng, cfg.true_phi, q, passes=m)
                gs = likelihood_from_counts(a + b, cfg.k_bins)
                gm = likelihood_from_counts(c, cfg.k_bins)
                gc = combine([likelihood_from_counts(a, cfg.k_bins), gm])
                single.append(_nu(gs))
                multi.append(_nu(gm))
                comb.append(_nu(gc))
                g_single.append(gs)
                g_multi.append(gm)
                g_comb.append(gc)
            mean_multi = mean_likelihood(g_multi)
            peaks = find_peaks(mean_multi, rel_height=0.05)
            spacing_err = _peak_spacing_error(peaks, m, cfg.k_bins)
            res.rows.append(
                [
                    q, m,
                    *_mean_se(single), *_mean_se(multi), *_mean_se(comb),
                    *_mean_se(np.array(single) - np.array(comb)),
                    int(peaks.size), spacing_err,
                ]
            )
            res.curves[f"single_{2 * q}"] = mean_likelihood(g_single).masses()
            res.curves[f"pass{m}_{q}"] = mean_multi.masses()
            res.curves[f"combined_{q}+pass{m}_{q}"] = mean_likelihood(g_comb).masses()
            si += 1
    return res


def _peak_spacing_error(peaks: np.ndarray, m: int, k_bins: int) -> float:
    """Largest deviation (in bins) of consecutive circular peak gaps from ``K/m``."""
    if peaks.size != m or m < 2:
        return math.nan if peaks.size != m else 0.0
    gaps = np.diff(np.concatenate([peaks, [peaks[0] + k_bins]]))
    return float(np.max(np.abs(gaps - k_bins / m)))


def _fig6(cfg: ExperimentConfig) -> AggregateResult:
    res = AggregateResult(cfg.scenario, ["qubits", "passes", "nu_combined", "nu_combined_se"])
    si = 0
    for q in cfg.qubits:
        for m in cfg.passes:
            nus = []
            for t in range(cfg.trials):
                rng = trial_rng(cfg.master_seed, cfg.scenario, si, t)
                a = simulate_counts(rng, cfg.true_phi, q)
                c = simulate_counts(rng, cfg.true_phi, q, passes=m)
                nus.append(_nu(combine([likelihood_from_counts(a, cfg.k_bins), likelihood_from_counts(c, cfg.k_bins)])))
            res.rows.append([q, m, *_mean_se(nus)])
            si += 1
    return res


def _fig7(cfg: ExperimentConfig) -> AggregateResult:
    res = AggregateResult(
        cfg.scenario,
        ["kbar", "ratio_bb84", "ratio_sqrs", "sqrs_over_bb84", "eve_ratio", "eve_ratio_se", "delivered"],
    )
    for si, kbar in enumerate(cfg.kbar):
        bb, sq = splitting_ratio_bb84(kbar), splitting_ratio_sqrs(kbar, cfg.f_e)
        rng = trial_rng(cfg.master_seed, cfg.scenario, si, 0)
        est = split_attack_fisher(kbar, cfg.trials, rng, cfg.true_phi, cfg.eve_delta, cfg.eve_gamma)
        res.rows.append([kbar, bb, sq, sq / bb, est.ratio, est.ratio_se, est.delivered])
    return res


def _d1_plus(beta: float, phi: float, eps_tilde: float) -> float:
    return 0.5 * (1.0 + math.cos(beta + phi - eps_tilde - math.pi / 2))


def _fig8(cfg: ExperimentConfig) -> AggregateResult:
    """Man-in-the-middle relabelling at Eve's hiding budget.

    Qubits Eve leaves alone are drawn in bulk from the table model; the few
    she measures are followed individually through Bob's detectors and her
    relabelling. Eve keeps only her measured qubits that genuinely went to D1.
    """
    res = AggregateResult(
        cfg.scenario,
        [
            "p", "mu", "sigma", "eve_measured", "eve_info", "alice_info", "quoted_alice_info",
            "eve_info_empirical", "eve_info_empirical_se",
            "relabels", "relabels_se",
            "detect_freq", "detect_freq_se",
            "alice_map_error_bins", "alice_mean_nu", "alice_mean_nu_se",
            "eve_maxmin",
        ],
    )
    thetas = grid_thetas(cfg.k_bins)
    phi = cfg.true_phi
    bases = np.array([t.base_beta for t in TAGS])
    for si, p in enumerate(cfg.p_test):
        b = mitm_budget(p)
        mu = int(round(b.mu))
        n_meas = int(round(b.eve_measured))
        budget = int(math.floor(b.sigma))
        alice_sum = np.zeros(cfg.k_bins)
        eve_sum = np.zeros(cfg.k_bins)
        nus, eve_info, relabels, detected = [], [], [], []
        for t in range(cfg.trials):
            rng = trial_rng(cfg.master_seed, cfg.scenario, si, t)
            # the test secret may be redrawn per session; the D1 orientation is known to Eve
            eps = float(rng.uniform(0.0, TWO_PI)) if cfg.random_secrets else cfg.epsilon
            eps_t = cfg.epsilon_tilde
            offset = eps - eps_t
            routes = rng.random(mu - n_meas)
            n_test_clean = int(np.count_nonzero(routes >= 1.0 - p))
            clean = simulate_counts(rng, phi, mu - n_meas - n_test_clean, offset=offset)
            extra = [0] * 8
            eve_logs = np.zeros(cfg.k_bins)
            used = 0
            n_relabel = 0
            declared_tests = n_test_clean
            for _ in range(n_meas):
                tag_i = int(rng.integers(4))
                beta_a = bases[tag_i] + eps
                eve_basis = 0.0 if rng.random() < 0.5 else math.pi / 2
                e_plus = 0.5 * (1.0 + math.cos(beta_a - eve_basis))
                beta_e = eve_basis if rng.random() < e_plus else eve_basis + math.pi
                u = rng.random()
                if u < 1.0 - p:
                    o = 1 if rng.random() < _d1_plus(beta_e, phi, eps_t) else -1
                    with np.errstate(divide="ignore"):
                        eve_logs += np.log(np.clip(0.5 * (1.0 + o * np.cos(beta_e + thetas - eps_t - math.pi / 2)), 0.0, None))
                    used += 1
                else:
                    test_eps = eps + (math.pi / 2 if u < 1.0 - p / 2 else 0.0)
                    o = 1 if rng.random() < 0.5 * (1.0 + math.cos(beta_e - test_eps)) else -1
                    if n_relabel >= budget:
                        declared_tests += 1
                        continue
                    n_relabel += 1
                extra[2 * tag_i + (0 if o == 1 else 1)] += 1
            counts = clean + CountVector(tuple(extra))
            g = likelihood_from_counts(counts, cfg.k_bins, offset=offset)
            alice_sum += g.masses()
            nus.append(_nu(g))
            eve = LikelihoodGrid(_normalize_log(eve_logs), 0.0, True)
            eve_sum += eve.masses()
            eve_info.append(used)
            relabels.append(n_relabel)
            sigma = math.sqrt(mu * p * (1.0 - p))
            detected.append(abs(declared_tests - mu * p) > 3.0 * sigma)
        alice_mean = LikelihoodGrid.from_masses(alice_sum / cfg.trials)
        eve_mean = eve_sum / cfg.trials
        k_hat = int(np.argmax(alice_mean.log_values))
        k_true = phi / (TWO_PI / cfg.k_bins)
        err = abs(k_hat - k_true)
        err = min(err, cfg.k_bins - err)
        res.rows.append(
            [
                p, mu, b.sigma, b.eve_measured, b.eve_info, b.alice_info, QUOTED_ALICE_INFO.get(p, math.nan),
                *_mean_se(eve_info), *_mean_se(relabels), *_mean_se(detected),
                err, *_mean_se(nus),
                float(eve_mean.max() / eve_mean.min()) if eve_mean.min() > 0 else math.inf,
            ]
        )
        res.curves[f"alice_p{p}"] = alice_mean.masses()
        res.curves[f"eve_p{p}"] = eve_mean / eve_mean.sum()
        quoted = QUOTED_ALICE_INFO.get(p)
        if quoted is not None and abs(quoted - b.alice_info) > 0.5:
            res.notes.append(
                f"p={p}: Alice information count from mu*(1-p) is {b.alice_info:.6g}, quoted figure value is {quoted}"
            )
    return res


def plugin_detection_probability(mu: int, p: float) -> float:
    """Abort probability with the matched-basis test count fixed at its mean ``mu p / 2``, each failing with probability 1/4."""
    return 1.0 - 0.75 ** (mu * p / 2.0)


def exact_detection_probability(mu: int, p: float) -> float:
    """Abort probability when each attacked qubit independently trips a check with probability ``p/8``."""
    return 1.0 - (1.0 - p / 8.0) ** mu


def _build_attack(cfg: ExperimentConfig, rng: np.random.Generator, mu: int, p: float) -> ChannelAttack | None:
    if cfg.attack == "none":
        return None
    if cfg.attack == "measure-resend":
        return MeasureResend(cfg.attack_fraction)
    if cfg.attack == "photon-split":
        return PhotonSplit(cfg.eve_delta, cfg.eve_gamma)
    if cfg.attack == "spoof-flip":
        return SpoofFlip(pre_reveal=True)
    if cfg.attack == "mitm-relabel":
        return MitmRelabel.for_session(mu, p, rng)
    raise ConfigError(f"unknown attack {cfg.attack!r}")


def _secrets(cfg: ExperimentConfig, rng: np.random.Generator) -> tuple[float, float]:
    if cfg.random_secrets:
        eps, eps_t = rng.uniform(0.0, TWO_PI, size=2)
        return float(eps), float(eps_t)
    return cfg.epsilon, cfg.epsilon_tilde


def _detection(cfg: ExperimentConfig) -> AggregateResult:
    if len(cfg.mu) != len(cfg.p_test):
        raise ConfigError("eq12-detection pairs mu and p_test element-wise; give lists of equal length")
    res = AggregateResult(
        cfg.scenario,
        ["mu", "p", "detect_freq", "detect_freq_se", "plugin", "exact", "z_plugin", "z_exact"],
    )
    for si, (mu, p) in enumerate(zip(cfg.mu, cfg.p_test)):
        hits = []
        for t in range(cfg.trials):
            rng = trial_rng(cfg.master_seed, cfg.scenario, si, t)
            eps, eps_t = _secrets(cfg, rng)
            alice = AliceConfig(eps, eps_t, cfg.eta)
            bob = BobConfig(p, cfg.passes[0], eps, eps_t)
            tr = run_session(alice, bob, cfg.true_phi, mu, _build_attack(cfg, rng, mu, p), rng)
            hits.append(tr.aborted)
        freq, se = _mean_se(hits)
        plug, ex = plugin_detection_probability(mu, p), exact_detection_probability(mu, p)
        res.rows.append([mu, p, freq, se, plug, ex, _zscore(freq, plug, cfg.trials), _zscore(freq, ex, cfg.trials)])
    return res


def _zscore(freq: float, prob: float, n: int) -> float:
    """Deviation of an observed frequency from ``prob`` in binomial standard deviations."""
    sd = math.sqrt(prob * (1.0 - prob) / n)
    if sd == 0.0:
        return 0.0 if freq == prob else math.inf
    return (freq - prob) / sd


def _custom(cfg: ExperimentConfig) -> AggregateResult:
    res = AggregateResult(
        cfg.scenario,
        ["mu", "p", "passes", "abort_freq", "abort_freq_se", "mean_nu", "mean_nu_se", "map_error", "map_error_se"],
    )
    si = 0
    for mu in cfg.mu:
        for p in cfg.p_test:
            for m in cfg.passes:
                aborts, nus, errs = [], [], []
                for t in range(cfg.trials):
                    rng = trial_rng(cfg.master_seed, cfg.scenario, si, t)
                    eps, eps_t = _secrets(cfg, rng)
                    alice = AliceConfig(eps, eps_t, cfg.eta)
                    bob = BobConfig(p, m, eps, eps_t)
                    tr = run_session(alice, bob, cfg.true_phi, mu, _build_attack(cfg, rng, mu, p), rng)
                    aborts.append(tr.aborted)
                    counts = tr.alice_counts()
                    if counts.mu:
                        g = tr.alice_likelihood(cfg.k_bins)
                        nus.append(_nu(g))
                        errs.append(abs(wrap_signed(map_estimate(g) - cfg.true_phi)))
                res.rows.append([mu, p, m, *_mean_se(aborts), *_mean_se(nus), *_mean_se(errs)])
                si += 1
    return res


_RUNNERS: dict[str, Callable[[ExperimentConfig], AggregateResult]] = {
    "fig2-identifiability": _fig2,
    "fig3-circ-std": _fig3,
    "fig4-bias": _fig4,
    "fig5-multipass": _fig5,
    "fig6-pass-sweep": _fig6,
    "fig7-splitting": _fig7,
    "fig8-mitm": _fig8,
    "eq12-detection": _detection,
    "custom": _custom,
}

__all__ = [
    "SCENARIOS",
    "ExperimentConfig",
    "AggregateResult",
    "run",
    "mean_likelihood",
    "trial_rng",
    "phi_grid",
    "plugin_detection_probability",
    "exact_detection_probability",
]
