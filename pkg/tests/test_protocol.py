import json
import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chi2_contingency

import oracles
from sqrs.adversary import MeasureResend, SpoofFlip, measure_resend
from sqrs.errors import OrderingViolationError
from sqrs.protocol import (
    AliceConfig,
    BobConfig,
    CheckResult,
    ClassicalMessage,
    Detector,
    MessageKind,
    QubitRecord,
    SessionTranscript,
    Verdict,
    alice_check,
    alice_prepare,
    bob_measure,
    bob_route,
    counts_from_stream,
    detector_count_zscore,
    detector_distribution_test,
    route_check_table,
    run_session,
)
from sqrs.qubit import TAGS, StateLabel, StateTag, angular_distance, wrap

ORDER = [MessageKind.RESULT, MessageKind.ACK, MessageKind.REVEAL]


def record(tag, detector, outcome, shift=0.0, qid=0):
    r = QubitRecord(qid, StateLabel(tag, shift), False, detector, outcome)
    r.messages = [
        ClassicalMessage(qid, MessageKind.RESULT, outcome=outcome),
        ClassicalMessage(qid, MessageKind.ACK),
        ClassicalMessage(qid, MessageKind.REVEAL, detector=detector),
    ]
    return r


def within_3sigma(count, n, p):
    return abs(count / n - p) <= 3 * oracles.binomial_sigma(p, n)


class TestConfigs:
    def test_alice_defaults(self):
        a = AliceConfig()
        assert a.state_probabilities == (0.25,) * 4

    def test_alice_probabilities_validated(self):
        with pytest.raises(ValueError):
            AliceConfig(state_probabilities=(0.5, 0.5, 0.1, 0.0))
        with pytest.raises(ValueError):
            AliceConfig(state_probabilities=(1.2, -0.2, 0.0, 0.0))

    def test_bob_routing_sums_to_one(self):
        b = BobConfig(p_test=0.3)
        assert sum(b.route_probabilities) == pytest.approx(1.0)
        assert b.route_probabilities == pytest.approx((0.7, 0.15, 0.15))

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1])
    def test_bob_p_open_interval(self, p):
        with pytest.raises(ValueError):
            BobConfig(p_test=p)

    def test_bob_passes_positive(self):
        with pytest.raises(ValueError):
            BobConfig(passes=0)


class TestPrepare:
    def test_canonical_states(self, rng):
        seen = {}
        for _ in range(200):
            label, state = alice_prepare(rng, AliceConfig())
            assert state.alpha == pytest.approx(math.pi / 2)
            seen[label.tag] = state.beta
        assert set(seen) == set(TAGS)
        for tag, beta in seen.items():
            assert angular_distance(beta, tag.base_beta) < 1e-12

    def test_shifted_by_epsilon_minus_eta(self, rng):
        alice = AliceConfig(epsilon=0.7, eta=0.2)
        for _ in range(50):
            label, state = alice_prepare(rng, alice)
            assert angular_distance(state.beta, wrap(label.tag.base_beta + 0.5)) < 1e-12

    def test_tag_frequencies(self, rng):
        n = 10**5
        counts = {t: 0 for t in TAGS}
        for _ in range(n):
            counts[alice_prepare(rng, AliceConfig())[0].tag] += 1
        assert all(within_3sigma(c, n, 0.25) for c in counts.values())

    def test_nonuniform(self, rng):
        alice = AliceConfig(state_probabilities=(0.5, 0.5, 0.0, 0.0))
        tags = {alice_prepare(rng, alice)[0].tag for _ in range(500)}
        assert tags == {StateTag.X_PLUS, StateTag.X_MINUS}


class TestRoute:
    def test_frequencies(self, rng):
        n = 10**5
        bob = BobConfig(p_test=0.5)
        counts = {d: 0 for d in Detector}
        for _ in range(n):
            counts[bob_route(rng, bob)] += 1
        assert within_3sigma(counts[Detector.D1], n, 0.5)
        assert within_3sigma(counts[Detector.D2], n, 0.25)
        assert within_3sigma(counts[Detector.D3], n, 0.25)


class TestMeasure:
    def test_matched_eigenbasis_deterministic(self, rng):
        alice = AliceConfig(epsilon=0.9)
        bob = BobConfig(epsilon=0.9)
        xp = StateLabel(StateTag.X_PLUS, alice.shift).state()
        yp = StateLabel(StateTag.Y_PLUS, alice.shift).state()
        assert all(bob_measure(Detector.D3, xp, bob, 1.0, rng) == 1 for _ in range(200))
        assert all(bob_measure(Detector.D2, yp, bob, 1.0, rng) == 1 for _ in range(200))

    def test_d1_x_plus_pi_over_6(self, rng):
        n = 10**5
        state = StateLabel(StateTag.X_PLUS).state()
        bob = BobConfig()
        plus = sum(bob_measure(Detector.D1, state, bob, math.pi / 6, rng) == 1 for _ in range(n))
        assert within_3sigma(plus, n, 0.75)


class TestCheck:
    def test_examples(self):
        alice = AliceConfig()
        assert alice_check(record(StateTag.X_PLUS, Detector.D3, 1), alice) is CheckResult.PASS
        assert alice_check(record(StateTag.X_PLUS, Detector.D3, -1), alice) is CheckResult.FAIL
        for o in (1, -1):
            assert alice_check(record(StateTag.X_PLUS, Detector.D2, o), alice) is CheckResult.UNINFORMATIVE
            assert alice_check(record(StateTag.Y_MINUS, Detector.D1, o), alice) is CheckResult.UNINFORMATIVE
        assert alice_check(record(StateTag.Y_MINUS, Detector.D2, -1), alice) is CheckResult.PASS
        assert alice_check(record(StateTag.Y_MINUS, Detector.D2, 1), alice) is CheckResult.FAIL

    def test_with_secret(self):
        alice = AliceConfig(epsilon=1.1)
        assert alice_check(record(StateTag.X_MINUS, Detector.D3, -1, alice.shift), alice) is CheckResult.PASS
        assert alice_check(record(StateTag.X_MINUS, Detector.D3, 1, alice.shift), alice) is CheckResult.FAIL

    def test_generic_eta_removes_deterministic_checks(self):
        # test detectors are aligned with epsilon, so an eta shift leaves no outcome impossible
        alice = AliceConfig(epsilon=1.1, eta=0.3)
        for o in (1, -1):
            assert alice_check(record(StateTag.X_MINUS, Detector.D3, o, alice.shift), alice) is CheckResult.PASS

    def test_quarter_turn_eta_keeps_checks(self):
        alice = AliceConfig(eta=math.pi / 2)
        # X+ rotated by -pi/2 is Y-, which D2 resolves deterministically
        assert alice_check(record(StateTag.X_PLUS, Detector.D2, 1, alice.shift), alice) is CheckResult.UNINFORMATIVE
        assert alice_check(record(StateTag.X_PLUS, Detector.D3, 1, alice.shift), alice) is CheckResult.PASS

    def test_incomplete_triple_raises(self):
        r = record(StateTag.X_PLUS, Detector.D3, 1)
        r.messages = r.messages[:2]
        with pytest.raises(OrderingViolationError):
            alice_check(r, AliceConfig())
        r.messages = [r.messages[1], r.messages[0], ClassicalMessage(0, MessageKind.REVEAL, detector=Detector.D3)]
        with pytest.raises(OrderingViolationError):
            alice_check(r, AliceConfig())


class TestSession:
    @pytest.mark.parametrize("seed", range(4))
    def test_no_attack_zero_fails(self, seed):
        rng = np.random.default_rng(seed)
        alice = AliceConfig(epsilon=rng.uniform(0, 6), epsilon_tilde=rng.uniform(0, 6), eta=rng.uniform(0, 6))
        bob = BobConfig(p_test=0.5, epsilon=alice.epsilon, epsilon_tilde=alice.epsilon_tilde)
        t = run_session(alice, bob, rng.uniform(0, 6), 10**4, rng=rng)
        assert not t.aborted
        assert len(t.records) == 10**4
        assert t.check_counts()[CheckResult.FAIL] == 0
        assert t.check_counts()[CheckResult.PASS] > 0

    def test_mu_positive(self):
        with pytest.raises(ValueError):
            run_session(AliceConfig(), BobConfig(), 0.1, 0)

    def test_abort_stops_at_first_fail(self, rng):
        t = run_session(AliceConfig(), BobConfig(), 0.3, 10**4, attack=SpoofFlip(), rng=rng)
        assert t.aborted
        last = t.records[-1]
        assert last.qubit_id == t.abort.qubit_id
        assert last.check is CheckResult.FAIL
        assert all(r.check is not CheckResult.FAIL for r in t.records[:-1])

    def test_single_attacked_qubit_fail_quarter(self, rng):
        # Eve measures in a random basis; the qubit lands on the test detector matching Alice's basis
        alice, bob = AliceConfig(), BobConfig()
        n = 40000
        fails = 0
        for i in range(n):
            label, state = alice_prepare(rng, alice)
            resent = measure_resend(state, rng).resent
            det = Detector.D3 if label.tag.basis == "x" else Detector.D2
            rec = record(label.tag, det, bob_measure(det, resent, bob, 0.0, rng), qid=i)
            fails += alice_check(rec, alice, bob) is CheckResult.FAIL
        assert within_3sigma(fails, n, 0.25)

    def test_measure_resend_detected(self, rng):
        n = 400
        caught = sum(
            run_session(AliceConfig(), BobConfig(p_test=0.5), 0.2, 100, attack=MeasureResend(), rng=rng).aborted
            for _ in range(n)
        )
        exact = 1 - (1 - 0.5 / 8) ** 100
        assert caught >= n - 5
        assert within_3sigma(caught, n, exact) or caught == n

    @settings(max_examples=25, deadline=None)
    @given(
        st.integers(0, 2**32 - 1),
        st.integers(1, 60),
        st.floats(0.05, 0.95),
        st.sampled_from(["none", "mr", "flip"]),
    )
    def test_ordering_and_timeline(self, seed, mu, p, kind):
        rng = np.random.default_rng(seed)
        attack = {"none": None, "mr": MeasureResend(0.5), "flip": SpoofFlip()}[kind]
        t = run_session(AliceConfig(epsilon=0.4), BobConfig(p_test=p, epsilon=0.4), 1.0, mu, attack=attack, rng=rng)
        for r in t.records:
            assert [m.kind for m in r.messages] == ORDER
            assert all(m.qubit_id == r.qubit_id for m in r.messages)
            tl = r.timeline
            assert tl.index("channel") < tl.index("route") < tl.index("measure")
            assert tl.index("result") < tl.index("ack") < tl.index("reveal") < tl.index("check")
        if t.aborted:
            assert t.records[-1].qubit_id == t.abort.qubit_id
        else:
            assert len(t.records) == mu
        stream = t.public_stream()
        seen = {}
        for m in stream:
            seen.setdefault(m.qubit_id, []).append(m.kind)
        assert all(v == ORDER for v in seen.values())


class TestInvariants:
    def test_secret_invariance(self):
        tables = []
        for eps in (0.0, math.pi / 5):
            alice = AliceConfig(epsilon=eps)
            bob = BobConfig(p_test=0.9, epsilon=eps)
            t = run_session(alice, bob, 0.5, 10**5, rng=np.random.default_rng(17 + int(eps * 10)))
            assert t.check_counts()[CheckResult.FAIL] == 0
            tables.append(route_check_table([t]))
        a, b = tables
        # matched cells are deterministic and identical, so compare the full flattened table
        observed = np.vstack([a.ravel(), b.ravel()])
        keep = observed.sum(axis=0) > 0
        _, pval, _, _ = chi2_contingency(observed[:, keep])
        assert pval > 1e-3

    def test_d1_depends_on_combination(self):
        mu = 20000
        configs = [(0.0, 0.0, 0.0, 1.0), (0.6, 0.2, 0.1, 0.7), (1.5, 0.9, 0.3, 0.7)]
        counts = []
        for eps, eps_t, eta, phi in configs:
            alice = AliceConfig(epsilon=eps, epsilon_tilde=eps_t, eta=eta)
            bob = BobConfig(p_test=0.2, epsilon=eps, epsilon_tilde=eps_t)
            t = run_session(alice, bob, phi, mu, rng=np.random.default_rng(99))
            assert phi + eps - eps_t - eta == pytest.approx(1.0)
            counts.append(np.array(counts_from_stream(t.public_stream(), t.labels()).counts))
        # same seed and same combined angle give the same draws up to rounding at the threshold
        assert np.abs(counts[0] - counts[1]).sum() <= 2
        assert np.abs(counts[0] - counts[2]).sum() <= 2

    def test_alice_likelihood_peaks_at_truth(self, rng):
        alice = AliceConfig(epsilon=0.6, epsilon_tilde=2.0, eta=0.4)
        bob = BobConfig(p_test=0.2, epsilon=0.6, epsilon_tilde=2.0)
        t = run_session(alice, bob, 1.2, 5000, rng=rng)
        from sqrs.estimation import map_estimate

        assert angular_distance(map_estimate(t.alice_likelihood()), 1.2) < 0.1

    def test_eve_marginal_half(self, rng):
        t = run_session(AliceConfig(), BobConfig(p_test=0.05), 1.1, 10**5, rng=rng)
        outs = [r.reported_outcome for r in t.records if r.revealed_detector is Detector.D1]
        n = len(outs)
        assert within_3sigma(sum(o == 1 for o in outs), n, 0.5)


def synthetic_transcript(rng, mu, p):
    """Transcript carrying only declared detectors, drawn with Bob's routing probabilities."""
    bob = BobConfig(p_test=p)
    t = SessionTranscript(AliceConfig(), bob)
    idx = rng.choice(3, size=mu, p=bob.route_probabilities)
    dets = list(Detector)
    t.records = [SimpleNamespace(revealed_detector=dets[i]) for i in idx]
    return t


class TestDetectorDistribution:
    def test_untampered_consistent(self, rng):
        runs = 300
        ok = sum(detector_distribution_test(synthetic_transcript(rng, 10**4, 0.9), 0.9) is Verdict.CONSISTENT for _ in range(runs))
        assert ok >= 0.99 * runs

    def test_relabel_five_sigma_suspicious(self):
        rng = np.random.default_rng(4)
        t = run_session(AliceConfig(), BobConfig(p_test=0.9), 0.3, 900, rng=rng)
        z0 = detector_count_zscore(t, 0.9)
        sigma = math.sqrt(900 * 0.9 * 0.1)
        tests = [r for r in t.records if r.revealed_detector.is_test][: int(5 * sigma)]
        for r in tests:
            r.messages[2] = ClassicalMessage(r.qubit_id, MessageKind.REVEAL, detector=Detector.D1)
        z1 = detector_count_zscore(t, 0.9)
        assert z1 - z0 == pytest.approx(-5.0)
        assert detector_distribution_test(t, 0.9) is Verdict.SUSPICIOUS

    def test_zero_relabels_binomial(self, rng):
        z = np.array([detector_count_zscore(synthetic_transcript(rng, 2000, 0.5), 0.5) for _ in range(400)])
        assert abs(z.mean()) < 3 / math.sqrt(400)
        assert z.std() == pytest.approx(1.0, abs=0.15)

    def test_rejects_aborted(self, rng):
        t = run_session(AliceConfig(), BobConfig(), 0.3, 10**4, attack=SpoofFlip(), rng=rng)
        with pytest.raises(ValueError):
            detector_distribution_test(t, 0.5)


class TestTranscriptExport:
    def test_public_view_redacts_labels(self, rng):
        t = run_session(AliceConfig(), BobConfig(), 0.3, 50, rng=rng)
        private = [json.loads(x) for x in t.to_lines()]
        public = [json.loads(x) for x in t.to_lines(public=True)]
        assert all("label" in r for r in private)
        assert all("label" not in r for r in public)
        assert [r["outcome"] for r in private] == [r["outcome"] for r in public]
        assert {"id", "route", "outcome", "attacked"} <= set(public[0])

    def test_abort_line(self, rng):
        t = run_session(AliceConfig(), BobConfig(), 0.3, 10**4, attack=SpoofFlip(), rng=rng)
        last = json.loads(t.to_lines()[-1])
        assert last["abort"]["id"] == t.abort.qubit_id

    def test_counts_from_stream_ignores_tests(self):
        stream = record(StateTag.X_PLUS, Detector.D1, 1, qid=0).messages + record(StateTag.X_PLUS, Detector.D3, 1, qid=1).messages
        labels = {0: StateLabel(StateTag.X_PLUS), 1: StateLabel(StateTag.X_PLUS)}
        assert counts_from_stream(stream, labels).counts == (1, 0, 0, 0, 0, 0, 0, 0)
