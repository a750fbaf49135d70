import math

import numpy as np
import pytest
from scipy.stats import spearmanr

from noma_osd.codes import build_ebch
from noma_osd.harness.exit import sample_gaussian_llr, variance_of_mi
from noma_osd.lcsosd import (
    FLOOR_LOG,
    LcSosdParams,
    SpTracker,
    bit_error_prob,
    discard_check,
    lc_sosd_decode,
    lc_sosd_reference,
    log_success_prob,
    prior_ratio_rule,
    success_prob,
    tep_prior,
)
from noma_osd.osd import Tep, enumerate_teps, hard_decision, num_teps, order_received, reencode


def test_bit_error_prob_examples():
    assert bit_error_prob(0.0) == 0.5
    assert math.isclose(bit_error_prob(math.log(3)), 0.25, rel_tol=1e-14)
    assert math.isclose(bit_error_prob(-math.log(3)), 0.25, rel_tol=1e-14)
    p = bit_error_prob(np.linspace(-50, 50, 101))
    assert np.all((p > 0) & (p <= 0.5))


def test_tep_prior_examples():
    assert math.isclose(tep_prior(np.zeros(4, dtype=np.uint8), np.full(4, 0.5)), 0.5**4)
    assert tep_prior(np.zeros(3, dtype=np.uint8), np.zeros(3)) == 1.0
    assert math.isclose(tep_prior(np.array([1, 0]), np.array([0.1, 0.2])), 0.08, rel_tol=1e-12)


def test_discard_rule_examples():
    p = np.array([0.01, 0.2, 0.3, 0.4])
    e0 = np.zeros(4, dtype=np.uint8)
    assert not discard_check(e0, p, 0.9)
    assert not discard_check(np.array([1, 1, 1, 1]), p, 0.0)
    assert discard_check(np.array([1, 0, 0, 0]), p, 0.05)
    # adding a position never increases the statistic
    stat = lambda e: np.prod([p[i] / (1 - p[i]) for i in np.flatnonzero(e)])
    e = np.array([0, 1, 0, 0])
    e2 = np.array([1, 1, 0, 0])
    assert stat(e2) <= stat(e)
    assert prior_ratio_rule(e2, p, stat(e2)) and not prior_ratio_rule(e2, p, stat(e2) * 0.999)


def test_params_validation():
    with pytest.raises(ValueError):
        LcSosdParams(lambda_s=0.4)
    with pytest.raises(ValueError):
        LcSosdParams(lambda_p=-1)
    s = LcSosdParams.sosd(3)
    assert (s.m, s.lambda_s, s.lambda_p) == (3, 1.0, 0.0)


def _noisy(code, rng, s2, c=None):
    if c is None:
        b = rng.integers(0, 2, size=code.k, dtype=np.uint8)
        c = (b.astype(np.int64) @ code.G % 2).astype(np.uint8)
    r = (1.0 - 2.0 * c) + math.sqrt(s2 / 2) * rng.normal(size=code.n)
    return c, 4.0 * r / s2


def test_success_prob_noiseless(c84):
    ell = np.full(8, 40.0)
    st_ = order_received(c84, ell)
    e = Tep(np.zeros(4, dtype=np.uint8))
    assert success_prob(e, reencode(st_, e), st_) > 1 - 1e-12


def test_success_prob_ranks_like_exact_posterior(c84):
    rng = np.random.default_rng(3)
    s2 = 10 ** (-0.3)
    ok = 0
    frames = 300
    for _ in range(frames):
        _, ell = _noisy(c84, rng, s2)
        st_ = order_received(c84, ell)
        sp, post = [], []
        for e in enumerate_teps(4, 4):
            ce = reencode(st_, e)
            sp.append(log_success_prob(e, ce, st_))
            post.append(0.5 * np.sum(ell * (1.0 - 2.0 * st_.to_original(ce))))
        ok += spearmanr(sp, post)[0] > 0
    assert ok / frames >= 0.95


def test_true_tep_has_max_sp_at_6db(c84):
    rng = np.random.default_rng(4)
    s2 = 10 ** (-0.6)
    hits = 0
    frames = 400
    for _ in range(frames):
        c, ell = _noisy(c84, rng, s2)
        st_ = order_received(c84, ell)
        sps = [log_success_prob(e, reencode(st_, e), st_) for e in enumerate_teps(4, 4)]
        ct = st_.to_ordered(c)
        eb = Tep((st_.y_tilde ^ ct)[:4])
        hits += log_success_prob(eb, ct, st_) >= max(sps) - 1e-12
    assert hits / frames >= 0.90


@pytest.mark.parametrize("nk,m", [((8, 4), 2), ((64, 16), 3), ((64, 30), 2)])
@pytest.mark.parametrize("lam", [(0.99, 1e-5), (1.0, 0.0), (0.6, 1e-2)])
def test_kernel_matches_reference(nk, m, lam):
    code = build_ebch(*nk)
    params = LcSosdParams(m, *lam)
    rng = np.random.default_rng(11)
    for mi in (0.3, 0.6, 0.9):
        s2 = variance_of_mi(mi)
        for _ in range(15):
            ell = sample_gaussian_llr(np.zeros(code.n, dtype=np.uint8), s2, rng)
            a = lc_sosd_decode(code, ell, params)
            b = lc_sosd_reference(code, ell, params)
            assert np.allclose(a.delta, b.delta, rtol=1e-9, atol=1e-9)
            assert np.array_equal(a.c_op, b.c_op)
            assert (a.n_teps, a.n_discarded, a.terminated_early) == (b.n_teps, b.n_discarded, b.terminated_early)
            assert math.isclose(a.log_gamma, b.log_gamma, rel_tol=1e-9, abs_tol=1e-12)


def test_sign_consistency_and_finiteness(c6430):
    rng = np.random.default_rng(5)
    for s2 in (0.5, 3.0, 15.0, 400.0):
        for _ in range(20):
            ell = sample_gaussian_llr(rng.integers(0, 2, 64), s2, rng)
            out = lc_sosd_decode(c6430, ell, LcSosdParams(2))
            assert np.all(np.isfinite(out.delta))
            # positions that saw both bit values: the posterior picks c_op
            seen = ~np.isclose(np.abs(out.delta), FLOOR_LOG)
            post = hard_decision(out.delta + np.clip(ell, -50, 50))
            assert np.array_equal(post[seen], out.c_op[seen])
            # floored positions: the extrinsic itself points to c_op
            assert np.array_equal(hard_decision(out.delta[~seen]), out.c_op[~seen])
            assert 0.0 <= out.gamma <= 1.0


def test_early_exit_soundness(c84):
    rng = np.random.default_rng(6)
    params = LcSosdParams(2, 0.99, 1e-5)
    seen = 0
    for _ in range(300):
        ell = sample_gaussian_llr(np.zeros(8, dtype=np.uint8), variance_of_mi(0.8), rng)
        out = lc_sosd_decode(c84, ell, params)
        if out.terminated_early:
            seen += 1
            assert out.gamma >= 0.99
            assert out.n_teps + out.n_discarded < num_teps(4, 2)
    assert seen > 0


def test_degenerate_thresholds_full_search(c6416):
    rng = np.random.default_rng(8)
    for _ in range(10):
        ell = sample_gaussian_llr(np.zeros(64, dtype=np.uint8), 4.0, rng)
        out = lc_sosd_decode(c6416, ell, LcSosdParams.sosd(2))
        assert out.n_teps == num_teps(16, 2) and out.n_discarded == 0 and not out.terminated_early
        st_ = order_received(c6416, ell)
        best = max(log_success_prob(e, reencode(st_, e), st_) for e in enumerate_teps(16, 2))
        assert math.isclose(out.log_gamma, best, rel_tol=1e-12)


def test_floor_gives_extrinsic_toward_c_op(c6416):
    # very reliable input: every TEP touching the MRB is discarded, so the
    # MRB positions never see the opposite bit value
    ell = np.where(np.arange(64) % 2 == 0, -45.0, 45.0)
    out = lc_sosd_decode(c6416, ell, LcSosdParams(2))
    sign = 1.0 - 2.0 * out.c_op
    floored = np.isclose(np.abs(out.delta), FLOOR_LOG)
    assert floored.any()
    assert np.all(out.delta[floored] * sign[floored] > 0)


def test_work_decreases_with_mi(c84):
    params = LcSosdParams(2)
    means = []
    for i, mi in enumerate((0.5, 0.7, 0.9)):
        rng = np.random.default_rng(100 + i)
        s2 = variance_of_mi(mi)
        n = [lc_sosd_decode(c84, sample_gaussian_llr(np.zeros(8, dtype=np.uint8), s2, rng), params).n_teps
             for _ in range(3000)]
        means.append(np.mean(n))
    assert means[0] >= means[1] >= means[2]


def test_custom_discard_rule_runs_reference(c84):
    calls = []

    def never(e, p, lam):
        calls.append(1)
        return False

    ell = np.array([1.0, -0.5, 2.0, 0.3, -1.5, 0.7, 0.2, -2.2])
    out = lc_sosd_decode(c84, ell, LcSosdParams.sosd(2), discard_rule=never)
    assert len(calls) == 11 and out.n_teps == 11


def test_tracker_invariants():
    tr = SpTracker(4)
    tr.update(np.array([0, 1, 0, 1]), math.log(0.3))
    tr.update(np.array([1, 1, 0, 0]), math.log(0.6))
    tr.update(np.array([0, 0, 0, 0]), math.log(0.6))  # tie keeps the first c_op
    assert tr.c_op.tolist() == [1, 1, 0, 0]
    assert math.isclose(tr.p_max, 0.6)
    for i in range(4):
        assert max(tr.p_list_0[i], tr.p_list_1[i]) <= tr.p_max + 1e-15
        assert math.isclose((tr.p_list_1 if tr.c_op[i] else tr.p_list_0)[i], tr.p_max)
    # position 2 is 0 in every estimate so far
    assert not tr.complete()
    tr.update(np.array([0, 0, 1, 0]), math.log(0.1))
    assert tr.complete()
    assert tr.n_teps_evaluated == 4
