import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from noma_osd.codes import CodeError, build_ebch
from noma_osd.harness.ml import ml_decode_bruteforce
from noma_osd.osd import (
    LLR_CLAMP,
    Tep,
    clamp_llr,
    enumerate_teps,
    hard_decision,
    num_teps,
    order_received,
    osd_decode,
    osd_decode_full,
    reencode,
    whd,
)


def test_hard_decision_examples():
    assert hard_decision([-1.2, 3.4]).tolist() == [1, 0]
    assert not hard_decision(np.zeros(5)).any()
    x = np.array([0.5, -2.0, 0.0, 3.0])
    flipped = hard_decision(-x)
    assert flipped.tolist() == [1, 0, 0, 1]  # zero stays 0


def test_clamp():
    assert clamp_llr([100.0, -1e9, 3.0]).tolist() == [LLR_CLAMP, -LLR_CLAMP, 3.0]


@pytest.mark.parametrize("k,m,count", [(4, 2, 11), (30, 3, 4526), (16, 6, 14893), (5, 0, 1), (3, 3, 8)])
def test_tep_counts(k, m, count):
    assert num_teps(k, m) == count
    if count < 20000:
        assert sum(1 for _ in enumerate_teps(k, m)) == count


def test_tep_order_weight_then_lexicographic():
    teps = list(enumerate_teps(4, 2))
    weights = [t.weight for t in teps]
    assert weights == sorted(weights)
    w2 = [t.support for t in teps if t.weight == 2]
    assert w2 == list(itertools.combinations(range(4), 2))
    assert teps[0].support == ()


def test_tep_order_bad_m():
    with pytest.raises(ValueError):
        list(enumerate_teps(4, 5))
    with pytest.raises(ValueError):
        list(enumerate_teps(4, -1))


def test_order_identity_on_sorted_systematic(c84):
    ell = np.array([8.0, 7, 6, 5, 4, 3, 2, 1])
    st_ = order_received(c84, ell)
    assert np.array_equal(st_.pi1, np.arange(8))
    assert np.array_equal(st_.sys.pi2, np.arange(8))


def test_order_reversed(c84):
    ell = np.arange(1.0, 9.0)
    st_ = order_received(c84, ell)
    assert np.array_equal(st_.pi1, np.arange(8)[::-1])


def test_order_stable_ties(c84):
    st_ = order_received(c84, np.ones(8))
    assert np.array_equal(st_.pi1, np.arange(8))


def test_order_against_naive_sort(c84, rng):
    for _ in range(200):
        ell = rng.normal(size=8) * 2
        st_ = order_received(c84, ell)
        alpha = np.abs(ell)
        naive = sorted(range(8), key=lambda i: (-alpha[i], i))
        assert st_.pi1.tolist() == naive
        assert np.array_equal(st_.y_tilde, (st_.ell_tilde < 0).astype(np.uint8))
        assert np.array_equal(st_.alpha_tilde, np.abs(st_.ell_tilde))
        if np.array_equal(st_.sys.pi2, np.arange(8)):
            assert np.all(np.diff(st_.alpha_tilde) <= 0)
            assert set(st_.perm[:4]) == set(naive[:4])


def test_permutation_roundtrip(c6430, rng):
    st_ = order_received(c6430, rng.normal(size=64))
    v = rng.normal(size=64)
    assert np.array_equal(st_.to_original(st_.to_ordered(v)), v)
    assert np.array_equal(st_.to_ordered(st_.to_original(v)), v)


def test_whd_examples():
    y = np.array([0, 1, 1, 0], dtype=np.uint8)
    a = np.array([1.0, 2.0, 3.0, 4.0])
    assert whd(y, y, a) == 0
    c = y.copy()
    c[2] ^= 1
    assert whd(c, y, a) == 3.0
    assert whd(1 - y, y, a) == 10.0


def test_reencode_zero_tep_keeps_mrb(c84, rng):
    st_ = order_received(c84, rng.normal(size=8))
    c = reencode(st_, np.zeros(4, dtype=np.uint8))
    assert np.array_equal(c[:4], st_.y_tilde[:4])


def test_reencode_linearity(c6416, rng):
    st_ = order_received(c6416, rng.normal(size=64))
    e1 = np.zeros(16, dtype=np.uint8)
    e2 = e1.copy()
    e2[5] = 1
    diff = reencode(st_, e1) ^ reencode(st_, e2)
    assert np.array_equal(diff, st_.sys.G_tilde[5])


def _true_pattern_reencodes(code, rng, trials):
    for _ in range(trials):
        b = rng.integers(0, 2, size=code.k, dtype=np.uint8)
        c = (b.astype(np.int64) @ code.G % 2).astype(np.uint8)
        x = 1.0 - 2.0 * c
        ell = 2.0 * (x + rng.normal(size=code.n)) / 1.0
        st_ = order_received(code, ell)
        c_t = st_.to_ordered(c)
        e_b = (st_.y_tilde ^ c_t)[: code.k]
        if not np.array_equal(reencode(st_, Tep(e_b)), c_t):
            return False
    return True


def test_true_pattern_reencodes_small(c84, c6416, rng):
    assert _true_pattern_reencodes(c84, rng, 500)
    assert _true_pattern_reencodes(c6416, rng, 200)


def _osd_reference(code, ell, m):
    st_ = order_received(code, ell)
    best, best_d = None, np.inf
    for e in enumerate_teps(code.k, m):
        c = reencode(st_, e)
        d = whd(c, st_.y_tilde, st_.alpha_tilde)
        if d < best_d:
            best, best_d = c, d
    return st_.to_original(best), best_d


@pytest.mark.parametrize("nk,m,sigma", [((8, 4), 2, 0.8), ((64, 16), 2, 0.8), ((64, 30), 2, 0.6)])
def test_osd_kernel_matches_reference(nk, m, sigma):
    code = build_ebch(*nk)
    rng = np.random.default_rng(7)
    for _ in range(60):
        ell = 2 * (1 + sigma * rng.normal(size=code.n)) / sigma**2
        c, d, count = osd_decode_full(code, ell, m)
        c_ref, d_ref = _osd_reference(code, ell, m)
        assert np.isclose(d, d_ref, rtol=1e-12, atol=1e-12)
        assert np.array_equal(c, c_ref)
        assert count == num_teps(code.k, m)


def test_osd_noiseless(c6430, rng):
    b = rng.integers(0, 2, size=30, dtype=np.uint8)
    c = (b.astype(np.int64) @ c6430.G % 2).astype(np.uint8)
    ell = 20.0 * (1.0 - 2.0 * c)
    out, d, _ = osd_decode_full(c6430, ell, 1)
    assert np.array_equal(out, c) and d == 0


def test_osd_order_k_is_ml(c84, rng):
    for _ in range(500):
        ell = 2 * (1 + 0.9 * rng.normal(size=8)) / 0.81
        c_osd = osd_decode(c84, ell, 4)
        c_ml = ml_decode_bruteforce(c84, ell)
        a = np.abs(ell)
        y = hard_decision(ell)
        assert np.isclose(whd(c_osd, y, a), whd(c_ml, y, a), rtol=1e-12)


def test_osd_errors(c84):
    with pytest.raises(CodeError):
        osd_decode(c84, np.zeros(7), 2)
    with pytest.raises(ValueError):
        osd_decode(c84, np.zeros(8), 5)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-60, 60), min_size=8, max_size=8))
def test_osd_output_is_codeword(ell):
    code = build_ebch(8, 4)
    c = osd_decode(code, np.array(ell), 2)
    book = code.codebook()
    assert (book == c).all(axis=1).any()
