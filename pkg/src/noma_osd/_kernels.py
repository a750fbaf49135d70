"""Compiled inner loops for OSD and LC-SOSD.

Codewords are packed little-endian into uint64 words: bit ``j % 64`` of word
``j // 64`` holds position j. All routines work in the ordered domain and
return the combined permutation ``perm`` (ordered[j] = original[perm[j]]).
"""
import math

import numpy as np
from numba import njit

_ONE = np.uint64(1)
_DEBRUIJN = np.uint64(0x03F79D71B4CB0A89)
_DEBRUIJN_IDX = np.array(
    [0, 1, 48, 2, 57, 49, 28, 3, 61, 58, 50, 42, 38, 29, 17, 4,
     62, 55, 59, 36, 53, 51, 43, 22, 45, 39, 33, 30, 24, 18, 12, 5,
     63, 47, 56, 27, 60, 41, 37, 16, 54, 35, 52, 21, 44, 32, 23, 11,
     46, 26, 40, 15, 34, 20, 31, 10, 25, 14, 19, 9, 13, 8, 7, 6],
    dtype=np.int64,
)
LN2 = math.log(2.0)


@njit(cache=True)
def _ctz(w):
    low = w & (~w + _ONE)
    return _DEBRUIJN_IDX[np.int64((low * _DEBRUIJN) >> np.uint64(58))]


@njit(cache=True)
def n_words(n):
    return (n + 63) // 64


@njit(cache=True)
def pack_bits(bits):
    n = bits.shape[0]
    out = np.zeros(n_words(n), dtype=np.uint64)
    for j in range(n):
        if bits[j]:
            out[j >> 6] |= _ONE << np.uint64(j & 63)
    return out


@njit(cache=True)
def unpack_bits(words, n):
    out = np.zeros(n, dtype=np.uint8)
    for j in range(n):
        out[j] = np.uint8((words[j >> 6] >> np.uint64(j & 63)) & _ONE)
    return out


@njit(cache=True)
def _getbit(words, j):
    return (words[j >> 6] >> np.uint64(j & 63)) & _ONE


@njit(cache=True)
def _swap_cols(rows, a, b):
    for r in range(rows.shape[0]):
        ba = _getbit(rows[r], a)
        bb = _getbit(rows[r], b)
        if ba != bb:
            rows[r, a >> 6] ^= _ONE << np.uint64(a & 63)
            rows[r, b >> 6] ^= _ONE << np.uint64(b & 63)


@njit(cache=True)
def order_and_reduce(G, llr):
    """Sort by reliability, pack pi1(G), eliminate to [I | P] with pi2 swaps.

    Returns (pi1, pi2, rows) where rows is the packed systematic matrix.
    pi2[0] == -1 signals a rank failure.
    """
    k, n = G.shape
    alpha = np.abs(llr)
    pi1 = np.argsort(-alpha, kind="mergesort")
    W = n_words(n)
    rows = np.zeros((k, W), dtype=np.uint64)
    for j in range(n):
        src = pi1[j]
        bit = _ONE << np.uint64(j & 63)
        for r in range(k):
            if G[r, src]:
                rows[r, j >> 6] |= bit
    pi2 = np.arange(n)
    for r in range(k):
        j = r
        piv = -1
        while j < n:
            for q in range(r, k):
                if _getbit(rows[q], j):
                    piv = q
                    break
            if piv >= 0:
                break
            j += 1
        if piv < 0:
            pi2[0] = -1
            return pi1, pi2, rows
        if j != r:
            _swap_cols(rows, r, j)
            t = pi2[r]
            pi2[r] = pi2[j]
            pi2[j] = t
        if piv != r:
            for w in range(W):
                t2 = rows[r, w]
                rows[r, w] = rows[piv, w]
                rows[piv, w] = t2
        for q in range(k):
            if q != r and _getbit(rows[q], r):
                for w in range(W):
                    rows[q, w] ^= rows[r, w]
    return pi1, pi2, rows


@njit(cache=True)
def _prepare(G, llr):
    k, n = G.shape
    pi1, pi2, rows = order_and_reduce(G, llr)
    perm = pi1.copy()
    if pi2[0] < 0:
        return perm, rows, np.zeros(n), np.zeros(n), np.zeros(1, dtype=np.uint64), np.zeros(1, dtype=np.uint64), False
    for j in range(n):
        perm[j] = pi1[pi2[j]]
    lt = np.empty(n)
    at = np.empty(n)
    for j in range(n):
        lt[j] = llr[perm[j]]
        at[j] = abs(lt[j])
    W = rows.shape[1]
    y = np.zeros(W, dtype=np.uint64)
    for j in range(n):
        if lt[j] < 0.0:
            y[j >> 6] |= _ONE << np.uint64(j & 63)
    c0 = np.zeros(W, dtype=np.uint64)
    for r in range(k):
        if _getbit(y, r):
            for w in range(W):
                c0[w] ^= rows[r, w]
    return perm, rows, lt, at, y, c0, True


@njit(cache=True)
def _parity_mask(n, k):
    W = n_words(n)
    mask = np.zeros(W, dtype=np.uint64)
    for j in range(k, n):
        mask[j >> 6] |= _ONE << np.uint64(j & 63)
    return mask


@njit(cache=True)
def _masked_weight(c, y, mask, at):
    """Sum of reliabilities over positions where (c xor y) & mask is set."""
    s = 0.0
    for w in range(c.shape[0]):
        d = (c[w] ^ y[w]) & mask[w]
        base = w * 64
        while d:
            s += at[base + _ctz(d)]
            d &= d - _ONE
    return s


@njit(cache=True)
def _next_combo(idx, l, k):
    """Advance idx to the next l-subset of range(k) in lexicographic order.

    Returns the first changed slot, or -1 when exhausted.
    """
    i = l - 1
    while i >= 0 and idx[i] == k - l + i:
        i -= 1
    if i < 0:
        return -1
    idx[i] += 1
    for t in range(i + 1, l):
        idx[t] = idx[t - 1] + 1
    return i


@njit(cache=True)
def _refresh(prefix, wsum, idx, start, l, rows, at, c0):
    W = c0.shape[0]
    for t in range(start, l):
        for w in range(W):
            prev = c0[w] if t == 0 else prefix[t - 1, w]
            prefix[t, w] = prev ^ rows[idx[t], w]
        wsum[t] = (0.0 if t == 0 else wsum[t - 1]) + at[idx[t]]


@njit(cache=True)
def _log1mexp(x):
    """log(1 - exp(x)) for x <= 0."""
    if x >= 0.0:
        return -np.inf
    if x > -LN2:
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))


@njit(cache=True)
def _neg_softplus(x):
    """-log(1 + exp(x))."""
    if x > 0.0:
        return -(x + math.log1p(math.exp(-x)))
    return -math.log1p(math.exp(x))


@njit(cache=True)
def log_success_prob(w_b, w_p, a_b, a_p, k, n):
    """log of the approximate success probability of a TEP.

    w_b, w_p: reliability sums over the TEP support and over disagreeing
    parity positions; a_b, a_p: sums of log(1 - P(i)) over MRB and parity.
    """
    log_pe = a_b - w_b
    log_prod = a_p - w_p
    ratio = _log1mexp(log_pe) + (k - n) * LN2 - log_pe - log_prod
    return _neg_softplus(ratio)


@njit(cache=True)
def _log_ok_probs(at):
    n = at.shape[0]
    log1m = np.empty(n)
    for j in range(n):
        log1m[j] = -math.log1p(math.exp(-at[j]))
    return log1m


@njit(cache=True)
def osd_kernel(G, llr, m):
    """Hard-output order-m OSD. Returns (codeword, best WHD, n_teps, ok)."""
    k, n = G.shape
    perm, rows, lt, at, y, c0, ok = _prepare(G, llr)
    out = np.zeros(n, dtype=np.uint8)
    if not ok:
        return out, 0.0, 0, False
    W = rows.shape[1]
    mask = _parity_mask(n, k)
    best = c0.copy()
    best_d = _masked_weight(c0, y, mask, at)
    count = 1
    prefix = np.zeros((max(m, 1), W), dtype=np.uint64)
    wsum = np.zeros(max(m, 1))
    idx = np.zeros(max(m, 1), dtype=np.int64)
    for l in range(1, m + 1):
        for t in range(l):
            idx[t] = t
        _refresh(prefix, wsum, idx, 0, l, rows, at, c0)
        while True:
            count += 1
            wb = wsum[l - 1]
            if wb < best_d:
                d = wb + _masked_weight(prefix[l - 1], y, mask, at)
                if d < best_d:
                    best_d = d
                    for w in range(W):
                        best[w] = prefix[l - 1, w]
            start = _next_combo(idx, l, k)
            if start < 0:
                break
            _refresh(prefix, wsum, idx, start, l, rows, at, c0)
    bits = unpack_bits(best, n)
    for j in range(n):
        out[perm[j]] = bits[j]
    return out, best_d, count, True


@njit(cache=True)
def lcsosd_kernel(G, llr, m, log_lambda_s, stop_enabled, discard_thr, floor_log):
    """Soft-output OSD with success-probability stopping and TEP discarding.

    discard_thr: TEPs whose support reliability sum is >= this are skipped
    (np.inf disables discarding). floor_log: log-ratio used for positions
    that never saw the opposite bit value.

    Returns (delta, c_op, log_pmax, n_eval, n_discarded, early, ok).
    """
    k, n = G.shape
    perm, rows, lt, at, y, c0, ok = _prepare(G, llr)
    delta = np.zeros(n)
    c_out = np.zeros(n, dtype=np.uint8)
    if not ok:
        return delta, c_out, 0.0, 0, 0, False, False
    W = rows.shape[1]
    mask = _parity_mask(n, k)
    log1m = _log_ok_probs(at)
    a_b = 0.0
    for j in range(k):
        a_b += log1m[j]
    a_p = 0.0
    for j in range(k, n):
        a_p += log1m[j]

    lists = np.full((2, n), -np.inf)
    unset = 2 * n
    log_pmax = -np.inf
    c_op = c0.copy()
    n_eval = 0
    n_disc = 0
    early = False

    prefix = np.zeros((max(m, 1), W), dtype=np.uint64)
    wsum = np.zeros(max(m, 1))
    idx = np.zeros(max(m, 1), dtype=np.int64)
    cur = c0.copy()
    for l in range(0, m + 1):
        if early:
            break
        if l > 0:
            for t in range(l):
                idx[t] = t
            _refresh(prefix, wsum, idx, 0, l, rows, at, c0)
        while True:
            if l == 0:
                wb = 0.0
                for w in range(W):
                    cur[w] = c0[w]
            else:
                wb = wsum[l - 1]
                for w in range(W):
                    cur[w] = prefix[l - 1, w]
            if l > 0 and wb >= discard_thr:
                n_disc += 1
            else:
                n_eval += 1
                wp = _masked_weight(cur, y, mask, at)
                lsp = log_success_prob(wb, wp, a_b, a_p, k, n)
                if lsp > log_pmax:
                    log_pmax = lsp
                    for w in range(W):
                        c_op[w] = cur[w]
                for j in range(n):
                    v = np.int64(_getbit(cur, j))
                    if lsp >= lists[v, j]:
                        if lists[v, j] == -np.inf:
                            unset -= 1
                        lists[v, j] = lsp
                if stop_enabled and unset == 0 and log_pmax >= log_lambda_s:
                    early = True
                    break
            if l == 0:
                break
            start = _next_combo(idx, l, k)
            if start < 0:
                break
            _refresh(prefix, wsum, idx, start, l, rows, at, c0)

    bits = unpack_bits(c_op, n)
    for j in range(n):
        b = bits[j]
        other = lists[1 - b, j]
        sgn = 1.0 if b == 0 else -1.0
        if other == -np.inf:
            # no competitor seen: fixed extrinsic magnitude toward c_op
            delta[perm[j]] = sgn * floor_log
        else:
            delta[perm[j]] = sgn * (log_pmax - other) - lt[j]
        c_out[perm[j]] = b
    return delta, c_out, log_pmax, n_eval, n_disc, early, True
