"""Multi-user receivers: iterative PIC + LC-SOSD joint decoding, and SIC."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import ChannelRealization, deinterleave, interleave, modulate_bpsk
from .codes import Code
from .lcsosd import LcSosdParams, lc_sosd_decode
from .osd import LLR_CLAMP, hard_decision, osd_decode_full

ATANH_LIMIT = 1.0 - 1e-12


@dataclass(frozen=True)
class JdParams:
    t_max: int = 30
    beta: float = 0.5
    ds_warmup: Optional[int] = None  # None -> number of users
    use_dc: bool = True
    decoder: LcSosdParams = field(default_factory=LcSosdParams)
    matched_noise: bool = False  # divide the noise term by |h_u|^2

    def __post_init__(self):
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta={self.beta} outside [0, 1]")
        if self.ds_warmup is not None and self.ds_warmup < 0:
            raise ValueError("ds_warmup must be >= 0")

    def warmup(self, n_users: int) -> int:
        return n_users if self.ds_warmup is None else self.ds_warmup


@dataclass
class JdResult:
    c_hat: np.ndarray  # (n_users, n)
    iterations_total: int
    decoding_iterations: int
    teps_per_iteration: list  # one list of per-user TEP counts per DS-on iteration
    converged: bool
    gammas: list = field(default_factory=list)
    ell: Optional[np.ndarray] = None  # last PIC output after smoothing, channel order

    @property
    def decoder_calls(self) -> int:
        return sum(len(x) for x in self.teps_per_iteration)

    @property
    def total_teps(self) -> int:
        return int(sum(sum(x) for x in self.teps_per_iteration))


# --- PIC building blocks ------------------------------------------------------

def pic_prior_stats(epsilon):
    """Soft symbol mean and variance from prior LLRs."""
    mu = np.tanh(np.asarray(epsilon, dtype=np.float64) / 2.0)
    return mu, 1.0 - mu * mu


def _noise_term(h, sigma_sq, matched):
    if matched:
        return sigma_sq / (2.0 * np.abs(h) ** 2)
    return np.full(len(h), sigma_sq / 2.0)


def pic_extrinsic(r, h, mu, upsilon, sigma_sq: float, u: int,
                  matched_noise: bool = False) -> np.ndarray:
    """Extrinsic LLR of user u after cancelling the others' soft symbols.

    ``mu`` and ``upsilon`` have shape (n_users, n) in channel order; the
    rows of the interferers enter the sums, row u is ignored.

    The noise term of the denominator is ``sigma_sq / 2``. After dividing
    ``r`` by ``h_u`` the real-part noise variance is really
    ``sigma_sq / (2 |h_u|^2)``; ``matched_noise=True`` uses that instead.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h[u] == 0:
        raise ZeroDivisionError(f"user {u} has zero channel gain")
    others = np.arange(len(h)) != u
    interference = h[others] @ np.asarray(mu)[others]
    num = 2.0 * np.real((np.asarray(r) - interference) / h[u])
    w = np.real(h[others] / h[u]) ** 2
    den = w @ np.asarray(upsilon)[others] + _noise_term(h, sigma_sq, matched_noise)[u]
    return np.clip(num / den, -LLR_CLAMP, LLR_CLAMP)


def _all_users_extrinsic(r, h, mu, upsilon, sigma_sq, matched=False):
    s = h @ mu
    cleaned = (r[None, :] - s[None, :] + h[:, None] * mu) / h[:, None]
    num = 2.0 * cleaned.real
    w = np.real(h[None, :] / h[:, None]) ** 2
    np.fill_diagonal(w, 0.0)
    den = w @ upsilon + _noise_term(h, sigma_sq, matched)[:, None]
    return np.clip(num / den, -LLR_CLAMP, LLR_CLAMP)


def tanh_combine(a, b, weight: float) -> np.ndarray:
    """2 * atanh(weight * tanh(a/2) + (1 - weight) * tanh(b/2)).

    weight 1 returns a, weight 0 returns b, and a == b returns a, exactly.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if weight == 1.0:
        return a.copy()
    if weight == 0.0:
        return b.copy()
    x = weight * np.tanh(a / 2.0) + (1.0 - weight) * np.tanh(b / 2.0)
    out = 2.0 * np.arctanh(np.clip(x, -ATANH_LIMIT, ATANH_LIMIT))
    out = np.where(a == b, a, out)
    return np.clip(out, -LLR_CLAMP, LLR_CLAMP)


def dsc_combine(ell_t, ell_prev, beta: float) -> np.ndarray:
    """Smooth PIC output across iterations."""
    return tanh_combine(ell_t, ell_prev, beta)


def dc_combine(delta, ell, gamma: float) -> np.ndarray:
    """Blend decoder output and decoder input by the decoding quality."""
    return tanh_combine(delta, ell, gamma)


def posterior_decision(delta, ell) -> np.ndarray:
    """Bit 0 where delta + ell >= 0, else 1."""
    return hard_decision(np.asarray(delta) + np.asarray(ell))


# --- receivers ----------------------------------------------------------------

def jd_receive(r, ch: ChannelRealization, code: Code, params: JdParams = JdParams()) -> JdResult:
    """Iterative joint decoding: PIC, decision smoothing, switched LC-SOSD.

    Users are processed from the same previous-iteration feedback, so the
    per-user loop body is order independent.
    """
    r = np.asarray(getattr(r, "r", r))
    h = np.asarray(ch.h, dtype=np.complex128)
    n_users, n = len(h), code.n
    perms = ch.interleavers
    warmup = params.warmup(n_users)

    eps = np.zeros((n_users, n))
    ell_prev = None
    c_prev = None
    c_hat = None
    teps, gammas = [], []
    converged = False
    t = 0
    for t in range(1, params.t_max + 1):
        mu, ups = pic_prior_stats(eps)
        ell = _all_users_extrinsic(r, h, mu, ups, ch.sigma_sq, params.matched_noise)
        if t >= 2:
            ell = np.stack([dsc_combine(ell[u], ell_prev[u], params.beta) for u in range(n_users)])
        ell_prev = ell
        if t <= warmup:
            eps = ell
            continue
        c_now = np.empty((n_users, n), dtype=np.uint8)
        eps = np.empty_like(ell)
        counts, gs = [], []
        for u in range(n_users):
            ell_u = deinterleave(ell[u], perms[u])
            dec = lc_sosd_decode(code, ell_u, params.decoder)
            c_now[u] = posterior_decision(dec.delta, ell_u)
            fb = dc_combine(dec.delta, ell_u, dec.gamma) if params.use_dc else dec.delta
            eps[u] = interleave(fb, perms[u])
            counts.append(dec.n_teps)
            gs.append(dec.gamma)
        teps.append(counts)
        gammas.append(gs)
        c_hat = c_now
        if c_prev is not None and np.array_equal(c_now, c_prev):
            converged = True
            break
        c_prev = c_now

    if c_hat is None:
        c_hat = np.stack([hard_decision(deinterleave(ell_prev[u], perms[u])) for u in range(n_users)])
    return JdResult(
        c_hat=c_hat,
        iterations_total=t,
        decoding_iterations=len(teps),
        teps_per_iteration=teps,
        converged=converged,
        gammas=gammas,
        ell=ell_prev,
    )


def sic_order(h) -> np.ndarray:
    """Decode order: strongest |h|^2 first, ties by user index."""
    return np.argsort(-np.abs(np.asarray(h)) ** 2, kind="stable")


@dataclass
class SicResult:
    c_hat: np.ndarray
    order: np.ndarray
    decoder_calls: int
    total_teps: int


def sic_receive(r, ch: ChannelRealization, code: Code, m: int) -> SicResult:
    """Successive cancellation with hard-output OSD, strongest user first.

    Users not yet decoded are treated as Gaussian noise of unit symbol
    variance; decoded users are re-modulated and subtracted.
    """
    r = np.asarray(getattr(r, "r", r), dtype=np.complex128).copy()
    h = np.asarray(ch.h, dtype=np.complex128)
    n_users, n = len(h), code.n
    order = sic_order(h)
    c_hat = np.zeros((n_users, n), dtype=np.uint8)
    mu = np.zeros((n_users, n))
    ups = np.ones((n_users, n))
    calls = teps = 0
    for u in order:
        ell = pic_extrinsic(r, h, mu, ups, ch.sigma_sq, u)
        ell_u = deinterleave(ell, ch.interleavers[u])
        c, _, count = osd_decode_full(code, ell_u, m)
        calls += 1
        teps += count
        c_hat[u] = c
        r -= h[u] * modulate_bpsk(interleave(c, ch.interleavers[u]))
        ups[u] = 0.0
    return SicResult(c_hat=c_hat, order=order, decoder_calls=calls, total_teps=teps)
