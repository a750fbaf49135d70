"""Low-complexity soft-output OSD (LC-SOSD).

Each re-encoded TEP gets an approximate success probability (SP). The
decoder keeps, per position and bit value, the best SP of any estimate
carrying that value, stops as soon as the best SP clears ``lambda_s`` and
every position has seen both values, and turns the stored SPs into
extrinsic LLRs.

A position whose opposite bit value never showed up in any evaluated
estimate gets an extrinsic LLR of fixed magnitude ``FLOOR_LOG`` (40 ln 2)
pointing toward the chosen codeword. Expressing that floor on the posterior
instead would give wrong-signed extrinsics whenever the channel LLR exceeds
it.

TEP discarding uses the prior ratio ``P(e) / P(0)`` against ``lambda_p``.
This is a stand-in for the discarding probability of the original
probability-based OSD work, which is not reproduced here; pass
``discard_rule`` to :func:`lc_sosd_decode` to try a different statistic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .codes import Code, CodeError
from .osd import (
    OrderedState,
    Tep,
    clamp_llr,
    enumerate_teps,
    order_received,
    reencode,
)

FLOOR_BITS = 40
FLOOR_LOG = FLOOR_BITS * math.log(2.0)

DiscardRule = Callable[[np.ndarray, np.ndarray, float], bool]


@dataclass(frozen=True)
class LcSosdParams:
    m: int = 2
    lambda_s: float = 0.99
    lambda_p: float = 1e-5

    def __post_init__(self):
        if not 0.5 <= self.lambda_s <= 1.0:
            raise ValueError(f"lambda_s={self.lambda_s} outside [0.5, 1]")
        if self.lambda_p < 0:
            raise ValueError(f"lambda_p={self.lambda_p} must be >= 0")
        if self.m < 0:
            raise ValueError(f"order m={self.m} must be >= 0")

    @classmethod
    def sosd(cls, m: int) -> "LcSosdParams":
        """Full soft-output OSD: no early stop, no discarding."""
        return cls(m=m, lambda_s=1.0, lambda_p=0.0)


@dataclass
class SoftDecision:
    delta: np.ndarray
    c_op: np.ndarray
    gamma: float
    n_teps: int
    n_discarded: int = 0
    terminated_early: bool = False
    log_gamma: float = field(default=0.0, repr=False)


# --- probabilities ------------------------------------------------------------

def bit_error_prob(ell) -> np.ndarray:
    """P(i) = 1 / (1 + exp(|ell_i|)): probability the hard decision is wrong."""
    a = np.abs(np.asarray(ell, dtype=np.float64))
    return np.exp(-np.logaddexp(0.0, a))


def _log_bit_probs(alpha):
    """(log P(i), log(1 - P(i))) computed without underflow."""
    alpha = np.asarray(alpha, dtype=np.float64)
    log_ok = -np.log1p(np.exp(-alpha))
    return log_ok - alpha, log_ok


def log_tep_prior(e, alpha_mrb) -> float:
    e = np.asarray(e.pattern if isinstance(e, Tep) else e, dtype=bool)
    log_p, log_ok = _log_bit_probs(alpha_mrb)
    return float(np.where(e, log_p, log_ok).sum())


def tep_prior(e, p) -> float:
    """Prior probability that the MRB errors are exactly the pattern e.

    ``p`` holds the per-bit error probabilities over the MRB.
    """
    e = np.asarray(e.pattern if isinstance(e, Tep) else e, dtype=bool)
    p = np.asarray(p, dtype=np.float64)
    with np.errstate(divide="ignore"):
        logs = np.where(e, np.log(p), np.log1p(-p))
    return float(np.exp(logs.sum()))


def _log1mexp(x: float) -> float:
    if x >= 0.0:
        return -math.inf
    if x > -math.log(2.0):
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))


def log_success_prob(e, c_e, state: OrderedState) -> float:
    k, n = state.k, state.n
    pattern = np.asarray(e.pattern if isinstance(e, Tep) else e, dtype=bool)
    log_p, log_ok = _log_bit_probs(state.alpha_tilde)
    log_pe = float(np.where(pattern, log_p[:k], log_ok[:k]).sum())
    d = (np.asarray(c_e) != state.y_tilde)[k:]
    log_prod = float(np.where(d, log_p[k:], log_ok[k:]).sum())
    ratio = _log1mexp(log_pe) + (k - n) * math.log(2.0) - log_pe - log_prod
    return -float(np.logaddexp(0.0, ratio))


def success_prob(e, c_e, state: OrderedState) -> float:
    """Approximate probability that re-encoding e recovers the sent codeword.

    Random-code approximation using the TEP prior and the parity-part
    disagreement pattern ``c_e xor y_tilde``; evaluated in the log domain.
    """
    return math.exp(log_success_prob(e, c_e, state))


def prior_ratio_rule(e, p, lambda_p: float) -> bool:
    """Default discard rule: P(e)/P(0) <= lambda_p. Never discards e = 0."""
    e = np.asarray(e.pattern if isinstance(e, Tep) else e, dtype=bool)
    if lambda_p <= 0 or not e.any():
        return False
    p = np.asarray(p, dtype=np.float64)
    stat = np.exp(np.sum(np.log(p[e]) - np.log1p(-p[e])))
    return bool(stat <= lambda_p)


def discard_check(e, p, lambda_p: float) -> bool:
    return prior_ratio_rule(e, p, lambda_p)


# --- decoding -----------------------------------------------------------------

@dataclass
class SpTracker:
    """Running best SPs, kept as logs (-inf means 'not seen yet')."""

    n: int
    log_p1: np.ndarray = field(init=False)
    log_p0: np.ndarray = field(init=False)
    log_pmax: float = -math.inf
    c_op: Optional[np.ndarray] = None
    n_teps_evaluated: int = 0
    n_teps_discarded: int = 0

    def __post_init__(self):
        self.log_p1 = np.full(self.n, -math.inf)
        self.log_p0 = np.full(self.n, -math.inf)

    @property
    def p_max(self) -> float:
        return math.exp(self.log_pmax)

    @property
    def p_list_0(self) -> np.ndarray:
        return np.exp(self.log_p0)

    @property
    def p_list_1(self) -> np.ndarray:
        return np.exp(self.log_p1)

    def update(self, c, lsp: float) -> None:
        self.n_teps_evaluated += 1
        if lsp > self.log_pmax:
            self.log_pmax = lsp
            self.c_op = np.array(c, dtype=np.uint8)
        ones = np.asarray(c, dtype=bool)
        self.log_p1 = np.where(ones & (lsp >= self.log_p1), lsp, self.log_p1)
        self.log_p0 = np.where(~ones & (lsp >= self.log_p0), lsp, self.log_p0)

    def complete(self) -> bool:
        return bool(np.all(self.log_p1 > -math.inf) and np.all(self.log_p0 > -math.inf))

    def extrinsic(self, ell_tilde) -> np.ndarray:
        """Ordered-domain extrinsic LLRs from the stored SPs."""
        other = np.where(self.c_op == 1, self.log_p0, self.log_p1)
        sign = np.where(self.c_op == 1, -1.0, 1.0)
        seen = np.isfinite(other)
        mag = np.where(seen, self.log_pmax - np.where(seen, other, 0.0), 0.0)
        return np.where(seen, sign * mag - ell_tilde, sign * FLOOR_LOG)


def lc_sosd_reference(code: Code, ell, params: LcSosdParams,
                      discard_rule: DiscardRule = prior_ratio_rule) -> SoftDecision:
    """Straight-line LC-SOSD built from the public helpers (slow, for checks)."""
    ell = clamp_llr(ell)
    state = order_received(code, ell)
    k = code.k
    p_mrb = bit_error_prob(state.ell_tilde[:k])
    tracker = SpTracker(code.n)
    stop_enabled = params.lambda_s < 1.0
    log_ls = math.log(params.lambda_s)
    early = False
    for tep in enumerate_teps(k, params.m):
        if discard_rule(tep.pattern, p_mrb, params.lambda_p):
            tracker.n_teps_discarded += 1
            continue
        c = reencode(state, tep)
        tracker.update(c, log_success_prob(tep, c, state))
        if stop_enabled and tracker.log_pmax >= log_ls and tracker.complete():
            early = True
            break
    delta_t = tracker.extrinsic(state.ell_tilde)
    return SoftDecision(
        delta=state.to_original(delta_t),
        c_op=state.to_original(tracker.c_op),
        gamma=tracker.p_max,
        n_teps=tracker.n_teps_evaluated,
        n_discarded=tracker.n_teps_discarded,
        terminated_early=early,
        log_gamma=tracker.log_pmax,
    )


def lc_sosd_decode(code: Code, ell, params: LcSosdParams,
                   discard_rule: Optional[DiscardRule] = None) -> SoftDecision:
    """Decode one LLR block and return extrinsic LLRs plus decoding quality.

    Parameters
    ----------
    code : Code
    ell : array_like, shape (n,)
        Input LLRs; clamped to +-50 before ordering.
    params : LcSosdParams
        Order, stopping threshold and discard threshold. ``lambda_s = 1``
        disables early termination, ``lambda_p = 0`` disables discarding.
    discard_rule : callable, optional
        Replacement discard statistic ``rule(e, p_mrb, lambda_p) -> bool``.
        Custom rules run on the pure-Python path.

    Returns
    -------
    SoftDecision
        ``delta`` and ``c_op`` in the original bit order, ``gamma`` the
        final best SP.
    """
    if discard_rule is not None and discard_rule is not prior_ratio_rule:
        return lc_sosd_reference(code, ell, params, discard_rule)
    ell = clamp_llr(ell)
    if ell.shape != (code.n,):
        raise CodeError(f"LLR length {ell.shape} does not match n={code.n}")
    if params.m > code.k:
        raise ValueError(f"order m={params.m} exceeds k={code.k}")
    thr = -math.log(params.lambda_p) if params.lambda_p > 0 else math.inf
    delta, c_op, log_pmax, n_eval, n_disc, early, ok = _kernels.lcsosd_kernel(
        code.G, ell, params.m, math.log(params.lambda_s), params.lambda_s < 1.0, thr, FLOOR_LOG
    )
    if not ok:
        raise CodeError("generator matrix is rank deficient")
    return SoftDecision(
        delta=delta,
        c_op=c_op,
        gamma=math.exp(log_pmax),
        n_teps=int(n_eval),
        n_discarded=int(n_disc),
        terminated_early=bool(early),
        log_gamma=float(log_pmax),
    )
