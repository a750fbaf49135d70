"""Ordered-statistics decoding (hard output).

LLR sign convention used throughout the package:
``llr = log Pr(c=0 | obs) / Pr(c=1 | obs)``, so a negative LLR favours bit 1
and the BPSK symbol mean is ``tanh(llr / 2)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterator

import numpy as np

from . import _kernels
from .codes import Code, CodeError, SystematicForm, gaussian_eliminate

LLR_CLAMP = 50.0


def clamp_llr(llr) -> np.ndarray:
    return np.clip(np.asarray(llr, dtype=np.float64), -LLR_CLAMP, LLR_CLAMP)


def hard_decision(llr) -> np.ndarray:
    """y_i = 1 where llr_i < 0, else 0 (zero maps to bit 0)."""
    return (np.asarray(llr) < 0).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class OrderedState:
    """Per-decode workspace after sorting and Gaussian elimination."""

    pi1: np.ndarray
    sys: SystematicForm
    ell_tilde: np.ndarray
    alpha_tilde: np.ndarray
    y_tilde: np.ndarray

    @property
    def k(self) -> int:
        return self.sys.G_tilde.shape[0]

    @property
    def n(self) -> int:
        return self.sys.G_tilde.shape[1]

    @property
    def perm(self) -> np.ndarray:
        """Combined permutation: ordered[j] = original[perm[j]]."""
        return self.pi1[self.sys.pi2]

    @property
    def y_mrb(self) -> np.ndarray:
        return self.y_tilde[: self.k]

    def to_ordered(self, v) -> np.ndarray:
        return np.asarray(v)[self.perm]

    def to_original(self, v) -> np.ndarray:
        v = np.asarray(v)
        out = np.empty_like(v)
        out[self.perm] = v
        return out


@dataclass(frozen=True)
class Tep:
    """Test error pattern over the most reliable basis."""

    pattern: np.ndarray

    @property
    def weight(self) -> int:
        return int(self.pattern.sum())

    @property
    def support(self) -> tuple:
        return tuple(np.flatnonzero(self.pattern).tolist())


def order_received(code: Code, ell) -> OrderedState:
    """Sort positions by decreasing |llr| (stable) and reduce pi1(G)."""
    ell = clamp_llr(ell)
    if ell.shape != (code.n,):
        raise CodeError(f"LLR length {ell.shape} does not match n={code.n}")
    alpha = np.abs(ell)
    pi1 = np.argsort(-alpha, kind="stable")
    sys = gaussian_eliminate(code.G[:, pi1])
    perm = pi1[sys.pi2]
    ell_t = ell[perm]
    return OrderedState(
        pi1=pi1,
        sys=sys,
        ell_tilde=ell_t,
        alpha_tilde=np.abs(ell_t),
        y_tilde=hard_decision(ell_t),
    )


def num_teps(k: int, m: int) -> int:
    return sum(comb(k, j) for j in range(m + 1))


def enumerate_teps(k: int, m: int) -> Iterator[Tep]:
    """All TEPs of weight 0..m; lexicographic support order within a weight."""
    if not 0 <= m <= k:
        raise ValueError(f"order m={m} must satisfy 0 <= m <= k={k}")
    for w in range(m + 1):
        for support in itertools.combinations(range(k), w):
            e = np.zeros(k, dtype=np.uint8)
            e[list(support)] = 1
            yield Tep(e)


def reencode(state: OrderedState, e) -> np.ndarray:
    """Ordered codeword estimate (y_B xor e) G_tilde."""
    pattern = e.pattern if isinstance(e, Tep) else np.asarray(e, dtype=np.uint8)
    info = state.y_mrb ^ pattern
    return (info.astype(np.int64) @ state.sys.G_tilde % 2).astype(np.uint8)


def whd(c, y, alpha) -> float:
    """Weighted Hamming distance: sum of alpha over positions where c != y."""
    c, y = np.asarray(c), np.asarray(y)
    return float(np.asarray(alpha, dtype=np.float64)[c != y].sum())


def osd_decode(code: Code, ell, m: int) -> np.ndarray:
    """Order-m OSD: the minimum-WHD codeword among all order-m re-encodings.

    Ties keep the earliest enumerated TEP.
    """
    return osd_decode_full(code, ell, m)[0]


def osd_decode_full(code: Code, ell, m: int):
    """Like :func:`osd_decode` but also returns (best WHD, TEPs enumerated)."""
    ell = clamp_llr(ell)
    if ell.shape != (code.n,):
        raise CodeError(f"LLR length {ell.shape} does not match n={code.n}")
    if not 0 <= m <= code.k:
        raise ValueError(f"order m={m} must satisfy 0 <= m <= k={code.k}")
    c, d, count, ok = _kernels.osd_kernel(code.G, ell, m)
    if not ok:
        raise CodeError("generator matrix is rank deficient")
    return c, float(d), int(count)
