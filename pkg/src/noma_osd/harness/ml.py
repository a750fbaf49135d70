"""Exhaustive maximum-likelihood baselines for small codes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..channel import ChannelRealization, modulate_bpsk
from ..codes import Code, CodeError
from ..osd import clamp_llr, hard_decision

MAX_ML_K = 20
MAX_JOINT_HYPOTHESES = 1 << 16


def ml_decode_bruteforce(code: Code, ell) -> np.ndarray:
    """Codeword with the smallest weighted Hamming distance to hard(ell).

    Scans all 2^k codewords; ties go to the lowest information-word value
    (row order of :meth:`Code.codebook`).
    """
    if code.k > MAX_ML_K:
        raise CodeError(f"k={code.k} too large for exhaustive ML (limit {MAX_ML_K})")
    ell = clamp_llr(ell)
    if ell.shape != (code.n,):
        raise CodeError(f"LLR length {ell.shape} does not match n={code.n}")
    book = code.codebook()
    y = hard_decision(ell)
    alpha = np.abs(ell)
    d = (book != y) @ alpha
    return book[int(np.argmin(d))].copy()


@dataclass
class JointMlDecoder:
    """Joint ML over the product codebook of all users.

    Each user's interleaved, modulated codebook is cached per interleaver, so
    one instance can be reused across frames of a fixed channel.
    """

    code: Code

    def __post_init__(self):
        if self.code.k > MAX_ML_K:
            raise CodeError(f"k={self.code.k} too large for exhaustive ML")
        self.book = self.code.codebook()

    def decode(self, r, ch: ChannelRealization) -> np.ndarray:
        n_users = ch.n_users
        n_hyp = len(self.book) ** n_users
        if n_hyp > MAX_JOINT_HYPOTHESES:
            raise CodeError(f"{n_hyp} joint hypotheses exceed the limit {MAX_JOINT_HYPOTHESES}")
        r = np.asarray(getattr(r, "r", r))
        # superposed candidates, one axis per user
        s = np.zeros((1,) * n_users + (self.code.n,), dtype=np.complex128)
        for u in range(n_users):
            x = ch.h[u] * modulate_bpsk(self.book[:, ch.interleavers[u]])
            shape = [1] * n_users + [self.code.n]
            shape[u] = len(self.book)
            s = s + x.reshape(shape)
        # complex Gaussian likelihood: minimise the Euclidean distance
        metric = np.sum(np.abs(r - s) ** 2, axis=-1)
        best = np.unravel_index(int(np.argmin(metric)), metric.shape)
        return np.stack([self.book[i] for i in best])


def joint_ml_receive(r, ch: ChannelRealization, code: Code) -> np.ndarray:
    return JointMlDecoder(code).decode(r, ch)
