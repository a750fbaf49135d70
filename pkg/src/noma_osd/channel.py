"""Uplink NOMA channel: BPSK, per-user interleaving, superposition, noise."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PowerProfile:
    """Average receive powers, normalised to unit sum."""

    rho_sq: np.ndarray

    @classmethod
    def geometric(cls, n_users: int, ratio: float = 4.0) -> "PowerProfile":
        """Adjacent users differ by ``ratio`` in power, strongest first."""
        p = ratio ** -np.arange(n_users, dtype=np.float64)
        return cls(p / p.sum())

    @property
    def n_users(self) -> int:
        return len(self.rho_sq)

    @property
    def rho(self) -> np.ndarray:
        return np.sqrt(self.rho_sq)


@dataclass(frozen=True)
class ChannelRealization:
    h: np.ndarray  # complex gains, one per user
    sigma_sq: float  # total complex noise variance
    interleavers: np.ndarray  # (n_users, n) index arrays

    @property
    def n_users(self) -> int:
        return len(self.h)


@dataclass(frozen=True)
class Frame:
    tx_bits: np.ndarray  # (n_users, k)
    tx_codewords: np.ndarray  # (n_users, n)
    r: np.ndarray  # (n,) complex


def modulate_bpsk(c) -> np.ndarray:
    """0 -> +1, 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(c, dtype=np.float64)


def make_interleaver(seed, n: int) -> np.ndarray:
    """Seeded uniform permutation; ``interleave(v)[i] = v[perm[i]]``."""
    return np.random.default_rng(seed).permutation(n)


def interleave(v, perm) -> np.ndarray:
    return np.asarray(v)[..., perm]


def deinterleave(v, perm) -> np.ndarray:
    v = np.asarray(v)
    out = np.empty_like(v)
    out[..., perm] = v
    return out


def snr_to_sigma(snr_db: float, profile: PowerProfile | None = None) -> float:
    """Noise variance for a multi-user SNR of sum(rho^2)/sigma^2."""
    total = 1.0 if profile is None else float(np.sum(profile.rho_sq))
    return total * 10.0 ** (-snr_db / 10.0)


def draw_channel(profile: PowerProfile, sigma_sq: float, n: int, rng,
                 fading: bool = False, interleaver_seeds=None) -> ChannelRealization:
    """AWGN gains ``h = rho`` or block Rayleigh ``h = rho * CN(0, 1)``."""
    rho = profile.rho
    if fading:
        g = (rng.standard_normal(len(rho)) + 1j * rng.standard_normal(len(rho))) / np.sqrt(2.0)
        h = rho * g
    else:
        h = rho.astype(np.complex128)
    if interleaver_seeds is None:
        interleaver_seeds = rng.integers(0, 2**63, size=len(rho))
    perms = np.stack([make_interleaver(s, n) for s in interleaver_seeds])
    return ChannelRealization(h=h, sigma_sq=float(sigma_sq), interleavers=perms)


def transmit(codewords, ch: ChannelRealization, rng) -> np.ndarray:
    """r = sum_u h_u * x_u + w with w ~ CN(0, sigma^2)."""
    codewords = np.asarray(codewords)
    x = modulate_bpsk(interleave_users(codewords, ch.interleavers))
    r = ch.h @ x
    n = codewords.shape[1]
    scale = np.sqrt(ch.sigma_sq / 2.0)
    w = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return r + w


def interleave_users(codewords, perms) -> np.ndarray:
    return np.take_along_axis(np.asarray(codewords), perms, axis=1)


def make_frame(code, ch: ChannelRealization, rng) -> Frame:
    """Random info words for every user, encoded and sent through ``ch``."""
    bits = rng.integers(0, 2, size=(ch.n_users, code.k), dtype=np.uint8)
    cw = (bits.astype(np.int64) @ code.G % 2).astype(np.uint8)
    return Frame(tx_bits=bits, tx_codewords=cw, r=transmit(cw, ch, rng))
