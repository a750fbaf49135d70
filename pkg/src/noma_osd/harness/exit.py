"""Mutual-information transfer of soft-output decoders."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from ..codes import Code
from ..lcsosd import LcSosdParams, lc_sosd_decode

MIN_MI_SAMPLES = 10_000
_SIGMA_SQ_MAX = 400.0


def mi_of_variance(sigma_ell_sq: float) -> float:
    """MI between a bit and its consistent-Gaussian LLR of variance sigma^2.

    ``J(s2) = 1 - E[log2(1 + exp(-L))]`` with ``L ~ N(s2/2, s2)``;
    increasing, J(0) = 0 and J(inf) = 1.
    """
    s2 = float(sigma_ell_sq)
    if s2 < 0:
        raise ValueError(f"variance must be >= 0, got {s2}")
    if s2 == 0.0:
        return 0.0
    if s2 > _SIGMA_SQ_MAX:
        return 1.0
    s = math.sqrt(s2)
    mean = s2 / 2.0

    def f(xi):
        z = (xi - mean) / s
        return math.exp(-0.5 * z * z) * np.logaddexp(0.0, -xi) / math.log(2.0)

    val, _ = integrate.quad(f, mean - 12 * s, mean + 12 * s, limit=200, epsabs=1e-13)
    return float(min(1.0, max(0.0, 1.0 - val / math.sqrt(2.0 * math.pi) / s)))


def variance_of_mi(mi: float) -> float:
    """Inverse of :func:`mi_of_variance` on (0, 1)."""
    if not 0.0 < mi < 1.0:
        raise ValueError(f"MI must lie in (0, 1), got {mi}")
    return float(optimize.brentq(lambda s2: mi_of_variance(s2) - mi, 1e-9, _SIGMA_SQ_MAX, xtol=1e-12))


def sample_gaussian_llr(bits, sigma_ell_sq: float, rng) -> np.ndarray:
    """Consistent Gaussian LLRs: mean +-sigma^2/2 (positive for bit 0), variance sigma^2."""
    bits = np.asarray(bits)
    s2 = float(sigma_ell_sq)
    if s2 < 0:
        raise ValueError(f"variance must be >= 0, got {s2}")
    sign = 1.0 - 2.0 * bits
    return sign * s2 / 2.0 + math.sqrt(s2) * rng.standard_normal(bits.shape)


def measure_mi(llr, bits) -> float:
    """Time-average MI estimate ``1 - mean(log2(1 + exp(-x * llr)))``, clipped to [0, 1].

    Overconfident LLRs can push the raw average below zero.
    """
    llr = np.asarray(llr, dtype=np.float64).ravel()
    bits = np.asarray(bits).ravel()
    if llr.shape != bits.shape:
        raise ValueError("llr and bits must have the same size")
    if llr.size < MIN_MI_SAMPLES:
        warnings.warn(f"MI estimate from only {llr.size} samples", RuntimeWarning, stacklevel=2)
    x = 1.0 - 2.0 * bits
    return float(np.clip(1.0 - np.mean(np.logaddexp(0.0, -x * llr)) / math.log(2.0), 0.0, 1.0))


@dataclass
class ExitPoint:
    sigma_sq_in: float
    mi_in: float
    mi_out_sosd: float
    mi_out_lcsosd: float
    mean_teps_sosd: float
    mean_teps_lcsosd: float
    frames: int


def exit_point(code: Code, params: LcSosdParams, sigma_sq: float, frames: int,
               rng, with_sosd: bool = True) -> ExitPoint:
    """Decode ``frames`` random codewords with Gaussian input LLRs."""
    sosd = LcSosdParams.sosd(params.m)
    bits_all = np.empty((frames, code.n), dtype=np.uint8)
    d_lc = np.empty((frames, code.n))
    d_so = np.empty((frames, code.n))
    teps_lc = teps_so = 0
    for f in range(frames):
        b = rng.integers(0, 2, size=code.k, dtype=np.uint8)
        c = (b.astype(np.int64) @ code.G % 2).astype(np.uint8)
        ell = sample_gaussian_llr(c, sigma_sq, rng)
        out = lc_sosd_decode(code, ell, params)
        d_lc[f] = out.delta
        teps_lc += out.n_teps
        if with_sosd:
            ref = lc_sosd_decode(code, ell, sosd)
            d_so[f] = ref.delta
            teps_so += ref.n_teps
        bits_all[f] = c
    return ExitPoint(
        sigma_sq_in=float(sigma_sq),
        mi_in=mi_of_variance(sigma_sq),
        mi_out_sosd=measure_mi(d_so, bits_all) if with_sosd else math.nan,
        mi_out_lcsosd=measure_mi(d_lc, bits_all),
        mean_teps_sosd=teps_so / frames if with_sosd else math.nan,
        mean_teps_lcsosd=teps_lc / frames,
        frames=frames,
    )


def exit_transform(code: Code, params: LcSosdParams, sigma_grid, frames: int = 20_000,
                   seed: int = 0, with_sosd: bool = True) -> list:
    """MI transfer curve of SOSD (no stop, no discard) and LC-SOSD.

    Each grid point draws from its own stream ``SeedSequence([seed, index])``.
    """
    out = []
    for i, s2 in enumerate(sigma_grid):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        out.append(exit_point(code, params, s2, frames, rng, with_sosd=with_sosd))
    return out


def mi_grid_to_sigma(mi_grid) -> list:
    return [variance_of_mi(m) for m in mi_grid]
