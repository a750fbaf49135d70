"""Frame-parallel Monte Carlo BER simulation with deterministic streams.

Every frame draws from its own generator keyed by (seed, SNR index, frame
index) and the interleavers from (seed, frame index, user), so results do
not depend on how frames are split across worker processes. Counters are
integers and reduce by plain summation.
"""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..channel import PowerProfile, draw_channel, make_frame, snr_to_sigma
from ..codes import resolve_code
from ..receivers import jd_receive, sic_receive
from .config import SimConfig
from .ml import JointMlDecoder

SIM_COLUMNS = (
    "snr_db", "receiver", "n_users", "frames", "user", "bit_errors", "bits",
    "ber", "fer", "mean_total_iters", "mean_decoding_iters", "mean_teps", "seed",
)

_FRAME_TAG = 0
_INTERLEAVER_TAG = 1


def frame_rng(seed: int, snr_idx: int, frame_idx: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, _FRAME_TAG, snr_idx, frame_idx]))


def interleaver_seeds(seed: int, frame_idx: int, n_users: int) -> list:
    return [np.random.SeedSequence([seed, _INTERLEAVER_TAG, frame_idx, u]) for u in range(n_users)]


def noise_variance(cfg: SimConfig, snr_db: float, profile: PowerProfile) -> float:
    sigma_sq = snr_to_sigma(snr_db, profile)
    return 2.0 * sigma_sq if cfg.noise == "real" else sigma_sq


class _Context:
    """Per-process state: code, power profile and receiver parameters."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.code = resolve_code(cfg.code)
        self.profile = PowerProfile.geometric(cfg.n_users, cfg.power_ratio)
        self.sigma_sq = [noise_variance(cfg, s, self.profile) for s in cfg.snr_db]
        self.jd = cfg.jd_params()
        self.ml = JointMlDecoder(self.code) if cfg.receiver == "ml" else None

    def n_counters(self) -> int:
        return 2 * self.cfg.n_users + 4

    def run_frame(self, snr_idx: int, frame_idx: int) -> np.ndarray:
        cfg, code = self.cfg, self.code
        U = cfg.n_users
        rng = frame_rng(cfg.seed, snr_idx, frame_idx)
        ch = draw_channel(
            self.profile, self.sigma_sq[snr_idx], code.n, rng,
            fading=cfg.channel == "rayleigh",
            interleaver_seeds=interleaver_seeds(cfg.seed, frame_idx, U),
        )
        fr = make_frame(code, ch, rng)
        if cfg.receiver == "jd":
            res = jd_receive(fr.r, ch, code, self.jd)
            c_hat = res.c_hat
            extra = (res.iterations_total, res.decoding_iterations, res.total_teps, res.decoder_calls)
        elif cfg.receiver == "sic":
            res = sic_receive(fr.r, ch, code, cfg.order)
            c_hat = res.c_hat
            extra = (U, res.decoder_calls, res.total_teps, res.decoder_calls)
        else:
            c_hat = self.ml.decode(fr.r, ch)
            extra = (1, 0, 0, 0)
        b_hat = code.unencode(c_hat)
        errs = (b_hat != fr.tx_bits).sum(axis=1)
        out = np.zeros(self.n_counters(), dtype=np.int64)
        out[:U] = errs
        out[U:2 * U] = errs > 0
        out[2 * U:] = extra
        return out

    def run_block(self, snr_idx: int, start: int, stop: int) -> np.ndarray:
        acc = np.zeros(self.n_counters(), dtype=np.int64)
        for f in range(start, stop):
            acc += self.run_frame(snr_idx, f)
        return acc


_WORKER_CTX: Optional[_Context] = None


def _init_worker(cfg: SimConfig):
    global _WORKER_CTX
    _WORKER_CTX = _Context(cfg)


def _worker_block(args):
    return args[0], _WORKER_CTX.run_block(*args)


@dataclass
class SnrPoint:
    snr_db: float
    bit_errors: np.ndarray  # per user
    frame_errors: np.ndarray  # per user
    bits_per_user: int
    frames: int
    total_iters: int
    decoding_iters: int
    teps: int
    decoder_calls: int

    @property
    def ber(self) -> np.ndarray:
        return self.bit_errors / self.bits_per_user

    @property
    def avg_ber(self) -> float:
        return float(self.bit_errors.sum() / (self.bits_per_user * len(self.bit_errors)))

    @property
    def mean_total_iters(self) -> float:
        return self.total_iters / self.frames

    @property
    def mean_decoding_iters(self) -> float:
        return self.decoding_iters / self.frames

    @property
    def mean_teps(self) -> float:
        return self.teps / self.decoder_calls if self.decoder_calls else 0.0


@dataclass
class SimResult:
    config: SimConfig
    points: list
    wall_clock: float = field(default=0.0, compare=False)

    def to_csv(self) -> str:
        return format_sim_csv(self)


def _blocks(frames: int, n_blocks: int):
    edges = np.linspace(0, frames, n_blocks + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_monte_carlo(cfg: SimConfig, workers: int = 1, block_frames: int = 250) -> SimResult:
    """Simulate ``cfg.frames`` frames at every SNR point.

    ``workers > 1`` spreads blocks of frames over a process pool; the
    counters, and hence the CSV, are identical for any worker count.
    """
    t0 = time.perf_counter()
    n_snr = len(cfg.snr_db)
    n_blocks = max(1, -(-cfg.frames // block_frames))
    tasks = [(i, a, b) for i in range(n_snr) for a, b in _blocks(cfg.frames, n_blocks)]
    ctx = _Context(cfg)
    acc = np.zeros((n_snr, ctx.n_counters()), dtype=np.int64)
    if workers <= 1:
        for i, a, b in tasks:
            acc[i] += ctx.run_block(i, a, b)
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(cfg,)) as pool:
            for i, part in pool.map(_worker_block, tasks):
                acc[i] += part
    U = cfg.n_users
    points = []
    for i, snr in enumerate(cfg.snr_db):
        a = acc[i]
        points.append(SnrPoint(
            snr_db=float(snr),
            bit_errors=a[:U].copy(),
            frame_errors=a[U:2 * U].copy(),
            bits_per_user=cfg.frames * ctx.code.k,
            frames=cfg.frames,
            total_iters=int(a[2 * U]),
            decoding_iters=int(a[2 * U + 1]),
            teps=int(a[2 * U + 2]),
            decoder_calls=int(a[2 * U + 3]),
        ))
    return SimResult(config=cfg, points=points, wall_clock=time.perf_counter() - t0)


def _g(x) -> str:
    return f"{float(x):.9g}"


def format_sim_csv(result: SimResult) -> str:
    """One row per (SNR, user) plus a row with user ``all`` (averages)."""
    cfg = result.config
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(SIM_COLUMNS)
    for p in result.points:
        common = [_g(p.mean_total_iters), _g(p.mean_decoding_iters), _g(p.mean_teps), cfg.seed]
        for u in range(cfg.n_users):
            be, fe = int(p.bit_errors[u]), int(p.frame_errors[u])
            w.writerow([_g(p.snr_db), cfg.receiver, cfg.n_users, p.frames, u, be, p.bits_per_user,
                        _g(be / p.bits_per_user), _g(fe / p.frames), *common])
        be = int(p.bit_errors.sum())
        bits = p.bits_per_user * cfg.n_users
        fer = p.frame_errors.sum() / (p.frames * cfg.n_users)
        w.writerow([_g(p.snr_db), cfg.receiver, cfg.n_users, p.frames, "all", be, bits,
                    _g(be / bits), _g(fer), *common])
    return buf.getvalue()
