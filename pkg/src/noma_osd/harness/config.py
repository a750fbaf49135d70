"""Simulation configuration and its flat ``key = value`` file format."""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from ..lcsosd import LcSosdParams
from ..receivers import JdParams

RECEIVERS = ("jd", "sic", "ml")
CHANNELS = ("awgn", "rayleigh")
NOISE_CONVENTIONS = ("complex", "real")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    """One simulation campaign.

    ``noise`` selects how an SNR maps to noise: ``complex`` means the total
    complex noise variance is ``10^(-SNR/10)`` (relative to unit total
    receive power), ``real`` means each real dimension carries that
    variance, i.e. the complex variance is twice as large.
    """

    code: str = "8,4"
    order: int = 2
    receiver: str = "jd"
    channel: str = "awgn"
    n_users: int = 2
    power_ratio: float = 4.0
    snr_db: tuple = (10.0,)
    frames: int = 1000
    seed: int = 0
    noise: str = "complex"
    t_max: int = 30
    beta: float = 0.5
    ds_warmup: Optional[int] = None
    use_dc: bool = True
    matched_noise: bool = False
    lambda_s: float = 0.99
    lambda_p: float = 1e-5
    out: Optional[str] = None

    def __post_init__(self):
        if self.frames < 1:
            raise ConfigError("frames must be >= 1")
        if len(self.snr_db) == 0:
            raise ConfigError("snr_db list is empty")
        if self.receiver not in RECEIVERS:
            raise ConfigError(f"receiver must be one of {RECEIVERS}, got {self.receiver!r}")
        if self.channel not in CHANNELS:
            raise ConfigError(f"channel must be one of {CHANNELS}, got {self.channel!r}")
        if self.noise not in NOISE_CONVENTIONS:
            raise ConfigError(f"noise must be one of {NOISE_CONVENTIONS}, got {self.noise!r}")
        if self.n_users < 1:
            raise ConfigError("n_users must be >= 1")
        if self.power_ratio <= 0:
            raise ConfigError("power_ratio must be positive")
        # let the parameter classes validate their own ranges
        self.jd_params()

    def decoder_params(self) -> LcSosdParams:
        try:
            return LcSosdParams(m=self.order, lambda_s=self.lambda_s, lambda_p=self.lambda_p)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def jd_params(self) -> JdParams:
        try:
            return JdParams(
                t_max=self.t_max,
                beta=self.beta,
                ds_warmup=self.ds_warmup,
                use_dc=self.use_dc,
                matched_noise=self.matched_noise,
                decoder=self.decoder_params(),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def with_(self, **kw) -> "SimConfig":
        return replace(self, **kw)


def _parse_bool(s: str) -> bool:
    t = s.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def parse_snr_list(s: str) -> tuple:
    """``"6, 8, 10"`` or ``"6:2:10"`` (start:step:stop, stop included)."""
    s = s.strip()
    if ":" in s:
        parts = [float(p) for p in s.split(":")]
        if len(parts) != 3 or parts[1] <= 0:
            raise ConfigError(f"bad range {s!r}, expected start:step:stop")
        a, step, b = parts
        count = int(np.floor((b - a) / step + 1e-9)) + 1
        return tuple(float(round(a + i * step, 10)) for i in range(max(count, 0)))
    return tuple(float(p) for p in s.replace(",", " ").split())


def _parse_optional_int(s: str):
    return None if s.strip().lower() in ("", "none", "auto") else int(s)


_PARSERS = {
    "code": str,
    "order": int,
    "receiver": str,
    "channel": str,
    "n_users": int,
    "power_ratio": float,
    "snr_db": parse_snr_list,
    "frames": int,
    "seed": int,
    "noise": str,
    "t_max": int,
    "beta": float,
    "ds_warmup": _parse_optional_int,
    "use_dc": _parse_bool,
    "matched_noise": _parse_bool,
    "lambda_s": float,
    "lambda_p": float,
    "out": str,
}
assert set(_PARSERS) == {f.name for f in fields(SimConfig)}

CONFIG_KEYS = tuple(_PARSERS)


def parse_config(text: str, source: str = "<config>") -> SimConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment. Unknown keys are errors."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, val = (t.strip() for t in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r} (known: {', '.join(CONFIG_KEYS)})")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = _PARSERS[key](val)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {val!r}") from None
    return SimConfig(**values)


def load_config(path) -> SimConfig:
    p = Path(path)
    return parse_config(p.read_text(encoding="utf-8"), source=str(p))


def format_config(cfg: SimConfig) -> str:
    lines = []
    for f in fields(SimConfig):
        v = getattr(cfg, f.name)
        if v is None:
            continue
        if f.name == "snr_db":
            v = ", ".join(repr(float(x)) for x in v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"
