"""Command line entry point: ``noma-osd {simulate,exit,decode}``."""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from .codes import CodeError, resolve_code
from .harness.config import ConfigError, load_config, parse_snr_list
from .harness.exit import exit_transform, mi_grid_to_sigma
from .harness.montecarlo import format_sim_csv, run_monte_carlo
from .lcsosd import LcSosdParams, lc_sosd_decode

EXIT_COLUMNS = (
    "sigma_sq_in", "mi_in", "mi_out_sosd", "mi_out_lcsosd",
    "mean_teps_sosd", "mean_teps_lcsosd", "frames",
)


def _write(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="")


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_(seed=args.seed)
    res = run_monte_carlo(cfg, workers=args.workers)
    _write(format_sim_csv(res), args.out or cfg.out)
    print(f"{len(cfg.snr_db)} SNR points x {cfg.frames} frames in {res.wall_clock:.1f} s", file=sys.stderr)
    return 0


def cmd_exit(args) -> int:
    code = resolve_code(args.code)
    params = LcSosdParams(m=args.order, lambda_s=args.lambda_s, lambda_p=args.lambda_p)
    mi = parse_snr_list(args.grid)
    if any(not 0.0 < v < 1.0 for v in mi):
        raise ValueError("MI grid values must lie strictly between 0 and 1")
    pts = exit_transform(code, params, mi_grid_to_sigma(mi), frames=args.frames, seed=args.seed)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(EXIT_COLUMNS)
    for p in pts:
        w.writerow([f"{getattr(p, c):.9g}" if c != "frames" else p.frames for c in EXIT_COLUMNS])
    _write(buf.getvalue(), args.out)
    return 0


def cmd_decode(args) -> int:
    code = resolve_code(args.code)
    text = Path(args.llr).read_text() if args.llr != "-" else sys.stdin.read()
    ell = np.array([float(t) for t in text.replace(",", " ").split()])
    params = LcSosdParams(m=args.order, lambda_s=args.lambda_s, lambda_p=args.lambda_p)
    out = lc_sosd_decode(code, ell, params)
    c_hat = ((out.delta + np.clip(ell, -50, 50)) < 0).astype(np.uint8)
    print("delta: " + " ".join(f"{v:.6g}" for v in out.delta))
    print("c_hat: " + "".join(str(int(b)) for b in c_hat))
    print(f"gamma: {out.gamma:.6g}  teps: {out.n_teps}  discarded: {out.n_discarded}  early: {out.terminated_early}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="noma-osd", description="LC-SOSD decoding and NOMA receiver simulation")
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("simulate", help="Monte Carlo BER run from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", help="CSV path (default: config 'out' key, else stdout)")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    def decoder_opts(p):
        p.add_argument("--code", required=True, help="built-in name such as 8,4 or 64,30, or a matrix file")
        p.add_argument("--order", type=int, required=True)
        p.add_argument("--lambda-s", type=float, default=0.99)
        p.add_argument("--lambda-p", type=float, default=1e-5)

    e = sub.add_parser("exit", help="MI transfer of SOSD and LC-SOSD")
    decoder_opts(e)
    e.add_argument("--grid", default="0.1:0.1:0.9", help="input MI values, list or start:step:stop")
    e.add_argument("--frames", type=int, default=20_000)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out")
    e.set_defaults(func=cmd_exit)

    d = sub.add_parser("decode", help="one-shot LC-SOSD on an LLR file")
    decoder_opts(d)
    d.add_argument("--llr", required=True, help="whitespace separated LLRs, '-' for stdin")
    d.set_defaults(func=cmd_decode)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CodeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
