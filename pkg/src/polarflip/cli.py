"""Command line front end for Monte-Carlo sweeps.

Example:

    polarflip --n 10 --k 512 --decoder pma-scf --t 10 \
        --snr 1.0:2.5:0.5 --max-frames 200000 --min-errors 100 \
        --seed 1 --out sweep.csv --latency-model

Exit status is 0 on success and 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigurationError
from .sim import ExperimentSpec, format_csv, run_sweep


def parse_snr_points(text: str) -> tuple[float, ...]:
    """Either 'a:b:step' (inclusive of b up to float fuzz) or 'a,b,c'."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigurationError(f"SNR range must be 'a:b:step', got {text!r}")
        a, b, step = (float(p) for p in parts)
        if step <= 0:
            raise ConfigurationError("SNR step must be positive")
        pts = []
        v = a
        while v <= b + 1e-9:
            pts.append(round(v, 9))
            v += step
        return tuple(pts)
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise ConfigurationError(f"bad SNR list {text!r}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="polarflip",
        description="Monte-Carlo FER/latency sweeps for polar bit-flipping decoders",
    )
    p.add_argument("--n", type=int, required=True, help="log2 of the blocklength")
    p.add_argument("--k", type=int, required=True, help="payload bits per frame")
    p.add_argument("--crc", type=int, default=16, help="CRC width (default 16)")
    p.add_argument("--construction-snr", type=float, default=3.0,
                   help="Eb/N0 (dB) used to build the code (default 3.0)")
    p.add_argument("--decoder", default="sc",
                   help="sc | scf | dscf | pma-scf | sco")
    p.add_argument("--t", type=int, default=10, help="flip attempt budget")
    p.add_argument("--alpha", type=float, default=0.3, help="flip metric parameter")
    p.add_argument("--omega", type=int, default=2, help="dscf max flip-set order")
    p.add_argument("--k-oracle", type=int, default=1, help="sco correction order")
    p.add_argument("--list-capacity", type=int, default=None,
                   help="flip list capacity (default: same as --t)")
    p.add_argument("--snr", required=True,
                   help="Eb/N0 points: 'a:b:step' or comma-separated list")
    p.add_argument("--max-frames", type=int, default=100_000, help="frame cap per point")
    p.add_argument("--min-errors", type=int, default=100,
                   help="stop a point after this many frame errors")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    p.add_argument("--workers", type=int, default=1, help="parallel frame workers")
    p.add_argument("--verbose", action="store_true",
                   help="add the undetected-error column to the CSV")
    p.add_argument("--latency-model", action="store_true",
                   help="account decoding cycles with the pipeline model")
    p.add_argument("--pe", type=int, default=64, help="processing elements")
    p.add_argument("--lanes", type=int, default=4, help="parallel attempt lanes")
    p.add_argument("--launch-interval", type=int, default=None,
                   help="cycles between attempt launches (default N/lanes)")
    return p


def spec_from_args(args) -> ExperimentSpec:
    return ExperimentSpec(
        n=args.n,
        k=args.k,
        crc_width=args.crc,
        construction_snr_db=args.construction_snr,
        decoder=args.decoder,
        max_attempts=args.t,
        alpha=args.alpha,
        omega=args.omega,
        k_oracle=args.k_oracle,
        list_capacity=args.list_capacity,
        snr_points=parse_snr_points(args.snr),
        max_frames=args.max_frames,
        min_frame_errors=args.min_errors,
        master_seed=args.seed,
        latency_model=args.latency_model,
        num_pe=args.pe,
        num_lanes=args.lanes,
        launch_interval=args.launch_interval,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = spec_from_args(args)
        def progress(rec):
            print(
                f"# snr={rec.snr_db:g} dB: fer={rec.fer:.3e} over {rec.frames} frames, "
                f"avg_attempts={rec.avg_attempts:.3f}",
                file=sys.stderr,
            )
        records = run_sweep(spec, out_path=args.out, workers=args.workers,
                            verbose=args.verbose, progress=progress)
    except (ConfigurationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out is None:
        sys.stdout.write(format_csv(records, verbose=args.verbose))
    return 0


if __name__ == "__main__":
    sys.exit(main())
