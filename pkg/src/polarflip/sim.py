"""Monte-Carlo FER/BER experiment driver.

Every frame draws its own RNG substream from (master_seed, frame_index), so
results are bit-exact reproducible and independent of execution order.
Early stopping is evaluated at fixed batch boundaries in frame order, which
keeps the statistics identical no matter how many workers run the batches.
A frame error is any u_hat != u, including CRC false positives; those are
additionally counted as undetected errors.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import ceil

import numpy as np

from .channel import ChannelParams, frame_rng, transmit
from .construction import CodeConfig, construct
from .decoders import (
    DECODER_NAMES,
    DecoderBudget,
    dscf_decode,
    pma_scf_decode,
    sc_report,
    scf_decode,
    sco_decode,
)
from .encoding import build_u, encode_u
from .errors import ConfigurationError
from .pipeline import CycleModel, PipelineConfig, build_command_stream
from .sc import ScDecoder


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to reproduce a sweep."""

    n: int = 10
    k: int = 512
    crc_width: int = 16
    construction_snr_db: float = 3.0
    decoder: str = "sc"
    max_attempts: int = 10
    alpha: float = 0.3
    omega: int = 2
    k_oracle: int = 1
    list_capacity: int | None = None
    snr_points: tuple[float, ...] = ()
    max_frames: int = 100_000
    min_frame_errors: int = 100
    master_seed: int = 0
    batch_frames: int = 256
    latency_model: bool = False
    num_pe: int = 64
    num_lanes: int = 4
    launch_interval: int | None = None

    def __post_init__(self):
        if self.decoder not in DECODER_NAMES:
            raise ConfigurationError(
                f"unknown decoder {self.decoder!r}; choose one of {', '.join(DECODER_NAMES)}"
            )
        pts = tuple(float(s) for s in self.snr_points)
        if not pts:
            raise ConfigurationError("snr_points must be nonempty")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ConfigurationError("snr_points must be strictly increasing")
        object.__setattr__(self, "snr_points", pts)
        if self.max_frames < self.min_frame_errors:
            raise ConfigurationError("max_frames must be >= min_frame_errors")
        if self.min_frame_errors < 1 or self.batch_frames < 1:
            raise ConfigurationError("min_frame_errors and batch_frames must be positive")
        if self.decoder != "sc" and self.decoder != "sco" and self.crc_width < 1:
            raise ConfigurationError(f"decoder {self.decoder!r} requires a CRC")

    def code(self) -> CodeConfig:
        return construct(self.n, self.k, self.crc_width, self.construction_snr_db)


@dataclass(frozen=True)
class SimRecord:
    snr_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    avg_attempts: float
    avg_cycles: float
    undetected_errors: int = 0


@dataclass
class _Counters:
    frames: int = 0
    frame_errors: int = 0
    bit_errors: int = 0
    attempts: int = 0
    cycles: float = 0.0
    undetected: int = 0

    def add(self, other: "_Counters") -> None:
        self.frames += other.frames
        self.frame_errors += other.frame_errors
        self.bit_errors += other.bit_errors
        self.attempts += other.attempts
        self.cycles += other.cycles
        self.undetected += other.undetected


class _Worker:
    """One decoder instance plus the per-frame loop for a batch of frames."""

    def __init__(self, spec: ExperimentSpec, cfg: CodeConfig, snr_db: float,
                 cycle_model: CycleModel | None):
        self.spec = spec
        self.cfg = cfg
        self.params = ChannelParams(snr_db, cfg.rate)
        self.cycle_model = cycle_model
        self.engine = ScDecoder(cfg)
        budget = DecoderBudget(spec.max_attempts, spec.list_capacity, spec.alpha)
        name = spec.decoder
        if name == "sc":
            self._decode = lambda llr, u: sc_report(llr, cfg, self.engine)
        elif name == "scf":
            self._decode = lambda llr, u: scf_decode(llr, cfg, budget, self.engine)
        elif name == "dscf":
            self._decode = lambda llr, u: dscf_decode(llr, cfg, budget, spec.omega, self.engine)
        elif name == "pma-scf":
            self._decode = lambda llr, u: pma_scf_decode(llr, cfg, budget, self.engine)
        elif name == "sco":
            self._decode = lambda llr, u: sco_decode(llr, cfg, u, spec.k_oracle, self.engine)
        else:  # pragma: no cover - spec validation rejects this earlier
            raise ConfigurationError(f"unknown decoder {name!r}")

    def run_batch(self, start: int, count: int) -> _Counters:
        spec = self.spec
        cfg = self.cfg
        payload_positions = cfg.info_set[: cfg.K]
        c = _Counters()
        for t in range(start, start + count):
            rng = frame_rng(spec.master_seed, t)
            payload = rng.integers(0, 2, cfg.K, dtype=np.uint8)
            u = build_u(cfg, payload)
            llr = transmit(encode_u(u), self.params, rng)
            report = self._decode(llr, u)
            u_hat = report.outcome.u_hat
            c.frames += 1
            c.attempts += report.attempts_used
            if self.cycle_model is not None:
                c.cycles += self.cycle_model.report_cycles(report)
            if not np.array_equal(u_hat, u):
                c.frame_errors += 1
                c.bit_errors += int(np.count_nonzero(u_hat[payload_positions] != payload))
                if cfg.crc_width and report.outcome.crc_ok:
                    c.undetected += 1
        return c


def run_point(spec: ExperimentSpec, snr_db: float, workers: int = 1,
              cfg: CodeConfig | None = None) -> SimRecord:
    """Simulate one Eb/N0 point until max_frames or min_frame_errors.

    The early-stop decision folds batch counters in batch-index order, so a
    parallel run (which may compute a few batches speculatively) reports the
    exact same record as a serial one.
    """
    cfg = cfg or spec.code()
    cycle_model = None
    if spec.latency_model:
        pcfg = PipelineConfig(num_pe=spec.num_pe, num_lanes=spec.num_lanes,
                              launch_interval=spec.launch_interval)
        cycle_model = CycleModel(build_command_stream(cfg), pcfg)
    workers = max(1, workers)
    pool = [_Worker(spec, cfg, snr_db, cycle_model) for _ in range(workers)]

    B = spec.batch_frames
    n_batches = ceil(spec.max_frames / B)
    sizes = [min(B, spec.max_frames - b * B) for b in range(n_batches)]

    acc = _Counters()
    pending: dict[int, _Counters] = {}
    next_fold = 0
    stopped = False

    def fold() -> None:
        nonlocal next_fold, stopped
        while not stopped and next_fold in pending:
            acc.add(pending.pop(next_fold))
            next_fold += 1
            if acc.frame_errors >= spec.min_frame_errors:
                stopped = True

    if workers == 1:
        for b in range(n_batches):
            pending[b] = pool[0].run_batch(b * B, sizes[b])
            fold()
            if stopped:
                break
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            b = 0
            while b < n_batches and not stopped:
                chunk = list(range(b, min(b + workers, n_batches)))
                futures = {
                    bb: ex.submit(pool[i % workers].run_batch, bb * B, sizes[bb])
                    for i, bb in enumerate(chunk)
                }
                for bb in chunk:
                    pending[bb] = futures[bb].result()
                b = chunk[-1] + 1
                fold()

    frames = acc.frames
    return SimRecord(
        snr_db=float(snr_db),
        frames=frames,
        frame_errors=acc.frame_errors,
        bit_errors=acc.bit_errors,
        fer=acc.frame_errors / frames if frames else 0.0,
        ber=acc.bit_errors / (frames * cfg.K) if frames else 0.0,
        avg_attempts=acc.attempts / frames if frames else 0.0,
        avg_cycles=acc.cycles / frames if frames else 0.0,
        undetected_errors=acc.undetected,
    )


CSV_HEADER = "snr_db,frames,frame_errors,fer,ber,avg_attempts,avg_cycles"


def format_csv(records, verbose: bool = False) -> str:
    """Render records as CSV, floats at 6 significant digits."""
    lines = [CSV_HEADER + (",undetected_errors" if verbose else "")]
    for r in records:
        row = (
            f"{r.snr_db:.6g},{r.frames},{r.frame_errors},"
            f"{r.fer:.6g},{r.ber:.6g},{r.avg_attempts:.6g},{r.avg_cycles:.6g}"
        )
        if verbose:
            row += f",{r.undetected_errors}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def run_sweep(spec: ExperimentSpec, out_path=None, workers: int = 1,
              verbose: bool = False, progress=None) -> list[SimRecord]:
    """Run every SNR point of the spec; optionally write the CSV."""
    cfg = spec.code()
    records = []
    for snr in spec.snr_points:
        rec = run_point(spec, snr, workers=workers, cfg=cfg)
        records.append(rec)
        if progress is not None:
            progress(rec)
    if out_path is not None:
        with open(out_path, "w") as fh:
            fh.write(format_csv(records, verbose=verbose))
    return records
