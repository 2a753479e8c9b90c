"""Instrumentation around the initial flip list.

Measures how often the first erroneous decision of the initial SC pass is
already present in the metric-ranked flip list built from that pass, and
where it ranks. Frames whose initial pass is error-free are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, frame_rng, transmit
from .construction import CodeConfig
from .encoding import build_u, encode_u
from .metrics import initial_flip_metrics
from .sc import ScDecoder


@dataclass(frozen=True)
class HitRateRecord:
    snr_db: float
    frames: int           # total frames simulated
    error_frames: int     # frames whose initial pass had an erroneous decision
    hits: int             # first error inside the top-`list_size` flip list
    hit_rate: float
    avg_rank: float       # mean 0-based list rank of the first error when present


def first_error_hit_rate(cfg: CodeConfig, snr_db: float, list_size: int,
                         alpha: float, error_frames_target: int,
                         master_seed: int = 0, max_frames: int = 50_000_000) -> HitRateRecord:
    """Simulate until `error_frames_target` erroneous initial passes were
    seen; report how often the true first error made the flip list."""
    engine = ScDecoder(cfg)
    params = ChannelParams(snr_db, cfg.rate)
    info_set = cfg.info_set
    frames = 0
    error_frames = 0
    hits = 0
    rank_sum = 0
    while error_frames < error_frames_target and frames < max_frames:
        rng = frame_rng(master_seed, frames)
        payload = rng.integers(0, 2, cfg.K, dtype=np.uint8)
        u = build_u(cfg, payload)
        llr = transmit(encode_u(u), params, rng)
        out = engine.decode(llr)
        frames += 1
        wrong = np.nonzero(out.u_hat[info_set] != u[info_set])[0]
        if wrong.size == 0:
            continue
        error_frames += 1
        first_rank = int(wrong[0])
        metrics = initial_flip_metrics(out.info_llrs, alpha)
        top = np.argsort(-metrics, kind="stable")[:list_size]
        where = np.nonzero(top == first_rank)[0]
        if where.size:
            hits += 1
            rank_sum += int(where[0])
    return HitRateRecord(
        snr_db=float(snr_db),
        frames=frames,
        error_frames=error_frames,
        hits=hits,
        hit_rate=hits / error_frames if error_frames else 0.0,
        avg_rank=rank_sum / hits if hits else float("nan"),
    )
