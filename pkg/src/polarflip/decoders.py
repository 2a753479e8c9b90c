"""SC-flip decoder family: SCF, DSCF, PMA-SCF, and the genie-aided oracle.

Every decoder runs an initial SC pass and returns immediately on CRC
success. The variants differ in how the list of flip candidates is built:

* scf: the T information positions with the smallest |L| from the initial
  pass, attempted in ascending |L| order. The list is never updated.
* dscf: candidates ranked by the flip metric; after every failed attempt the
  attempted set's extensions are scored and merged in, bounded by the list
  capacity. Always attempts the best unattempted candidate next.
* pma_scf: rounds of attempts. Extensions of an attempt survive only when
  its path metric does not exceed its parent's; the merged next-round list
  is ordered by parent path metric first and flip metric second.
* sco: simulation-only genie that forces the first k erroneous information
  decisions to their true values.

The attempt budget T counts SC passes after the initial one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .construction import CodeConfig
from .errors import ConfigurationError
from .metrics import (
    DEFAULT_ALPHA,
    FlipList,
    FlipSet,
    extension_metrics,
    initial_flip_metrics,
)
from .sc import DecodeOutcome, ScDecoder

DECODER_NAMES = ("sc", "scf", "dscf", "pma-scf", "sco")


@dataclass(frozen=True)
class DecoderBudget:
    """max_attempts: SC passes allowed after the initial one; list_capacity
    defaults to max(max_attempts, 1)."""

    max_attempts: int = 10
    list_capacity: int | None = None
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if self.max_attempts < 0:
            raise ConfigurationError(f"max_attempts must be >= 0, got {self.max_attempts}")
        if self.list_capacity is not None and self.list_capacity < 1:
            raise ConfigurationError(f"list_capacity must be >= 1, got {self.list_capacity}")

    @property
    def capacity(self) -> int:
        return self.list_capacity if self.list_capacity is not None else max(self.max_attempts, 1)


@dataclass(eq=False)
class DecodeReport:
    """Outcome of a (possibly multi-pass) decode.

    round_attempts records how many passes ran in each dependency round
    after the initial pass; rounds must finish before their successors can
    start, which is what the pipeline latency model consumes.
    """

    outcome: DecodeOutcome
    attempts_used: int
    success: bool
    flip_history: list[FlipSet] = field(default_factory=list)
    round_attempts: tuple[int, ...] = ()


def _rank_of(info_set: np.ndarray, index: int) -> int:
    return int(np.searchsorted(info_set, index))


def sc_report(channel_llrs, cfg: CodeConfig, engine: ScDecoder | None = None) -> DecodeReport:
    """Plain SC wrapped as a report (success = CRC verdict)."""
    engine = engine or ScDecoder(cfg)
    out = engine.decode(channel_llrs)
    return DecodeReport(outcome=out, attempts_used=1, success=out.crc_ok)


def scf_decode(channel_llrs, cfg: CodeConfig, budget: DecoderBudget,
               engine: ScDecoder | None = None) -> DecodeReport:
    """SC-Flip: retry with single flips at the least reliable positions."""
    if cfg.crc_width < 1:
        raise ConfigurationError("scf requires a CRC")
    engine = engine or ScDecoder(cfg)
    initial = engine.decode(channel_llrs, attempt_index=0)
    if initial.crc_ok or budget.max_attempts == 0:
        return DecodeReport(outcome=initial, attempts_used=1, success=initial.crc_ok)

    order = np.argsort(np.abs(initial.info_llrs), kind="stable")[: budget.max_attempts]
    history: list[FlipSet] = []
    out = initial
    for attempt, rank in enumerate(order, start=1):
        fs = FlipSet(indices=(int(cfg.info_set[rank]),), metric=0.0,
                     parent_pm=initial.path_metric)
        history.append(fs)
        out = engine.decode(channel_llrs, flips=fs.indices, attempt_index=attempt)
        if out.crc_ok:
            return DecodeReport(outcome=out, attempts_used=attempt + 1, success=True,
                                flip_history=history, round_attempts=(attempt,))
    return DecodeReport(outcome=out, attempts_used=len(order) + 1, success=False,
                        flip_history=history, round_attempts=(len(order),))


def dscf_decode(channel_llrs, cfg: CodeConfig, budget: DecoderBudget,
                omega_max: int = 2, engine: ScDecoder | None = None) -> DecodeReport:
    """Dynamic SC-Flip: metric-ranked list, updated after every attempt."""
    if cfg.crc_width < 1:
        raise ConfigurationError("dscf requires a CRC")
    if omega_max < 1:
        raise ConfigurationError(f"omega_max must be >= 1, got {omega_max}")
    engine = engine or ScDecoder(cfg)
    initial = engine.decode(channel_llrs, attempt_index=0)
    if initial.crc_ok or budget.max_attempts == 0:
        return DecodeReport(outcome=initial, attempts_used=1, success=initial.crc_ok)

    alpha = budget.alpha
    info_set = cfg.info_set
    candidates = FlipList(budget.capacity)
    metrics0 = initial_flip_metrics(initial.info_llrs, alpha)
    candidates.bulk_insert(
        FlipSet(indices=(int(info_set[r]),), metric=float(metrics0[r]),
                parent_pm=initial.path_metric)
        for r in np.argsort(-metrics0, kind="stable")[: budget.capacity]
    )

    history: list[FlipSet] = []
    out = initial
    attempts = 0
    while attempts < budget.max_attempts and len(candidates):
        fs = candidates.pop_best()
        history.append(fs)
        attempts += 1
        out = engine.decode(channel_llrs, flips=fs.indices, attempt_index=attempts)
        if out.crc_ok:
            return DecodeReport(outcome=out, attempts_used=attempts + 1, success=True,
                                flip_history=history,
                                round_attempts=(1,) * attempts)
        if fs.order < omega_max:
            last_rank = _rank_of(info_set, fs.last)
            ext = extension_metrics(fs.metric, out.info_llrs, last_rank, alpha)
            candidates.bulk_insert(
                FlipSet(indices=fs.indices + (int(info_set[last_rank + 1 + j]),),
                        metric=float(ext[j]), parent_pm=out.path_metric,
                        parent_id=attempts)
                for j in range(ext.size)
            )
    return DecodeReport(outcome=out, attempts_used=attempts + 1, success=False,
                        flip_history=history, round_attempts=(1,) * attempts)


def _dependency_rounds(parent_ids) -> tuple[int, ...]:
    """Group an attempt sequence into dependency rounds.

    Attempt i+1 (1-based) may join the running round only if its parent
    attempt finished before the round began; otherwise a new round starts.
    Parent 0 is the initial pass, available to everyone.
    """
    rounds: list[int] = []
    start = 1
    count = 0
    for i, p in enumerate(parent_ids, start=1):
        if p >= start:
            rounds.append(count)
            start = i
            count = 1
        else:
            count += 1
    if count:
        rounds.append(count)
    return tuple(rounds)


def pma_scf_decode(channel_llrs, cfg: CodeConfig, budget: DecoderBudget,
                   engine: ScDecoder | None = None) -> DecodeReport:
    """Path-metric-aided SC-Flip.

    Candidates are attempted best-first, where "best" means the lowest
    parent path metric and, within one parent pass, the highest flip metric;
    a verified path (an attempt whose own path metric stays at or below its
    parent's) therefore gets priority as the start point for deeper
    corrections. Attempts that fail verification contribute no extensions.
    Extensions enter the shared bounded list gated by its least metric. The
    global budget caps attempts regardless of flip order.
    """
    if cfg.crc_width < 1:
        raise ConfigurationError("pma-scf requires a CRC")
    engine = engine or ScDecoder(cfg)
    initial = engine.decode(channel_llrs, attempt_index=0)
    if initial.crc_ok or budget.max_attempts == 0:
        return DecodeReport(outcome=initial, attempts_used=1, success=initial.crc_ok)

    alpha = budget.alpha
    info_set = cfg.info_set
    candidates = FlipList(budget.capacity)
    metrics0 = initial_flip_metrics(initial.info_llrs, alpha)
    candidates.bulk_insert(
        FlipSet(indices=(int(info_set[r]),), metric=float(metrics0[r]),
                parent_pm=initial.path_metric)
        for r in np.argsort(-metrics0, kind="stable")[: budget.capacity]
    )

    history: list[FlipSet] = []
    out = initial
    attempts = 0
    while len(candidates) and attempts < budget.max_attempts:
        candidates.sort()
        fs = candidates.pop_front()
        history.append(fs)
        attempts += 1
        out = engine.decode(channel_llrs, flips=fs.indices, attempt_index=attempts)
        if out.crc_ok:
            break
        if out.path_metric > fs.parent_pm:
            continue  # failed verification: this branch spawns nothing
        last_rank = _rank_of(info_set, fs.last)
        ext = extension_metrics(fs.metric, out.info_llrs, last_rank, alpha)
        candidates.bulk_insert(
            FlipSet(indices=fs.indices + (int(info_set[last_rank + 1 + j]),),
                    metric=float(ext[j]), parent_pm=out.path_metric,
                    parent_id=attempts)
            for j in range(ext.size)
        )
    return DecodeReport(
        outcome=out,
        attempts_used=attempts + 1,
        success=out.crc_ok,
        flip_history=history,
        round_attempts=_dependency_rounds([fs.parent_id for fs in history]),
    )


def sco_decode(channel_llrs, cfg: CodeConfig, true_u, k: int,
               engine: ScDecoder | None = None) -> DecodeReport:
    """Genie-aided SC: the first k erroneous information decisions are forced
    to the truth; success means the full source vector was recovered."""
    if k < 0:
        raise ConfigurationError(f"oracle order k must be >= 0, got {k}")
    engine = engine or ScDecoder(cfg)
    out = engine.decode(channel_llrs, oracle_u=true_u, oracle_k=k)
    ok = bool(np.array_equal(out.u_hat, np.asarray(true_u, dtype=np.uint8)))
    return DecodeReport(outcome=out, attempts_used=1, success=ok)


def get_decoder(name: str):
    """Dispatch by decoder name; see DECODER_NAMES."""
    table = {
        "sc": sc_report,
        "scf": scf_decode,
        "dscf": dscf_decode,
        "pma-scf": pma_scf_decode,
        "sco": sco_decode,
    }
    try:
        return table[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown decoder {name!r}; choose one of {', '.join(DECODER_NAMES)}"
        ) from None
