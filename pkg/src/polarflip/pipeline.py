"""Cycle-approximate model of the pipelined multi-attempt decoder.

All attempts share one command stream (the depth-first SC schedule); each
lane keeps its own pointer into it. A command of width w needs w processing
elements for one cycle, so it occupies ceil(w/num_pe) cycles on its own;
lanes contend for the PE bank with rotating round-robin priority, and spare
capacity within a cycle flows to the next lane. Partial-sum update, metric
sorting, and CRC run fully overlapped and cost nothing here.

Attempt k runs on lane k mod num_lanes. The first wave is staggered by
(k mod num_lanes) * launch_interval cycles to smooth the data-FIFO load;
later attempts start when their lane frees, which preserves the stagger.

FIFO occupancy counts the elements of every in-flight command still waiting
for PEs at the start of a cycle. Overflow beyond fifo_capacity is reported
as a statistic, not an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log2
from typing import NamedTuple

from .errors import ConfigurationError


@dataclass(frozen=True)
class PipelineConfig:
    num_pe: int = 64
    num_lanes: int = 4
    launch_interval: int | None = None  # defaults to N / num_lanes
    fifo_capacity: int = 1024

    def __post_init__(self):
        if self.num_pe < 1 or self.num_lanes < 1 or self.fifo_capacity < 1:
            raise ConfigurationError("num_pe, num_lanes, fifo_capacity must be positive")
        if self.launch_interval is not None and self.launch_interval < 0:
            raise ConfigurationError("launch_interval must be >= 0")

    def resolved_interval(self, N: int) -> int:
        return self.launch_interval if self.launch_interval is not None else N // self.num_lanes


class Command(NamedTuple):
    stage: int   # 0-based tree level; width = 2**stage
    kind: str    # "f" or "g"
    width: int


@dataclass(frozen=True)
class CommandStream:
    N: int
    commands: tuple[Command, ...]

    @property
    def element_ops(self) -> int:
        return sum(c.width for c in self.commands)


def build_command_stream(cfg) -> CommandStream:
    """Depth-first SC schedule: 2N-2 commands, N*log2(N) element ops.

    Accepts a CodeConfig or a bare blocklength.
    """
    N = int(getattr(cfg, "N", cfg))
    if N < 2 or (N & (N - 1)) != 0:
        raise ConfigurationError(f"blocklength must be a power of two >= 2, got {N}")
    commands: list[Command] = []

    def visit(stage: int) -> None:
        width = 1 << stage
        commands.append(Command(stage, "f", width))
        if stage > 0:
            visit(stage - 1)
        commands.append(Command(stage, "g", width))
        if stage > 0:
            visit(stage - 1)

    visit(int(log2(N)) - 1)
    return CommandStream(N=N, commands=tuple(commands))


@dataclass(frozen=True)
class LatencyResult:
    completion_cycles: tuple[int, ...]  # per attempt, launch order
    total_cycles: int
    pe_utilization: float
    fifo_peak: int
    fifo_avg: float
    fifo_overflow_cycles: int


def simulate_latency(stream: CommandStream, attempts: int, pcfg: PipelineConfig,
                     trace_path=None) -> LatencyResult:
    """Run the per-cycle pipeline model for `attempts` passes of the stream.

    With trace_path set, writes a CSV of
    cycle,lane,command_index,pe_busy,fifo_occupancy rows (one per active
    lane per cycle).
    """
    if attempts < 1:
        raise ConfigurationError(f"attempts must be >= 1, got {attempts}")
    delta = pcfg.resolved_interval(stream.N)
    L = pcfg.num_lanes
    widths = [c.width for c in stream.commands]
    n_cmds = len(widths)

    # lane state: which attempt it is running (-1 idle), command pointer,
    # and elements of the current command still waiting for PEs
    running = [-1] * L
    ptr = [0] * L
    rem = [0] * L
    queue_per_lane = [[k for k in range(attempts) if k % L == lane] for lane in range(L)]
    qpos = [0] * L

    completion = [0] * attempts
    done = 0
    cycle = 0
    busy_total = 0
    fifo_sum = 0
    fifo_peak = 0
    overflow = 0
    trace_rows = [] if trace_path is not None else None

    while done < attempts:
        # an attempt starts when its lane is idle and its stagger has elapsed
        for lane in range(L):
            if running[lane] == -1 and qpos[lane] < len(queue_per_lane[lane]):
                k = queue_per_lane[lane][qpos[lane]]
                if cycle >= (k % L) * delta:
                    running[lane] = k
                    qpos[lane] += 1
                    ptr[lane] = 0
                    rem[lane] = widths[0]

        occupancy = sum(rem[lane] for lane in range(L) if running[lane] != -1)
        fifo_sum += occupancy
        fifo_peak = max(fifo_peak, occupancy)
        if occupancy > pcfg.fifo_capacity:
            overflow += 1

        capacity = pcfg.num_pe
        start = cycle % L
        advanced = []
        for off in range(L):
            lane = (start + off) % L
            if running[lane] == -1 or capacity == 0:
                continue
            take = min(rem[lane], capacity)
            if take:
                rem[lane] -= take
                capacity -= take
                if trace_rows is not None:
                    trace_rows.append((cycle, lane, ptr[lane], take, occupancy))
                if rem[lane] == 0:
                    advanced.append(lane)
        busy_total += pcfg.num_pe - capacity

        for lane in advanced:
            ptr[lane] += 1
            if ptr[lane] == n_cmds:
                completion[running[lane]] = cycle + 1
                running[lane] = -1
                done += 1
            else:
                rem[lane] = widths[ptr[lane]]
        cycle += 1

    total = cycle
    if trace_rows is not None:
        with open(trace_path, "w") as fh:
            fh.write("cycle,lane,command_index,pe_busy,fifo_occupancy\n")
            for row in trace_rows:
                fh.write(",".join(str(v) for v in row) + "\n")
    return LatencyResult(
        completion_cycles=tuple(completion),
        total_cycles=total,
        pe_utilization=busy_total / (pcfg.num_pe * total) if total else 0.0,
        fifo_peak=fifo_peak,
        fifo_avg=fifo_sum / total if total else 0.0,
        fifo_overflow_cycles=overflow,
    )


def single_pass_cycles(stream: CommandStream, num_pe: int) -> int:
    """Cycles for one uncontended pass: sum of ceil(width/num_pe)."""
    return sum(ceil(c.width / num_pe) for c in stream.commands)


def sc_reference_cycles(N: int, num_pe: int) -> float:
    """Conventional semi-parallel SC latency: 2N + (N/P) log2(N/(4P))."""
    return 2.0 * N + (N / num_pe) * log2(N / (4.0 * num_pe))


class CycleModel:
    """Per-decode cycle accounting on top of simulate_latency.

    A decode costs one serial initial pass plus, for each dependency round
    of r flip attempts, the pipelined completion of r attempts. Results are
    cached per attempt count, so per-frame accounting is a table lookup.
    """

    def __init__(self, stream: CommandStream, pcfg: PipelineConfig):
        self.stream = stream
        self.pcfg = pcfg
        self._single = single_pass_cycles(stream, pcfg.num_pe)
        self._cache: dict[int, int] = {}

    @property
    def single_pass(self) -> int:
        return self._single

    def pipelined_cycles(self, attempts: int) -> int:
        got = self._cache.get(attempts)
        if got is None:
            got = simulate_latency(self.stream, attempts, self.pcfg).total_cycles
            self._cache[attempts] = got
        return got

    def report_cycles(self, report) -> float:
        cycles = float(self._single)
        for r in report.round_attempts:
            if r > 0:
                cycles += self.pipelined_cycles(r)
        return cycles
