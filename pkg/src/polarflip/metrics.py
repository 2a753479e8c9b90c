"""Bit-flipping metrics and the bounded candidate list.

The flip metric for a candidate set scores, in log domain, the probability
that exactly those decisions (and no earlier ones) went wrong:

    log M(set) = sum_{j in set} -log(1 + exp(alpha*|L_j|))
               + sum_{j < last(set), j not in set} -log(1 + exp(-alpha*|L_j|))

where the L_j are the decision LLRs of the pass the candidate extends, and j
ranges over information positions. Metric functions index bits by their
position within the information sequence; FlipSet carries the 0-based
codeword-domain indices used by the decoders.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_ALPHA = 0.3


def _flip_term(abs_llrs, alpha):
    # -log(1 + exp(alpha*|L|)): log-probability that this decision is wrong
    return -np.logaddexp(0.0, alpha * abs_llrs)


def _keep_term(abs_llrs, alpha):
    # -log(1 + exp(-alpha*|L|)): log-probability that this decision is right
    return -np.logaddexp(0.0, -alpha * abs_llrs)


def malpha_initial(info_llrs, alpha: float, pos: int) -> float:
    """Log metric of the order-1 flip at information position `pos`, scored
    against the initial pass's decision LLRs."""
    a = np.abs(np.asarray(info_llrs, dtype=float))
    if not (0 <= pos < a.size):
        raise IndexError(f"pos must be in [0, {a.size}), got {pos}")
    return float(_flip_term(a[pos], alpha) + _keep_term(a[:pos], alpha).sum())


def initial_flip_metrics(info_llrs, alpha: float) -> np.ndarray:
    """malpha_initial for every information position at once."""
    a = np.abs(np.asarray(info_llrs, dtype=float))
    keep = _keep_term(a, alpha)
    prefix = np.concatenate(([0.0], np.cumsum(keep)[:-1]))
    return _flip_term(a, alpha) + prefix


def malpha_extend(parent_log_metric: float, trajectory_llrs, parent_last: int,
                  new_flip: int, alpha: float) -> float:
    """Log metric of parent + {new_flip}, computed incrementally.

    `trajectory_llrs` are the decision LLRs of the parent pass (information
    positions); `parent_last` and `new_flip` are positions within that
    sequence, with new_flip > parent_last. Agrees with a from-scratch
    evaluation because the trajectory up to parent_last is shared.
    """
    if new_flip <= parent_last:
        raise ValueError(f"new_flip must exceed parent_last ({new_flip} <= {parent_last})")
    a = np.abs(np.asarray(trajectory_llrs, dtype=float))
    between = a[parent_last + 1 : new_flip]
    return float(
        parent_log_metric
        + _flip_term(a[new_flip], alpha)
        + _keep_term(between, alpha).sum()
    )


def extension_metrics(parent_log_metric: float, trajectory_llrs, parent_last: int,
                      alpha: float) -> np.ndarray:
    """malpha_extend for every candidate position after parent_last.

    Returns an array over positions parent_last+1 .. len-1, in order.
    """
    a = np.abs(np.asarray(trajectory_llrs, dtype=float))
    tail = a[parent_last + 1 :]
    keep = _keep_term(tail, alpha)
    prefix = np.concatenate(([0.0], np.cumsum(keep)[:-1]))
    return parent_log_metric + _flip_term(tail, alpha) + prefix


def flip_probability(error_probs, flip_positions) -> float:
    """Reference product-form probability of a flip set given per-bit error
    probabilities (information positions, in order): the flipped positions
    contribute p_e, every earlier non-flipped one contributes 1 - p_e."""
    p = np.asarray(error_probs, dtype=float)
    idx = sorted(int(i) for i in flip_positions)
    if not idx:
        return 1.0
    last = idx[-1]
    mask = np.zeros(p.size, dtype=bool)
    mask[idx] = True
    prob = float(np.prod(p[mask]))
    keep = ~mask[:last]
    return prob * float(np.prod(1.0 - p[:last][keep]))


@dataclass(frozen=True)
class FlipSet:
    """A candidate set of information positions to flip (codeword-domain,
    strictly increasing), with its log-domain metric and the path metric of
    the pass it extends."""

    indices: tuple[int, ...]
    metric: float
    parent_pm: float = 0.0
    parent_id: int = 0

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError(f"flip indices must be strictly increasing, got {idx}")
        object.__setattr__(self, "indices", idx)

    @property
    def order(self) -> int:
        return len(self.indices)

    @property
    def last(self) -> int:
        return self.indices[-1]


class FlipList:
    """Bounded candidate list with evict-the-worst insertion.

    A candidate enters iff the list is not full or its metric beats the
    current least; ties keep the incumbent (and among new candidates, the
    earlier-generated one). Duplicate index sets are rejected.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._entries: list[FlipSet] = []
        self._seq: list[int] = []
        self._next_seq = 0

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    @property
    def entries(self) -> list[FlipSet]:
        return list(self._entries)

    @property
    def least_metric(self) -> float:
        return min(e.metric for e in self._entries) if self._entries else -np.inf

    def insert(self, candidate: FlipSet) -> bool:
        """Bounded insert; returns True when the candidate was kept."""
        if any(e.indices == candidate.indices for e in self._entries):
            return False
        if len(self._entries) < self.capacity:
            self._entries.append(candidate)
            self._seq.append(self._next_seq)
            self._next_seq += 1
            return True
        least = self.least_metric
        if not candidate.metric > least:
            return False
        # evict the worst; ties evict the latest-inserted so earlier sets win
        worst = max(
            range(len(self._entries)),
            key=lambda k: (-self._entries[k].metric, self._seq[k]),
        )
        self._entries[worst] = candidate
        self._seq[worst] = self._next_seq
        self._next_seq += 1
        return True

    def pop_best(self) -> FlipSet:
        """Remove and return the highest-metric entry (earliest wins ties)."""
        if not self._entries:
            raise IndexError("pop from empty flip list")
        best = min(range(len(self._entries)),
                   key=lambda k: (-self._entries[k].metric, self._seq[k]))
        self._seq.pop(best)
        return self._entries.pop(best)

    def pop_front(self) -> FlipSet:
        """Remove and return the first entry in the current order."""
        if not self._entries:
            raise IndexError("pop from empty flip list")
        self._seq.pop(0)
        return self._entries.pop(0)

    def bulk_insert(self, candidates) -> None:
        """Insert candidates in order; equivalent to repeated insert() but
        done as one merge, which matters when scoring whole trajectories."""
        fresh = []
        seen = {e.indices for e in self._entries}
        for c in candidates:
            if c.indices not in seen:
                seen.add(c.indices)
                fresh.append((c, self._next_seq))
                self._next_seq += 1
        merged = list(zip(self._entries, self._seq)) + fresh
        merged.sort(key=lambda es: (-es[0].metric, es[1]))
        merged = merged[: self.capacity]
        merged.sort(key=lambda es: es[1])
        self._entries = [e for e, _ in merged]
        self._seq = [s for _, s in merged]

    def sort(self) -> None:
        """Order entries by parent pass (ascending parent path metric) and by
        descending metric within a pass; insertion order breaks ties."""
        order = sorted(
            range(len(self._entries)),
            key=lambda k: (
                self._entries[k].parent_pm,
                self._entries[k].parent_id,
                -self._entries[k].metric,
                self._seq[k],
            ),
        )
        self._entries = [self._entries[k] for k in order]
        self._seq = [self._seq[k] for k in order]


def list_insert(flip_list: FlipList, candidate: FlipSet) -> FlipList:
    """Bounded insertion as a free function; mutates and returns the list."""
    flip_list.insert(candidate)
    return flip_list
