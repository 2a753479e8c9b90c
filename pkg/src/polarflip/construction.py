"""Polar code construction via Gaussian-approximation density evolution.

Subchannel reliabilities are tracked as the mean of the (Gaussian-assumed)
LLR at each synthesized channel. The check-branch update uses Chung's phi
function with the common two-segment analytic approximation; the inverse is
computed by bisection. All bit indices in this package are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect, brentq

from .errors import InvalidDimensionsError

# Means are capped to keep exp()/phi() finite through deep recursions.
MAX_MEAN = 300.0


def _phi_small(x):
    return np.exp(-0.4527 * x**0.86 + 0.0218)


def _phi_large(x):
    return np.sqrt(np.pi / x) * np.exp(-x / 4.0) * (1.0 - 10.0 / (7.0 * x))


def _solve_segment_seam() -> float:
    # The two segments cross a little above x=10; switching there (instead of
    # at the conventional x=10) keeps phi strictly decreasing, which the
    # reliability ordering relies on.
    return float(brentq(lambda x: _phi_small(x) - _phi_large(x), 10.0, 30.0, xtol=1e-12))


_SEAM = _solve_segment_seam()


def phi(x):
    """Chung's phi, two-segment approximation, clamped to (0, 1]."""
    x = np.asarray(x, dtype=float)
    out = np.where(x < _SEAM, _phi_small(np.maximum(x, 1e-300)), _phi_large(np.maximum(x, _SEAM)))
    out = np.minimum(out, 1.0)
    return np.where(x <= 0.0, 1.0, out)


_PHI_AT_CAP = float(phi(MAX_MEAN))


def phi_inv(y: float, cap: float = MAX_MEAN) -> float:
    """Invert phi by bisection (xtol 1e-9); saturates at `cap`."""
    if y >= 1.0:
        return 0.0
    if y <= _PHI_AT_CAP:
        return cap
    return float(bisect(lambda x: float(phi(x)) - y, 0.0, cap, xtol=1e-9))


def ga_evolve(mean: float, branch: str, cap: float = MAX_MEAN) -> float:
    """One density-evolution step: 'g' doubles the mean, 'f' applies the
    check-node degradation phi_inv(1 - (1 - phi(m))^2)."""
    if mean < 0:
        raise ValueError(f"mean must be nonnegative, got {mean}")
    if branch == "g":
        return min(2.0 * mean, cap)
    if branch == "f":
        p = float(phi(mean))
        return phi_inv(1.0 - (1.0 - p) ** 2, cap)
    raise ValueError(f"branch must be 'f' or 'g', got {branch!r}")


def ga_means(n: int, snr_db: float, rate: float, cap: float = MAX_MEAN) -> np.ndarray:
    """Per-subchannel GA mean LLRs for blocklength 2**n.

    The root channel is BPSK/AWGN at the given Eb/N0 and code rate, so the
    initial mean is 2/sigma^2 with sigma^2 = 1/(2*rate*10^(snr_db/10)).
    Index i's entries follow the natural u-domain order of the encoder.
    """
    sigma2 = 1.0 / (2.0 * rate * 10.0 ** (snr_db / 10.0))
    means = np.array([min(2.0 / sigma2, cap)])
    for _ in range(n):
        nxt = np.empty(2 * means.size)
        p = phi(means)
        y = 1.0 - (1.0 - p) ** 2
        nxt[0::2] = [phi_inv(v, cap) for v in y]
        nxt[1::2] = np.minimum(2.0 * means, cap)
        means = nxt
    return means


@dataclass(frozen=True, eq=False)
class ReliabilityProfile:
    """GA mean LLR per subchannel, natural order, length N."""

    mean_llr: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mean_llr, dtype=float)
        if np.any(~np.isfinite(m)) or np.any(m < 0):
            raise InvalidDimensionsError("mean_llr entries must be nonnegative and finite")
        object.__setattr__(self, "mean_llr", m)

    def top_indices(self, count: int) -> np.ndarray:
        """The `count` most reliable subchannels, ties broken toward the
        larger index, returned sorted ascending."""
        order = np.lexsort((-np.arange(self.mean_llr.size), -self.mean_llr))
        return np.sort(order[:count])


@dataclass(frozen=True, eq=False)
class CodeConfig:
    """A constructed polar code: (N, K, info set) plus CRC concatenation.

    `info_set` holds the 0-based positions of the K + crc_width information
    bits (payload first, CRC in the last crc_width positions, both in
    ascending index order).
    """

    n: int
    K: int
    crc_width: int
    info_set: np.ndarray
    construction_snr_db: float
    reliability: ReliabilityProfile | None = field(default=None, repr=False)

    def __post_init__(self):
        if not (1 <= self.n <= 20):
            raise InvalidDimensionsError(f"n must be in [1, 20], got {self.n}")
        N = 1 << self.n
        info = np.asarray(self.info_set, dtype=np.int64)
        if self.K < 0 or self.crc_width < 0 or self.K + self.crc_width <= 0:
            raise InvalidDimensionsError("K + crc_width must be positive")
        if self.K + self.crc_width > N:
            raise InvalidDimensionsError(
                f"K + crc_width = {self.K + self.crc_width} exceeds N = {N}"
            )
        if info.size != self.K + self.crc_width:
            raise InvalidDimensionsError(
                f"info_set has {info.size} entries, expected {self.K + self.crc_width}"
            )
        if info.size and (info[0] < 0 or info[-1] >= N or np.any(np.diff(info) <= 0)):
            raise InvalidDimensionsError("info_set must be strictly increasing within [0, N)")
        object.__setattr__(self, "info_set", info)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def rate(self) -> float:
        return (self.K + self.crc_width) / self.N

    @property
    def frozen_mask(self) -> np.ndarray:
        """uint8 mask, 1 at frozen positions."""
        mask = np.ones(self.N, dtype=np.uint8)
        mask[self.info_set] = 0
        return mask

    def is_frozen(self, i: int) -> bool:
        pos = int(np.searchsorted(self.info_set, i))
        return pos >= self.info_set.size or int(self.info_set[pos]) != i


def construct(n: int, K: int, crc_width: int = 16, snr_db: float = 3.0) -> CodeConfig:
    """Build a polar code by picking the K + crc_width subchannels with the
    largest GA mean LLR (ties prefer the larger index).

    Deterministic for fixed inputs. Raises InvalidDimensionsError when the
    dimensions are inconsistent.
    """
    if not (1 <= n <= 20):
        raise InvalidDimensionsError(f"n must be in [1, 20], got {n}")
    N = 1 << n
    count = K + crc_width
    if count <= 0 or count > N:
        raise InvalidDimensionsError(f"need 0 < K + crc_width <= {N}, got {count}")
    rate = count / N
    profile = ReliabilityProfile(ga_means(n, snr_db, rate))
    info_set = profile.top_indices(count)
    return CodeConfig(
        n=n,
        K=K,
        crc_width=crc_width,
        info_set=info_set,
        construction_snr_db=snr_db,
        reliability=profile,
    )


def save_profile(cfg: CodeConfig, path) -> None:
    """Write the text profile: 'N K CRC SNR' then the 0-based info indices."""
    with open(path, "w") as fh:
        fh.write(f"{cfg.N} {cfg.K} {cfg.crc_width} {cfg.construction_snr_db:g}\n")
        fh.write(" ".join(str(int(i)) for i in cfg.info_set) + "\n")


def load_profile(path) -> CodeConfig:
    """Load a profile written by save_profile, validating all invariants."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 4:
            raise InvalidDimensionsError(f"profile header must be 'N K CRC SNR', got {header}")
        N, K, crc_width = int(header[0]), int(header[1]), int(header[2])
        snr_db = float(header[3])
        if N <= 0 or (N & (N - 1)) != 0:
            raise InvalidDimensionsError(f"N must be a power of two, got {N}")
        indices = np.array([int(t) for t in fh.readline().split()], dtype=np.int64)
    return CodeConfig(
        n=int(math.log2(N)),
        K=K,
        crc_width=crc_width,
        info_set=indices,
        construction_snr_db=snr_db,
    )
