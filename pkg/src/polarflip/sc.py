"""LLR-domain successive-cancellation decoding with flip and genie support.

The decoder walks the depth-first SC schedule: check-branch LLRs come from
the boxplus kernel f, extend-branch LLRs from g, and each leaf ends with a
hard decision. A flip set inverts the hard decision at the named information
positions; genie mode forces the true value at the first `oracle_k` erroneous
information decisions. The path metric accumulates |L_i| at every decision
(frozen, flipped, or forced) that contradicts the sign of its LLR.

The leaf schedule runs as a single compiled kernel; one decoder instance owns
its scratch arrays and is not thread-safe, but instances are cheap and
independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .construction import CodeConfig
from .encoding import bit_reversal_permutation, crc16_matrix
from .errors import DimensionMismatchError, InvalidFlipIndexError

LLR_CAP = 300.0


@njit(cache=True, nogil=True)
def f_kernel(la: float, lb: float) -> float:
    """Boxplus: log((e^(la+lb)+1)/(e^la+e^lb)), in its stable min-plus form
    sign(la)sign(lb)min(|la|,|lb|) + log1p(e^-|la+lb|) - log1p(e^-|la-lb|)."""
    a = abs(la)
    b = abs(lb)
    m = a if a < b else b
    if (la >= 0) != (lb >= 0):
        m = -m
    # correction terms underflow past ~37 nats (exp < 1e-16)
    s = abs(la + lb)
    if s < 37.0:
        m += np.log1p(np.exp(-s))
    d = abs(la - lb)
    if d < 37.0:
        m -= np.log1p(np.exp(-d))
    if m > LLR_CAP:
        return LLR_CAP
    if m < -LLR_CAP:
        return -LLR_CAP
    return m


@njit(cache=True, nogil=True)
def f_kernel_minsum(la: float, lb: float) -> float:
    a = abs(la)
    b = abs(lb)
    m = a if a < b else b
    if (la >= 0) != (lb >= 0):
        m = -m
    return m


@njit(cache=True, nogil=True)
def g_kernel(la: float, lb: float, us: int) -> float:
    """(-1)^us * la + lb."""
    m = lb - la if us else la + lb
    if m > LLR_CAP:
        return LLR_CAP
    if m < -LLR_CAP:
        return -LLR_CAP
    return m


def hard_decision(i: int, llr: float, cfg: CodeConfig) -> int:
    """0 at frozen positions; otherwise (1 - sign(L))/2 with sign(0) = +1."""
    if cfg.is_frozen(i):
        return 0
    return 0 if llr >= 0 else 1


@njit(cache=True, nogil=True)
def _sc_pass(llr_in, frozen, flip, oracle_u, oracle_k, use_minsum, smooth_pm,
             L, B, u_hat, dec_llr):
    n1, N = L.shape
    n = n1 - 1
    for j in range(N):
        v = llr_in[j]
        if v > LLR_CAP:
            v = LLR_CAP
        elif v < -LLR_CAP:
            v = -LLR_CAP
        L[n, j] = v
    pm = 0.0
    corrections = 0
    for i in range(N):
        if i == 0:
            s = n - 1
        else:
            # stage of the g update = number of trailing zeros of i
            t = 0
            ii = i
            while ii & 1 == 0:
                t += 1
                ii >>= 1
            half = 1 << t
            o = i - half
            for j in range(half):
                L[t, i + j] = g_kernel(L[t + 1, o + j], L[t + 1, o + half + j], B[t, o + j])
            s = t - 1
        while s >= 0:
            half = 1 << s
            for j in range(half):
                a = L[s + 1, i + j]
                b = L[s + 1, i + half + j]
                L[s, i + j] = f_kernel_minsum(a, b) if use_minsum else f_kernel(a, b)
            s -= 1

        ld = L[0, i]
        dec_llr[i] = ld
        sign_dec = 0 if ld >= 0 else 1
        if frozen[i]:
            u = 0
        else:
            u = sign_dec
            if oracle_k >= 0 and u != oracle_u[i] and corrections < oracle_k:
                u = oracle_u[i]
                corrections += 1
            if flip[i]:
                u ^= 1
        u_hat[i] = u
        if smooth_pm:
            pm += np.log1p(np.exp(-abs(ld))) if u == sign_dec else np.log1p(np.exp(abs(ld)))
        elif u != sign_dec:
            pm += abs(ld)

        B[0, i] = u
        s = 0
        ii = i
        while ii & 1 == 1:
            o = (i >> (s + 1)) << (s + 1)
            half = 1 << s
            for j in range(half):
                B[s + 1, o + j] = B[s, o + j] ^ B[s, o + half + j]
                B[s + 1, o + half + j] = B[s, o + half + j]
            ii >>= 1
            s += 1
    return pm


@dataclass(eq=False)
class DecodeOutcome:
    """Result of one SC pass."""

    u_hat: np.ndarray          # estimated source vector, zeros at frozen positions
    info_llrs: np.ndarray      # decision LLR per information position, index order
    path_metric: float
    crc_ok: bool
    attempt_index: int = 0
    leaf_llrs: np.ndarray | None = None  # decision LLR for every leaf


class ScDecoder:
    """Reusable SC engine for one code; owns its scratch memory.

    Not safe for concurrent use of a single instance; create one per worker.
    """

    def __init__(self, cfg: CodeConfig, use_min_sum: bool = False, smooth_pm: bool = False):
        self.cfg = cfg
        self.use_min_sum = use_min_sum
        self.smooth_pm = smooth_pm
        self._perm = bit_reversal_permutation(cfg.n)
        self._frozen = cfg.frozen_mask
        self._info_set = cfg.info_set
        self._crc_matrix = crc16_matrix(cfg.K + cfg.crc_width) if cfg.crc_width else None
        N = cfg.N
        self._L = np.empty((cfg.n + 1, N), dtype=np.float64)
        self._B = np.empty((cfg.n + 1, N), dtype=np.uint8)
        self._flip = np.zeros(N, dtype=np.uint8)
        self._no_oracle = np.zeros(0, dtype=np.uint8)

    def _check_flips(self, flips) -> np.ndarray:
        idx = np.asarray(flips, dtype=np.int64)
        if idx.size:
            if np.any(np.diff(idx) <= 0):
                raise InvalidFlipIndexError("flip indices must be strictly increasing")
            if idx[0] < 0 or idx[-1] >= self.cfg.N:
                raise InvalidFlipIndexError(f"flip index out of range [0, {self.cfg.N})")
            if self._frozen[idx].any():
                raise InvalidFlipIndexError("flip indices must be information positions")
        return idx

    def decode(self, channel_llrs, flips=(), oracle_u=None, oracle_k: int = -1,
               attempt_index: int = 0) -> DecodeOutcome:
        """One SC pass over channel LLRs (codeword order).

        `flips`: strictly increasing information positions whose hard
        decisions are inverted. `oracle_u` with `oracle_k` >= 0 enables genie
        mode. Raises InvalidFlipIndexError for frozen/out-of-range flips.
        """
        llrs = np.asarray(channel_llrs, dtype=np.float64)
        if llrs.size != self.cfg.N:
            raise DimensionMismatchError(
                f"channel LLR vector must have {self.cfg.N} entries, got {llrs.size}"
            )
        idx = self._check_flips(flips)
        self._flip[:] = 0
        self._flip[idx] = 1
        if oracle_u is not None and oracle_k >= 0:
            genie = np.asarray(oracle_u, dtype=np.uint8)
            k = int(oracle_k)
        else:
            genie = self._no_oracle
            k = -1
        u_hat = np.empty(self.cfg.N, dtype=np.uint8)
        dec_llr = np.empty(self.cfg.N, dtype=np.float64)
        pm = _sc_pass(
            llrs[self._perm], self._frozen, self._flip, genie, k,
            self.use_min_sum, self.smooth_pm, self._L, self._B, u_hat, dec_llr,
        )
        info_llrs = dec_llr[self._info_set]
        if self._crc_matrix is not None:
            word = u_hat[self._info_set]
            crc_ok = not (word @ self._crc_matrix & 1).any()
        else:
            crc_ok = True
        return DecodeOutcome(
            u_hat=u_hat,
            info_llrs=info_llrs,
            path_metric=float(pm),
            crc_ok=crc_ok,
            attempt_index=attempt_index,
            leaf_llrs=dec_llr,
        )


def sc_decode(channel_llrs, cfg: CodeConfig, flips=()) -> DecodeOutcome:
    """Single-shot SC decode; builds a throwaway engine."""
    return ScDecoder(cfg).decode(channel_llrs, flips=flips)
