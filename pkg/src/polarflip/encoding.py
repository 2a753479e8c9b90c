"""CRC-16 attachment and polar encoding.

The generator is G = B * F^(x n) with F = [[1,0],[1,1]] and B the bit-reversal
permutation, applied to u as a row permutation before the butterfly. The CRC
uses g(D) = D^16 + D^12 + D^5 + 1 (0x1021), zero initial register, MSB-first,
no reflection, no final XOR. Indices are 0-based throughout.
"""

from __future__ import annotations

import numpy as np

from .construction import CodeConfig
from .errors import DimensionMismatchError

CRC16_POLY = 0x1021
CRC16_WIDTH = 16


def crc16_compute(payload) -> np.ndarray:
    """16-bit remainder of payload * D^16 modulo the generator, MSB-first.

    `payload` is a bit sequence of any positive length.
    """
    bits = np.asarray(payload, dtype=np.uint8)
    if bits.size == 0:
        raise DimensionMismatchError("payload must be nonempty")
    reg = 0
    for b in bits:
        reg ^= int(b) << 15
        reg <<= 1
        if reg & 0x10000:
            reg ^= CRC16_POLY | 0x10000
    remainder = reg & 0xFFFF
    return np.array([(remainder >> (15 - k)) & 1 for k in range(16)], dtype=np.uint8)


_CRC_MATRIX_CACHE: dict[int, np.ndarray] = {}


def crc16_matrix(length: int) -> np.ndarray:
    """GF(2) matrix M (length x 16) with crc16_compute(v) == v @ M % 2.

    Valid because the zero-init, no-xorout CRC is linear in the message.
    Cached per length; used on the decoding hot path.
    """
    mat = _CRC_MATRIX_CACHE.get(length)
    if mat is None:
        mat = np.zeros((length, 16), dtype=np.uint8)
        unit = np.zeros(length, dtype=np.uint8)
        for i in range(length):
            unit[i] = 1
            mat[i] = crc16_compute(unit)
            unit[i] = 0
        _CRC_MATRIX_CACHE[length] = mat
    return mat


def crc16_check(word) -> bool:
    """True iff `word` (payload with its CRC appended) has zero remainder."""
    bits = np.asarray(word, dtype=np.uint8)
    rem = bits @ crc16_matrix(bits.size) & 1
    return not rem.any()


_BITREV_CACHE: dict[int, np.ndarray] = {}


def bit_reversal_permutation(n: int) -> np.ndarray:
    """perm[i] = the n-bit reversal of i. Cached and read-only."""
    perm = _BITREV_CACHE.get(n)
    if perm is None:
        N = 1 << n
        perm = np.zeros(N, dtype=np.int64)
        for i in range(N):
            r = 0
            v = i
            for _ in range(n):
                r = (r << 1) | (v & 1)
                v >>= 1
            perm[i] = r
        perm.setflags(write=False)
        _BITREV_CACHE[n] = perm
    return perm


def polar_transform(v) -> np.ndarray:
    """w = v * F^(x n) over GF(2), via in-place xor butterflies.

    The transform is an involution: applying it twice returns v.
    """
    w = np.array(v, dtype=np.uint8)
    N = w.size
    if N == 0 or (N & (N - 1)) != 0:
        raise DimensionMismatchError(f"length must be a power of two, got {N}")
    step = 1
    while step < N:
        pairs = w.reshape(-1, 2 * step)
        pairs[:, :step] ^= pairs[:, step:]
        step *= 2
    return w


def encode_u(u) -> np.ndarray:
    """Codeword for a full source vector u: x = (u B) * F^(x n)."""
    u = np.asarray(u, dtype=np.uint8)
    n = int(u.size).bit_length() - 1
    return polar_transform(u[bit_reversal_permutation(n)])


def build_u(cfg: CodeConfig, payload) -> np.ndarray:
    """Source vector with payload||CRC written into the info positions
    (ascending) and zeros at frozen positions."""
    payload = np.asarray(payload, dtype=np.uint8)
    if payload.size != cfg.K:
        raise DimensionMismatchError(f"payload must have {cfg.K} bits, got {payload.size}")
    if cfg.crc_width:
        if cfg.crc_width != CRC16_WIDTH:
            raise DimensionMismatchError(f"only {CRC16_WIDTH}-bit CRC is supported")
        crc = payload @ crc16_matrix(payload.size) & 1
        word = np.concatenate([payload, crc.astype(np.uint8)])
    else:
        word = payload
    u = np.zeros(cfg.N, dtype=np.uint8)
    u[cfg.info_set] = word
    return u


def encode(cfg: CodeConfig, payload) -> np.ndarray:
    """Encode a K-bit payload into an N-bit codeword."""
    return encode_u(build_u(cfg, payload))
