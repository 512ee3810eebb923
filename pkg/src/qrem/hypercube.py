"""Hamming-cube combinatorics and the transverse-field operator T.

Spin strings sigma in {-1,+1}^N are packed into integer bit masks with
bit j set iff sigma_j = -1, so XOR with (1 << j) is the spin flip F_j and
popcount of a XOR is the Hamming distance.  T is the negative adjacency
matrix of the cube, applied matrix-free; its eigenbasis is the parity
(Walsh-Hadamard) basis with eigenvalue 2|A| - N for the parity set A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterator

import numpy as np

MAX_N = 30


def _check_dimension(n: int) -> None:
    if not 1 <= n <= MAX_N:
        raise ValueError(f"dimension N={n} outside supported range 1..{MAX_N}")


@dataclass(frozen=True)
class Configuration:
    """One spin string, stored as a bit mask (bit j set iff sigma_j = -1)."""

    bits: int
    n: int

    def __post_init__(self):
        _check_dimension(self.n)
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"bits {self.bits} out of range for N={self.n}")

    def flip(self, j: int) -> "Configuration":
        if not 0 <= j < self.n:
            raise ValueError(f"flip index {j} out of range")
        return Configuration(self.bits ^ (1 << j), self.n)

    def spin(self, j: int) -> int:
        return -1 if (self.bits >> j) & 1 else 1

    def distance(self, other: "Configuration") -> int:
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return (self.bits ^ other.bits).bit_count()


def hamming_distance(bits_a: int, bits_b: int) -> int:
    return (bits_a ^ bits_b).bit_count()


@lru_cache(maxsize=None)
def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient (arbitrary-precision integers)."""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def check_state(v: np.ndarray, n: int | None = None) -> int:
    """Validate a state vector of length 2^N and return N."""
    v = np.asarray(v)
    if v.ndim != 1:
        raise ValueError("state vectors are one-dimensional")
    size = v.shape[0]
    m = size.bit_length() - 1
    if size != (1 << m):
        raise ValueError(f"state length {size} is not a power of two")
    if n is not None and n != m:
        raise ValueError(f"state has N={m}, expected N={n}")
    _check_dimension(m)
    return m


def apply_T(v: np.ndarray, n: int | None = None) -> np.ndarray:
    """Apply T: out(sigma) = -sum_j v(F_j sigma), without storing T."""
    n = check_state(v, n)
    v = np.asarray(v, dtype=np.float64)
    out = np.zeros_like(v)
    for j in range(n):
        # flipping bit j swaps the two halves of the axis of extent 2 at level j
        blocks = v.reshape(1 << (n - 1 - j), 2, 1 << j)
        out -= np.flip(blocks, axis=1).reshape(-1)
    return out


def hadamard_transform(v: np.ndarray, n: int | None = None) -> np.ndarray:
    """Orthonormal fast Walsh-Hadamard transform (it is its own inverse)."""
    n = check_state(v, n)
    w = np.array(v, dtype=np.float64, copy=True)
    h = 1
    while h < w.size:
        w = w.reshape(-1, 2, h)
        top = w[:, 0, :] + w[:, 1, :]
        bot = w[:, 0, :] - w[:, 1, :]
        w[:, 0, :] = top
        w[:, 1, :] = bot
        w = w.reshape(-1)
        h *= 2
    return w * 2.0 ** (-n / 2.0)


def t_spectrum(n: int) -> list[tuple[int, int]]:
    """Spectrum of T: eigenvalue 2k - N with multiplicity C(N, k)."""
    if n < 1:
        raise ValueError("N must be >= 1")
    return [(2 * k - n, binomial(n, k)) for k in range(n + 1)]


def binary_entropy(x: float) -> float:
    """gamma(x) = -x ln x - (1-x) ln(1-x), continuously extended to {0,1}."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy needs x in [0,1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log(x) - (1.0 - x) * math.log(1.0 - x)


def sphere(center: Configuration, r: int) -> Iterator[Configuration]:
    """All configurations at Hamming distance exactly r from the center."""
    if not 0 <= r <= center.n:
        raise ValueError(f"radius {r} out of range for N={center.n}")
    for positions in combinations(range(center.n), r):
        mask = 0
        for j in positions:
            mask |= 1 << j
        yield Configuration(center.bits ^ mask, center.n)


def ball(center: Configuration, radius: int) -> Iterator[Configuration]:
    """Disjoint union of the spheres of radius 0..radius."""
    for r in range(radius + 1):
        yield from sphere(center, r)


def popcounts(n: int) -> np.ndarray:
    """Bit counts of all indices 0 .. 2^N - 1, as a uint8 array."""
    _check_dimension(n)
    idx = np.arange(1 << n, dtype=np.uint64)
    return np.bitwise_count(idx).astype(np.uint8)


def distance_table(center_bits: int, n: int) -> np.ndarray:
    """Hamming distances of every configuration from a fixed center."""
    _check_dimension(n)
    idx = np.arange(1 << n, dtype=np.uint64) ^ np.uint64(center_bits)
    return np.bitwise_count(idx).astype(np.uint8)


def dense_T(n: int) -> np.ndarray:
    """Explicit adjacency construction of T (debug/oracle sizes only)."""
    if n > 13:
        raise ValueError("dense T capped at N <= 13")
    dim = 1 << n
    mat = np.zeros((dim, dim))
    rows = np.arange(dim)
    for j in range(n):
        mat[rows, rows ^ (1 << j)] = -1.0
    return mat
