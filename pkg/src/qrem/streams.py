"""Counter-based random streams (Philox-4x64) with inverse-CDF Gaussians.

Every random quantity in the package is addressable: stream (seed, tag)
and word index fully determine the draw, so any single value can be
regenerated without materializing the rest of the stream.  Tags keep the
disorder stream, solver start vectors, and Monte Carlo walkers independent
even when they share a user-facing seed.
"""

from __future__ import annotations

import numpy as np
from numpy.random import Philox
from scipy.special import ndtri

# stream tags (second Philox key word)
TAG_DISORDER = 0
TAG_SOLVER = 1
TAG_WALKER = 2

_WORDS_PER_BLOCK = 4


def raw_words(seed: int, tag: int, start: int, count: int) -> np.ndarray:
    """Words ``start .. start+count-1`` of the (seed, tag) Philox stream."""
    if count < 0 or start < 0:
        raise ValueError("start and count must be nonnegative")
    if count == 0:
        return np.empty(0, dtype=np.uint64)
    block, offset = divmod(start, _WORDS_PER_BLOCK)
    gen = Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, tag], counter=[block, 0, 0, 0])
    return gen.random_raw(offset + count)[offset:]


def uniforms(seed: int, tag: int, start: int, count: int) -> np.ndarray:
    """Uniform draws on the open interval (0, 1), one per word."""
    w = raw_words(seed, tag, start, count)
    # keep 53 bits and center in the half-open cell: never exactly 0 or 1
    return ((w >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def normals(seed: int, tag: int, start: int, count: int) -> np.ndarray:
    """Standard normal draws via the inverse CDF (platform-reproducible)."""
    return ndtri(uniforms(seed, tag, start, count))


def unit_vector(seed: int, dim: int, mask: np.ndarray | None = None) -> np.ndarray:
    """Deterministic normalized start vector for iterative solvers."""
    v = normals(seed, TAG_SOLVER, 0, dim)
    if mask is not None:
        v = np.where(mask, v, 0.0)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise ValueError("empty support for start vector")
    return v / nrm
