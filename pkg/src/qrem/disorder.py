"""REM disorder fields: sampling, truncation, extremes, and file exchange.

A field assigns U(sigma) = sqrt(N) * omega(sigma) with i.i.d. standard
normal omega to every vertex of the cube.  Draws come from the counter
stream keyed by (seed, sigma.bits), so realizations are reproducible
bit-for-bit and individual entries are addressable without building the
whole array.
"""

from __future__ import annotations

import json
import struct
import time
from dataclasses import dataclass, replace

import math
import numpy as np
from scipy.special import ndtr

from . import streams
from .hypercube import Configuration, check_state
from .predictions import BETA_C

TRUNC_NONE = "none"
TRUNC_TWO_SIDED = "two_sided_abs"
TRUNC_KEEP_ABOVE = "keep_above"


@dataclass(frozen=True)
class Truncation:
    kind: str
    level: float

    def __post_init__(self):
        if self.kind not in (TRUNC_TWO_SIDED, TRUNC_KEEP_ABOVE):
            raise ValueError(f"unknown truncation kind {self.kind!r}")
        if self.level <= 0:
            raise ValueError("truncation level must be positive")


@dataclass(frozen=True)
class DisorderField:
    """One realization of the random potential, immutable after creation."""

    values: np.ndarray
    n: int
    seed: int
    truncation: Truncation | None = None

    def __post_init__(self):
        check_state(self.values, self.n)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("disorder values must be finite")

    def value(self, sigma: Configuration | int) -> float:
        bits = sigma.bits if isinstance(sigma, Configuration) else sigma
        return float(self.values[bits])

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())

    def argmin(self) -> Configuration:
        return Configuration(int(np.argmin(self.values)), self.n)


def rem_value(n: int, seed: int, bits: int) -> float:
    """Single entry U(sigma) recomputed from the stream, no array needed."""
    z = streams.normals(seed, streams.TAG_DISORDER, bits, 1)[0]
    return math.sqrt(n) * z


def sample_rem(n: int, seed: int) -> DisorderField:
    """Fresh i.i.d. N(0, N) field over all 2^N configurations."""
    if not 1 <= n <= 30:
        raise ValueError(f"dimension N={n} outside supported range 1..30")
    z = streams.normals(seed, streams.TAG_DISORDER, 0, 1 << n)
    return DisorderField(values=math.sqrt(n) * z, n=n, seed=seed)


def truncate(field: DisorderField, kind: str, level: float) -> DisorderField:
    """U * 1[condition], leaving the input field untouched."""
    trunc = Truncation(kind, level)
    cut = level * field.n
    if kind == TRUNC_TWO_SIDED:
        keep = np.abs(field.values) <= cut
    else:
        keep = field.values >= -cut
    return replace(field, values=np.where(keep, field.values, 0.0), truncation=trunc)


def truncated_second_moment(n: int, level: float, kind: str = TRUNC_TWO_SIDED) -> float:
    """Population E[U^2] of a truncated field (exact Gaussian integrals)."""
    a = level * math.sqrt(n)  # cut in units of the std deviation sqrt(N)
    phi_a = math.exp(-0.5 * a * a) / math.sqrt(2.0 * math.pi)
    upper_tail = float(ndtr(-a))
    tail_mass = a * phi_a + upper_tail  # integral of z^2 phi(z) over [a, inf)
    if kind == TRUNC_TWO_SIDED:
        return n * (1.0 - 2.0 * tail_mass)
    if kind == TRUNC_KEEP_ABOVE:
        return n * (1.0 - tail_mass)
    raise ValueError(f"unknown truncation kind {kind!r}")


def large_deviation_set(
    field: DisorderField, eps: float, symmetrized: bool = False
) -> list[Configuration]:
    """Sites with U <= -eps*N (or |U| >= eps*N), sorted by energy ascending."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    cut = eps * field.n
    if symmetrized:
        mask = np.abs(field.values) >= cut
    else:
        mask = field.values <= -cut
    hits = np.flatnonzero(mask)
    order = np.lexsort((hits, field.values[hits]))
    return [Configuration(int(b), field.n) for b in hits[order]]


@dataclass(frozen=True)
class RescaledExtreme:
    """Dimensionless extreme-value coordinate x with E = s_N(x; Gamma)."""

    x: float
    gamma: float
    n: int


def rescaled_energy(x: float, n: int, gamma: float = 0.0) -> float:
    """s_N(x; Gamma): the energy whose rescaled coordinate is x."""
    if n < 2:
        raise ValueError("rescaling needs N >= 2")
    anchor = (
        -BETA_C * n
        + (math.log(n * math.log(2.0)) + math.log(4.0 * math.pi)) / (2.0 * BETA_C)
        - gamma * gamma / BETA_C
    )
    return anchor - x / BETA_C


def rescale(energy: float, n: int, gamma: float = 0.0) -> RescaledExtreme:
    """Invert s_N: map an extreme energy to its Gumbel coordinate."""
    x = (rescaled_energy(0.0, n, gamma) - energy) * BETA_C
    return RescaledExtreme(x=x, gamma=gamma, n=n)


def neighbor_mean_u(field: DisorderField, sigma: Configuration | int) -> float:
    """u(sigma) = (1/N^2) * sum of |U| over the N nearest neighbors."""
    bits = sigma.bits if isinstance(sigma, Configuration) else sigma
    nbrs = bits ^ (1 << np.arange(field.n))
    return float(np.abs(field.values[nbrs]).sum()) / field.n**2


def neighbor_z(field: DisorderField, sigma: Configuration | int) -> float:
    """Signed variant Z_sigma = (1/N) * sum of U over nearest neighbors."""
    bits = sigma.bits if isinstance(sigma, Configuration) else sigma
    nbrs = bits ^ (1 << np.arange(field.n))
    return float(field.values[nbrs].sum()) / field.n


# ---------------------------------------------------------------------------
# binary exchange format: fixed header + 2^N little-endian float64 values
# ---------------------------------------------------------------------------

_MAGIC = b"QREMFLD\x01"
_HEADER = struct.Struct("<8sIIqBxxxd")  # magic, version, n, seed, kind, pad, level
_FORMAT_VERSION = 1
_KIND_CODES = {None: 0, TRUNC_TWO_SIDED: 1, TRUNC_KEEP_ABOVE: 2}
_KIND_NAMES = {v: k for k, v in _KIND_CODES.items()}


def save_field(field: DisorderField, path, sidecar: bool = True) -> None:
    path = str(path)
    kind = field.truncation.kind if field.truncation else None
    level = field.truncation.level if field.truncation else 0.0
    header = _HEADER.pack(
        _MAGIC, _FORMAT_VERSION, field.n, field.seed, _KIND_CODES[kind], level
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.asarray(field.values, dtype="<f8").tobytes())
    if sidecar:
        meta = {
            "format": "qrem-disorder",
            "version": _FORMAT_VERSION,
            "n": field.n,
            "seed": field.seed,
            "truncation": None if kind is None else {"kind": kind, "level": level},
            "written_unix_time": time.time(),
        }
        with open(path + ".json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)
            fh.write("\n")


def load_field(path) -> DisorderField:
    with open(str(path), "rb") as fh:
        raw = fh.read(_HEADER.size)
        magic, version, n, seed, kind_code, level = _HEADER.unpack(raw)
        if magic != _MAGIC:
            raise ValueError("not a disorder file (bad magic)")
        if version != _FORMAT_VERSION:
            raise ValueError(f"unsupported disorder file version {version}")
        values = np.frombuffer(fh.read((1 << n) * 8), dtype="<f8").astype(np.float64)
    kind = _KIND_NAMES[kind_code]
    trunc = None if kind is None else Truncation(kind, level)
    return DisorderField(values=values, n=n, seed=seed, truncation=trunc)
