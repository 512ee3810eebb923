"""Matrix-free Hamiltonians H = Gamma*T + U and their restrictions.

Every operator acts on full-length vectors indexed by configuration bits;
restricted domains read and write only their own vertices (hard-wall
truncation), which keeps oracles uniform.  ``make_operator`` returns a
handle with precomputed masks for use inside solver loops; ``apply`` is
the one-shot contract entry point.

Domains: the full cube, Hamming balls, clusters (arbitrary vertex sets),
complements, direct sums of disjoint parts, and the pure hopping term
between the two spheres bounding a ball (the coupling removed when a ball
is cut out of the cube).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .disorder import DisorderField
from .hypercube import (
    apply_T,
    binomial,
    check_state,
    distance_table,
    hadamard_transform,
    popcounts,
)

DENSE_CAP = 1 << 13


# --------------------------------------------------------------------------
# domains
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FullCube:
    pass


@dataclass(frozen=True)
class Ball:
    center: int
    radius: int


@dataclass(frozen=True)
class Cluster:
    vertices: frozenset

    def __init__(self, vertices):
        object.__setattr__(self, "vertices", frozenset(int(v) for v in vertices))


@dataclass(frozen=True)
class Complement:
    vertices: frozenset

    def __init__(self, vertices):
        object.__setattr__(self, "vertices", frozenset(int(v) for v in vertices))


@dataclass(frozen=True)
class DirectSum:
    parts: tuple

    def __init__(self, parts):
        object.__setattr__(self, "parts", tuple(parts))


@dataclass(frozen=True)
class BoundaryHopping:
    """Edges between S_radius(center) and S_radius+1(center) only."""

    center: int
    radius: int


@dataclass(frozen=True)
class OperatorSpec:
    """Description of which Hamiltonian to apply.

    zero_center_potential clears U at each ball center (the rank-one
    analysis operator); boundary-hopping domains carry no potential at all.
    """

    n: int
    gamma: float
    disorder: DisorderField | None = None
    domain: object = field(default_factory=FullCube)
    zero_center_potential: bool = False

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.disorder is not None and self.disorder.n != self.n:
            raise ValueError("disorder dimension does not match operator dimension")


def qrem_spec(dis: DisorderField, gamma: float) -> OperatorSpec:
    return OperatorSpec(n=dis.n, gamma=gamma, disorder=dis)


def _domain_mask(domain, n: int) -> np.ndarray | None:
    """Boolean support of a domain, or None for the full cube."""
    dim = 1 << n
    if isinstance(domain, FullCube):
        return None
    if isinstance(domain, Ball):
        return distance_table(domain.center, n) <= domain.radius
    if isinstance(domain, Cluster):
        mask = np.zeros(dim, dtype=bool)
        mask[np.fromiter(domain.vertices, dtype=np.int64)] = True
        return mask
    if isinstance(domain, Complement):
        mask = np.ones(dim, dtype=bool)
        if domain.vertices:
            mask[np.fromiter(domain.vertices, dtype=np.int64)] = False
        return mask
    if isinstance(domain, DirectSum):
        mask = np.zeros(dim, dtype=bool)
        for part in domain.parts:
            part_mask = _domain_mask(part, n)
            part_mask = np.ones(dim, dtype=bool) if part_mask is None else part_mask
            if np.any(mask & part_mask):
                raise ValueError("direct-sum parts must be pairwise disjoint")
            mask |= part_mask
        return mask
    if isinstance(domain, BoundaryHopping):
        d = distance_table(domain.center, n)
        return (d == domain.radius) | (d == domain.radius + 1)
    raise TypeError(f"unknown domain {domain!r}")


def domain_mask(spec: OperatorSpec) -> np.ndarray:
    mask = _domain_mask(spec.domain, spec.n)
    return np.ones(1 << spec.n, dtype=bool) if mask is None else mask


def domain_dimension(spec: OperatorSpec) -> int:
    mask = _domain_mask(spec.domain, spec.n)
    return 1 << spec.n if mask is None else int(mask.sum())


def _potential(spec: OperatorSpec) -> np.ndarray | None:
    if spec.disorder is None:
        return None
    u = spec.disorder.values
    if spec.zero_center_potential:
        u = u.copy()
        for center in _ball_centers(spec.domain):
            u[center] = 0.0
    return u


def _ball_centers(domain) -> list:
    if isinstance(domain, Ball):
        return [domain.center]
    if isinstance(domain, DirectSum):
        out = []
        for part in domain.parts:
            out.extend(_ball_centers(part))
        return out
    return []


@dataclass
class OperatorHandle:
    """Precompiled matvec with support mask, for solver inner loops."""

    spec: OperatorSpec
    matvec: Callable[[np.ndarray], np.ndarray]
    mask: np.ndarray | None  # None means the full cube
    dim: int

    @property
    def n(self) -> int:
        return self.spec.n


def make_operator(spec: OperatorSpec) -> OperatorHandle:
    n = spec.n
    gamma = spec.gamma
    u = _potential(spec)
    domain = spec.domain

    if isinstance(domain, FullCube):
        if u is None:

            def matvec(v):
                return gamma * apply_T(v, n)

        else:

            def matvec(v):
                return gamma * apply_T(v, n) + u * v

        return OperatorHandle(spec, matvec, None, 1 << n)

    if isinstance(domain, BoundaryHopping):
        d = distance_table(domain.center, n)
        inner = d == domain.radius
        outer = d == domain.radius + 1
        mask = inner | outer

        def matvec(v):
            w = gamma * (
                inner * apply_T(np.where(outer, v, 0.0), n)
                + outer * apply_T(np.where(inner, v, 0.0), n)
            )
            return w

        return OperatorHandle(spec, matvec, mask, int(mask.sum()))

    if isinstance(domain, DirectSum):
        parts = [
            make_operator(
                OperatorSpec(n, gamma, spec.disorder, part, spec.zero_center_potential)
            )
            for part in domain.parts
        ]
        mask = _domain_mask(domain, n)

        def matvec(v):
            out = np.zeros_like(np.asarray(v, dtype=np.float64))
            for p in parts:
                out += p.matvec(v)
            return out

        return OperatorHandle(spec, matvec, mask, int(mask.sum()))

    mask = _domain_mask(domain, n)
    diag = None if u is None else np.where(mask, u, 0.0)

    def matvec(v):
        w = np.where(mask, v, 0.0)
        out = gamma * apply_T(w, n)
        out[~mask] = 0.0
        if diag is not None:
            out += diag * w
        return out

    return OperatorHandle(spec, matvec, mask, int(mask.sum()))


def apply(spec: OperatorSpec, v: np.ndarray) -> np.ndarray:
    """One-shot H v with hard-wall truncation on restricted domains."""
    check_state(v, spec.n)
    return make_operator(spec).matvec(np.asarray(v, dtype=np.float64))


# --------------------------------------------------------------------------
# dense assembly (oracle sizes)
# --------------------------------------------------------------------------


def domain_vertices(spec: OperatorSpec) -> np.ndarray:
    mask = _domain_mask(spec.domain, spec.n)
    if mask is None:
        return np.arange(1 << spec.n, dtype=np.int64)
    return np.flatnonzero(mask).astype(np.int64)


def assemble_dense(spec: OperatorSpec) -> tuple[np.ndarray, np.ndarray]:
    """Explicit matrix on the domain vertices: (matrix, vertex bits).

    Built by direct adjacency enumeration, independently of ``apply``; the
    test suite compares the two routes.  Size-capped.
    """
    verts = domain_vertices(spec)
    dim = verts.size
    if dim > DENSE_CAP:
        raise ValueError(f"dense assembly capped at {DENSE_CAP} vertices, got {dim}")
    index = {int(b): i for i, b in enumerate(verts)}
    mat = np.zeros((dim, dim))
    if isinstance(spec.domain, BoundaryHopping):
        d_center = distance_table(spec.domain.center, spec.n)
        for i, b in enumerate(verts):
            b = int(b)
            for j in range(spec.n):
                nb = b ^ (1 << j)
                k = index.get(nb)
                if k is not None and d_center[b] != d_center[nb]:
                    mat[i, k] = -spec.gamma
        return mat, verts
    if isinstance(spec.domain, DirectSum):
        for part in spec.domain.parts:
            sub = OperatorSpec(
                spec.n, spec.gamma, spec.disorder, part, spec.zero_center_potential
            )
            sub_mat, sub_verts = assemble_dense(sub)
            pos = np.array([index[int(b)] for b in sub_verts])
            mat[np.ix_(pos, pos)] = sub_mat
        return mat, verts
    for i, b in enumerate(verts):
        b = int(b)
        for j in range(spec.n):
            k = index.get(b ^ (1 << j))
            if k is not None:
                mat[i, k] = -spec.gamma
    u = _potential(spec)
    if u is not None:
        mat[np.arange(dim), np.arange(dim)] = u[verts]
    return mat, verts


# --------------------------------------------------------------------------
# norms, kernels, projections
# --------------------------------------------------------------------------


def operator_norm_bound_TK(k: int, n: int) -> float:
    """Norm bound 2*sqrt(K(N-K+1)) for T restricted to a radius-K ball."""
    if not 0 <= k <= n / 2:
        raise ValueError(f"bound requires 0 <= K <= N/2, got K={k}, N={n}")
    return 2.0 * math.sqrt(k * (n - k + 1))


def semigroup_kernel(beta: float, d: int, n: int) -> float:
    """Heat-kernel element (cosh beta)^N (tanh beta)^d at Hamming distance d."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if not 0 <= d <= n:
        raise ValueError(f"distance {d} out of range 0..{n}")
    if beta == 0.0:
        return 1.0 if d == 0 else 0.0
    log_val = n * math.log(math.cosh(beta)) + d * math.log(math.tanh(beta))
    return math.exp(log_val)


def projection_dim(eps: float, n: int) -> tuple[int, float]:
    """Edge-projection dimension: exact binomial sum and its Chernoff cap."""
    if not 0.0 < eps:
        raise ValueError("eps must be positive")
    exact = sum(binomial(n, k) for k in range(n + 1) if abs(2 * k - n) > eps * n)
    chernoff = 2.0 ** (n + 1) * math.exp(-eps * eps * n / 2.0)
    return exact, chernoff


@dataclass(frozen=True)
class ProjectionSpec:
    """Spectral window of T: Q keeps |eigenvalue| < eps*N, P the rest."""

    epsilon: float
    side: str  # "P" or "Q"

    def __post_init__(self):
        if self.side not in ("P", "Q"):
            raise ValueError("side must be 'P' or 'Q'")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


def _parity_window(eps: float, n: int) -> np.ndarray:
    t_eigs = 2.0 * popcounts(n).astype(np.float64) - n
    return np.abs(t_eigs) < eps * n  # open interval; boundary goes to P


def projection_rank(pspec: ProjectionSpec, n: int) -> int:
    inside = _parity_window(pspec.epsilon, n)
    q_rank = int(np.count_nonzero(inside))
    return q_rank if pspec.side == "Q" else (1 << n) - q_rank


def project(pspec: ProjectionSpec, v: np.ndarray, n: int | None = None) -> np.ndarray:
    """Apply P_eps or Q_eps by masking parity modes of the transform."""
    n = check_state(v, n)
    inside = _parity_window(pspec.epsilon, n)
    keep = inside if pspec.side == "Q" else ~inside
    w = hadamard_transform(v, n)
    w[~keep] = 0.0
    return hadamard_transform(w, n)
