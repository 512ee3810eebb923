"""Large-deviation geometry of a disorder realization.

Deep-hole scenario checks (a deep site surrounded by moderate potential,
with disjoint surrounding balls), the partition of the large-deviation
set into distance-threshold components and their clusters, and the
three-way energy split of the cube used by the free-energy analysis.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .disorder import DisorderField, large_deviation_set, neighbor_mean_u
from .hypercube import Configuration, binary_entropy, distance_table, hamming_distance
from .predictions import BETA_C

SCOPE_LOCAL = "local"
SCOPE_GLOBAL = "global"
SCOPE_SYMMETRIZED = "symmetrized-global"


def admissible_parameters(eps: float, delta: float, alpha: float, gamma: float = 0.0) -> bool:
    """Parameter region where the scenario provably dominates.

    Requires 2*gamma(3*alpha) + delta*(2*beta_c - delta) < eps^2 and, when a
    field strength is supplied, 2*Gamma*sqrt(alpha(1-alpha)) + eps < beta_c - 2*delta.
    """
    if not 0.0 < alpha < 0.5:
        return False
    if 3.0 * alpha > 1.0:
        return False
    cond1 = 2.0 * binary_entropy(3.0 * alpha) + delta * (2.0 * BETA_C - delta) < eps * eps
    cond2 = True
    if gamma > 0.0:
        cond2 = 2.0 * gamma * np.sqrt(alpha * (1.0 - alpha)) + eps < BETA_C - 2.0 * delta
    return bool(cond1 and cond2)


def max_admissible_alpha(eps: float, delta: float, gamma: float = 0.0) -> float | None:
    """Largest alpha satisfying the admissibility conditions, or None."""
    lo, hi = 0.0, 1.0 / 3.0
    if not admissible_parameters(eps, delta, 1e-9, gamma):
        return None
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if admissible_parameters(eps, delta, mid, gamma):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass
class DeepHoleReport:
    epsilon: float
    delta: float
    alpha: float
    scope: str
    holds: bool
    violations: list  # (condition id, witness bits)
    parameter_warning: bool
    centers_checked: int

    def to_json_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "alpha": self.alpha,
            "scope": self.scope,
            "holds": self.holds,
            "violations": [[cid, int(bits)] for cid, bits in self.violations],
            "parameter_warning": self.parameter_warning,
            "centers_checked": self.centers_checked,
        }


def _local_violations(field, center_bits, radius, eps):
    out = []
    dist = distance_table(center_bits, field.n)
    in_ball = dist <= radius
    bad = in_ball & (np.abs(field.values) > eps * field.n)
    bad[center_bits] = False
    for b in np.flatnonzero(bad):
        out.append(("bounded_ball_potential", int(b)))
    if neighbor_mean_u(field, center_bits) > field.n ** (-0.25):
        out.append(("neighbor_mean", int(center_bits)))
    return out


def check_deep_hole(
    field: DisorderField,
    eps: float,
    delta: float,
    alpha: float,
    scope: str = SCOPE_GLOBAL,
    center: Configuration | int | None = None,
) -> DeepHoleReport:
    """Verify the deep-hole conditions at one site or over the whole set.

    Local scope checks the moderate-potential ball and neighbor-mean
    conditions at ``center``; global scopes additionally require pairwise
    disjoint balls around every large-deviation site.  Parameter choices
    outside the provable region only set a warning flag.
    """
    if eps <= 0 or delta <= 0 or not 0.0 < alpha < 0.5:
        raise ValueError("need eps > 0, delta > 0 and alpha in (0, 1/2)")
    n = field.n
    radius = int(alpha * n)
    warning = not admissible_parameters(eps, delta, alpha)
    violations = []
    if scope == SCOPE_LOCAL:
        if center is None:
            raise ValueError("local scope needs a center")
        bits = center.bits if isinstance(center, Configuration) else int(center)
        if field.values[bits] > -(BETA_C - delta) * n:
            violations.append(("center_membership", bits))
        violations.extend(_local_violations(field, bits, radius, eps))
        centers = [bits]
    elif scope in (SCOPE_GLOBAL, SCOPE_SYMMETRIZED):
        sites = large_deviation_set(
            field, BETA_C - delta, symmetrized=(scope == SCOPE_SYMMETRIZED)
        )
        centers = [s.bits for s in sites]
        for bits in centers:
            violations.extend(_local_violations(field, bits, radius, eps))
        for i, a in enumerate(centers):
            for b in centers[i + 1 :]:
                if hamming_distance(a, b) <= 2 * radius:
                    violations.append(("ball_overlap", b))
    else:
        raise ValueError(f"unknown scope {scope!r}")
    return DeepHoleReport(
        epsilon=eps,
        delta=delta,
        alpha=alpha,
        scope=scope,
        holds=not violations,
        violations=violations,
        parameter_warning=warning,
        centers_checked=len(centers),
    )


class _UnionFind:
    def __init__(self, size):
        self.parent = list(range(size))

    def find(self, i):
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:  # path compression
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass
class ComponentSet:
    k: int
    epsilon: float
    components: list  # list of lists of Configuration, canonically ordered
    clusters: list  # one frozenset of bits per component

    def isolated(self) -> list:
        return [g[0] for g in self.components if len(g) == 1]


def components(field: DisorderField, k: int, eps: float) -> ComponentSet:
    """Partition of the large-deviation set under distance <= 2k+2 chains.

    Pairwise distances over the materialized set (quadratic in its size,
    which stays small at the relevant eps); output order is canonical.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    sites = large_deviation_set(field, eps)
    bits = [s.bits for s in sites]
    uf = _UnionFind(len(bits))
    for i in range(len(bits)):
        for j in range(i + 1, len(bits)):
            if hamming_distance(bits[i], bits[j]) <= 2 * k + 2:
                uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for i, b in enumerate(bits):
        groups.setdefault(uf.find(i), []).append(b)
    ordered = sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])
    comps = [[Configuration(b, field.n) for b in g] for g in ordered]
    clusters = []
    for g in ordered:
        members = np.zeros(1 << field.n, dtype=bool)
        for b in g:
            members |= distance_table(b, field.n) <= k
        clusters.append(frozenset(int(x) for x in np.flatnonzero(members)))
    return ComponentSet(k=k, epsilon=eps, components=comps, clusters=clusters)


def tripartition(
    field: DisorderField, eps: float, delta: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split the cube by |U|: moderate, intermediate, extreme sites."""
    if not 0.0 < eps < BETA_C - delta:
        raise ValueError("need 0 < eps < beta_c - delta")
    absu = np.abs(field.values)
    n = field.n
    a1 = np.flatnonzero(absu <= eps * n)
    a2 = np.flatnonzero((absu > eps * n) & (absu <= (BETA_C - delta) * n))
    a3 = np.flatnonzero(absu > (BETA_C - delta) * n)
    return a1, a2, a3


def report_to_json(report: DeepHoleReport) -> str:
    return json.dumps(report.to_json_dict(), indent=2)
