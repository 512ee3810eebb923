"""Green functions of ball-restricted hopping and the rank-one analysis.

The radial Green function of T restricted to a Hamming ball factorizes
into ratio factors obeying a backward fractional-linear recursion; its
telescopic product, dense-resolvent oracles, the sign-reflection
identity, and decay envelopes live here, together with the self-energy
route to the ground state of a ball around a deep hole.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .disorder import DisorderField, neighbor_mean_u
from .hypercube import Configuration, binomial, distance_table
from .operators import Ball, OperatorSpec, assemble_dense, make_operator
from .eigensolve import lanczos_extremal
from .predictions import BETA_C


def tk_norm_threshold(k: int, n: int) -> float:
    """Safe spectral ceiling for T on a radius-K ball: the norm bound
    2*sqrt(K(N-K+1)) up to K = N/2, the full-cube norm N beyond."""
    if k <= n / 2:
        return 2.0 * math.sqrt(k * (n - k + 1))
    return float(n)


@dataclass
class GreenProfile:
    k: int
    n: int
    energy: float
    factors: np.ndarray  # ratio factors, d = 0..K
    green: np.ndarray  # telescopic products G(d)
    renormalized: np.ndarray  # sqrt(C(N,d)) * G(d)


def riccati_profile(
    k: int, n: int, energy: float, tk_norm: float | None = None
) -> GreenProfile:
    """Radial Green profile from the backward Riccati recursion.

    The energy must lie strictly below -||T_K||; pass a computed norm via
    ``tk_norm`` to work closer to the spectrum than the generic bound.
    """
    if not 0 <= k <= n:
        raise ValueError(f"radius {k} out of range 0..{n}")
    ceiling = -(tk_norm if tk_norm is not None else tk_norm_threshold(k, n))
    if energy >= ceiling:
        raise ValueError(f"energy {energy} not below -||T_K|| threshold {ceiling}")
    factors = np.zeros(k + 1)
    nxt = 0.0  # the recursion closes with a vanishing factor beyond the wall
    for d in range(k, -1, -1):
        denom = -energy - (n - d) * nxt
        if denom <= 0.0:
            raise ValueError(f"denominator sign loss at distance {d}: energy in spectrum")
        factors[d] = max(d, 1) / denom
        nxt = factors[d]
    green = np.cumprod(factors)
    renorm = np.array([math.sqrt(binomial(n, d)) * green[d] for d in range(k + 1)])
    return GreenProfile(k=k, n=n, energy=energy, factors=factors, green=green, renormalized=renorm)


def dense_green_column(
    k: int, n: int, energy: float, center: int = 0
) -> np.ndarray:
    """Oracle: radial values of <delta_sigma | (T_K - E)^-1 delta_center>.

    This resolvent column is entrywise positive for E < -||T_K|| and is
    what the telescopic factor product reproduces.  Solves the dense
    linear system on the ball and averages over spheres (the column is
    exactly radial; averaging only smooths roundoff).
    """
    spec = OperatorSpec(n=n, gamma=1.0, domain=Ball(center, k))
    t_mat, verts = assemble_dense(spec)
    rhs = np.zeros(verts.size)
    rhs[int(np.flatnonzero(verts == center)[0])] = 1.0
    col = np.linalg.solve(t_mat - energy * np.eye(verts.size), rhs)
    dist = distance_table(center, n)[verts]
    return np.array([col[dist == d].mean() for d in range(k + 1)])


@dataclass
class SymmetryReport:
    distances: np.ndarray
    max_abs_deviation: float
    deviations: np.ndarray


def green_symmetry_check(k: int, n: int, energy: float, center: int = 0) -> SymmetryReport:
    """Verify G(d; E) = (-1)^(d+1) G(d; -E) against the dense oracle."""
    g_minus = dense_green_column(k, n, energy, center)
    g_plus = dense_green_column(k, n, -energy, center)
    d = np.arange(k + 1)
    dev = np.abs(g_minus - ((-1.0) ** (d + 1)) * g_plus)
    return SymmetryReport(distances=d, max_abs_deviation=float(dev.max()), deviations=dev)


def rho0(rho: float) -> float:
    """Solution of 2 sqrt(rho(1-rho)) = 3 sqrt(x(1-x)) with 0 < x < rho."""
    if not 0.0 < rho < 0.5:
        raise ValueError("rho must lie in (0, 1/2)")
    disc = 1.0 - (16.0 / 9.0) * rho * (1.0 - rho)
    return 0.5 * (1.0 - math.sqrt(disc))


def full_cube_bound(n: int, d: int, energy: float) -> float:
    """Neumann-series envelope for the full-cube Green function."""
    if energy >= -n:
        raise ValueError("full-cube bound needs E < -N")
    return (n / abs(energy)) ** d / (abs(energy + n) * binomial(n, d))


@dataclass
class DecayReport:
    regime: str
    envelope: np.ndarray
    ratios: np.ndarray  # green / envelope
    fitted_constant: float | None
    violations: list
    renormalized_ok: bool | None


def decay_bound_check(
    profile: GreenProfile,
    regime: str = "fixed_K",
    tk_norm: float | None = None,
) -> DecayReport:
    """Compare a profile against its regime's decay envelope.

    fixed_K reports the fitted constant in front of
    |E + ||T_K|||^-1 C(N,d)^(-1/2) (sqrt(N)/|E|)^d; growing_ball checks the
    (eps*N)^-1 2^(-min(d, rho0*N)) envelope and the renormalized-factor
    plateau.  Violations are reported, never raised.
    """
    k, n, energy = profile.k, profile.n, profile.energy
    if regime == "fixed_K":
        norm = tk_norm if tk_norm is not None else tk_norm_threshold(k, n)
        env = np.array(
            [
                (math.sqrt(n) / abs(energy)) ** d
                / (abs(energy + norm) * math.sqrt(binomial(n, d)))
                for d in range(k + 1)
            ]
        )
        ratios = profile.green / env
        return DecayReport(
            regime=regime,
            envelope=env,
            ratios=ratios,
            fitted_constant=float(ratios.max()),
            violations=[],
            renormalized_ok=None,
        )
    if regime == "growing_ball":
        rho = k / n
        r0n = rho0(rho) * n
        eps = (-2.0 * math.sqrt(rho * (1.0 - rho)) * n - energy) / n
        if eps <= 0:
            raise ValueError("growing-ball envelope needs E below -2 sqrt(rho(1-rho)) N")
        env = np.array(
            [
                2.0 ** (-min(d, r0n)) / (eps * n * math.sqrt(binomial(n, d)))
                for d in range(k + 1)
            ]
        )
        ratios = profile.green / env
        violations = [int(d) for d in range(k + 1) if ratios[d] > 1.0]
        ghat = profile.renormalized
        renorm_ok = bool(
            all(ghat[d] <= 1.0 for d in range(k + 1) if d >= r0n)
            and all(ghat[d] <= 0.5 for d in range(k + 1) if d < r0n)
        )
        return DecayReport(
            regime=regime,
            envelope=env,
            ratios=ratios,
            fitted_constant=None,
            violations=violations,
            renormalized_ok=renorm_ok,
        )
    raise ValueError(f"unknown regime {regime!r}")


# --------------------------------------------------------------------------
# self-energy and the ball ground state
# --------------------------------------------------------------------------


def _hole_operator(dis: DisorderField, gamma: float, center: int, radius: int):
    spec = OperatorSpec(
        n=dis.n,
        gamma=gamma,
        disorder=dis,
        domain=Ball(center, radius),
        zero_center_potential=True,
    )
    return make_operator(spec)


def _resolvent_column(handle, z: float, center: int, dense_n_cap: int = 12):
    """Solve (H' - z) x = delta_center on the ball support."""
    n = handle.n
    if n <= dense_n_cap:
        mat, verts = assemble_dense(handle.spec)
        rhs = np.zeros(verts.size)
        pos = int(np.flatnonzero(verts == center)[0])
        rhs[pos] = 1.0
        sol = np.linalg.solve(mat - z * np.eye(verts.size), rhs)
        full = np.zeros(1 << n)
        full[verts] = sol
        return full
    dim = 1 << n
    rhs = np.zeros(dim)
    rhs[center] = 1.0

    def mv(v):
        return handle.matvec(v) - z * v

    op = spla.LinearOperator((dim, dim), matvec=mv)
    sol, info = spla.cg(op, rhs, rtol=1e-12, atol=0.0, maxiter=20000)
    if info != 0:
        raise RuntimeError(f"conjugate-gradient solve did not converge (info={info})")
    return sol


def self_energy(
    dis: DisorderField,
    gamma: float,
    center: Configuration | int,
    radius: int,
    z: float,
    h_prime_ground: float | None = None,
) -> float:
    """Self-energy of the center site: minus the inverse diagonal resolvent
    of the ball operator with the center potential removed.

    ``z`` must lie strictly below the ground energy of that operator; pass
    it via ``h_prime_ground`` to skip the internal Lanczos check.
    """
    bits = center.bits if isinstance(center, Configuration) else int(center)
    handle = _hole_operator(dis, gamma, bits, radius)
    if h_prime_ground is None:
        h_prime_ground = float(
            lanczos_extremal(handle, k=1, want_vectors=False).eigenvalues[0]
        )
    if z >= h_prime_ground:
        raise ValueError(f"z={z} not below the hole-operator ground energy {h_prime_ground}")
    col = _resolvent_column(handle, z, bits)
    return -1.0 / float(col[bits])


@dataclass
class BallGroundState:
    center: Configuration
    radius: int
    energy: float
    vector: np.ndarray  # full-length, positive on the ball
    amplitude_radial: np.ndarray  # mean |psi| per sphere
    self_energy_at_energy: float
    deep_hole_ok: bool


def ball_ground_state(
    dis: DisorderField,
    gamma: float,
    center: Configuration | int,
    alpha: float,
    eps: float | None = None,
    tol: float = 1e-10,
) -> BallGroundState:
    """Ground state of the ball operator from the self-energy root.

    Bisection on U(center) = Sigma(center, E), which is monotone below the
    hole-operator spectrum, then the eigenvector from the free resolvent
    column.  A missing local deep-hole environment only warns.
    """
    bits = center.bits if isinstance(center, Configuration) else int(center)
    n = dis.n
    radius = int(alpha * n)
    if radius < 1:
        raise ValueError(f"alpha={alpha} gives an empty ball at N={n}")
    eps = 0.5 * BETA_C if eps is None else eps
    u_center = float(dis.values[bits])

    dist = distance_table(bits, n)
    ring = (dist <= radius) & (dist > 0)
    deep_ok = (
        bool(np.all(np.abs(dis.values[ring]) <= eps * n))
        and neighbor_mean_u(dis, bits) <= n ** (-0.25)
        and u_center <= -2.0 * eps * n
    )
    if not deep_ok:
        warnings.warn(
            f"site {bits} lacks a local deep-hole environment; the rank-one "
            "picture may be inaccurate",
            stacklevel=2,
        )

    handle = _hole_operator(dis, gamma, bits, radius)
    e_prime = float(lanczos_extremal(handle, k=1, want_vectors=False).eigenvalues[0])

    def f(z: float) -> float:
        col = _resolvent_column(handle, z, bits)
        return u_center + 1.0 / float(col[bits])

    hi = e_prime - 1e-6
    lo = u_center * (1.0 + 1e-6)
    if lo >= hi:
        lo = hi - 1.0
    # the nominal left end can sit above the root; expand until bracketed
    margin = max(1e-6 * abs(u_center), 1e-6)
    tries = 0
    while f(lo) <= 0.0:
        margin *= 4.0
        lo = u_center - margin
        tries += 1
        if tries > 60:
            raise RuntimeError("failed to bracket the self-energy root")
    if f(hi) >= 0.0:
        raise RuntimeError("no sign change on the bisection bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    energy = 0.5 * (lo + hi)

    col = _resolvent_column(handle, energy, bits)
    vec = col / np.linalg.norm(col)
    if vec[bits] < 0:
        vec = -vec
    radial = np.array([np.abs(vec[dist == d]).mean() for d in range(radius + 1)])
    sigma = self_energy(dis, gamma, bits, radius, energy, h_prime_ground=e_prime)
    return BallGroundState(
        center=Configuration(bits, n),
        radius=radius,
        energy=energy,
        vector=vec,
        amplitude_radial=radial,
        self_energy_at_energy=sigma,
        deep_hole_ok=deep_ok,
    )
