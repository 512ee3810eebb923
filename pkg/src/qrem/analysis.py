"""Eigenvector observables, disorder ensembles, and walk diagnostics.

Localization verdicts compare measured sup-norms against the entropy
bound; extreme-value ensembles map ground energies through the Gumbel
rescaling and report exact Kolmogorov-Smirnov distances; the mismatch
statistics quantify how often the ground state localizes away from the
classical minimum.  The radial random-walk recursion backs the
transition-probability and sojourn-time envelopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import streams
from .disorder import DisorderField, neighbor_z, rescale, sample_rem
from .eigensolve import lanczos_extremal
from .hypercube import Configuration, binary_entropy, binomial, distance_table
from .operators import OperatorSpec
from .predictions import BETA_C, deloc_bound


@dataclass
class EigenvectorStats:
    lp_norms: dict
    overlap_phi_empty: float
    argmax: Configuration
    max_amplitude: float
    ball_mass: np.ndarray  # cumulative mass on B_K(argmax), K = 0..K_max
    xi_distance: float | None


def eigvec_stats(
    psi: np.ndarray, gamma: float, field: DisorderField | None = None, k_max: int = 4
) -> EigenvectorStats:
    """Norms, localization center, ball masses, and first-order distance.

    The comparison vector loads sqrt(1 - Gamma^2/(beta_c^2 N)) on the
    center and Gamma/(beta_c N) on each neighbor; it needs no disorder, so
    ``field`` only fixes the dimension check.
    """
    psi = np.asarray(psi, dtype=float)
    n = psi.size.bit_length() - 1
    if field is not None and field.n != n:
        raise ValueError("dimension mismatch between state and field")
    abs_psi = np.abs(psi)
    center = int(np.argmax(abs_psi))  # ties resolve to the smallest bits
    if psi[center] < 0:
        psi = -psi
    lp = {
        1: float(abs_psi.sum()),
        2: float(np.linalg.norm(psi)),
        4: float(np.sum(abs_psi**4) ** 0.25),
        "inf": float(abs_psi.max()),
    }
    overlap = float(psi.sum()) * 2.0 ** (-n / 2.0)
    dist = distance_table(center, n)
    k_max = min(k_max, n)
    mass = np.array(
        [float(np.sum(psi[dist <= k] ** 2)) for k in range(k_max + 1)]
    )
    head = math.sqrt(max(0.0, 1.0 - gamma**2 / (BETA_C**2 * n)))
    xi = np.zeros_like(psi)
    xi[center] = head
    xi[center ^ (1 << np.arange(n))] = gamma / (BETA_C * n)
    xi_distance = float(np.linalg.norm(psi - xi))
    return EigenvectorStats(
        lp_norms=lp,
        overlap_phi_empty=overlap,
        argmax=Configuration(center, n),
        max_amplitude=lp["inf"],
        ball_mass=mass,
        xi_distance=xi_distance,
    )


@dataclass
class DelocalizationReport:
    measured_sup_sq: float
    bound: float
    slack: float
    satisfied: bool


def delocalization_verdict(psi: np.ndarray, energy: float, v: float, n: int) -> DelocalizationReport:
    """Measured sup-norm squared against 2^-N exp(N gamma((1+nu)/2))."""
    bound = deloc_bound(energy, v, n)  # raises outside the energy window
    measured = float(np.max(np.abs(psi)) ** 2)
    return DelocalizationReport(
        measured_sup_sq=measured,
        bound=bound,
        slack=bound / measured,
        satisfied=measured <= bound,
    )


@dataclass
class EnsembleSummary:
    n: int
    gamma: float
    beta: float | None
    seed_count: int
    samples: np.ndarray
    ks_to_reference: float
    mismatch_rate: float | None
    excluded: int


def extreme_ensemble(n: int, gamma: float, seeds, tol: float = 1e-8) -> EnsembleSummary:
    """Rescaled ground energies across seeds, with their KS distance to
    the double-exponential law exp(-e^-x)."""
    if gamma >= BETA_C:
        raise ValueError("extreme-value rescaling applies for gamma < beta_c")
    samples = []
    excluded = 0
    for seed in seeds:
        field = sample_rem(n, seed)
        if gamma == 0.0:
            e0 = float(field.values.min())
        else:
            res = lanczos_extremal(
                OperatorSpec(n=n, gamma=gamma, disorder=field),
                k=1,
                tol=tol,
                want_vectors=False,
            )
            if not res.converged[0]:
                excluded += 1
                continue
            e0 = float(res.eigenvalues[0])
        samples.append(rescale(e0, n, gamma).x)
    samples = np.array(samples)
    ks = float(stats.kstest(samples, stats.gumbel_r.cdf).statistic)
    return EnsembleSummary(
        n=n,
        gamma=gamma,
        beta=None,
        seed_count=len(samples),
        samples=samples,
        ks_to_reference=ks,
        mismatch_rate=None,
        excluded=excluded,
    )


@dataclass
class MismatchResult:
    n: int
    gamma: float
    seed_count: int
    rate: float
    ci95: tuple
    minu_correct: int
    corrected_correct: int
    excluded: int


def sigma0_mismatch(
    n: int, gamma: float, seeds, candidates: int = 32, tol: float = 1e-8
) -> MismatchResult:
    """How often the localization center differs from argmin U.

    Also scores two predictors of the center against the truth: the bare
    minimum of U, and the neighbor-corrected energy
    U(sigma) + Gamma^2/(beta_c^2 N) * Z_sigma ranked over the lowest sites.
    """
    if gamma >= BETA_C:
        raise ValueError("mismatch statistics apply for gamma < beta_c")
    mismatches = 0
    kept = 0
    excluded = 0
    minu_correct = 0
    corrected_correct = 0
    corr = gamma**2 / (BETA_C**2 * n)
    for seed in seeds:
        field = sample_rem(n, seed)
        if gamma == 0.0:
            sigma0 = int(np.argmin(field.values))
        else:
            res = lanczos_extremal(
                OperatorSpec(n=n, gamma=gamma, disorder=field), k=1, tol=tol
            )
            if not res.converged[0]:
                excluded += 1
                continue
            sigma0 = int(np.argmax(np.abs(res.eigenvectors[0])))
        kept += 1
        sigma_min = int(np.argmin(field.values))
        if sigma0 != sigma_min:
            mismatches += 1
        if sigma_min == sigma0:
            minu_correct += 1
        low = np.argsort(field.values, kind="stable")[:candidates]
        scores = [field.values[b] + corr * neighbor_z(field, int(b)) for b in low]
        if int(low[int(np.argmin(scores))]) == sigma0:
            corrected_correct += 1
    rate = mismatches / kept if kept else float("nan")
    if kept:
        z = 1.96
        mid = (rate + z * z / (2 * kept)) / (1 + z * z / kept)
        half = (
            z
            * math.sqrt(rate * (1 - rate) / kept + z * z / (4 * kept * kept))
            / (1 + z * z / kept)
        )
        ci = (max(0.0, mid - half), min(1.0, mid + half))
    else:
        ci = (0.0, 1.0)
    return MismatchResult(
        n=n,
        gamma=gamma,
        seed_count=kept,
        rate=rate,
        ci95=ci,
        minu_correct=minu_correct,
        corrected_correct=corrected_correct,
        excluded=excluded,
    )


# --------------------------------------------------------------------------
# simple random walk on the cube, radial reduction
# --------------------------------------------------------------------------


def rw_distance_distribution(n: int, steps: int) -> np.ndarray:
    """Probability of being at distance r from the start after ``steps``."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    p = np.zeros(n + 1)
    p[0] = 1.0
    for _ in range(steps):
        q = np.zeros_like(p)
        for r in range(n + 1):
            if p[r] == 0.0:
                continue
            if r < n:
                q[r + 1] += p[r] * (n - r) / n
            if r > 0:
                q[r - 1] += p[r] * r / n
        p = q
    return p


def rw_transition(n: int, steps: int, d: int) -> float:
    """Exact probability to sit at one fixed configuration at distance d."""
    if not 0 <= d <= n:
        raise ValueError(f"distance {d} out of range 0..{n}")
    p = rw_distance_distribution(n, steps)
    return float(p[d] / binomial(n, d))


def rw_envelope(n: int, alpha: float) -> float:
    """Crude upper envelope max{e^(-gamma(alpha/8) N), e^(-alpha N / 8)}."""
    return max(math.exp(-binary_entropy(alpha / 8.0) * n), math.exp(-alpha * n / 8.0))


@dataclass
class SojournEstimate:
    probability: float
    stderr: float
    bound: float
    trials: int
    threshold: float


def rw_sojourn(
    n: int,
    w_size: int,
    alpha: float,
    t: float,
    trials: int,
    seed: int = 0,
    w_set=None,
) -> SojournEstimate:
    """Monte Carlo estimate of P(visits of W within alpha*N steps >= t*N).

    The planted set W defaults to the ``w_size`` smallest nonzero bit
    patterns (so the walk starts outside it); compared against the
    closed-form envelope exp(-tN ln(tN / (alpha |W| e))).  For t beyond
    alpha the walk cannot reach the visit threshold and the probability
    is exactly zero.
    """
    if t <= 0.0:
        raise ValueError("need t > 0")
    steps = int(alpha * n)
    if w_set is None:
        w_set = np.arange(1, w_size + 1, dtype=np.int64)
    else:
        w_set = np.asarray(sorted(int(b) for b in w_set), dtype=np.int64)
    threshold = t * n
    if w_set.size == 0:
        return SojournEstimate(0.0, 0.0, 0.0, trials, threshold)
    pos = np.zeros(trials, dtype=np.int64)
    visits = np.zeros(trials, dtype=np.int64)
    visits += np.isin(pos, w_set)  # the time-zero visit counts
    for step in range(steps):
        u = streams.uniforms(seed, streams.TAG_WALKER, step * trials, trials)
        j = np.minimum((u * n).astype(np.int64), n - 1)
        pos ^= np.int64(1) << j
        visits += np.isin(pos, w_set)
    hits = float(np.mean(visits >= threshold))
    stderr = math.sqrt(max(hits * (1 - hits), 1.0 / trials) / trials)
    x = threshold * math.log(threshold / (alpha * w_set.size * math.e))
    bound = math.exp(-x)
    return SojournEstimate(
        probability=hits, stderr=stderr, bound=bound, trials=trials, threshold=threshold
    )
