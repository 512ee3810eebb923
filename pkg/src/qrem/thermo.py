"""Partition functions, thermal averages, and order-one pressure shifts.

All pressures are natural logs of the normalized trace 2^-N Tr exp(-beta H),
computed in log-domain arithmetic.  The dense route diagonalizes on domains
up to 2^13; the truncated route keeps the k lowest levels and reports a
rigorous remainder bound (at most 2^N levels above the last computed one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .disorder import DisorderField
from .eigensolve import dense_eigenvalues, lanczos_extremal
from .hypercube import binomial
from .operators import OperatorSpec
from .predictions import (
    BETA_C,
    REGIME_PARAMAGNET,
    classify,
    free_energy_correction,
    gamma_c,
    p_par,
    ruelle_log_prefactor,
)

LN2 = math.log(2.0)


@dataclass
class PressureRecord:
    n: int
    beta: float
    gamma: float
    log_z: float
    method: dict
    seed: int
    remainder_bound: float | None = None
    flagged: bool = False


def classical_pressure(field: DisorderField, beta: float) -> float:
    """ln(2^-N sum_sigma exp(-beta U(sigma))), max-shifted."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    return float(logsumexp(-beta * field.values)) - field.n * LN2


def quantum_pressure(
    field: DisorderField,
    beta: float,
    gamma: float,
    method: str = "dense",
    k: int = 64,
    dtype: str | None = None,
    rel_tol: float = 1e-12,
    seed: int = 0,
) -> PressureRecord:
    """Pressure of Gamma*T + U by dense trace or low-energy truncation."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    spec = OperatorSpec(n=field.n, gamma=gamma, disorder=field)
    if method == "dense":
        w = dense_eigenvalues(spec, dtype=dtype)
        log_z = float(logsumexp(-beta * w)) - field.n * LN2
        return PressureRecord(
            n=field.n,
            beta=beta,
            gamma=gamma,
            log_z=log_z,
            method={"name": "dense", "dtype": dtype or "auto"},
            seed=field.seed,
        )
    if method == "truncated":
        res = lanczos_extremal(spec, k=k, seed=seed, want_vectors=False)
        levels = res.eigenvalues
        log_sum = float(logsumexp(-beta * levels))
        log_z = log_sum - field.n * LN2
        # remaining levels sit at or above the last computed one, and there
        # are fewer than 2^N of them
        log_remainder = field.n * LN2 - beta * float(levels[-1])
        rel = math.exp(min(log_remainder - log_sum, 700.0))
        return PressureRecord(
            n=field.n,
            beta=beta,
            gamma=gamma,
            log_z=log_z,
            method={"name": "truncated", "k": k, "converged": bool(res.converged.all())},
            seed=field.seed,
            remainder_bound=rel,
            flagged=bool(rel > rel_tol or not res.converged.all()),
        )
    raise ValueError(f"unknown method {method!r}")


def pressure_curve(
    field: DisorderField,
    betas,
    gamma: float,
    dtype: str | None = None,
) -> list[PressureRecord]:
    """Dense pressures at several temperatures from one diagonalization."""
    spec = OperatorSpec(n=field.n, gamma=gamma, disorder=field)
    w = dense_eigenvalues(spec, dtype=dtype)
    records = []
    for beta in betas:
        if beta < 0:
            raise ValueError("beta must be nonnegative")
        records.append(
            PressureRecord(
                n=field.n,
                beta=float(beta),
                gamma=gamma,
                log_z=float(logsumexp(-beta * w)) - field.n * LN2,
                method={"name": "dense", "dtype": dtype or "auto"},
                seed=field.seed,
            )
        )
    return records


# --------------------------------------------------------------------------
# thermal averages
# --------------------------------------------------------------------------


def thermal_average_t(n: int, beta: float) -> float:
    """Paramagnetic kinetic average: exactly -N tanh(beta)."""
    return -n * math.tanh(beta)


def thermal_average_t_trace(n: int, beta: float) -> float:
    """The same average from the exact level sums (cross-check route)."""
    eigs = np.array([2.0 * k - n for k in range(n + 1)])
    log_w = np.array(
        [math.log(binomial(n, k)) - beta * (2.0 * k - n) for k in range(n + 1)]
    )
    log_norm = logsumexp(log_w)
    return float(np.sum(eigs * np.exp(log_w - log_norm)))


def gibbs_window_mass_t(n: int, beta: float, delta: float) -> float:
    """Gibbs weight of T-levels within delta*N of -N tanh(beta), exact."""
    center = -n * math.tanh(beta)
    log_w = np.array(
        [math.log(binomial(n, k)) - beta * (2.0 * k - n) for k in range(n + 1)]
    )
    eigs = np.array([2.0 * k - n for k in range(n + 1)])
    inside = np.abs(eigs - center) <= delta * n
    if not inside.any():
        return 0.0
    return float(math.exp(logsumexp(log_w[inside]) - logsumexp(log_w)))


def thermal_average_u(field: DisorderField, beta: float) -> float:
    """Classical potential average under the REM Gibbs weight."""
    u = field.values
    shifted = -beta * (u - u.min())
    w = np.exp(shifted - shifted.max())
    return float(np.sum(u * w) / np.sum(w))


# --------------------------------------------------------------------------
# order-one corrections and fluctuation samples
# --------------------------------------------------------------------------


@dataclass
class CorrectionSeries:
    beta: float
    gamma: float
    n_list: list
    means: list
    stderrs: list
    prediction: float
    regime: str
    samples: dict  # n -> list of per-seed observables


def correction_measurement(
    beta: float,
    gamma: float,
    n_list,
    seeds,
    method: str = "dense",
    dtype: str | None = None,
    k: int = 64,
    sampler=None,
) -> CorrectionSeries:
    """Measure the order-one pressure shift across sizes and seeds.

    Paramagnetic phase: Phi_N(beta, Gamma) - N ln cosh(beta Gamma).
    REM phases: Phi_N(beta, Gamma) - Phi_N(beta, 0) on the same realization
    (same-seed pairing kills most of the Monte Carlo variance).
    """
    from .disorder import sample_rem

    sampler = sample_rem if sampler is None else sampler
    point = classify(beta, gamma)
    prediction = free_energy_correction(beta, gamma)
    samples: dict[int, list[float]] = {}
    for n in n_list:
        vals = []
        for seed in seeds:
            field = sampler(n, seed)
            rec = quantum_pressure(field, beta, gamma, method=method, k=k, dtype=dtype)
            if point.regime == REGIME_PARAMAGNET:
                vals.append(rec.log_z - n * p_par(beta * gamma))
            else:
                vals.append(rec.log_z - classical_pressure(field, beta))
        samples[n] = vals
    means = [float(np.mean(samples[n])) for n in n_list]
    stderrs = [
        float(np.std(samples[n], ddof=1) / math.sqrt(len(samples[n])))
        if len(samples[n]) > 1
        else 0.0
        for n in n_list
    ]
    return CorrectionSeries(
        beta=beta,
        gamma=gamma,
        n_list=list(n_list),
        means=means,
        stderrs=stderrs,
        prediction=prediction,
        regime=point.regime,
        samples=samples,
    )


def ruelle_fluctuation_sample(
    field: DisorderField,
    beta: float,
    gamma: float,
    method: str = "dense",
    k: int = 64,
    dtype: str | None = None,
) -> float:
    """One sample of the rescaled partition function (order-one limit)."""
    if beta <= BETA_C:
        raise ValueError("fluctuation samples need beta > beta_c")
    if gamma >= gamma_c(beta):
        raise ValueError("fluctuation samples need gamma < gamma_c(beta)")
    rec = quantum_pressure(field, beta, gamma, method=method, k=k, dtype=dtype)
    return math.exp(ruelle_log_prefactor(field.n, beta, gamma) + rec.log_z)
