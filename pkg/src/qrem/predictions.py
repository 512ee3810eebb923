"""Closed-form asymptotic predictions for H = Gamma*T + U.

Pure functions of (N, beta, Gamma): phase boundaries, low-energy level
centers, ground-state energies in both phases, order-one free-energy
corrections, the delocalization bound, and the Gumbel/Ruelle rescalings.
Measured spectra and pressures elsewhere in the package are compared
against these.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .hypercube import binary_entropy, binomial

#: REM freezing inverse temperature; also the ground-state critical field.
BETA_C = math.sqrt(2.0 * math.log(2.0))


def beta_c() -> float:
    return BETA_C


def p_rem(beta: float) -> float:
    """Specific REM pressure: beta^2/2 below freezing, linear above."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if beta <= BETA_C:
        return 0.5 * beta * beta
    return 0.5 * BETA_C * BETA_C + (beta - BETA_C) * BETA_C


def p_par(beta_gamma: float) -> float:
    """Paramagnetic specific pressure ln cosh(beta*Gamma), overflow-safe."""
    x = abs(beta_gamma)
    return x - math.log(2.0) + math.log1p(math.exp(-2.0 * x))


def gamma_c(beta: float) -> float:
    """Critical field arcosh(exp(p_rem(beta)))/beta; beta -> 0 limit is 1."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if beta == 0.0:
        return 1.0
    # arcosh(1+u) = log1p(u + sqrt(u*(2+u))) stays accurate for small beta
    u = math.expm1(p_rem(beta))
    return math.log1p(u + math.sqrt(u * (2.0 + u))) / beta


REGIME_PARAMAGNET = "quantum-paramagnet"
REGIME_CLASSICAL = "REM-classical"
REGIME_FROZEN = "REM-frozen"
REGIME_CRITICAL = "critical-line"


@dataclass(frozen=True)
class PhasePoint:
    beta: float
    gamma: float
    regime: str


def classify(beta: float, gamma: float, tol: float = 0.0) -> PhasePoint:
    """Phase of (beta, Gamma): the pressure is max(p_rem, p_par)."""
    gc = gamma_c(beta)
    if abs(gamma - gc) <= tol:
        regime = REGIME_CRITICAL
    elif gamma > gc:
        regime = REGIME_PARAMAGNET
    elif beta > BETA_C:
        regime = REGIME_FROZEN
    else:
        regime = REGIME_CLASSICAL
    return PhasePoint(beta, gamma, regime)


def paramagnetic_levels(n: int, gamma: float, eta: float) -> list[tuple[float, int]]:
    """Level centers (2k-N)Gamma + N/((2k-N)Gamma) below -(beta_c+2*eta)N.

    Returns (center, multiplicity C(N,k)) pairs for every admissible k.
    """
    if gamma <= BETA_C:
        warnings.warn(
            f"paramagnetic level centers requested at Gamma={gamma} <= beta_c",
            stacklevel=2,
        )
    out = []
    for k in range(n + 1):
        t_eig = (2 * k - n) * gamma
        if t_eig < -(BETA_C + 2.0 * eta) * n:
            out.append((t_eig + n / t_eig, binomial(n, k)))
    return out


def paramagnetic_ground_energy(n: int, gamma: float) -> float:
    return -gamma * n - 1.0 / gamma


def spin_glass_ground_energy(n: int, gamma: float, u_min: float) -> float:
    return u_min + gamma * gamma * n / u_min


def gamma_gap_prediction(n: int, u_min: float) -> float:
    """Field strength where the two ground-state branches cross."""
    return -u_min / n + (n / u_min - u_min / n) / n


@dataclass(frozen=True)
class GroundStatePrediction:
    energy: float
    regime: str
    paramagnetic: float | None
    spin_glass: float | None
    critical: bool


def ground_state_prediction(
    n: int, gamma: float, disorder=None, critical_halfwidth: float | None = None
) -> GroundStatePrediction:
    """Predicted ground energy; both branches are reported near the crossing.

    ``disorder`` may be a disorder field object or the scalar min U; it is
    required for the spin-glass branch (Gamma < beta_c).
    """
    para = paramagnetic_ground_energy(n, gamma) if gamma > 0 else None
    u_min = None
    if disorder is not None:
        u_min = float(disorder.values.min()) if hasattr(disorder, "values") else float(disorder)
    sg = None if u_min is None else spin_glass_ground_energy(n, gamma, u_min)
    critical = False
    if u_min is not None and gamma > 0:
        halfwidth = 1.0 / n if critical_halfwidth is None else critical_halfwidth
        critical = abs(gamma - gamma_gap_prediction(n, u_min)) <= halfwidth
    if gamma > BETA_C:
        return GroundStatePrediction(para, REGIME_PARAMAGNET, para, sg, critical)
    if sg is None:
        raise ValueError("spin-glass branch needs the disorder field (or min U)")
    regime = REGIME_CRITICAL if critical else REGIME_FROZEN
    return GroundStatePrediction(sg, regime, para, sg, critical)


def free_energy_correction(beta: float, gamma: float, tol: float = 1e-12) -> float:
    """Order-one pressure shift: the limit of Phi_N minus its leading term.

    Paramagnet: beta/(Gamma tanh(beta*Gamma)) for Phi_N - N ln cosh(beta*Gamma);
    otherwise the shift of Phi_N(beta,Gamma) - Phi_N(beta,0), which is Gamma^2
    below freezing and Gamma^2 beta/beta_c in the frozen phase.  No prediction
    exists on the critical line.
    """
    gc = gamma_c(beta)
    if abs(gamma - gc) <= tol:
        raise ValueError(f"(beta={beta}, gamma={gamma}) lies on the critical line")
    if gamma > gc:
        return beta / (gamma * math.tanh(beta * gamma))
    if beta <= BETA_C:
        return gamma * gamma
    return gamma * gamma * beta / BETA_C


def deloc_bound(energy: float, v: float, n: int) -> float:
    """Sup-norm-squared bound 2^-N exp(N*gamma((1+nu)/2)), nu = E/N + v."""
    if not 0.0 <= v < 1.0:
        raise ValueError("v must lie in [0, 1)")
    if not -(1.0 + v) * n <= energy <= -v * n:
        raise ValueError(
            f"energy {energy} outside the window [{-(1.0 + v) * n}, {-v * n}]"
        )
    nu = energy / n + v
    return 2.0 ** (-n) * math.exp(n * binary_entropy(0.5 * (1.0 + nu)))


def gumbel_cdf(x: float) -> float:
    """Law of the maximum of the Poisson process with intensity e^-x dx."""
    return math.exp(-math.exp(-x))


def ruelle_log_prefactor(n: int, beta: float, gamma: float) -> float:
    """Log of the normalization that makes Z_N(beta, Gamma) order one."""
    return (
        -n * (beta * BETA_C - math.log(2.0))
        + (beta / (2.0 * BETA_C)) * (math.log(n * math.log(2.0)) + math.log(4.0 * math.pi))
        - beta * gamma * gamma / BETA_C
    )


def ruelle_prefactor(n: int, beta: float, gamma: float) -> float:
    if beta <= BETA_C:
        warnings.warn("Ruelle rescaling is meaningful only for beta > beta_c", stacklevel=2)
    return math.exp(ruelle_log_prefactor(n, beta, gamma))
