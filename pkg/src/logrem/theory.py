"""Closed-form limiting values every estimator is compared against.

All functions are pure and total on their documented domains, continuous at
their branch points, and piecewise elementary; nothing here is fitted or
Monte Carlo.  The two-value ("case") formulas select case 1 at the boundary
sigma1 == sigma2, where both branches agree.
"""

from __future__ import annotations

import math
from functools import lru_cache

SQRT2 = math.sqrt(2.0)
BETA_C = SQRT2


def critical_beta(sigma2: float = 1.0) -> float:
    """Freezing temperature sqrt(2/sigma2) of the one-level model."""
    if not sigma2 > 0:
        raise ValueError("variance must be positive")
    return math.sqrt(2.0 / sigma2)


def rem_free_energy(beta: float, sigma2: float = 1.0) -> float:
    """Limiting free energy of the one-level model with variance sigma2 log n.

    1 + beta^2 sigma2 / 2 below the critical temperature, linear above; C^1
    at the junction.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    if beta < critical_beta(sigma2):
        return 1.0 + beta * beta * sigma2 / 2.0
    return SQRT2 * math.sqrt(sigma2) * beta


def perturbed_free_energy(beta: float, sigma1: float, sigma2: float, alpha: float) -> float:
    """Limiting free energy of the two-scale field.

    When the variance profile is increasing (sigma1 <= sigma2) the two levels
    merge into a single effective one with variance v12 = sigma1^2 alpha +
    sigma2^2 (1 - alpha); otherwise the levels freeze independently and the
    free energies mix with weights alpha, 1 - alpha.
    """
    _check_two_scale(sigma1, sigma2, alpha)
    if sigma1 <= sigma2:
        v12 = sigma1**2 * alpha + sigma2**2 * (1.0 - alpha)
        return rem_free_energy(beta, v12)
    return alpha * rem_free_energy(beta, sigma1**2) + (1.0 - alpha) * rem_free_energy(
        beta, sigma2**2
    )


def gamma_max(sigma1: float, sigma2: float, alpha: float) -> float:
    """First-order maximum max Y / log n divided by sqrt(2)."""
    _check_two_scale(sigma1, sigma2, alpha)
    if sigma1 <= sigma2:
        return math.sqrt(sigma1**2 * alpha + sigma2**2 * (1.0 - alpha))
    return sigma1 * alpha + sigma2 * (1.0 - alpha)


def high_point_exponent(gamma: float, sigma1: float, sigma2: float, alpha: float) -> float:
    """Limiting log-count exponent of sites above sqrt(2)*gamma*log n."""
    _check_two_scale(sigma1, sigma2, alpha)
    g_max = gamma_max(sigma1, sigma2, alpha)
    if not 0 < gamma < g_max:
        raise ValueError(f"gamma must lie in (0, {g_max}), got {gamma}")
    v12 = sigma1**2 * alpha + sigma2**2 * (1.0 - alpha)
    if sigma1 <= sigma2 or gamma < v12 / sigma1:
        return 1.0 - gamma * gamma / v12
    return (1.0 - alpha) - (gamma - sigma1 * alpha) ** 2 / (sigma2**2 * (1.0 - alpha))


def overlap_cdf_limit(beta: float, q: float) -> float:
    """Low-temperature limit of the two-replica overlap distribution function."""
    if not beta > BETA_C:
        raise ValueError(
            "defined for beta > beta_c only; below, the limiting overlap is 0 a.s. "
            "(use overlap_cdf_limit_high_temperature)"
        )
    if not 0 <= q <= 1:
        raise ValueError("q must lie in [0, 1]")
    return 1.0 if q == 1.0 else BETA_C / beta


def overlap_cdf_limit_high_temperature(q: float) -> float:
    """Degenerate limit for beta <= beta_c: all mass at overlap 0."""
    if not 0 <= q <= 1:
        raise ValueError("q must lie in [0, 1]")
    return 1.0


def overlap_integral_limit(beta: float, alpha: float) -> float:
    """Limit of the integral over [alpha, 1] of the overlap distribution
    function, (sqrt(2)/beta)(1 - alpha)."""
    if not beta > BETA_C:
        raise ValueError("defined for beta > beta_c only")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    return (SQRT2 / beta) * (1.0 - alpha)


def bk_derivative_limit(beta: float, alpha: float, u_sign: int = 1) -> float:
    """One-sided derivative of the perturbed free energy in the perturbation
    strength, evaluated at zero.

    Both sides give sqrt(2) beta (1 - alpha): the right side as the u -> 0
    value of sqrt(2) beta (1-alpha)(1+u)/sqrt(alpha + (1-alpha)(1+u)^2), the
    left side as the constant sqrt(2) beta (1-alpha); the agreement certifies
    differentiability at zero.
    """
    if not beta > BETA_C:
        raise ValueError("needs beta above every critical value near u = 0")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if u_sign >= 0:
        u = 0.0
        return (
            SQRT2
            * beta
            * (1.0 - alpha)
            * (1.0 + u)
            / math.sqrt(alpha + (1.0 - alpha) * (1.0 + u) ** 2)
        )
    return SQRT2 * beta * (1.0 - alpha)


def p_beta_max(beta: float, sigma1: float, sigma2: float, alpha: float):
    """Argmax and maximum of the exponent-tilt curve E(gamma) + sqrt(2) beta gamma.

    Maximized in closed form per quadratic branch over [0, gamma_max]; the
    value coincides with the limiting free energy, an internal consistency
    identity checked in the tests against a grid-search oracle.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    _check_two_scale(sigma1, sigma2, alpha)
    g_max = gamma_max(sigma1, sigma2, alpha)
    v12 = sigma1**2 * alpha + sigma2**2 * (1.0 - alpha)

    def branch_one(g):
        return 1.0 - g * g / v12 + SQRT2 * beta * g

    vertex_one = beta * v12 / SQRT2
    if sigma1 <= sigma2:
        gammas = [0.0, g_max, min(max(vertex_one, 0.0), g_max)]
        candidates = [(g, branch_one(g)) for g in gammas]
    else:
        g_crit = v12 / sigma1

        def branch_two(g):
            return (
                (1.0 - alpha)
                - (g - sigma1 * alpha) ** 2 / (sigma2**2 * (1.0 - alpha))
                + SQRT2 * beta * g
            )

        vertex_two = sigma1 * alpha + sigma2**2 * (1.0 - alpha) * beta / SQRT2
        candidates = [
            (g, branch_one(g)) for g in (0.0, g_crit, min(max(vertex_one, 0.0), g_crit))
        ]
        candidates += [
            (g, branch_two(g)) for g in (g_max, min(max(vertex_two, g_crit), g_max))
        ]
    return max(candidates, key=lambda c: c[1])


@lru_cache(maxsize=None)
def _pd_moment_cached(s2: float, exponents: tuple[int, ...]) -> float:
    if all(e == 1 for e in exponents):
        return 1.0
    n = sorted(exponents, reverse=True)
    prev = tuple(sorted([n[0] - 1] + n[1:], reverse=True))
    prev_clean = tuple(e for e in prev if e >= 1)
    s_prev = sum(prev_clean)
    value = (s2 / s_prev) * _pd_moment_cached(s2, prev_clean)
    value += ((n[0] - 2) / s_prev) * _pd_moment_cached(s2, prev_clean) if n[0] >= 2 else 0.0
    for l in range(1, len(n)):
        merged = tuple(
            sorted([n[0] - 1 + n[l]] + n[1:l] + n[l + 1 :], reverse=True)
        )
        value += (n[l] / s_prev) * _pd_moment_cached(s2, merged)
    return value


def pd_moment(alpha: float, exponents) -> float:
    """Exact joint moment S(n_1, ..., n_m) of PD(alpha) from the recursion
    anchored at S(2) = 1 - alpha."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    exps = tuple(sorted((int(e) for e in exponents), reverse=True))
    if len(exps) < 1 or any(e < 1 for e in exps):
        raise ValueError("exponents must be integers >= 1")
    return _pd_moment_cached(1.0 - alpha, exps)


def _check_two_scale(sigma1: float, sigma2: float, alpha: float):
    if not (sigma1 > 0 and sigma2 > 0):
        raise ValueError("sigma parameters must be positive")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
