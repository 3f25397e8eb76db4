"""Poisson-Dirichlet mass partitions and their joint moments.

Atoms are realized as Gamma_i^(-1/alpha) for Gamma_i the arrival times of a
unit-rate Poisson process, already in decreasing order; the constant factor
of the intensity cancels under normalization.  The un-enumerated tail beyond
the k-th atom is carried analytically: conditionally on Gamma_k its expected
mass is exactly Gamma_k^(1 - 1/alpha) / (1/alpha - 1), which is added to the
normalizing constant but never materialized as an atom.  Sums over
unrestricted index tuples reduce to products of power sums p_r = sum_i xi_i^r
with p_1 = 1 exactly (the tail is part of the normalization), so truncation
only biases p_r for r >= 2, at order k^(1 - r/alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Relative truncation-bias budget for second and higher moments.
TAU_TAIL = 1e-6

_K_MIN = 256
_K_MAX = 1 << 20


def atom_budget(alpha: float, tau: float = TAU_TAIL) -> int:
    """Atom count making the order-2 tail bias k^(1-2/alpha)/(2/alpha - 1) < tau."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    k = ((2.0 / alpha - 1.0) * tau) ** (alpha / (alpha - 2.0))
    return int(min(max(math.ceil(k), _K_MIN), _K_MAX))


@dataclass(frozen=True)
class MassPartition:
    """Decreasing positive weights plus the analytic un-enumerated tail mass."""

    weights: np.ndarray
    tail_mass: float

    def __post_init__(self):
        if np.any(self.weights <= 0) or np.any(np.diff(self.weights) > 0):
            raise ValueError("weights must be positive and nonincreasing")
        if self.tail_mass < 0:
            raise ValueError("tail mass must be nonnegative")


def pd_weight_batch(alpha: float, k: int, rng: np.random.Generator, size: int = 1):
    """Normalized atom matrix (size, k) and tail-mass vector for PD(alpha)."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if k < 1:
        raise ValueError("need at least one atom")
    arrivals = np.cumsum(rng.standard_exponential((size, k)), axis=1)
    atoms = arrivals ** (-1.0 / alpha)
    tail = arrivals[:, -1] ** (1.0 - 1.0 / alpha) / (1.0 / alpha - 1.0)
    total = atoms.sum(axis=1) + tail
    return atoms / total[:, None], tail / total


def sample_pd(alpha: float, k: int, rng: np.random.Generator) -> MassPartition:
    """One Poisson-Dirichlet partition truncated to k atoms."""
    weights, tail = pd_weight_batch(alpha, k, rng, 1)
    return MassPartition(weights[0], float(tail[0]))


@dataclass(frozen=True)
class MomentSpec:
    """Exponent vector (n_1, ..., n_m) of a joint moment; s is its total."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        if len(self.exponents) < 1 or any(e < 1 for e in self.exponents):
            raise ValueError("exponents must be integers >= 1")

    @property
    def s(self) -> int:
        return sum(self.exponents)


def _power_sums(weights: np.ndarray, orders) -> dict[int, np.ndarray]:
    """p_r per sample for each requested order; p_1 is exactly 1."""
    sums = {}
    for r in sorted(set(orders)):
        if r == 1:
            sums[1] = np.ones(weights.shape[0])
        else:
            sums[r] = (weights**r).sum(axis=1)
    return sums


def _moment_stat(power_sums: dict[int, np.ndarray], exponents) -> np.ndarray:
    out = np.ones_like(power_sums[next(iter(power_sums))])
    for e in exponents:
        out = out * power_sums[e]
    return out


def moment_samples(
    alpha: float, exponents, budget: int, rng: np.random.Generator, k: int | None = None
) -> np.ndarray:
    """Per-sample values of the unrestricted multi-index sum for S(n_1..n_m).

    The sum over all index tuples factorizes into the product of power sums
    prod_j p_{n_j}, which is what is averaged.
    """
    spec = MomentSpec(tuple(int(e) for e in exponents))
    k = atom_budget(alpha) if k is None else k
    out = np.empty(budget)
    done = 0
    chunk = max(1, (1 << 22) // k)
    while done < budget:
        size = min(chunk, budget - done)
        weights, _ = pd_weight_batch(alpha, k, rng, size)
        sums = _power_sums(weights, spec.exponents)
        out[done : done + size] = _moment_stat(sums, spec.exponents)
        done += size
    return out


def moment_estimate(
    alpha: float, exponents, budget: int, rng: np.random.Generator, k: int | None = None
):
    """Monte Carlo estimate of S(n_1, ..., n_m) with its standard error."""
    vals = moment_samples(alpha, exponents, budget, rng, k)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(budget))


def _recursion_stat_specs(exponents) -> list[list[int]]:
    """Moment vectors entering the recursion residual at one exponent vector:
    the incremented target, the base, S(2), then the index merges."""
    n = list(exponents)
    incremented = [n[0] + 1] + n[1:]
    merged = [[n[0] + n[l]] + n[1:l] + n[l + 1 :] for l in range(1, len(n))]
    return [incremented, n, [2]] + merged


def recursion_component_samples(
    alpha: float, exponents, budget: int, rng: np.random.Generator, k: int | None = None
) -> np.ndarray:
    """Per-sample values of every moment statistic the recursion links,
    all from the same partitions; shape (budget, 3 + m - 1)."""
    spec = MomentSpec(tuple(int(e) for e in exponents))
    stat_specs = _recursion_stat_specs(spec.exponents)
    orders = {e for sp in stat_specs for e in sp}
    k = atom_budget(alpha) if k is None else k
    comps = np.empty((budget, len(stat_specs)))
    done = 0
    chunk = max(1, (1 << 22) // k)
    while done < budget:
        size = min(chunk, budget - done)
        weights, _ = pd_weight_batch(alpha, k, rng, size)
        sums = _power_sums(weights, orders)
        for j, sp in enumerate(stat_specs):
            comps[done : done + size, j] = _moment_stat(sums, sp)
        done += size
    return comps


def recursion_residual_from_components(comps: np.ndarray, exponents):
    """Residual of the recursion and its delta-method standard error.

    The only nonlinear term in the residual is the S(2)*S(n) product, so the
    gradient is explicit and the SE comes from the sample covariance of the
    component means.
    """
    n = list(int(e) for e in exponents)
    s = sum(n)
    m = comps.mean(axis=0)
    residual = m[0] - (m[2] / s) * m[1] - ((n[0] - 1) / s) * m[1]
    grad = np.zeros(comps.shape[1])
    grad[0] = 1.0
    grad[1] = -m[2] / s - (n[0] - 1) / s
    grad[2] = -m[1] / s
    for j, nl in enumerate(n[1:], start=3):
        residual -= (nl / s) * m[j]
        grad[j] = -nl / s
    cov = np.atleast_2d(np.cov(comps, rowvar=False, ddof=1))
    se = math.sqrt(max(float(grad @ cov @ grad), 0.0) / comps.shape[0])
    return float(residual), se


def recursion_residual(
    alpha: float, exponents, budget: int, rng: np.random.Generator, k: int | None = None
):
    """Residual of the moment recursion at one exponent vector, with SE.

    Estimates S(n_1+1, n_2..n_m) minus the recursion's right-hand side built
    from S(2), S(n), and the index-merged moments, all estimated from the
    same samples.
    """
    comps = recursion_component_samples(alpha, exponents, budget, rng, k)
    return recursion_residual_from_components(comps, exponents)


# coincidence patterns (flattened pair order) and their weights in power sums
_PAIR_PATTERNS = {
    2: [
        ((1.0,), lambda p: p[2]),
        ((0.0,), lambda p: 1.0 - p[2]),
    ],
    3: [
        ((1.0, 1.0, 1.0), lambda p: p[3]),
        ((1.0, 0.0, 0.0), lambda p: p[2] - p[3]),
        ((0.0, 1.0, 0.0), lambda p: p[2] - p[3]),
        ((0.0, 0.0, 1.0), lambda p: p[2] - p[3]),
        ((0.0, 0.0, 0.0), lambda p: 1.0 - 3.0 * p[2] + 2.0 * p[3]),
    ],
}


def pd_functional_samples(
    alpha: float,
    s: int,
    functional,
    budget: int,
    rng: np.random.Generator,
    k: int | None = None,
    tuple_draws: int = 64,
) -> np.ndarray:
    """Per-sample values of sum over index tuples of xi_{k_1}..xi_{k_s}
    F(coincidence indicators).

    For s <= 3 the inner sum is exact: coincidence patterns are grouped by
    set partitions and weighted by power sums.  For larger s the tuples are
    sampled from the weights, with the analytic tail treated as a reservoir
    of fresh atoms (two tail hits never coincide).
    """
    if s < 2:
        raise ValueError("need s >= 2")
    k = atom_budget(alpha) if k is None else k
    out = np.empty(budget)

    if s in _PAIR_PATTERNS:
        patterns = _PAIR_PATTERNS[s]
        f_vals = functional(np.asarray([pat for pat, _ in patterns]))
        done = 0
        chunk = max(1, (1 << 22) // k)
        while done < budget:
            size = min(chunk, budget - done)
            weights, _ = pd_weight_batch(alpha, k, rng, size)
            sums = _power_sums(weights, {2, 3})
            acc = np.zeros(size)
            for f_val, (_, weight_fn) in zip(f_vals, patterns):
                acc += f_val * weight_fn(sums)
            out[done : done + size] = acc
            done += size
        return out

    for i in range(budget):
        weights, tail = pd_weight_batch(alpha, k, rng, 1)
        probs = np.append(weights[0], tail[0])
        cum = np.cumsum(probs)
        cum[-1] = 1.0
        idx = np.searchsorted(cum, rng.random((tuple_draws, s)), side="right")
        in_tail = idx >= k
        idx = np.where(in_tail, k + np.arange(tuple_draws * s).reshape(tuple_draws, s), idx)
        coincidence = []
        for a in range(s):
            for b in range(a + 1, s):
                coincidence.append((idx[:, a] == idx[:, b]).astype(float))
        out[i] = float(np.mean(functional(np.stack(coincidence, axis=1))))
    return out


def pd_functional(
    alpha: float,
    s: int,
    functional,
    budget: int,
    rng: np.random.Generator,
    k: int | None = None,
):
    """Monte Carlo estimate of the replica functional under PD(alpha)."""
    vals = pd_functional_samples(alpha, s, functional, budget, rng, k)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(budget))
