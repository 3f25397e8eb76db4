"""Gibbs measures, free energies, replica overlaps and their estimators.

Estimators follow a two-level Monte Carlo design: an outer average over
independent field draws and an inner average over replica draws from the
Gibbs weights of each field.  Functions named *_samples return one inner
average per field so the harness can parallelize and reduce them
deterministically; the *_estimate wrappers collapse to (mean, standard error)
with the error taken across fields only, where the variance dominates.

Functionals F of s replicas act on the s(s-1)/2 pairwise overlaps flattened
in row-major pair order (1,2), (1,3), ..., (s-1,s); they must be vectorized
over a leading batch axis, i.e. map (draws, pairs) -> (draws,).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import index_distance, overlap_from_index_distance


def log_partition(values: np.ndarray, beta: float):
    """log sum_x exp(beta * X_x), max-shifted for stability; batched on the
    last axis."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    values = np.asarray(values, dtype=float)
    m = values.max(axis=-1)
    out = beta * m + np.log(np.exp(beta * (values - m[..., None])).sum(axis=-1))
    if out.ndim == 0:
        return float(out)
    return out


def gibbs_weights(values: np.ndarray, beta: float):
    """Normalized weights exp(beta X)/Z and log Z for one field."""
    values = np.asarray(values, dtype=float)
    shifted = beta * (values - values.max())
    w = np.exp(shifted)
    total = w.sum()
    return w / total, float(beta * values.max() + math.log(total))


def free_energy(values: np.ndarray, beta: float, n: int | None = None):
    """f = log Z / log n for one field (or a batch on the last axis)."""
    values = np.asarray(values, dtype=float)
    size = values.shape[-1] if n is None else n
    return log_partition(values, beta) / math.log(size)


@dataclass(frozen=True)
class GibbsEnsemble:
    """Field values with their inverse temperature, log Z and weights."""

    values: np.ndarray
    beta: float
    log_z: float
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]


def gibbs_ensemble(values: np.ndarray, beta: float) -> GibbsEnsemble:
    w, log_z = gibbs_weights(values, beta)
    return GibbsEnsemble(np.asarray(values, dtype=float), beta, log_z, w)


def replica_indices(weights: np.ndarray, rng: np.random.Generator, shape) -> np.ndarray:
    """I.i.d. site indices from the weights by inverse-CDF binary search."""
    cum = np.cumsum(weights)
    cum[-1] = 1.0  # guard the last bin against round-off
    return np.searchsorted(cum, rng.random(shape), side="right")


def overlap_matrix(indices: np.ndarray, n: int) -> np.ndarray:
    """Symmetric overlap matrix of sampled sites with unit diagonal."""
    d = index_distance(indices[:, None], indices[None, :], n)
    q = overlap_from_index_distance(d, n)
    np.fill_diagonal(q, 1.0)
    return q


@dataclass(frozen=True)
class OverlapDraw:
    replica_sites: np.ndarray
    overlaps: np.ndarray


def sample_replicas(ensemble: GibbsEnsemble, s: int, rng: np.random.Generator) -> OverlapDraw:
    """s replicas from the product Gibbs measure with their overlap matrix."""
    if s < 2:
        raise ValueError("need at least two replicas")
    idx = replica_indices(ensemble.weights, rng, s)
    return OverlapDraw(idx, overlap_matrix(idx, ensemble.n))


def pair_overlaps(indices: np.ndarray, n: int) -> np.ndarray:
    """Pairwise overlaps of an index batch (draws, s) flattened to
    (draws, s(s-1)/2) in pair order (1,2), (1,3), ..., (s-1,s)."""
    s = indices.shape[1]
    cols = []
    for a in range(s):
        for b in range(a + 1, s):
            d = index_distance(indices[:, a], indices[:, b], n)
            cols.append(overlap_from_index_distance(d, n))
    return np.stack(cols, axis=1)


# ---------------------------------------------------------------------------
# two-level Monte Carlo estimators


def free_energy_samples(sampler, beta: float, budget: int, rng: np.random.Generator) -> np.ndarray:
    """One f value per independent field draw."""
    out = np.empty(budget)
    step = max(1, 65536 // sampler.n)
    done = 0
    while done < budget:
        size = min(step, budget - done)
        values = sampler.draw_values(rng, size)
        out[done : done + size] = free_energy(values, beta, sampler.n)
        done += size
    return out


def free_energy_estimate(sampler, beta: float, budget: int, rng: np.random.Generator):
    """Mean and standard error of f over `budget` field draws."""
    if budget < 2:
        raise ValueError("need at least two fields for a standard error")
    f = free_energy_samples(sampler, beta, budget, rng)
    return float(f.mean()), float(f.std(ddof=1) / math.sqrt(budget))


def overlap_cdf_samples(
    sampler, beta: float, q_grid, budget: int, replicas: int, rng: np.random.Generator
) -> np.ndarray:
    """Per-field inner means of 1{q_12 <= q} on the grid, shape (budget, len(q_grid))."""
    q_grid = np.asarray(q_grid, dtype=float)
    out = np.empty((budget, q_grid.size))
    for i in range(budget):
        w, _ = gibbs_weights(sampler.draw_values(rng, 1)[0], beta)
        idx = replica_indices(w, rng, (replicas, 2))
        q = pair_overlaps(idx, sampler.n)[:, 0]
        out[i] = (q[:, None] <= q_grid[None, :]).mean(axis=0)
    return out


def overlap_cdf_estimate(
    sampler, beta: float, q_grid, budget: int, replicas: int, rng: np.random.Generator
):
    """Estimates of the averaged overlap distribution function with SEs."""
    per_field = overlap_cdf_samples(sampler, beta, q_grid, budget, replicas, rng)
    return per_field.mean(axis=0), per_field.std(axis=0, ddof=1) / math.sqrt(budget)


def overlap_functional_samples(
    sampler, beta: float, s: int, functional, budget: int, replicas: int, rng: np.random.Generator
) -> np.ndarray:
    """Per-field inner means of F(pairwise overlaps of s replicas)."""
    out = np.empty(budget)
    for i in range(budget):
        w, _ = gibbs_weights(sampler.draw_values(rng, 1)[0], beta)
        idx = replica_indices(w, rng, (replicas, s))
        out[i] = float(np.mean(functional(pair_overlaps(idx, sampler.n))))
    return out


def overlap_functional_estimate(
    sampler, beta: float, s: int, functional, budget: int, replicas: int, rng: np.random.Generator
):
    vals = overlap_functional_samples(sampler, beta, s, functional, budget, replicas, rng)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(budget))


def overlap_integral_samples(
    sampler, beta: float, alpha: float, budget: int, replicas: int, rng: np.random.Generator
) -> np.ndarray:
    """Per-field inner means of beta * (1 - max(alpha, q_12)).

    This equals beta times the exact integral over [alpha, 1] of the empirical
    overlap distribution function, the replica-route side of the derivative
    cross-check.
    """
    out = np.empty(budget)
    for i in range(budget):
        w, _ = gibbs_weights(sampler.draw_values(rng, 1)[0], beta)
        idx = replica_indices(w, rng, (replicas, 2))
        q = pair_overlaps(idx, sampler.n)[:, 0]
        out[i] = beta * float(np.mean(1.0 - np.maximum(alpha, q)))
    return out


def ultrametric_indicator(q: np.ndarray) -> np.ndarray:
    """1{q_12 >= min(q_13, q_23)} on flattened triples (draws, 3)."""
    return (q[:, 0] >= np.minimum(q[:, 1], q[:, 2])).astype(float)


def high_points(values: np.ndarray, gamma: float, n: int | None = None):
    """Count and log-count exponent of sites exceeding sqrt(2)*gamma*log n.

    The threshold is exact, counts use >=, and the exponent log|H|/log n is
    nan when the set is empty.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    values = np.asarray(values, dtype=float)
    if n is None:
        n = values.shape[-1]
    count = int((values >= math.sqrt(2.0) * gamma * math.log(n)).sum())
    exponent = math.log(count) / math.log(n) if count > 0 else math.nan
    return count, exponent


def high_point_samples(sampler, gamma: float, budget: int, rng: np.random.Generator) -> np.ndarray:
    """(count, exponent) per field, shape (budget, 2)."""
    out = np.empty((budget, 2))
    step = max(1, 65536 // sampler.n)
    done = 0
    while done < budget:
        values = sampler.draw_values(rng, min(step, budget - done))
        for row in values:
            count, exponent = high_points(row, gamma, sampler.n)
            out[done] = (count, exponent)
            done += 1
    return out


# ---------------------------------------------------------------------------
# Ghirlanda-Guerra residual

GG_COMPONENT_DOC = "columns: lhs, q12, F, q1k*F for k = 2..s"


def gg_component_samples(
    sampler, beta: float, s: int, functional, budget: int, replicas: int, rng: np.random.Generator
) -> np.ndarray:
    """Per-field inner means of every term entering the identity residual.

    Each inner draw uses s+1 replicas: the first s feed F and the q_{1k}
    terms, the extra one the left-hand side q_{1,s+1} F.
    """
    if s < 2:
        raise ValueError("need s >= 2")
    out = np.empty((budget, 2 + s))
    for i in range(budget):
        w, _ = gibbs_weights(sampler.draw_values(rng, 1)[0], beta)
        idx = replica_indices(w, rng, (replicas, s + 1))
        f_vals = functional(pair_overlaps(idx[:, :s], sampler.n))
        q_extra = overlap_from_index_distance(
            index_distance(idx[:, 0], idx[:, s], sampler.n), sampler.n
        )
        q_12 = overlap_from_index_distance(
            index_distance(idx[:, 0], idx[:, 1], sampler.n), sampler.n
        )
        out[i, 0] = np.mean(q_extra * f_vals)
        out[i, 1] = np.mean(q_12)
        out[i, 2] = np.mean(f_vals)
        for k in range(2, s + 1):
            q_1k = overlap_from_index_distance(
                index_distance(idx[:, 0], idx[:, k - 1], sampler.n), sampler.n
            )
            out[i, 1 + k] = np.mean(q_1k * f_vals)
    return out


def gg_residual_from_components(components: np.ndarray, s: int):
    """Residual of the identity and its delta-method standard error.

    residual = lhs - (1/s) E[q12] E[F] - (1/s) sum_k E[q1k F], evaluated at
    the field-level means; only the product term is nonlinear, so the
    gradient is explicit.
    """
    budget = components.shape[0]
    m = components.mean(axis=0)
    lhs, q12, f_mean = m[0], m[1], m[2]
    cross = m[3 : 1 + s + 1]
    residual = lhs - (q12 * f_mean) / s - cross.sum() / s
    grad = np.zeros_like(m)
    grad[0] = 1.0
    grad[1] = -f_mean / s
    grad[2] = -q12 / s
    grad[3:] = -1.0 / s
    cov = np.cov(components, rowvar=False, ddof=1)
    se = math.sqrt(max(float(grad @ cov @ grad), 0.0) / budget)
    return float(residual), se


def gg_residual(
    sampler, beta: float, s: int, functional, budget: int, replicas: int, rng: np.random.Generator
):
    """(residual, se, scale) where scale = 1/log n is the expected error size."""
    comps = gg_component_samples(sampler, beta, s, functional, budget, replicas, rng)
    residual, se = gg_residual_from_components(comps, s)
    return residual, se, 1.0 / math.log(sampler.n)
