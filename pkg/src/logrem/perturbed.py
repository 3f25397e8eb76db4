"""Two-scale perturbed fields, the ancestor map and the hierarchical
comparison field.

A perturbation splits the field at the scale height eps^alpha into a top
strip scaled by sigma1 and a bottom strip scaled by sigma2.  The split height
is rounded to 1/M for M = round(n^alpha) so that it coincides with an
achievable coarse sublattice; the realized exponent rounded_alpha =
log(M)/log(n) is what all closed-form identities hold for exactly, and is
reported alongside the requested alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import HeightBand
from .lattice import LatticeSpec
from .sampling import FieldSample, SpectralSampler, build_spectral_sampler


@dataclass(frozen=True)
class PerturbationSpec:
    """Parameters (sigma1, sigma2, alpha) of a two-scale perturbed field."""

    lattice: LatticeSpec
    sigma1: float
    sigma2: float
    alpha: float

    def __post_init__(self):
        if not (self.sigma1 > 0 and self.sigma2 > 0):
            raise ValueError("sigma1 and sigma2 must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def case_tag(self) -> int:
        # case 1 covers the boundary sigma1 == sigma2
        return 1 if self.sigma1 <= self.sigma2 else 2

    @property
    def v12(self) -> float:
        return self.sigma1**2 * self.alpha + self.sigma2**2 * (1.0 - self.alpha)

    @property
    def coarse_size(self) -> int:
        m = round(self.lattice.n**self.alpha)
        return min(max(m, 1), self.lattice.n)

    @property
    def rounded_alpha(self) -> float:
        return math.log(self.coarse_size) / self.lattice.log_n

    @property
    def split_height(self) -> float:
        return 1.0 / self.coarse_size

    def top_band(self) -> HeightBand:
        return HeightBand(self.split_height, math.inf)

    def bottom_band(self) -> HeightBand:
        return HeightBand(self.lattice.eps, self.split_height)


@dataclass(frozen=True)
class TwoScaleSample:
    """A realization split into its top and bottom strip parts."""

    top: FieldSample
    bottom: FieldSample
    values: np.ndarray  # sigma1 * top + sigma2 * bottom, per site
    spec: PerturbationSpec


class TwoScaleSampler:
    """Draws the perturbed field together with its two strip components."""

    def __init__(self, spec: PerturbationSpec):
        self.spec = spec
        self.top = build_spectral_sampler(spec.lattice, spec.top_band())
        self.bottom = build_spectral_sampler(spec.lattice, spec.bottom_band())

    @property
    def n(self) -> int:
        return self.spec.lattice.n

    def draw_parts(self, rng: np.random.Generator, size: int = 1):
        """(top, bottom, combined) arrays of shape (size, n); strips independent."""
        top = self.top.draw_values(rng, size)
        bottom = self.bottom.draw_values(rng, size)
        return top, bottom, self.spec.sigma1 * top + self.spec.sigma2 * bottom

    def draw_values(self, rng: np.random.Generator, size: int = 1) -> np.ndarray:
        return self.draw_parts(rng, size)[2]


def sample_two_scale(spec: PerturbationSpec, rng: np.random.Generator) -> TwoScaleSample:
    sampler = TwoScaleSampler(spec)
    top, bottom, values = sampler.draw_parts(rng, 1)
    return TwoScaleSample(
        FieldSample(top[0], spec.lattice, spec.top_band()),
        FieldSample(bottom[0], spec.lattice, spec.bottom_band()),
        values[0],
        spec,
    )


def ancestor_indices(n: int, coarse_size: int) -> np.ndarray:
    """Coarse index of the nearest coarse site for every fine site.

    Site i/n maps to the nearest j/coarse_size on the circle; exact midpoint
    ties go to the right neighbour (larger coordinate mod 1).  Pure integer
    arithmetic, so ties are exact.
    """
    if coarse_size < 1:
        raise ValueError("coarse lattice must be nonempty")
    i = np.arange(n, dtype=np.int64)
    return ((2 * i * coarse_size + n) // (2 * n)) % coarse_size


def ancestor_map(x: int, alpha: float, lattice: LatticeSpec) -> int:
    """Nearest coarse-lattice index of site x (ties resolve to the right)."""
    spec = PerturbationSpec(lattice, 1.0, 1.0, alpha)
    return int(ancestor_indices(lattice.n, spec.coarse_size)[x])


@dataclass(frozen=True)
class HierarchicalSample:
    """A draw of the tree-structured comparison field."""

    ancestors: np.ndarray  # one value per coarse site
    leaves: np.ndarray  # one value per fine site
    values: np.ndarray  # ancestors[pi(x)] + leaves[x]
    spec: PerturbationSpec


def hierarchical_variances(spec: PerturbationSpec) -> tuple[float, float]:
    """Variances of the ancestor and leaf Gaussians.

    Chosen so the per-site variance matches the two-scale field exactly while
    every cross covariance is dominated by it.  The ancestor variance is only
    positive once the coarse lattice is fine enough (coarse_size > 2e).
    """
    log_n = spec.lattice.log_n
    a = spec.rounded_alpha
    var_anc = spec.sigma1**2 * (a * log_n - math.log(2.0) - 1.0)
    var_leaf = spec.sigma2**2 * (1.0 - a) * log_n + 2.0 * spec.sigma1**2
    return var_anc, var_leaf


class HierarchicalSampler:
    """I.i.d. ancestor/leaf Gaussians assembled through the ancestor map."""

    def __init__(self, spec: PerturbationSpec):
        var_anc, var_leaf = hierarchical_variances(spec)
        if not var_anc > 0:
            raise ValueError(
                f"ancestor variance {var_anc} <= 0: lattice too small for alpha={spec.alpha}"
            )
        self.spec = spec
        self.sd_anc = math.sqrt(var_anc)
        self.sd_leaf = math.sqrt(var_leaf)
        self.pi = ancestor_indices(spec.lattice.n, spec.coarse_size)

    @property
    def n(self) -> int:
        return self.spec.lattice.n

    def draw_parts(self, rng: np.random.Generator, size: int = 1):
        anc = self.sd_anc * rng.standard_normal((size, self.spec.coarse_size))
        leaf = self.sd_leaf * rng.standard_normal((size, self.n))
        return anc, leaf, anc[:, self.pi] + leaf

    def draw_values(self, rng: np.random.Generator, size: int = 1) -> np.ndarray:
        return self.draw_parts(rng, size)[2]


def sample_hierarchical(spec: PerturbationSpec, rng: np.random.Generator) -> HierarchicalSample:
    anc, leaf, values = HierarchicalSampler(spec).draw_parts(rng, 1)
    return HierarchicalSample(anc[0], leaf[0], values[0], spec)


def hierarchical_covariance(spec: PerturbationSpec, share_ancestor: bool) -> float:
    """Exact covariance of the comparison field between two distinct sites."""
    if not share_ancestor:
        return 0.0
    return hierarchical_variances(spec)[0]


def bk_lhs_samples(
    lattice: LatticeSpec,
    alpha: float,
    beta: float,
    budget: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Per-field values of the covariance-route derivative estimator.

    For the unperturbed field split at alpha (unit sigmas, the u = 0 point of
    the one-parameter perturbation family), returns one value

        sum_x G(x) * bottom_x / log n

    per field, where G are the Gibbs weights of the combined field and bottom
    is the sub-alpha increment.  This route has no discretization bias, unlike
    a finite difference in the perturbation strength.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    from .gibbs import gibbs_weights

    sampler = TwoScaleSampler(PerturbationSpec(lattice, 1.0, 1.0, alpha))
    out = np.empty(budget)
    for i in range(budget):
        _, bottom, values = sampler.draw_parts(rng, 1)
        w, _ = gibbs_weights(values[0], beta)
        out[i] = float(w @ bottom[0]) / lattice.log_n
    return out


def bk_derivative_lhs(
    lattice: LatticeSpec,
    alpha: float,
    beta: float,
    budget: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Mean and standard error of the covariance-route derivative estimate."""
    vals = bk_lhs_samples(lattice, alpha, beta, budget, rng)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(len(vals)))


def bk_derivative_fd(
    lattice: LatticeSpec,
    alpha: float,
    beta: float,
    budget: int,
    rng: np.random.Generator,
    h: float = 0.05,
) -> tuple[float, float]:
    """Secondary finite-difference oracle for the same derivative.

    Estimates d/du E log Z(u) / (beta * log n) at u = 0 by central differences
    at steps h and h/2 with Richardson extrapolation, using common random
    numbers: the same strip draws feed every u, so the difference is exact per
    field up to the O(h^2) (O(h^4) after extrapolation) bias.
    """
    from .gibbs import log_partition

    sampler = TwoScaleSampler(PerturbationSpec(lattice, 1.0, 1.0, alpha))
    scale = beta * lattice.log_n
    diffs = np.empty((budget, 2))
    for i in range(budget):
        top, bottom, _ = sampler.draw_parts(rng, 1)
        for j, step in enumerate((h, h / 2.0)):
            up = log_partition(top[0] + (1.0 + step) * bottom[0], beta)
            down = log_partition(top[0] + (1.0 - step) * bottom[0], beta)
            diffs[i, j] = (up - down) / (2.0 * step) / scale
    richardson = (4.0 * diffs[:, 1] - diffs[:, 0]) / 3.0
    return float(richardson.mean()), float(richardson.std(ddof=1) / math.sqrt(budget))
