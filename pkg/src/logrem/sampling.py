"""Exact Gaussian samplers for the stationary field on the circle.

The covariance matrix of any strip is circulant, so its eigenvalues are the
DFT of the first row and an exact draw costs one FFT.  With lam the
eigenvalue vector and (a + ib) a standard complex normal vector,

    X = Re(FFT(sqrt(lam) * (a + ib))) / sqrt(n)

has covariance (1/n) sum_j lam_j cos(2 pi j (m - m')/n), the inverse DFT of
the row, i.e. exactly the target matrix; the imaginary part is an independent
copy and is used to serve even-sized batches at half cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import HeightBand, covariance_matrix, covariance_row, full_band
from .lattice import LatticeSpec

# Relative clamp threshold separating FFT round-off from a genuinely
# indefinite covariance row.
CLAMP_REL_TOL = 1e-9


class KernelNotPSDError(ValueError):
    """Covariance row has a negative eigenvalue beyond numerical noise."""


@dataclass(frozen=True)
class FieldSample:
    """One realization of a strip field on the lattice."""

    values: np.ndarray
    lattice: LatticeSpec
    band: HeightBand

    def __post_init__(self):
        if self.values.shape != (self.lattice.n,):
            raise ValueError("values length must equal the lattice size")


@dataclass(frozen=True)
class SpectralSampler:
    """Exact O(n log n) sampler for one strip, immutable and thread-safe."""

    lattice: LatticeSpec
    band: HeightBand
    eigenvalues: np.ndarray
    clamp_count: int = 0
    clamp_max: float = 0.0
    _sqrt_eig: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_sqrt_eig", np.sqrt(self.eigenvalues))

    @property
    def n(self) -> int:
        return self.lattice.n

    def draw_values(self, rng: np.random.Generator, size: int = 1) -> np.ndarray:
        """Draw `size` independent fields, shape (size, n), exact in law."""
        n = self.n
        pairs = (size + 1) // 2
        z = rng.standard_normal((pairs, n)) + 1j * rng.standard_normal((pairs, n))
        spec = np.fft.fft(self._sqrt_eig * z, axis=1) / math.sqrt(n)
        return np.concatenate([spec.real, spec.imag])[:size]


def build_spectral_sampler(lattice: LatticeSpec, band: HeightBand) -> SpectralSampler:
    """Diagonalize the circulant covariance row of a strip by DFT.

    Negative eigenvalues within CLAMP_REL_TOL of the largest one are treated
    as round-off and clamped to zero; anything larger signals a kernel bug
    and raises KernelNotPSDError.
    """
    row = covariance_row(lattice, band)
    spec = np.fft.fft(row)
    scale = max(float(np.max(np.abs(spec.real))), 1.0)
    if float(np.max(np.abs(spec.imag))) > CLAMP_REL_TOL * scale:
        raise KernelNotPSDError("circulant row is not symmetric: complex eigenvalues")
    eig = spec.real.copy()
    tau = CLAMP_REL_TOL * max(float(eig.max()), 0.0)
    low = float(eig.min())
    if low < -tau:
        raise KernelNotPSDError(
            f"covariance row not positive semidefinite: eigenvalue {low} < -{tau}"
        )
    neg = eig < 0
    clamp_count = int(neg.sum())
    clamp_max = float(-eig.min()) if clamp_count else 0.0
    eig[neg] = 0.0
    return SpectralSampler(lattice, band, eig, clamp_count, clamp_max)


def sample_field(sampler: SpectralSampler, rng: np.random.Generator) -> FieldSample:
    """One centered Gaussian field with the exact strip covariance."""
    return FieldSample(sampler.draw_values(rng, 1)[0], sampler.lattice, sampler.band)


def scale_bands(lattice: LatticeSpec, cutpoints) -> list[HeightBand]:
    """Disjoint bands realizing the scale increments for the given cutpoints.

    cutpoints t_1 < ... < t_K = 1 split the field into the top band
    [eps^t_1, inf) and the strips [eps^t_k, eps^t_{k-1}); the sitewise sum of
    independent draws from these bands is the full field.
    """
    ts = [float(t) for t in cutpoints]
    if not ts or any(b <= a for a, b in zip(ts[:-1], ts[1:])):
        raise ValueError("cutpoints must be strictly increasing")
    if not 0 < ts[0] <= 1 or ts[-1] != 1.0:
        raise ValueError("cutpoints must lie in (0, 1] and end at 1")
    heights = [lattice.eps**t for t in ts]
    bands = [HeightBand(heights[0], math.inf)]
    for k in range(1, len(ts)):
        bands.append(HeightBand(heights[k], heights[k - 1]))
    return bands


def sample_field_scales(
    lattice: LatticeSpec, cutpoints, rng: np.random.Generator
) -> list[FieldSample]:
    """Independent strip increments whose partial sums realize the field at
    every cutpoint scale."""
    samples = []
    for band in scale_bands(lattice, cutpoints):
        sampler = build_spectral_sampler(lattice, band)
        samples.append(sample_field(sampler, rng))
    return samples


class DenseSampler:
    """O(n^3) reference sampler from a dense matrix factorization.

    Used as an oracle against the spectral route; Cholesky with an
    eigendecomposition fallback for positive semidefinite strips.
    """

    MAX_N = 1024

    def __init__(self, lattice: LatticeSpec, band: HeightBand):
        if lattice.n > self.MAX_N:
            raise ValueError(f"dense oracle capped at n <= {self.MAX_N}")
        self.lattice = lattice
        self.band = band
        cov = covariance_matrix(lattice, band)
        try:
            self._factor = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            w, v = np.linalg.eigh(cov)
            if w.min() < -CLAMP_REL_TOL * max(w.max(), 1.0):
                raise KernelNotPSDError(f"dense covariance indefinite: {w.min()}")
            self._factor = v * np.sqrt(np.clip(w, 0.0, None))

    @property
    def n(self) -> int:
        return self.lattice.n

    def draw_values(self, rng: np.random.Generator, size: int = 1) -> np.ndarray:
        return rng.standard_normal((size, self.n)) @ self._factor.T
