"""Closed-form covariance kernels for horizontal strips of the half-cylinder.

The field on the circle is built from a white-noise measure with intensity
y^-2 dx dy integrated over cone-like sets of half-width min(y, 1/2).  Two
cones at circle distance ell overlap, inside the strip [lo, hi), with section
width max(0, min(y, 1/2) - ell), so every covariance reduces to

    sigma2 * integral over [lo, hi) of max(0, min(y, 1/2) - ell) / y^2 dy,

which this module evaluates in closed form (antiderivatives log y + ell/y
below 1/2 and -(1/2 - ell)/y above).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeSpec


@dataclass(frozen=True)
class HeightBand:
    """Horizontal strip y in [lo, hi) of the half-cylinder; hi may be inf.

    lo == hi is allowed as an explicitly degenerate (empty) band and yields a
    zero kernel.
    """

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo > 0:
            raise ValueError(f"band.lo must be > 0, got {self.lo}")
        if not self.hi >= self.lo:
            raise ValueError(f"band must have hi >= lo, got [{self.lo}, {self.hi})")

    @property
    def empty(self) -> bool:
        return self.hi == self.lo


def full_band(lattice: LatticeSpec) -> HeightBand:
    """The band [1/n, inf) realizing the whole field."""
    return HeightBand(lattice.eps, math.inf)


def strip_covariance(ell, band: HeightBand, sigma2: float = 1.0):
    """Covariance of one strip between two sites at circle distance ell.

    ell may be a scalar or an array with values in [0, 1/2]; ell = 0 gives the
    strip variance.
    """
    ell_arr = np.asarray(ell, dtype=float)
    if np.any((ell_arr < 0) | (ell_arr > 0.5)):
        raise ValueError("circle distance must lie in [0, 1/2]")
    lo, hi = band.lo, band.hi
    out = np.zeros_like(ell_arr)
    if not band.empty:
        # cone section grows linearly below y = 1/2
        a = np.maximum(lo, ell_arr)
        b = min(hi, 0.5)
        live = b > a
        a_ = np.where(live, a, 1.0)
        out += np.where(live, math.log(b) - np.log(a_) + ell_arr * (1.0 / b - 1.0 / a_), 0.0)
        # constant section of width 1/2 - ell above y = 1/2
        a2 = max(lo, 0.5)
        if hi > a2:
            inv_hi = 0.0 if math.isinf(hi) else 1.0 / hi
            out += (0.5 - ell_arr) * (1.0 / a2 - inv_hi)
    out = sigma2 * out
    if out.ndim == 0:
        return float(out)
    return out


def covariance_row(lattice: LatticeSpec, band: HeightBand) -> np.ndarray:
    """First row of the circulant covariance matrix of one strip.

    Entry d is the kernel at circle distance min(d, n-d)/n; entry 0 is the
    strip variance, and the row is symmetric under d -> n-d.
    """
    n = lattice.n
    idx = np.arange(n)
    dist = np.minimum(idx, n - idx) / n
    return strip_covariance(dist, band, lattice.sigma2)


def covariance_matrix(lattice: LatticeSpec, band: HeightBand) -> np.ndarray:
    """Dense n-by-n covariance matrix assembled from the circulant row."""
    row = covariance_row(lattice, band)
    n = lattice.n
    idx = np.arange(n)
    return row[np.abs(idx[:, None] - idx[None, :])]
