"""Discrete circle geometry: sites, circle distance and overlaps."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LatticeSpec:
    """The discrete circle of n sites i/n, i = 0..n-1, with variance parameter sigma.

    n must be at least 4 so that the site spacing 1/n stays below 1/2, which the
    closed-form covariance requires.
    """

    n: int
    sigma: float = 1.0

    def __post_init__(self):
        if self.n < 4:
            raise ValueError(f"need n >= 4, got {self.n}")
        if not self.sigma > 0:
            raise ValueError(f"need sigma > 0, got {self.sigma}")

    @property
    def eps(self) -> float:
        return 1.0 / self.n

    @property
    def log_n(self) -> float:
        return math.log(self.n)

    @property
    def sigma2(self) -> float:
        return self.sigma * self.sigma

    def sites(self) -> np.ndarray:
        return np.arange(self.n) / self.n


def index_distance(x, y, n):
    """Integer circle distance min(|x-y|, n-|x-y|) between site indices."""
    d = np.abs(np.asarray(x) - np.asarray(y))
    return np.minimum(d, n - d)


def circle_distance(x: int, y: int, n: int) -> float:
    """Distance min(|x-y|, n-|x-y|)/n between sites x/n and y/n, in [0, 1/2]."""
    if not (0 <= x < n and 0 <= y < n):
        raise ValueError(f"site indices must lie in [0, {n}), got {x}, {y}")
    return int(index_distance(x, y, n)) / n


def overlap_from_index_distance(d, n):
    """Overlap -log(d/n)/log(n) from integer distances; 1 on the diagonal d = 0.

    Works on scalars and arrays.  Computed as (log n - log d)/log n on the
    integer distance so that nearest neighbours (d = 1) give exactly 1.
    """
    d = np.asarray(d, dtype=float)
    log_n = math.log(n)
    out = np.where(d > 0, (log_n - np.log(np.maximum(d, 1.0))) / log_n, 1.0)
    if out.ndim == 0:
        return float(out)
    return out


def overlap(x: int, y: int, n: int) -> float:
    """Normalized correlation proxy between two sites; diagonal set to 1."""
    if x == y:
        return 1.0
    return float(overlap_from_index_distance(index_distance(x, y, n), n))
