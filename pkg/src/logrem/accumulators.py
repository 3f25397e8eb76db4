"""Compensated accumulators for order-insensitive Monte Carlo reductions."""

from __future__ import annotations

import math

import numpy as np


class KahanSum:
    """Kahan-compensated running sum."""

    def __init__(self):
        self.total = 0.0
        self._carry = 0.0

    def add(self, x: float):
        y = x - self._carry
        t = self.total + y
        self._carry = (t - self.total) - y
        self.total = t

    def add_many(self, xs):
        for x in np.asarray(xs, dtype=float).ravel():
            self.add(float(x))


class MeanAccumulator:
    """Streaming mean/SE with compensated sums; merges preserve determinism
    as long as merge order is fixed."""

    def __init__(self):
        self._sum = KahanSum()
        self._sumsq = KahanSum()
        self.count = 0

    def add_many(self, xs):
        xs = np.asarray(xs, dtype=float).ravel()
        self._sum.add_many(xs)
        self._sumsq.add_many(xs * xs)
        self.count += xs.size

    def merge(self, other: "MeanAccumulator"):
        self._sum.add(other._sum.total)
        self._sum.add(-other._sum._carry)
        self._sumsq.add(other._sumsq.total)
        self._sumsq.add(-other._sumsq._carry)
        self.count += other.count

    @property
    def mean(self) -> float:
        if self.count == 0:
            raise ValueError("empty accumulator")
        return self._sum.total / self.count

    def variance(self) -> float:
        if self.count < 2:
            raise ValueError("need at least two values")
        m = self.mean
        return max(self._sumsq.total / self.count - m * m, 0.0) * self.count / (self.count - 1)

    @property
    def se(self) -> float:
        return math.sqrt(self.variance() / self.count)


def mean_and_se(values) -> tuple[float, float]:
    acc = MeanAccumulator()
    acc.add_many(values)
    return acc.mean, acc.se
