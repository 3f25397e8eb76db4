"""Independent numerical oracles used to cross-check closed forms.

The quadrature route never touches the antiderivatives in kernels.py: it
integrates the raw strip integrand by adaptive Simpson after the substitution
z = 1/y, which maps hi = inf to z = 0 and leaves a bounded integrand

    max(0, min(1/z, 1/2) - ell)   on   z in [1/hi, 1/lo].

The integrand is non-smooth at z = 2 (i.e. y = 1/2) and z = 1/ell (y = ell),
so the integration is split there.
"""

from __future__ import annotations

import math

from .kernels import HeightBand


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 50) -> float:
    """Classic recursive adaptive Simpson rule with |error| <= tol on [a, b]."""
    if b <= a:
        return 0.0

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f1, f2, whole, eps, depth):
        x1 = 0.5 * (x0 + x2)
        xl, xr = 0.5 * (x0 + x1), 0.5 * (x1 + x2)
        fl, fr = f(xl), f(xr)
        left = simpson(x0, x1, f0, fl, f1)
        right = simpson(x1, x2, f1, fr, f2)
        if depth >= max_depth or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return recurse(x0, x1, f0, fl, f1, left, eps / 2.0, depth + 1) + recurse(
            x1, x2, f1, fr, f2, right, eps / 2.0, depth + 1
        )

    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    return recurse(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 0)


def strip_covariance_quadrature(
    ell: float, band: HeightBand, sigma2: float = 1.0, tol: float = 1e-10
) -> float:
    """Strip covariance by adaptive quadrature of the raw cone-section integrand."""
    if not 0 <= ell <= 0.5:
        raise ValueError("circle distance must lie in [0, 1/2]")
    if band.empty:
        return 0.0

    def integrand(z):
        width = min(1.0 / z, 0.5) if z > 0 else 0.5
        return max(0.0, width - ell)

    z_lo = 0.0 if math.isinf(band.hi) else 1.0 / band.hi
    z_hi = 1.0 / band.lo
    cuts = [z_lo, z_hi]
    for z_break in (2.0, math.inf if ell == 0 else 1.0 / ell):
        if z_lo < z_break < z_hi:
            cuts.append(z_break)
    cuts.sort()
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        total += adaptive_simpson(integrand, a, b, tol=tol)
    return sigma2 * total
