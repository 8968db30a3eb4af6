"""Brute-force references used to validate the closed forms and the propagators."""

from __future__ import annotations

import cmath
import math

import numpy as np

from .scattering import MomentumDistribution


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 50):
    """Adaptive Simpson quadrature of a (possibly complex) scalar function.

    Intervals are split until the Richardson estimate of the local error is
    below the share of ``tol`` allotted to them.
    """

    def simpson(fa, fm, fb, h):
        return h / 6 * (fa + 4 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        diff = left + right - whole
        if depth >= max_depth or abs(diff) <= 15 * tol:
            return left + right + diff / 15
        return (recurse(a, m, fa, flm, fm, left, tol / 2, depth + 1)
                + recurse(m, b, fm, frm, fb, right, tol / 2, depth + 1))

    # start from a few panels so an oscillating integrand cannot fool the first estimate
    edges = np.linspace(a, b, 9)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        flo, fhi, fmid = f(lo), f(hi), f(0.5 * (lo + hi))
        total += recurse(lo, hi, flo, fmid, fhi, simpson(flo, fmid, fhi, hi - lo), tol / 8, 0)
    return total


def characteristic_quadrature(dist: MomentumDistribution, dp: float, tol: float = 1e-10) -> complex:
    """``int_0^{2 k_i} P(u) exp(i d_p u) du`` by adaptive Simpson in ``t = u / k_i``."""
    k_i = dist.k_i

    def integrand(t):
        return k_i * dist.density(t * k_i) * cmath.exp(1j * dp * k_i * t)

    return adaptive_simpson(integrand, 0.0, 2.0, tol)


def real_erf_quadrature(x: float, tol: float = 1e-13) -> float:
    """``(2/sqrt(pi)) int_0^x exp(-t^2) dt`` by adaptive Simpson."""
    if x == 0:
        return 0.0
    val = adaptive_simpson(lambda t: math.exp(-t * t), 0.0, abs(x), tol)
    return math.copysign(2 / math.sqrt(math.pi) * val, x)
