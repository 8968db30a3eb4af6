"""Closed-form ensemble visibility and phase for the uniform, dipole and Gaussian laws.

Every result is the characteristic function ``chi(d_p) = int P(u) exp(i d_p u) du``
written as ``V exp(i phi)``. For the two laws symmetric about ``k_i`` the phase is
``d_p k_i`` and ``V`` is real and signed; for the truncated Gaussian ``V = |chi|``.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

#: Largest |z| accepted by :func:`erf_complex`.
ERF_DOMAIN = 20.0
#: |Re z| at or above which the continued fraction for erfc is used.
ERF_SWITCH = 2.0

_TWO_OVER_SQRT_PI = 2 / math.sqrt(math.pi)


class ErfDomainError(ValueError):
    pass


def _erf_series(z: complex) -> complex:
    # erf z = 2/sqrt(pi) sum (-1)^n z^(2n+1) / (n! (2n+1))
    z2 = z * z
    term = z  # (-1)^n z^(2n+1) / n!
    total = z
    n = 0
    while True:
        n += 1
        term *= -z2 / n
        add = term / (2 * n + 1)
        total += add
        if abs(add) <= 1e-17 * abs(total) and n > abs(z2):
            break
        if n > 5000:
            break
    return _TWO_OVER_SQRT_PI * total


def _erfc_cf(z: complex) -> complex:
    """erfc for Re z > 0 from the Laplace continued fraction, Lentz evaluation.

    erfc z = exp(-z^2)/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    """
    tiny = 1e-300
    f = z
    C = z
    D = 0.0
    n = 0
    while True:
        n += 1
        a = n / 2
        D = z + a * D
        D = tiny if D == 0 else D
        C = z + a / C
        C = tiny if C == 0 else C
        D = 1 / D
        delta = C * D
        f *= delta
        if abs(delta - 1) < 1e-16 or n > 20000:
            break
    return cmath.exp(-z * z) / (math.sqrt(math.pi) * f)


def erf_complex(z) -> complex:
    """Error function of a complex argument, ``|z| <= 20``.

    Maclaurin series when ``|Re z| < 2``; otherwise ``1 - erfc`` with erfc from a
    continued fraction, applied in the right half plane and mapped to the left
    one by ``erf(-z) = -erf(z)``.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ErfDomainError(f"erf_complex needs a finite argument, got {z!r}")
    if abs(z) > ERF_DOMAIN:
        raise ErfDomainError(f"|z| = {abs(z):.4g} exceeds the supported domain |z| <= {ERF_DOMAIN:g}")
    if z == 0:
        return 0j
    if abs(z.real) < ERF_SWITCH:
        return _erf_series(z)
    if z.real < 0:
        return -(1 - _erfc_cf(-z))
    return 1 - _erfc_cf(z)


def _theta(dp, k_i):
    dp = float(dp)
    if dp < 0:
        raise ValueError(f"d_p must be non-negative, got {dp!r}")
    return dp * k_i


def visibility_uniform(dp: float, k_i: float):
    """``(sin x / x, x)`` with ``x = d_p k_i``."""
    x = _theta(dp, k_i)
    if x == 0:
        return 1.0, 0.0
    return math.sin(x) / x, x


def visibility_mandel_wolf(dp: float, lambda_i: float):
    """Dipole law: ``V = 3 [(x^2 - 1) sin x + x cos x] / (2 x^3)``, ``phi = x``, ``x = d_p k_i``."""
    x = _theta(dp, 2 * math.pi / lambda_i)
    if x < 1.0:
        # 6 sum_{m>=1} (-1)^(m+1) m^2 x^(2m-2) / (2m+1)!, i.e. 1 - x^2/5 + ...
        total = 0.0
        for m in range(15, 0, -1):
            total = total * x * x + (-1) ** (m + 1) * m * m / math.factorial(2 * m + 1)
        return 6 * total, x
    v = 1.5 * ((x * x - 1) * math.sin(x) + x * math.cos(x)) / x ** 3
    return v, x


def _gauss_numerator(dp: float, k_i: float, N: float) -> complex:
    alpha = N * k_i * dp
    return erf_complex(2 / N - 0.5j * alpha) + erf_complex(0.5j * alpha)


def visibility_gaussian(dp: float, k_i: float, N: float):
    """Truncated Gaussian of width ``N k_i``.

    ``V = |erf(2/N - i a/2) + erf(i a/2)| exp(-a^2/4) / erf(2/N)`` and ``phi`` the
    argument of the same numerator, ``a = N k_i d_p``.
    """
    if not (0 < N <= 4):
        raise ValueError(f"Gaussian width N must lie in (0, 4], got {N!r}")
    _theta(dp, k_i)
    alpha = N * k_i * dp
    num = _gauss_numerator(dp, k_i, N)
    v = abs(num) * math.exp(-alpha * alpha / 4) / math.erf(2 / N)
    return v, cmath.phase(num)


def gaussian_phase_log_form(dp: float, k_i: float, N: float) -> float:
    """Phase as ``(1/2i) log(num / conj(num))``, the quotient-of-logs form."""
    alpha = N * k_i * dp
    num = _gauss_numerator(dp, k_i, N)
    den = erf_complex(2 / N + 0.5j * alpha) + erf_complex(-0.5j * alpha)
    return (cmath.log(num / den) / 2j).real


def characteristic(kind: str, dp: float, k_i: float, N: float = 1.0) -> complex:
    """``V exp(i phi)`` from the closed forms, for comparison with quadrature."""
    if kind == "uniform":
        v, phi = visibility_uniform(dp, k_i)
    elif kind == "mw":
        v, phi = visibility_mandel_wolf(dp, 2 * math.pi / k_i)
    elif kind == "gauss":
        v, phi = visibility_gaussian(dp, k_i, N)
    else:
        raise ValueError(f"no closed form for distribution {kind!r}")
    return v * cmath.exp(1j * phi)


def analytic_curve(kind: str, ratios, k_i: float, N: float = 1.0):
    """``(V, phi)`` arrays over ``d_p / lambda_i`` ratios; phases wrapped to (-pi, pi]."""
    lam_i = 2 * math.pi / k_i
    vs, phis = [], []
    for r in ratios:
        dp = r * lam_i
        if kind == "uniform":
            v, phi = visibility_uniform(dp, k_i)
        elif kind == "mw":
            v, phi = visibility_mandel_wolf(dp, lam_i)
        elif kind == "gauss":
            v, phi = visibility_gaussian(dp, k_i, N)
        else:
            raise ValueError(f"no closed form for distribution {kind!r}")
        vs.append(v)
        phis.append(wrap_phase(phi))
    return np.array(vs), np.array(phis)


def wrap_phase(phi: float) -> float:
    """Reduce to (-pi, pi]."""
    w = math.remainder(phi, 2 * math.pi)
    return math.pi if w == -math.pi else w
