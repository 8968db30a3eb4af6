import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings, strategies as st

from mzscatter import analytic as an
from mzscatter.oracles import adaptive_simpson, characteristic_quadrature, real_erf_quadrature
from mzscatter.scattering import MandelWolf, TruncatedGaussian, Uniform

LAM_I = 589e-9
KI = 2 * math.pi / LAM_I
RATIOS = np.linspace(0, 2, 20)


def test_uniform_examples():
    assert an.visibility_uniform(0.0, KI) == (1.0, 0.0)
    v, phi = an.visibility_uniform(0.5 * LAM_I, KI)
    assert abs(v) < 1e-12 and phi == pytest.approx(math.pi)
    v, _ = an.visibility_uniform(0.75 * LAM_I, KI)
    assert v == pytest.approx(-2 / (3 * math.pi), rel=1e-12)


@pytest.mark.parametrize("m", range(1, 9))
def test_uniform_zeros(m):
    v, _ = an.visibility_uniform(m * math.pi / KI, KI)
    assert abs(v) < 1e-12


def test_dipole_examples():
    assert an.visibility_mandel_wolf(0.0, LAM_I)[0] == 1.0
    v, phi = an.visibility_mandel_wolf(0.5 * LAM_I, LAM_I)
    assert v == pytest.approx(-3 / (2 * math.pi ** 2), abs=1e-12)
    assert phi == pytest.approx(math.pi)
    assert an.visibility_mandel_wolf(1e-9 * LAM_I, LAM_I)[0] == pytest.approx(1, abs=1e-12)


def test_dipole_series_joins_direct_formula():
    # adjacent floats on either side of the switch at x = 1
    x = 1.0 / KI
    below = an.visibility_mandel_wolf(math.nextafter(x, 0), LAM_I)[0]
    above = an.visibility_mandel_wolf(math.nextafter(x, 1), LAM_I)[0]
    assert below == pytest.approx(above, abs=1e-13)


def test_dipole_zeros_near_half_integers():
    r = np.linspace(0.01, 2.2, 20001)
    v = np.array([an.visibility_mandel_wolf(x * LAM_I, LAM_I)[0] for x in r])
    zeros = r[:-1][np.sign(v[:-1]) != np.sign(v[1:])]
    assert len(zeros) >= 4
    for z in zeros:
        assert abs(z - 0.5 * round(2 * z)) <= 0.05


def test_all_laws_start_at_one():
    for v, phi in (an.visibility_uniform(0, KI), an.visibility_mandel_wolf(0, LAM_I),
                   an.visibility_gaussian(0, KI, 1.0)):
        assert abs(v - 1) <= 1e-10 and phi == 0


def test_gaussian_positive_and_phase_forms():
    for r in RATIOS[1:]:
        v, phi = an.visibility_gaussian(r * LAM_I, KI, 1.0)
        assert v > 0
        alt = an.gaussian_phase_log_form(r * LAM_I, KI, 1.0)
        assert abs(math.remainder(alt - phi, math.pi)) < 1e-10


def test_gaussian_width_range():
    with pytest.raises(ValueError):
        an.visibility_gaussian(0.1 * LAM_I, KI, 0.0)
    with pytest.raises(ValueError):
        an.visibility_gaussian(0.1 * LAM_I, KI, 4.5)
    with pytest.raises(an.ErfDomainError):
        an.visibility_gaussian(2 * LAM_I, KI, 4.0)


def test_gaussian_above_uniform_modulus():
    for N in (0.25, 0.5, 1.0):
        g, _ = an.analytic_curve("gauss", RATIOS, KI, N)
        u, _ = an.analytic_curve("uniform", RATIOS, KI)
        assert np.all(g >= np.abs(u) - 1e-12)


def test_gaussian_above_dipole_law():
    # the claimed ordering for N <= 1 at the sampled ratios
    for N in (0.25, 0.5, 1.0):
        g, _ = an.analytic_curve("gauss", RATIOS, KI, N)
        m, _ = an.analytic_curve("mw", RATIOS, KI)
        assert np.all(g >= m), f"N = {N}: fails at ratios {RATIOS[g < m]}"


@pytest.mark.parametrize("kind,dist", [("uniform", Uniform(KI)), ("mw", MandelWolf(KI)),
                                       ("gauss", TruncatedGaussian(KI, 1.0))])
def test_closed_forms_match_characteristic_function(kind, dist):
    for r in np.linspace(0, 2, 50):
        chi = characteristic_quadrature(dist, r * LAM_I)
        assert abs(chi - an.characteristic(kind, r * LAM_I, KI, 1.0)) <= 1e-8


@pytest.mark.parametrize("N", [0.25, 0.5, 2.0])
def test_gaussian_other_widths_match_oracle(N):
    dist = TruncatedGaussian(KI, N)
    for r in np.linspace(0, 1.2, 13):
        chi = characteristic_quadrature(dist, r * LAM_I)
        assert abs(chi - an.characteristic("gauss", r * LAM_I, KI, N)) <= 1e-8


def test_adaptive_simpson_basics():
    assert adaptive_simpson(lambda t: t ** 3, 0, 2) == pytest.approx(4, abs=1e-12)
    assert adaptive_simpson(math.sin, 0, math.pi, 1e-12) == pytest.approx(2, abs=1e-11)


# complex error function ---------------------------------------------------------------


def test_erf_reference_values():
    assert an.erf_complex(0) == 0
    assert an.erf_complex(1.0).real == pytest.approx(0.8427007929, abs=1e-10)
    assert an.erf_complex(1.0).real == pytest.approx(real_erf_quadrature(1.0), abs=1e-13)


points = st.builds(lambda r, a: r * complex(math.cos(a), math.sin(a)),
                   st.floats(0, 10), st.floats(-math.pi, math.pi))


@settings(max_examples=200)
@given(points)
def test_erf_symmetries(z):
    e = an.erf_complex(z)
    scale = max(abs(e), 1e-300)
    assert abs(e + an.erf_complex(-z)) <= 1e-10 * scale
    assert abs(an.erf_complex(z.conjugate()) - e.conjugate()) <= 1e-10 * scale


@settings(max_examples=300)
@given(st.builds(lambda r, a: r * complex(math.cos(a), math.sin(a)), st.floats(0.01, 20), st.floats(-math.pi, math.pi)))
def test_erf_matches_scipy(z):
    ref = complex(sp.erf(z))
    got = an.erf_complex(z)
    # near the complex zeros of erf only an absolute comparison is meaningful
    assert abs(got - ref) <= 1e-10 * max(abs(ref), 1.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(-10, 10))
def test_erf_real_axis_quadrature(x):
    assert abs(an.erf_complex(x).real - real_erf_quadrature(x)) <= 1e-10
    assert an.erf_complex(x).imag == 0


def test_erf_branches_agree_at_switch():
    for im in (-5.0, -0.5, 0.0, 0.7, 3.0, 8.0):
        a = an._erf_series(complex(2.0, im))
        b = 1 - an._erfc_cf(complex(2.0, im))
        assert abs(a - b) <= 1e-11 * max(abs(a), 1.0)


def test_erf_domain():
    with pytest.raises(an.ErfDomainError):
        an.erf_complex(21.0)
    with pytest.raises(an.ErfDomainError):
        an.erf_complex(complex(float("nan"), 0))


def test_wrap_phase():
    assert an.wrap_phase(-math.pi) == math.pi
    assert an.wrap_phase(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
