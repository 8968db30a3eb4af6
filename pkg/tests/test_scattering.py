import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from mzscatter.propagation import WrapAroundWarning, propagate_kirchhoff, propagate_spectral, spectrum
from mzscatter.scattering import (KickEvent, MandelWolf, Mixture, Point, Tabulated, TruncatedGaussian, Uniform,
                                  kick_boost_route, kick_closed_form, load_table, make_distribution,
                                  route_phase_offset)
from mzscatter.scenario import InvalidParameterError, dp_ratio_to_y12prime, fig1_setup
from mzscatter.wavefield import Grid1D, GratingMask, TransverseField, smooth_aperture

S = fig1_setup()
KI = S.k_i


def test_event_bounds():
    KickEvent.for_setup(S, 2 * KI, 0.0)
    with pytest.raises(InvalidParameterError):
        KickEvent.for_setup(S, 2.01 * KI, 0.0)
    with pytest.raises(InvalidParameterError):
        KickEvent.for_setup(S, KI, S.y12)
    with pytest.raises(InvalidParameterError):
        KickEvent(-1.0, 0.0)


def test_densities():
    mw = MandelWolf(KI)
    assert mw.density(0.0) == pytest.approx(3 / (4 * KI), rel=1e-15)
    assert mw.density(KI) == pytest.approx(3 / (8 * KI), rel=1e-15)
    assert Uniform(KI).density(0.7 * KI) == pytest.approx(1 / (2 * KI))
    for d in (mw, Uniform(KI), TruncatedGaussian(KI, 1.0)):
        assert d.density(-1.0) == 0.0
        assert d.density(2.5 * KI) == 0.0
    with pytest.raises(TypeError):
        Point(KI, 0.0).density(0.0)


def test_quadrature_weights():
    u, w = Point(KI, 0.4 * KI).quadrature_nodes(64)
    assert list(u) == [0.4 * KI] and list(w) == [1.0]
    assert abs(MandelWolf(KI).quadrature_nodes(64)[1].sum() - 1) <= 1e-10
    assert abs(Uniform(KI).quadrature_nodes(64)[1].sum() - 1) <= 1e-12
    u, _ = Uniform(KI).quadrature_nodes(8)
    assert np.all((u > 0) & (u < 2 * KI))
    with pytest.raises(ValueError):
        Uniform(KI).quadrature_nodes(1)


def test_dipole_mass_is_exact_for_two_nodes():
    # quadratic density: a two-node Gauss-Legendre rule is already exact
    assert MandelWolf(KI).quadrature_nodes(2)[1].sum() == pytest.approx(1, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 4.0))
def test_gaussian_mass(N):
    g = TruncatedGaussian(KI, N)
    m, _ = quad(lambda t: KI * g.density(t * KI), 0, 2, epsabs=1e-13, epsrel=1e-13, limit=200)
    assert abs(m - 1) <= 1e-12


@given(st.floats(0, 1))
def test_dipole_symmetry(t):
    mw = MandelWolf(KI)
    a, b = mw.density(KI * (1 + t)), mw.density(KI * (1 - t))
    assert abs(a - b) <= 1e-15 * mw.density(0.0)


def test_densities_nonnegative():
    u = np.linspace(-KI, 3 * KI, 401)
    for d in (MandelWolf(KI), Uniform(KI), TruncatedGaussian(KI, 0.3), Tabulated(KI, (0, 1, 2), (0, 2, 0))):
        assert np.all(d.density(u) >= 0)


def test_tabulated_renormalizes(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("# slit selection\ndkx_over_ki,density\n0,0\n1,4\n2,0\n")
    t = load_table(p, KI)
    assert t.density(KI) == pytest.approx(1 / KI)
    assert t.quadrature_nodes(64)[1].sum() == pytest.approx(1, abs=1e-14)
    m, _ = quad(lambda v: KI * t.density(v * KI), 0, 2, points=[1.0])
    assert m == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("text,msg", [
    ("a,b\n0,1\n", "header"),
    ("dkx_over_ki,density\n0,1\n0,2\n", "increasing"),
    ("dkx_over_ki,density\n0,1\n2.5,1\n", r"\[0, 2\]"),
    ("dkx_over_ki,density\n0,1\n1,-1\n", "non-negative"),
    ("dkx_over_ki,density\n0,1\n1,x\n", "bad row"),
])
def test_tabulated_validation(tmp_path, text, msg):
    p = tmp_path / "t.csv"
    p.write_text(text)
    with pytest.raises(ValueError, match=msg):
        load_table(p, KI)


def test_mixture_weights():
    m = Mixture(KI, (Point(KI, 0.2 * KI), Point(KI, 1.2 * KI)), (0.5, 0.5))
    u, w = m.quadrature_nodes()
    assert list(u) == [0.2 * KI, 1.2 * KI]
    assert list(w) == [0.5, 0.5]
    with pytest.raises(InvalidParameterError):
        Mixture(KI, (Uniform(KI),), (0.7,))


def test_make_distribution():
    assert isinstance(make_distribution("mw", KI), MandelWolf)
    assert make_distribution("gauss", KI, N=0.5).N == 0.5
    assert make_distribution("point", KI, dkx_over_ki=1.5).dkx == pytest.approx(1.5 * KI)
    with pytest.raises(ValueError):
        make_distribution("table", KI)
    with pytest.raises(ValueError):
        make_distribution("cauchy", KI)


# kicked fields ----------------------------------------------------------------------


@pytest.fixture(scope="module")
def exit_spec(engine):
    return engine.exit_spectrum


def test_zero_kick_is_free_propagation(exit_spec):
    ev = KickEvent(0.0, 1e-3)
    a = kick_closed_form(exit_spec, ev, 0.3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WrapAroundWarning)
        f0 = TransverseField(exit_spec.grid, np.fft.ifft(exit_spec.coefficients, norm="ortho"), 0.0, S.k)
        b = propagate_spectral(f0, 0.3)
    assert a.tilt == 0 and a.phase == 0
    assert np.linalg.norm(a.samples - b.samples) <= 1e-12 * np.linalg.norm(b.samples)


def test_kick_translates_intensity(exit_spec):
    yp = dp_ratio_to_y12prime(0.3, S)
    dk = 1.5 * KI
    kicked = kick_closed_form(exit_spec, KickEvent(dk, yp), S.y12)
    free = kick_closed_form(exit_spec, KickEvent(0.0, yp), S.y12)
    shift = dk * (S.y12 - yp) / S.k
    g = exit_spec.grid
    # translate the free intensity spectrally by the ballistic deflection
    moved = np.fft.ifft(np.fft.fft(free.samples) * np.exp(-1j * g.q * shift))
    pk = np.abs(kicked.samples) ** 2
    assert np.abs(pk - np.abs(moved) ** 2).max() <= 1e-10 * pk.max()
    centroid = lambda p: np.sum(g.x * p) / np.sum(p)
    assert centroid(pk) - centroid(free.intensity()) == pytest.approx(shift, rel=1e-6)


def test_observation_before_event_rejected(exit_spec):
    with pytest.raises(ValueError):
        kick_closed_form(exit_spec, KickEvent(KI, 0.01), 0.005)


@settings(max_examples=12, deadline=None)
@given(st.floats(0, 2), st.floats(0, 0.6), st.floats(0, 1))
def test_route_equivalence(fac, yp, frac):
    from mzscatter.interferometer import engine as get_engine
    from mzscatter.wavefield import default_grid
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WrapAroundWarning)
        spec = get_engine(S, default_grid(S)).exit_spectrum
        y = yp + frac * (S.y12 - yp)
        ev = KickEvent.for_setup(S, fac * KI, yp)
        at_event = kick_closed_form(spec, KickEvent(0.0, yp), yp)
        a = kick_closed_form(spec, ev, y)
        b = kick_boost_route(at_event, ev, y - yp, check=False)
    va, vb = a.values(), b.values()
    pa = np.abs(va) ** 2
    assert np.abs(pa - np.abs(vb) ** 2).max() <= 1e-8 * pa.max()
    sel = pa > 1e-6 * pa.max()
    ph = np.angle(va[sel] / vb[sel] * np.exp(-1j * route_phase_offset(ev, y, S.k)))
    assert np.abs(ph).max() <= 1e-6


def test_closed_form_against_direct_quadrature():
    # independent route: literal exp(i dk x) on the samples and Fresnel-Kirchhoff sums
    g = Grid1D(2048 * 10e-9, 2048)
    ap = smooth_aperture(g, GratingMask.for_setup(S), 100e-9)
    f0 = TransverseField(g, ap, 0.0, S.k)
    yp, y, dk = 0.02, 0.05, 0.8 * KI
    at_event = propagate_kirchhoff(f0, yp)
    boosted = at_event.with_samples(at_event.samples * np.exp(1j * dk * g.x))
    direct = propagate_kirchhoff(boosted, y - yp)
    closed = kick_closed_form(spectrum(f0), KickEvent(dk, yp), y)
    vc, vd = closed.values(), direct.values()
    assert np.linalg.norm(np.abs(vc) ** 2 - np.abs(vd) ** 2) <= 1e-6 * np.linalg.norm(np.abs(vd) ** 2)
    sel = np.abs(vd) ** 2 > 1e-4 * np.max(np.abs(vd) ** 2)
    ratio = vc[sel] / vd[sel]
    assert np.abs(ratio / ratio.mean() - 1).max() < 1e-5


def test_sample_boost_on_grid_wavenumber():
    g = Grid1D(4096 * 12.5e-9, 4096)
    ap = smooth_aperture(g, GratingMask.for_setup(S), 100e-9)
    f0 = TransverseField(g, ap, 0.0, S.k)
    dk = g.q[200]
    ev = KickEvent(dk, 0.0)
    a = kick_boost_route(f0, ev, 5e-3, mode="tilt", check=False)
    b = kick_boost_route(f0, ev, 5e-3, mode="samples", check=False)
    assert np.linalg.norm(a.values() - b.values()) <= 1e-11 * np.linalg.norm(b.values())
    ca = np.fft.fft(f0.samples * np.exp(1j * dk * g.x))
    assert np.allclose(np.roll(np.fft.fft(f0.samples), 200), ca, atol=1e-9 * np.abs(ca).max())
    with pytest.raises(ValueError):
        kick_boost_route(f0, ev, 1e-3, mode="nope")
    with pytest.raises(ValueError):
        kick_boost_route(f0, KickEvent(dk, 1e-3), 1e-3)


def test_zero_kick_boost_is_free_propagation():
    g = Grid1D(1024 * 12.5e-9, 1024)
    f0 = TransverseField(g, smooth_aperture(g, GratingMask(200e-9, 100e-9, 4), 50e-9), 0.0, S.k)
    a = kick_boost_route(f0, KickEvent(0.0, 0.0), 1e-3, check=False)
    b = propagate_spectral(f0, 1e-3, check=False)
    assert np.array_equal(a.samples, b.samples)
