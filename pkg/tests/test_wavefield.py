import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mzscatter.scenario import InvalidParameterError
from mzscatter.wavefield import (AbsorbedFieldError, Grid1D, GratingMask, TransverseField, apply_mask,
                                 default_grid, plane_wave, write_field_csv)


def small_grid(n=1024, dx=5e-9):
    return Grid1D(n * dx, n)


def test_grid_layout():
    g = Grid1D(1e-6, 8)
    assert g.dx == pytest.approx(1.25e-7)
    assert g.x[0] == pytest.approx(-5e-7)
    assert np.allclose(np.diff(g.x), g.dx)
    with pytest.raises(InvalidParameterError):
        Grid1D(1e-6, 12)
    with pytest.raises(InvalidParameterError):
        Grid1D(-1.0, 8)


def test_default_grid_keeps_beam_inside(setup):
    g = default_grid(setup)
    assert g.dx == pytest.approx(setup.d / 16)
    assert g.n & (g.n - 1) == 0
    assert (g.width / setup.d) == pytest.approx(round(g.width / setup.d))
    flight = setup.y12 + setup.y23
    reach = setup.n * setup.d / 2 + g.nyquist * flight / setup.k + 2 * setup.k_i * flight / setup.k
    assert g.width / 2 >= 1.1 * reach


@pytest.mark.parametrize("b", [1.0, 1j, 0.3 - 2j])
def test_plane_wave(setup, b):
    g = small_grid()
    f = plane_wave(g, setup.replace(B_i=b))
    assert np.all(f.samples == b)
    assert f.norm2() == pytest.approx(g.n * abs(b) ** 2)


def test_single_slit_sample_count(setup):
    g = small_grid()
    f = apply_mask(plane_wave(g, setup), GratingMask(200e-9, 100e-9, 1))
    nz = np.flatnonzero(f.samples)
    assert nz.size == 20
    assert np.all(f.samples[nz] == 1)
    assert f.norm2() == pytest.approx(20)


def test_edge_convention_half_open(setup):
    g = small_grid()
    f = apply_mask(plane_wave(g, setup), GratingMask(200e-9, 100e-9, 1))
    x = g.x[np.flatnonzero(f.samples)]
    assert x.min() == pytest.approx(-50e-9)
    assert x.max() == pytest.approx(45e-9)


def test_fully_open_mask_is_identity(setup):
    g = small_grid()
    rng = np.random.default_rng(1)
    psi = rng.normal(size=g.n) + 1j * rng.normal(size=g.n)
    f = TransverseField(g, psi, 0.0, setup.k)
    out = apply_mask(f, GratingMask(200e-9, 200e-9, 1, full_window=True))
    assert np.array_equal(out.samples, psi)


def test_slit_centres(setup):
    m = GratingMask(200e-9, 100e-9, 4, shift=30e-9)
    centres = m.first_center + 200e-9 * np.arange(4)
    assert np.allclose(centres, np.array([-300e-9, -100e-9, 100e-9, 300e-9]) + 30e-9)
    assert np.all(m.open_at(centres))
    assert not np.any(m.open_at(centres + 100e-9))
    assert not m.open_at(np.array([centres[-1] + 200e-9]))[0]
    full = GratingMask(200e-9, 100e-9, 4, shift=30e-9, full_window=True)
    assert full.open_at(np.array([centres[-1] + 200e-9]))[0]


def test_absorbed_field_raises(setup):
    g = Grid1D(64 * 5e-9, 64)
    f = TransverseField(g, np.zeros(64), 0.0, setup.k)
    with pytest.raises(AbsorbedFieldError):
        apply_mask(f, GratingMask(200e-9, 100e-9, 1))
    far = GratingMask(200e-9, 100e-9, 1, shift=1e-3)
    with pytest.raises(AbsorbedFieldError):
        apply_mask(plane_wave(g, setup), far)


def _array(seed):
    rng = np.random.default_rng(seed)
    return rng.normal(size=256) + 1j * rng.normal(size=256)


complex_arrays = st.integers(0, 2 ** 32).map(_array)
masks = st.builds(lambda n, w, s: GratingMask(200e-9, w * 1e-9, n, s * 1e-9),
                  st.integers(1, 3), st.integers(5, 199), st.integers(-100, 100))


@settings(max_examples=40, deadline=None)
@given(complex_arrays, complex_arrays, masks, st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_mask_properties(a, b, mask, alpha, beta):
    g = Grid1D(256 * 5e-9, 256)
    fa = TransverseField(g, a, 0.0, 1.0)
    fb = TransverseField(g, b, 0.0, 1.0)
    open_ = mask.open_mask(g)
    if not open_.any() or not np.any(fa.samples[open_]):
        return
    once = apply_mask(fa, mask)
    # binary: every sample is untouched or zero
    assert np.all((once.samples == fa.samples) | (once.samples == 0))
    assert np.array_equal(apply_mask(once, mask).samples, once.samples)
    combo = TransverseField(g, alpha * fa.samples + beta * fb.samples, 0.0, 1.0)
    if np.any(combo.samples[open_]):
        lhs = apply_mask(combo, mask).samples
        rhs = alpha * np.where(open_, fa.samples, 0) + beta * np.where(open_, fb.samples, 0)
        assert np.allclose(lhs, rhs, rtol=0, atol=1e-9 * (1 + np.abs(rhs).max()))


def test_tilt_enters_values_only(setup):
    g = small_grid(64)
    f = TransverseField(g, np.ones(64), 0.0, setup.k, tilt=3e6, phase=0.5)
    assert np.allclose(f.values(), np.exp(1j * (3e6 * g.x + 0.5)))
    assert f.norm2() == pytest.approx(64)
    assert f.integral() == pytest.approx(64 * g.dx)


def test_field_csv(tmp_path, setup):
    g = small_grid(16)
    f = plane_wave(g, setup.replace(B_i=1j))
    p = tmp_path / "f.csv"
    write_field_csv(f, p, "hello")
    lines = p.read_text().splitlines()
    assert lines[0] == "# hello"
    assert lines[1] == "x_m,re,im,abs2"
    assert len(lines) == 18
    x, re, im, a2 = map(float, lines[2].split(","))
    assert (re, im, a2) == (0.0, 1.0, 1.0)
