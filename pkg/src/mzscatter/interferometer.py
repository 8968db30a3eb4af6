"""Three-grating pipeline, ensemble transmission and fringe-visibility extraction.

Grating 1 carries the ``n`` illuminated slits. Gratings 2 and 3 continue the
same slit lattice over the whole window. Grating 3 is displaced by ``dx3``
towards negative ``x``; with the kick ``exp(+i dkx x)`` this makes the fringe
phase of a single kick ``+d_p dkx``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .analytic import wrap_phase
from .propagation import (AngularSpectrum, check_edges, free_multiplier, inverse,
                          propagate_spectral, spectrum)
from .scattering import KickEvent, MomentumDistribution, Point, kick_closed_form
from .scenario import (PhysicalSetup, InvalidParameterError, dp_ratio_to_y12prime,
                       y12prime_to_dp_ratio, dp_from_y12prime)
from .wavefield import (Grid1D, GratingMask, TransverseField, apply_mask, default_grid,
                        plane_wave)

DEFAULT_NODES = 64
DEFAULT_SCAN = 16


class DegenerateBaselineError(RuntimeError):
    """The laser-off fringe is too weak to normalize against."""


@dataclass(frozen=True)
class PipelineConfig:
    setup: PhysicalSetup
    grid: Grid1D
    y12prime: float
    distribution: MomentumDistribution
    node_count: int = DEFAULT_NODES
    scan_samples: int = DEFAULT_SCAN

    def __post_init__(self):
        if not 0 <= self.y12prime < self.setup.y12:
            raise InvalidParameterError(
                f"event plane y'12 = {self.y12prime:.6g} m must lie in [0, y12 = {self.setup.y12:.6g} m)")
        if self.scan_samples < 4:
            raise InvalidParameterError("a fringe scan needs at least 4 samples per period")
        if self.node_count < 2:
            raise InvalidParameterError("node count must be >= 2")

    @classmethod
    def from_ratio(cls, setup: PhysicalSetup, ratio: float, distribution: MomentumDistribution,
                   grid: Grid1D | None = None, **kwargs) -> "PipelineConfig":
        return cls(setup, grid or default_grid(setup), dp_ratio_to_y12prime(ratio, setup), distribution, **kwargs)

    @property
    def ratio(self) -> float:
        return y12prime_to_dp_ratio(self.y12prime, self.setup)

    @property
    def dp(self) -> float:
        return dp_from_y12prime(self.y12prime, self.setup)

    def shifts(self) -> np.ndarray:
        return self.setup.d * np.arange(self.scan_samples) / self.scan_samples


@dataclass(frozen=True)
class FringeScan:
    shifts: np.ndarray
    T: np.ndarray
    mean: float
    amplitude: float
    phase: float
    residual: float
    c1: complex = field(default=0j, repr=False)


@dataclass(frozen=True)
class VisibilityPoint:
    ratio: float
    V_rel: float
    abs_V: float
    phi: float
    residual: float
    A_on: float
    A_off: float


def extract_harmonic(T, shifts=None, pitch: float | None = None) -> FringeScan:
    """Mean, first harmonic and RMS residual of an equispaced one-period scan.

    ``T_m = a + A cos(2 pi m / M + phi)`` is recovered exactly from the DFT bin 1.
    """
    T = np.asarray(T, dtype=float)
    M = T.size
    if M < 4:
        raise ValueError("first-harmonic extraction needs at least 4 samples")
    c = np.fft.fft(T) / M
    a = c[0].real
    A = 2 * abs(c[1])
    phi = float(np.angle(c[1]))
    fit = a + A * np.cos(2 * np.pi * np.arange(M) / M + phi)
    r = float(np.sqrt(np.mean((T - fit) ** 2)))
    if shifts is None:
        shifts = (pitch or 1.0) * np.arange(M) / M
    return FringeScan(np.asarray(shifts), T, float(a), float(A), phi, r, complex(c[1]))


class Interferometer:
    """Pipeline engine for one setup and grid, with caches for repeated scans.

    The grating-1 exit spectrum is computed once; each (event plane, kick)
    pair costs three FFTs and its scan over ``dx3`` is memoized.
    """

    def __init__(self, setup: PhysicalSetup, grid: Grid1D | None = None):
        self.setup = setup
        self.grid = grid or default_grid(setup)
        g1 = GratingMask.for_setup(setup)
        self.exit_field = apply_mask(plane_wave(self.grid, setup), g1)
        self.exit_spectrum = spectrum(self.exit_field)
        self.g2 = GratingMask.for_setup(setup, full_window=True)
        self._g2_open = self.g2.open_mask(self.grid)
        self._fold = self._fold_plan()
        self._scans: dict = {}

    def _fold_plan(self):
        # when the pitch is an integer number of samples the intensity can be
        # folded onto one period and every grating-3 position reuses it
        p = self.setup.d / self.grid.dx
        P = round(p)
        if P < 1 or abs(p - P) > 1e-9 * p:
            return None
        j = np.arange(self.grid.n)
        return P, j % P, self.grid.origin + self.grid.dx * np.arange(P)

    def grating3(self, dx3: float) -> GratingMask:
        return GratingMask.for_setup(self.setup, shift=-dx3, full_window=True)

    def field_before_g2(self, dkx: float, y12prime: float) -> TransverseField:
        event = KickEvent.for_setup(self.setup, dkx, y12prime)
        return kick_closed_form(self.exit_spectrum, event, self.setup.y12)

    def field_at_g3(self, dkx: float, y12prime: float, *, escalate: bool = True) -> TransverseField:
        f2 = self.field_before_g2(dkx, y12prime)
        check_edges(f2, where="grating 2", escalate=escalate)
        f2 = f2.with_samples(np.where(self._g2_open, f2.samples, 0), label="grating exit")
        f3 = propagate_spectral(f2, self.setup.y23, check=False)
        check_edges(f3, where="grating 3", escalate=escalate)
        return f3

    def transmissions(self, dkx: float, y12prime: float, shifts) -> np.ndarray:
        """Grid quadrature of ``|psi|^2`` over the open slits of grating 3, for each shift."""
        shifts = tuple(float(s) for s in np.atleast_1d(shifts))
        key = (float(y12prime), float(dkx), shifts)
        hit = self._scans.get(key)
        if hit is not None:
            return hit
        p = self.field_at_g3(dkx, y12prime).intensity()
        dx = self.grid.dx
        if self._fold is not None:
            P, bins, xb = self._fold
            folded = np.bincount(bins, weights=p, minlength=P)
            tol = 1e-6 * dx
            T = np.array([folded[self.grating3(s).open_at(xb, tol)].sum() * dx for s in shifts])
        else:
            T = np.array([p[self.grating3(s).open_mask(self.grid)].sum() * dx for s in shifts])
        T.flags.writeable = False
        self._scans[key] = T
        return T

    def ensemble_transmissions(self, distribution: MomentumDistribution, y12prime: float, shifts,
                               node_count: int = DEFAULT_NODES) -> np.ndarray:
        u, w = distribution.quadrature_nodes(node_count)
        total = np.zeros(len(np.atleast_1d(shifts)))
        for uj, wj in zip(u, w):
            if wj != 0:
                total += wj * self.transmissions(uj, y12prime, shifts)
        return total

    def scan(self, distribution: MomentumDistribution, y12prime: float, scan_samples: int = DEFAULT_SCAN,
             node_count: int = DEFAULT_NODES) -> FringeScan:
        shifts = self.setup.d * np.arange(scan_samples) / scan_samples
        T = self.ensemble_transmissions(distribution, y12prime, shifts, node_count)
        return extract_harmonic(T, shifts)

    def baseline(self, scan_samples: int = DEFAULT_SCAN) -> FringeScan:
        """Laser-off scan; it does not depend on where a kick would have happened."""
        return self.scan(Point(self.setup.k_i, 0.0), 0.0, scan_samples)

    def visibility(self, distribution: MomentumDistribution, ratio: float, scan_samples: int = DEFAULT_SCAN,
                   node_count: int = DEFAULT_NODES) -> VisibilityPoint:
        y12prime = dp_ratio_to_y12prime(ratio, self.setup)
        if y12prime >= self.setup.y12:
            raise InvalidParameterError(
                f"d_p/lambda_i = {ratio:g} puts the event at {y12prime:.6g} m, beyond grating 2")
        off = self.baseline(scan_samples)
        if off.amplitude < 1e-12 * abs(off.mean):
            raise DegenerateBaselineError(f"laser-off fringe amplitude {off.amplitude:.3g} is degenerate")
        on = self.scan(distribution, y12prime, scan_samples, node_count)
        v, phi = signed_visibility(on.c1 / off.c1, distribution.symmetry_center,
                                   dp_from_y12prime(y12prime, self.setup))
        return VisibilityPoint(float(ratio), v, abs(on.c1 / off.c1), phi, on.residual, on.amplitude, off.amplitude)


def signed_visibility(rho: complex, center: float | None, dp: float):
    """Signed relative visibility and phase from the complex amplitude ratio ``rho``.

    For a law symmetric about ``center`` the ensemble fringe is a real multiple
    of ``exp(i d_p center)`` times the laser-off fringe; the sign of that
    multiple is the sign of the projection onto this reference. Otherwise the
    magnitude is reported with the raw phase.
    """
    mag = abs(rho)
    phi = float(np.angle(rho))
    if center is None:
        return mag, wrap_phase(phi)
    ref = dp * center
    if math.cos(phi - ref) < 0:
        return -mag, wrap_phase(phi + math.pi)
    return mag, wrap_phase(phi)


@lru_cache(maxsize=4)
def engine(setup: PhysicalSetup, grid: Grid1D) -> Interferometer:
    return Interferometer(setup, grid)


def transmit_single(config: PipelineConfig, dkx: float, dx3: float) -> float:
    return float(engine(config.setup, config.grid).transmissions(dkx, config.y12prime, [dx3])[0])


def transmit_ensemble(config: PipelineConfig, dx3: float) -> float:
    eng = engine(config.setup, config.grid)
    return float(eng.ensemble_transmissions(config.distribution, config.y12prime, [dx3], config.node_count)[0])


def scan_fringe(config: PipelineConfig) -> FringeScan:
    eng = engine(config.setup, config.grid)
    return eng.scan(config.distribution, config.y12prime, config.scan_samples, config.node_count)


def visibility_curve(config: PipelineConfig, ratios) -> list[VisibilityPoint]:
    """Visibility at each ratio; ``config.y12prime`` is ignored in favour of the ratios."""
    eng = engine(config.setup, config.grid)
    return [eng.visibility(config.distribution, r, config.scan_samples, config.node_count) for r in ratios]


def density_carpet(setup: PhysicalSetup, grid: Grid1D, ys, dkx: float = 0.0, y12prime: float = 0.0,
                   eng: Interferometer | None = None) -> np.ndarray:
    """``|psi(x, y)|^2`` for each station in ``ys`` (rows) over the whole grid (columns).

    Stations before the first grating show the incident wave. The kick acts at
    ``y12prime`` and grating 2 at ``y12``; grating 3 is not applied.
    """
    eng = eng or engine(setup, grid)
    ys = np.asarray(ys, dtype=float)
    if np.any(ys > setup.y12 + setup.y23 * (1 + 1e-12)):
        raise InvalidParameterError("carpet stations must not lie beyond grating 3")
    event = KickEvent.for_setup(setup, dkx, y12prime)
    out = np.empty((ys.size, grid.n))
    after_g2 = None
    for i, y in enumerate(ys):
        if y < 0:
            out[i] = abs(setup.B_i) ** 2
        elif y < setup.y12:
            if dkx and y >= y12prime:
                f = kick_closed_form(eng.exit_spectrum, event, y)
            else:
                f = _free_from(eng.exit_spectrum, y)
            out[i] = f.intensity()
        else:
            if after_g2 is None:
                f2 = eng.field_before_g2(dkx, y12prime)
                after_g2 = f2.with_samples(np.where(eng._g2_open, f2.samples, 0))
            out[i] = propagate_spectral(after_g2, y - setup.y12, check=False).intensity()
    return out


def _free_from(spec: AngularSpectrum, y: float) -> TransverseField:
    c = spec.coefficients * free_multiplier(spec.grid, spec.wavenumber, y - spec.station)
    f = inverse(AngularSpectrum(spec.grid, c, y, spec.wavenumber, spec.tilt, spec.phase), "free")
    return f


def normalized_correlation(a, b) -> float:
    a = np.asarray(a, dtype=float) - np.mean(a)
    b = np.asarray(b, dtype=float) - np.mean(b)
    return float(np.dot(a, b) / math.sqrt(np.dot(a, a) * np.dot(b, b)))
