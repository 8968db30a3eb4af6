"""Transverse wavefunction samples on a uniform 1-D grid and binary grating masks.

The longitudinal carrier ``exp(i k y)`` is never multiplied into the samples.
A field also carries an optional transverse tilt ``tau`` so that the physical
envelope is ``samples * exp(i tau x) * exp(i phase)``; the tilt lets a photon
kick of arbitrary size be represented without aliasing the sampled spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.special import erf

from .scenario import PhysicalSetup, InvalidParameterError

#: Fraction of the grid at each end that counts as "edge" for wrap-around checks.
EDGE_FRACTION = 0.05


class AbsorbedFieldError(RuntimeError):
    """A mask removed every sample of the field."""


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid ``x_j = origin + j * dx`` with ``dx = width / n`` and ``n`` a power of two.

    When ``origin`` is omitted the grid is centred: ``origin = -width / 2``.
    """

    width: float
    n: int
    origin: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.width) and self.width > 0):
            raise InvalidParameterError(f"grid width must be positive, got {self.width!r}")
        n = int(self.n)
        if n != self.n or n < 2 or n & (n - 1):
            raise InvalidParameterError(f"grid point count must be a power of two >= 2, got {self.n!r}")
        object.__setattr__(self, "n", n)
        if self.origin is None:
            object.__setattr__(self, "origin", -0.5 * self.width)

    @property
    def dx(self) -> float:
        return self.width / self.n

    @property
    def x(self) -> np.ndarray:
        return self.origin + self.dx * np.arange(self.n)

    @property
    def q(self) -> np.ndarray:
        """Conjugate wavenumbers in FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.n, self.dx)

    @property
    def nyquist(self) -> float:
        return np.pi / self.dx


def default_grid(setup: PhysicalSetup, *, oversample: int = 16, margin: float = 1.1) -> Grid1D:
    """Grid with ``dx = d / oversample`` wide enough that nothing wraps over the whole flight.

    The reach is the half-aperture plus the deflection of the fastest sampled
    mode (the Nyquist wavenumber) and of the largest photon kick, both over the
    full length ``y12 + y23``. The width is an integer number of pitches so a
    full-window grating tiles the periodic window without a seam.
    """
    dx = setup.d / oversample
    flight = setup.y12 + setup.y23
    reach = (setup.n * setup.d / 2
             + (np.pi / dx) * flight / setup.k
             + 2 * setup.k_i * flight / setup.k)
    n = 1 << max(1, math.ceil(math.log2(2 * margin * reach / dx)))
    return Grid1D(n * dx, n)


@dataclass(frozen=True)
class TransverseField:
    """Complex samples of the transverse envelope at longitudinal station ``station``.

    ``phase`` holds every x-independent phase except the carrier ``k * station``.
    """

    grid: Grid1D
    samples: np.ndarray
    station: float
    wavenumber: float
    tilt: float = 0.0
    phase: float = 0.0
    label: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if samples.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {samples.shape}")
        object.__setattr__(self, "samples", samples)

    def with_samples(self, samples, **changes) -> "TransverseField":
        return replace(self, samples=samples, **changes)

    @property
    def carrier_phase(self) -> float:
        return math.fmod(self.wavenumber * self.station, 2 * np.pi)

    def values(self, *, include_carrier: bool = False) -> np.ndarray:
        """Physical envelope ``samples * exp(i tilt x + i phase)``."""
        ph = self.phase + (self.carrier_phase if include_carrier else 0.0)
        out = self.samples * np.exp(1j * ph)
        if self.tilt:
            out = out * np.exp(1j * self.tilt * self.grid.x)
        return out

    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def norm2(self) -> float:
        """Sum of ``|psi_j|^2`` (discrete norm, no ``dx``)."""
        return float(np.vdot(self.samples, self.samples).real)

    def integral(self) -> float:
        """Grid quadrature of ``|psi|^2 dx``."""
        return self.norm2() * self.grid.dx

    def edge_fraction(self, fraction: float = EDGE_FRACTION) -> float:
        """Share of the norm sitting in the outer ``fraction`` of samples at either end."""
        p = self.intensity()
        m = max(1, int(fraction * self.grid.n))
        total = p.sum()
        if total == 0:
            return 0.0
        return float((p[:m].sum() + p[-m:].sum()) / total)


@dataclass(frozen=True)
class GratingMask:
    """Binary aperture with slits of width ``slit_width`` on pitch ``pitch``.

    Slit ``j`` is centred at ``(j - (slit_count - 1)/2) * pitch + shift``.
    With ``full_window`` the same lattice is continued over the whole grid,
    which models a grating much wider than the beam.
    Intervals are half-open ``[left, right)``; a sample on a left edge is open.
    """

    pitch: float
    slit_width: float
    slit_count: int = 1
    shift: float = 0.0
    full_window: bool = False

    def __post_init__(self):
        if not (self.pitch > 0 and self.slit_width > 0):
            raise InvalidParameterError("pitch and slit width must be positive")
        if self.slit_width > self.pitch:
            raise InvalidParameterError(f"slit width {self.slit_width} exceeds pitch {self.pitch}")
        if int(self.slit_count) != self.slit_count or self.slit_count < 1:
            raise InvalidParameterError(f"slit count must be a positive integer, got {self.slit_count!r}")
        object.__setattr__(self, "slit_count", int(self.slit_count))

    @property
    def first_center(self) -> float:
        return -(self.slit_count - 1) / 2 * self.pitch + self.shift

    def open_at(self, x, tol: float = 0.0) -> np.ndarray:
        """Boolean open set evaluated at positions ``x``.

        ``tol`` nudges samples towards the right so that points that should sit
        exactly on a left edge are not lost to round-off.
        """
        x = np.asarray(x, dtype=float)
        u = x - self.first_center + 0.5 * self.slit_width + tol
        inside = np.mod(u, self.pitch) < self.slit_width
        if self.full_window:
            return inside
        j = np.floor(u / self.pitch)
        return inside & (j >= 0) & (j < self.slit_count)

    def open_mask(self, grid: Grid1D) -> np.ndarray:
        return self.open_at(grid.x, tol=1e-6 * grid.dx)

    @classmethod
    def for_setup(cls, setup: PhysicalSetup, *, shift: float = 0.0, full_window: bool = False) -> "GratingMask":
        return cls(setup.d, setup.delta, setup.n, shift, full_window)


def plane_wave(grid: Grid1D, setup: PhysicalSetup) -> TransverseField:
    """Incident wave ``B_i`` just before the first grating."""
    return TransverseField(grid, np.full(grid.n, setup.B_i, dtype=complex), 0.0, setup.k, label="incident")


def apply_mask(field: TransverseField, mask: GratingMask) -> TransverseField:
    """Zero every sample outside the open set of ``mask``.

    The tilt is a smooth multiplicative factor, so masking the stored samples
    is the same as masking the physical values.
    """
    open_ = mask.open_mask(field.grid)
    if not open_.any():
        raise AbsorbedFieldError("mask has no open sample on this grid")
    out = np.where(open_, field.samples, 0)
    if not np.any(out):
        raise AbsorbedFieldError("field vanishes on every open sample of the mask")
    return field.with_samples(out, label="grating exit")


def smooth_aperture(grid: Grid1D, mask: GratingMask, sigma: float) -> np.ndarray:
    """Slit pattern convolved with a unit-area Gaussian of width ``sigma``.

    Used where a band-limited stand-in for a sharp aperture is needed. Only
    finite (non full-window) masks are supported.
    """
    if mask.full_window:
        raise ValueError("smooth_aperture needs a finite slit count")
    x = grid.x
    out = np.zeros(grid.n)
    s = np.sqrt(2) * sigma
    for j in range(mask.slit_count):
        c = mask.first_center + j * mask.pitch
        out += 0.5 * (erf((x - c + mask.slit_width / 2) / s) - erf((x - c - mask.slit_width / 2) / s))
    return out


def write_field_csv(field: TransverseField, path: str | Path, header_comment: str | None = None) -> None:
    """Dump the physical envelope as ``x_m,re,im,abs2``."""
    v = field.values()
    data = np.column_stack([field.grid.x, v.real, v.imag, np.abs(v) ** 2])
    with open(path, "w", newline="\n") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        fh.write("x_m,re,im,abs2\n")
        for row in data:
            fh.write(",".join(f"{val:.17g}" for val in row) + "\n")
