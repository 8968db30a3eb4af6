"""Free paraxial propagation of a :class:`TransverseField`.

Two independent routes are provided. The spectral route multiplies each plane
wave mode by ``exp(-i kx^2 dy / 2k)`` and is the production propagator. The
Fresnel-Kirchhoff route sums the Fresnel kernel directly over the samples;
it is O(N^2) and kept as an oracle for small grids.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .wavefield import Grid1D, TransverseField

#: Edge share above which a warning is raised.
EDGE_WARN = 1e-6
#: Edge share above which a pipeline run is aborted.
EDGE_ERROR = 1e-3
#: Largest grid accepted by the direct quadrature.
KIRCHHOFF_MAX_N = 8192


class WrapAroundWarning(RuntimeWarning):
    """Noticeable norm near the grid edges; the periodic window may be too small."""


class WrapAroundError(RuntimeError):
    """So much norm reached the grid edges that results would be meaningless."""


@dataclass(frozen=True)
class AngularSpectrum:
    """Unitary DFT coefficients of a field.

    ``coefficients[j]`` belongs to the mode ``kx = grid.q[j] + tilt``. The
    station, tilt and scalar phase of the parent field ride along so the
    spectrum can be turned back into a field.
    """

    grid: Grid1D
    coefficients: np.ndarray
    station: float
    wavenumber: float
    tilt: float = 0.0
    phase: float = 0.0

    @property
    def kx(self) -> np.ndarray:
        return self.grid.q + self.tilt


def spectrum(field: TransverseField) -> AngularSpectrum:
    c = sfft.fft(field.samples, norm="ortho")
    return AngularSpectrum(field.grid, c, field.station, field.wavenumber, field.tilt, field.phase)


def inverse(spec: AngularSpectrum, label: str = "") -> TransverseField:
    samples = sfft.ifft(spec.coefficients, norm="ortho")
    return TransverseField(spec.grid, samples, spec.station, spec.wavenumber, spec.tilt, spec.phase, label)


@lru_cache(maxsize=64)
def _quadratic_phase(grid: Grid1D, k: float, dy: float) -> np.ndarray:
    q = grid.q
    out = np.exp(-1j * q * q * (dy / (2 * k)))
    out.flags.writeable = False
    return out


def free_multiplier(grid: Grid1D, k: float, dy: float, shift: float = 0.0) -> np.ndarray:
    """Spectral multiplier for free flight ``dy`` followed by a lateral translation ``shift``."""
    out = _quadratic_phase(grid, float(k), float(dy))
    if shift:
        out = out * np.exp(-1j * grid.q * shift)
    return out


def _wrap(phase: float) -> float:
    return math.remainder(phase, 2 * np.pi)


def check_edges(field: TransverseField, *, where: str = "", escalate: bool = False) -> float:
    """Warn (or raise with ``escalate``) when norm piles up near the grid edges."""
    frac = field.edge_fraction()
    if escalate and frac > EDGE_ERROR:
        raise WrapAroundError(f"edge norm fraction {frac:.1e} exceeds {EDGE_ERROR:g}{' at ' + where if where else ''}; "
                              "widen the grid")
    if frac > EDGE_WARN:
        # one significant digit so repeated warnings collapse into one
        warnings.warn(f"edge norm fraction ~{frac:.0e} exceeds {EDGE_WARN:g}"
                      f"{' at ' + where if where else ''}", WrapAroundWarning, stacklevel=2)
    return frac


def cosine_taper(grid: Grid1D, fraction: float = 0.05) -> np.ndarray:
    """Absorbing profile: 1 in the interior, cosine roll-off to 0 over the outer ``fraction``."""
    m = max(1, int(fraction * grid.n))
    w = np.ones(grid.n)
    ramp = 0.5 * (1 - np.cos(np.pi * np.arange(m) / m))
    w[:m] = ramp
    w[-m:] = ramp[::-1]
    return w


def propagate_spectral(field: TransverseField, dy: float, *, absorber: np.ndarray | None = None,
                       check: bool = True) -> TransverseField:
    """Advance ``field`` by ``dy`` (negative values run backwards).

    With tilt ``tau`` the mode ``q + tau`` picks up ``exp(-i (q + tau)^2 dy / 2k)``;
    the cross term is a translation by ``tau dy / k`` applied to the samples and
    ``-tau^2 dy / 2k`` is folded into the scalar phase.
    """
    if dy == 0:
        return field
    k = field.wavenumber
    tau = field.tilt
    c = sfft.fft(field.samples, norm="ortho")
    c *= free_multiplier(field.grid, k, dy, tau * dy / k)
    samples = sfft.ifft(c, norm="ortho")
    if absorber is not None:
        samples = samples * absorber
    out = field.with_samples(samples, station=field.station + dy,
                             phase=_wrap(field.phase - tau * tau * dy / (2 * k)), label="free")
    if check:
        check_edges(out, where=f"y={out.station:.4g} m")
    return out


def propagate_kirchhoff(field: TransverseField, dy: float, *, out_grid: Grid1D | None = None,
                        chunk: int = 512) -> TransverseField:
    """Direct Fresnel-Kirchhoff sum over the nonzero input samples.

    ``psi(x) = sqrt(k / 2 pi dy) exp(-i pi/4) sum_j psi_j exp(i k (x - x_j)^2 / 2 dy) dx``.
    The constant ``exp(-i pi/4)`` stays in the samples so that the result can be
    compared sample by sample with :func:`propagate_spectral`.
    """
    if not dy > 0:
        raise ValueError(f"Kirchhoff propagation needs dy > 0, got {dy!r}")
    grid = field.grid
    out_grid = out_grid or grid
    if max(grid.n, out_grid.n) > KIRCHHOFF_MAX_N:
        raise ValueError(f"direct quadrature is limited to {KIRCHHOFF_MAX_N} points")
    k = field.wavenumber
    psi = field.samples * np.exp(1j * field.tilt * grid.x) if field.tilt else field.samples
    support = np.flatnonzero(psi)
    xs, ps = grid.x[support], psi[support]
    x = out_grid.x
    pref = np.sqrt(k / (2 * np.pi * dy)) * np.exp(-0.25j * np.pi) * grid.dx
    out = np.empty(out_grid.n, dtype=complex)
    for start in range(0, out_grid.n, chunk):
        xx = x[start:start + chunk, None]
        out[start:start + chunk] = np.exp(1j * k * (xx - xs) ** 2 / (2 * dy)) @ ps
    out *= pref
    if field.tilt:
        out *= np.exp(-1j * field.tilt * x)
    return TransverseField(out_grid, out, field.station + dy, k, field.tilt, field.phase, "free")
