"""Photon recoil: kicked wavefunctions and laws for the transferred transverse momentum.

A single scattered photon adds ``dk`` to the transverse wavenumber of the atom
at a plane ``y'`` behind the first grating, with ``0 <= dk <= 2 k_i``. The
kicked state is the free state translated by the ballistic deflection
``dk (y - y') / k`` and tilted by ``exp(i dk x)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from .propagation import AngularSpectrum, free_multiplier, propagate_spectral, _wrap
from .scenario import PhysicalSetup, InvalidParameterError
from .wavefield import TransverseField


@dataclass(frozen=True)
class KickEvent:
    """Momentum ``dkx`` transferred at ``location`` (distance behind grating 1)."""

    dkx: float
    location: float

    def __post_init__(self):
        if not (self.dkx >= 0 and math.isfinite(self.dkx)):
            raise InvalidParameterError(f"transferred momentum must be >= 0, got {self.dkx!r}")
        if not (self.location >= 0 and math.isfinite(self.location)):
            raise InvalidParameterError(f"event location must be >= 0, got {self.location!r}")

    @classmethod
    def for_setup(cls, setup: PhysicalSetup, dkx: float, location: float) -> "KickEvent":
        if dkx > 2 * setup.k_i * (1 + 1e-12):
            raise InvalidParameterError(f"dkx = {dkx:.6g} exceeds the backscatter bound 2 k_i = {2 * setup.k_i:.6g}")
        if location >= setup.y12:
            raise InvalidParameterError(f"event at {location:.6g} m is not before grating 2 (y12 = {setup.y12:.6g} m)")
        return cls(float(dkx), float(location))

    def shift_at_event(self, k: float) -> float:
        """Lateral offset ``dkx y' / k`` accumulated by the kicked path up to the event plane."""
        return self.dkx * self.location / k


def kick_closed_form(spec: AngularSpectrum, event: KickEvent, observation_y: float) -> TransverseField:
    """Kicked field at ``observation_y`` built directly from the grating-exit spectrum.

    The free field evaluated at ``x - dkx (y - y') / k`` is obtained by a
    spectral translation, so sub-sample shifts are exact for band-limited
    fields. The factor ``exp(i dkx x)`` is kept as the tilt of the result and
    ``exp(i dkx dx0 - i dkx^2 y / k)`` as its scalar phase.
    """
    if spec.tilt:
        raise ValueError("closed form expects an untilted grating-exit spectrum")
    if observation_y < event.location:
        raise ValueError(f"observation plane {observation_y!r} lies before the event at {event.location!r}")
    k = spec.wavenumber
    y = observation_y - spec.station
    yp = event.location - spec.station
    s = event.dkx * (y - yp) / k
    c = spec.coefficients * free_multiplier(spec.grid, k, y, s)
    samples = sfft.ifft(c, norm="ortho")
    phase = spec.phase + event.dkx * event.shift_at_event(k) - event.dkx ** 2 * y / k
    return TransverseField(spec.grid, samples, observation_y, k, event.dkx, _wrap(phase), "kicked")


def kick_boost_route(field_at_event: TransverseField, event: KickEvent, remaining_distance: float,
                     *, mode: str = "tilt", check: bool = True) -> TransverseField:
    """Multiply by ``exp(i dkx x)`` at the event plane, then propagate freely.

    ``mode="tilt"`` records the boost as a tilt (an exact translation of the
    spectrum by ``dkx``). ``mode="samples"`` multiplies the stored samples,
    which is only faithful when the boosted spectrum still fits below the grid
    Nyquist wavenumber.
    """
    if not math.isclose(field_at_event.station, event.location, rel_tol=1e-12, abs_tol=1e-15):
        raise ValueError(f"field is at y={field_at_event.station!r}, event at {event.location!r}")
    if mode == "tilt":
        boosted = field_at_event.with_samples(field_at_event.samples, tilt=field_at_event.tilt + event.dkx)
    elif mode == "samples":
        boosted = field_at_event.with_samples(field_at_event.samples * np.exp(1j * event.dkx * field_at_event.grid.x))
    else:
        raise ValueError(f"unknown boost mode {mode!r}")
    return propagate_spectral(boosted, remaining_distance, check=check)


def route_phase_offset(event: KickEvent, observation_y: float, k: float) -> float:
    """Constant phase of closed-form over boost-route results (the two derivations differ by it)."""
    y, yp, dk = observation_y, event.location, event.dkx
    return dk * dk * yp / k - dk * dk * y / k + dk * dk * (y - yp) / (2 * k)


# momentum laws ------------------------------------------------------------------


def _gauss_legendre(count: int, a: float, b: float):
    t, w = np.polynomial.legendre.leggauss(count)
    half = 0.5 * (b - a)
    return a + half * (t + 1), half * w


@dataclass(frozen=True)
class MomentumDistribution:
    """Base for laws on ``[0, 2 k_i]``. Subclasses define :meth:`_density`."""

    k_i: float

    name = "distribution"
    symmetry_center = None

    def __post_init__(self):
        if not self.k_i > 0:
            raise InvalidParameterError(f"k_i must be positive, got {self.k_i!r}")

    @property
    def upper(self) -> float:
        return 2 * self.k_i

    def density(self, u):
        u = np.asarray(u, dtype=float)
        inside = (u >= 0) & (u <= self.upper)
        out = np.where(inside, self._density(np.clip(u, 0, self.upper)), 0.0)
        return out if out.ndim else float(out)

    def _density(self, u):
        raise NotImplementedError

    def quadrature_nodes(self, count: int = 64):
        """Gauss-Legendre nodes on ``[0, 2 k_i]`` with weights ``P(u_j) w_j``."""
        if count < 2:
            raise ValueError("node count must be >= 2")
        u, w = _gauss_legendre(count, 0.0, self.upper)
        return u, w * self._density(u)

    def describe(self) -> dict:
        return {"distribution": self.name}


@dataclass(frozen=True)
class Point(MomentumDistribution):
    """Every atom receives exactly ``dkx``."""

    dkx: float = 0.0
    name = "point"

    def __post_init__(self):
        super().__post_init__()
        if not 0 <= self.dkx <= self.upper * (1 + 1e-12):
            raise InvalidParameterError(f"point kick {self.dkx!r} outside [0, 2 k_i]")

    @property
    def symmetry_center(self):
        return self.dkx

    def density(self, u):
        raise TypeError("a point distribution has no density")

    def quadrature_nodes(self, count: int = 64):
        return np.array([self.dkx]), np.array([1.0])

    def describe(self) -> dict:
        return {"distribution": self.name, "dkx_over_ki": self.dkx / self.k_i}


@dataclass(frozen=True)
class Uniform(MomentumDistribution):
    name = "uniform"

    @property
    def symmetry_center(self):
        return self.k_i

    def _density(self, u):
        return np.full_like(u, 1 / (2 * self.k_i))


@dataclass(frozen=True)
class MandelWolf(MomentumDistribution):
    """Dipole law ``(3 / 8 k_i) [1 + (1 - u/k_i)^2]``."""

    name = "mw"

    @property
    def symmetry_center(self):
        return self.k_i

    def _density(self, u):
        return 3 / (8 * self.k_i) * (1 + (1 - u / self.k_i) ** 2)


@dataclass(frozen=True)
class TruncatedGaussian(MomentumDistribution):
    """Half-Gaussian of width ``N k_i`` cut at ``2 k_i`` and renormalized to unit mass."""

    N: float = 1.0
    name = "gauss"

    def __post_init__(self):
        super().__post_init__()
        if not (self.N > 0 and math.isfinite(self.N)):
            raise InvalidParameterError(f"Gaussian width N must be positive, got {self.N!r}")

    def _density(self, u):
        w = self.N * self.k_i
        return 2 / (w * math.sqrt(math.pi)) * np.exp(-(u / w) ** 2) / math.erf(2 / self.N)

    def describe(self) -> dict:
        return {"distribution": self.name, "N": self.N}


@dataclass(frozen=True)
class Tabulated(MomentumDistribution):
    """Piecewise-linear density through ``(t_j, rho_j)`` with ``t = dkx / k_i`` in ``[0, 2]``."""

    t: tuple = ()
    rho: tuple = ()
    name = "table"

    def __post_init__(self):
        super().__post_init__()
        t = np.asarray(self.t, dtype=float)
        rho = np.asarray(self.rho, dtype=float)
        if t.ndim != 1 or t.size < 2 or t.shape != rho.shape:
            raise InvalidParameterError("table needs at least two (dkx_over_ki, density) rows")
        if np.any(np.diff(t) <= 0):
            raise InvalidParameterError("table abscissa must be strictly increasing")
        if t[0] < 0 or t[-1] > 2:
            raise InvalidParameterError("table abscissa must lie in [0, 2]")
        if np.any(rho < 0) or not np.all(np.isfinite(rho)):
            raise InvalidParameterError("table densities must be finite and non-negative")
        if np.trapezoid(rho, t) <= 0:
            raise InvalidParameterError("table has zero total mass")
        object.__setattr__(self, "t", tuple(t))
        object.__setattr__(self, "rho", tuple(rho))

    @property
    def _scale(self) -> float:
        return 1 / (self.k_i * np.trapezoid(self.rho, self.t))

    def _density(self, u):
        t = np.asarray(self.t)
        tt = u / self.k_i
        inside = (tt >= t[0]) & (tt <= t[-1])
        return np.where(inside, np.interp(tt, t, self.rho), 0.0) * self._scale

    def quadrature_nodes(self, count: int = 64):
        """Gauss-Legendre on every table segment, so kinks in the density are honoured."""
        if count < 2:
            raise ValueError("node count must be >= 2")
        t = np.asarray(self.t)
        per = max(2, math.ceil(count / (t.size - 1)))
        us, ws = [], []
        for a, b in zip(t[:-1], t[1:]):
            u, w = _gauss_legendre(per, a * self.k_i, b * self.k_i)
            us.append(u)
            ws.append(w * self._density(u))
        return np.concatenate(us), np.concatenate(ws)


@dataclass(frozen=True)
class Mixture(MomentumDistribution):
    """Convex combination of other laws."""

    components: tuple = ()
    weights: tuple = ()
    name = "mixture"

    def __post_init__(self):
        super().__post_init__()
        w = np.asarray(self.weights, dtype=float)
        if len(self.components) == 0 or len(self.components) != w.size:
            raise InvalidParameterError("mixture needs one weight per component")
        if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
            raise InvalidParameterError("mixture weights must be non-negative and sum to 1")

    def _density(self, u):
        return sum(w * c.density(u) for c, w in zip(self.components, self.weights))

    def quadrature_nodes(self, count: int = 64):
        us, ws = [], []
        for c, w in zip(self.components, self.weights):
            u, cw = c.quadrature_nodes(count)
            us.append(u)
            ws.append(w * cw)
        return np.concatenate(us), np.concatenate(ws)


def make_distribution(kind: str, k_i: float, *, N: float = 1.0, dkx_over_ki: float = 0.0,
                      table: str | Path | None = None) -> MomentumDistribution:
    if kind == "point":
        return Point(k_i, dkx_over_ki * k_i)
    if kind == "uniform":
        return Uniform(k_i)
    if kind == "mw":
        return MandelWolf(k_i)
    if kind == "gauss":
        return TruncatedGaussian(k_i, N)
    if kind == "table":
        if table is None:
            raise ValueError("a tabulated distribution needs a table file")
        return load_table(table, k_i)
    raise ValueError(f"unknown distribution {kind!r}")


def load_table(path: str | Path, k_i: float) -> Tabulated:
    """Read a ``dkx_over_ki,density`` CSV (``#`` comment lines allowed)."""
    path = Path(path)
    rows = []
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.reader(lines)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["dkx_over_ki", "density"]:
        raise ValueError(f"{path}: expected header 'dkx_over_ki,density'")
    for lineno, row in enumerate(reader, start=2):
        try:
            rows.append((float(row[0]), float(row[1])))
        except (ValueError, IndexError):
            raise ValueError(f"{path}: bad row {lineno}: {row!r}") from None
    t, rho = zip(*rows) if rows else ((), ())
    try:
        return Tabulated(k_i, t, rho)
    except InvalidParameterError as exc:
        raise ValueError(f"{path}: {exc}") from exc
