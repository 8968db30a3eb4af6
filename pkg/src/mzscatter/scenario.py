"""Physical parameters of the three-grating interferometer and derived scales.

All quantities are SI. The abscissa used for every visibility curve is the
dimensionless ratio ``d_p / lambda_i`` where ``d_p = (2 pi / k d) y'_12`` is
the separation of the zeroth- and first-order paths at the scattering plane.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from enum import Enum
from pathlib import Path

HBAR = 1.054571817e-34  # J s
NA_MASS = 3.8175e-26  # kg

#: Relative tolerance between an explicit ``k`` and ``m v / hbar`` in a config.
CONFIG_K_TOLERANCE = 1e-6

CONFIG_KEYS = (
    "k", "k_i", "d", "delta", "n", "y12", "y23",
    "mass", "velocity", "B_i_re", "B_i_im",
)


class InvalidParameterError(ValueError):
    """A physical parameter is outside its admissible range."""


class ConfigError(ValueError):
    """A configuration file could not be turned into a :class:`PhysicalSetup`."""


@dataclass(frozen=True)
class PhysicalSetup:
    """Geometry and wavenumbers of one interferometer.

    ``k`` is the atomic centre-of-mass wavenumber, ``k_i`` the photon
    wavenumber, ``d`` the grating pitch, ``delta`` the slit width and ``n``
    the number of slits of the first grating lit by the incident wave.
    """

    k: float
    k_i: float
    d: float
    delta: float
    n: int
    y12: float
    y23: float
    B_i: complex = 1.0 + 0.0j
    mass: float | None = None
    velocity: float | None = None

    def __post_init__(self):
        for name in ("k", "k_i", "d", "delta", "y12", "y23"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{name} must be a positive length/wavenumber, got {value!r}")
        if self.delta > self.d:
            raise InvalidParameterError(f"slit width {self.delta} exceeds pitch {self.d}")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidParameterError(f"slit count must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "B_i", complex(self.B_i))
        if (self.mass is None) != (self.velocity is None):
            raise InvalidParameterError("mass and velocity must be given together")
        if self.mass is not None:
            if self.mass <= 0 or self.velocity <= 0:
                raise InvalidParameterError("mass and velocity must be positive")
            k_mv = self.mass * self.velocity / HBAR
            if abs(self.k - k_mv) >= 1e-12 * self.k:
                raise InvalidParameterError(f"k={self.k!r} is not mass*velocity/hbar={k_mv!r}")

    @classmethod
    def from_mass_velocity(cls, mass: float, velocity: float, **kwargs) -> "PhysicalSetup":
        """Build a setup with ``k = m v / hbar``."""
        if mass <= 0 or velocity <= 0:
            raise InvalidParameterError("mass and velocity must be positive")
        return cls(k=mass * velocity / HBAR, mass=mass, velocity=velocity, **kwargs)

    def replace(self, **changes) -> "PhysicalSetup":
        values = asdict(self)
        values.update(changes)
        return PhysicalSetup(**values)

    def to_config(self) -> dict:
        """Flat JSON-ready mapping using the config-file key names."""
        out = {
            "k": self.k, "k_i": self.k_i, "d": self.d, "delta": self.delta,
            "n": self.n, "y12": self.y12, "y23": self.y23,
            "B_i_re": self.B_i.real, "B_i_im": self.B_i.imag,
        }
        if self.mass is not None:
            out["mass"] = self.mass
            out["velocity"] = self.velocity
        return out


@dataclass(frozen=True)
class DerivedQuantities:
    de_broglie_wavelength: float
    photon_wavelength: float
    talbot_length: float
    path_separation_coefficient: float  # d_p per unit y'_12, i.e. 2 pi / (k d)
    near_field_bound: float = field(default=0.0)


class Region(str, Enum):
    NEAR_FIELD = "near_field"
    FAR_FIELD = "far_field"


def fig1_setup() -> PhysicalSetup:
    """Sodium-beam parameters of the reference figure (589 nm light, 200 nm gratings)."""
    return PhysicalSetup(
        k=5.09e11,
        k_i=2 * math.pi / 589e-9,
        d=200e-9,
        delta=100e-9,
        n=24,
        y12=0.65,
        y23=0.65,
    )


def derive(setup: PhysicalSetup) -> DerivedQuantities:
    lam = 2 * math.pi / setup.k
    talbot = 2 * setup.d ** 2 / lam
    return DerivedQuantities(
        de_broglie_wavelength=lam,
        photon_wavelength=2 * math.pi / setup.k_i,
        talbot_length=talbot,
        path_separation_coefficient=2 * math.pi / (setup.k * setup.d),
        near_field_bound=10 * talbot,
    )


def dp_from_y12prime(y12prime: float, setup: PhysicalSetup) -> float:
    """Path separation ``d_p`` at a scattering plane ``y'_12`` behind grating 1."""
    return 2 * math.pi / (setup.k * setup.d) * y12prime


def dp_ratio_to_y12prime(ratio: float, setup: PhysicalSetup) -> float:
    """Distance ``y'_12`` at which ``d_p / lambda_i`` equals ``ratio``."""
    if not ratio >= 0:
        raise InvalidParameterError(f"d_p/lambda_i must be non-negative, got {ratio!r}")
    lam_i = 2 * math.pi / setup.k_i
    return ratio * lam_i * setup.k * setup.d / (2 * math.pi)


def y12prime_to_dp_ratio(y12prime: float, setup: PhysicalSetup) -> float:
    if not y12prime >= 0:
        raise InvalidParameterError(f"y'_12 must be non-negative, got {y12prime!r}")
    lam_i = 2 * math.pi / setup.k_i
    return y12prime * 2 * math.pi / (setup.k * setup.d * lam_i)


def classify_region(y: float, setup: PhysicalSetup) -> Region:
    """Near field of a grating extends to ten Talbot lengths."""
    if y < 0:
        raise InvalidParameterError(f"distance must be non-negative, got {y!r}")
    if y < derive(setup).near_field_bound:
        return Region.NEAR_FIELD
    return Region.FAR_FIELD


def setup_from_mapping(data: dict, *, source: str = "<config>") -> PhysicalSetup:
    """Validate a flat config mapping and build the setup it describes.

    Either ``k`` or the pair ``mass``/``velocity`` must be present. When both
    are given they must agree to :data:`CONFIG_K_TOLERANCE`.
    """
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a JSON object")
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"{source}: unknown key(s) {', '.join(map(repr, unknown))}; "
                          f"allowed keys are {', '.join(CONFIG_KEYS)}")
    for key, value in data.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{source}: key {key!r} must be a number, got {value!r}")
    required = ("k_i", "d", "delta", "n", "y12", "y23")
    missing = [key for key in required if key not in data]
    if missing:
        raise ConfigError(f"{source}: missing key(s) {', '.join(map(repr, missing))}")
    has_mv = "mass" in data or "velocity" in data
    if has_mv and not ("mass" in data and "velocity" in data):
        raise ConfigError(f"{source}: 'mass' and 'velocity' must be given together")
    if "k" not in data and not has_mv:
        raise ConfigError(f"{source}: give either 'k' or both 'mass' and 'velocity'")
    if isinstance(data["n"], float) and not data["n"].is_integer():
        raise ConfigError(f"{source}: key 'n' must be an integer, got {data['n']!r}")

    common = dict(
        k_i=float(data["k_i"]), d=float(data["d"]), delta=float(data["delta"]),
        n=int(data["n"]), y12=float(data["y12"]), y23=float(data["y23"]),
        B_i=complex(data.get("B_i_re", 1.0), data.get("B_i_im", 0.0)),
    )
    try:
        if has_mv:
            k_mv = data["mass"] * data["velocity"] / HBAR
            if "k" in data and abs(data["k"] - k_mv) > CONFIG_K_TOLERANCE * abs(data["k"]):
                raise ConfigError(
                    f"{source}: 'k'={data['k']!r} disagrees with mass*velocity/hbar={k_mv!r} "
                    f"(relative tolerance {CONFIG_K_TOLERANCE:g})")
            return PhysicalSetup.from_mass_velocity(float(data["mass"]), float(data["velocity"]), **common)
        return PhysicalSetup(k=float(data["k"]), **common)
    except InvalidParameterError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_config(path: str | Path) -> PhysicalSetup:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from exc
    return setup_from_mapping(data, source=str(path))
