"""Wave simulation of a three-grating atom interferometer with single-photon recoil."""

__version__ = "0.1.0"

from .scenario import PhysicalSetup, DerivedQuantities, derive, fig1_setup, load_config  # noqa: E402
from .wavefield import Grid1D, GratingMask, TransverseField, default_grid  # noqa: E402
from .interferometer import Interferometer, PipelineConfig  # noqa: E402

__all__ = [
    "PhysicalSetup", "DerivedQuantities", "derive", "fig1_setup", "load_config",
    "Grid1D", "GratingMask", "TransverseField", "default_grid",
    "Interferometer", "PipelineConfig",
]
