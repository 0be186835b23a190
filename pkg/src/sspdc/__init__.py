"""Design and analysis tools for simultaneous type-II QPM photon-pair sources."""

from ._kernels import BACKEND
from .dispersion import (Axis, DispersionFileError, DispersionModel, DomainError,
                         birefringence, load_crystal, load_model, refractive_index)

__version__ = "0.1.0"

__all__ = [
    "Axis", "BACKEND", "DispersionFileError", "DispersionModel", "DomainError",
    "birefringence", "load_crystal", "load_model", "refractive_index",
]
