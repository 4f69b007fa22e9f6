"""Spectral toolkit for matrix Schrodinger operators on the half line."""
from . import _backend
from .errors import MatspecError
from .potential import MatrixPotential, PotentialTerm, load_potential, dump_potential, potential_from_dict

BACKEND = _backend.NAME

__all__ = ["BACKEND", "MatspecError", "MatrixPotential", "PotentialTerm", "load_potential",
           "dump_potential", "potential_from_dict"]
__version__ = "0.1.0"
