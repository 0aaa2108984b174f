"""Fourth-order operators L = d^4 + d u d + v with a doubly degenerate ground state."""

__version__ = "0.1.0"

from .catalog import CatalogEntry, by_name, example, follyton
from .darboux import add_eigenvalue_free, remove_eigenvalue, removal_isospectrality_check
from .errors import QuartopError
from .conserved_flow import evolve, initial_state, q_functional
from .numgrid import DiffScheme, Grid, GridFunction, differentiate, make_uniform_grid
from .operator_core import FactorizationData, PotentialPair, spectrum
from .wronskian_factor import factorization, potentials_from_wronskian, wronskians

__all__ = [
    "CatalogEntry",
    "DiffScheme",
    "FactorizationData",
    "Grid",
    "GridFunction",
    "PotentialPair",
    "QuartopError",
    "add_eigenvalue_free",
    "by_name",
    "differentiate",
    "evolve",
    "example",
    "factorization",
    "follyton",
    "initial_state",
    "make_uniform_grid",
    "potentials_from_wronskian",
    "q_functional",
    "remove_eigenvalue",
    "removal_isospectrality_check",
    "spectrum",
    "wronskians",
]
