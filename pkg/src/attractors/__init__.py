"""Closed-form and numerical attractor points for torus and E x K3 moduli."""

from __future__ import annotations

from importlib import resources

__version__ = "0.1.0"

from .algebra import GramLattice, QuadNumber
from .errors import (
    AsymmetricCharge,
    AttractorError,
    DegenerateCoefficients,
    DependentVectors,
    DomainError,
    NoAttractor,
)
from .inverse import Picard9Period, charge_from_period, clear_denominators
from .k3 import MukaiVector, kahler_rigidity, mukai_pair, solve_complex_exs, solve_kahler_exs
from .torus import (
    KahlerTorusCharge,
    SiegelPoint,
    TorusCharge,
    invariants,
    mirror_cover,
    residual,
    solve_complex_general,
    solve_complex_symmetric,
    solve_kahler,
)


def sample_gw_table_path():
    """Path of the bundled quintic GW sample (degrees 1 to 3)."""
    return resources.files(__name__).joinpath("data/quintic_gw_sample.csv")


__all__ = [
    "__version__",
    "AsymmetricCharge",
    "AttractorError",
    "DegenerateCoefficients",
    "DependentVectors",
    "DomainError",
    "GramLattice",
    "KahlerTorusCharge",
    "MukaiVector",
    "NoAttractor",
    "Picard9Period",
    "QuadNumber",
    "SiegelPoint",
    "TorusCharge",
    "charge_from_period",
    "clear_denominators",
    "invariants",
    "kahler_rigidity",
    "mirror_cover",
    "mukai_pair",
    "residual",
    "sample_gw_table_path",
    "solve_complex_exs",
    "solve_complex_general",
    "solve_complex_symmetric",
    "solve_kahler",
    "solve_kahler_exs",
]
