"""Bound states of the 1-D Klein-Gordon equation with the q-deformed Hulthen potential.

The solver factorizes the energy-dependent effective Hamiltonian with an ansatz
superpotential, iterates the partner-Hamiltonian hierarchy to enumerate levels,
and solves the implicit energy condition eps_n(E) = E^2 - m^2 per level on the
Hermitian, PT-symmetric and non-Hermitian deformation branches.  An independent
finite-difference eigensolver cross-checks the Hermitian spectra.
"""

from .errors import (
    ConfigError,
    DegenerateRootError,
    DomainError,
    GammaPositivityWarning,
    KGHierarchyError,
    NoBoundStateError,
    NonConvergenceError,
    NonNormalizableError,
    NoRootError,
    OuterDivergenceError,
    ZeroNuError,
)
from .grid import GridFunction
from .hierarchy import (
    HierarchyLevel,
    Superpotential,
    apply_ladder,
    hierarchy_potential,
    level,
    make_superpotential,
    partner_potentials,
    riccati_check,
    riccati_residual,
    solve_nu1,
    superpotential_derivative,
    superpotential_eval,
)
from .oracle import (
    BandedOperator,
    CompareReport,
    CompareRow,
    OracleConfig,
    OracleResult,
    compare,
    discretize,
    partner_eigenvalues,
    solve_selfconsistent,
)
from .potential import (
    Branch,
    GammaPair,
    PotentialParams,
    deformation_kernel,
    effective_potential,
    effective_potential_direct,
    gammas,
    scalar_potential,
    vector_potential,
)
from .spectra import (
    EnergyLevel,
    LevelFlag,
    PlusMinusPair,
    closed_form_energy,
    energy_residual,
    nonhermitian_energy,
    pt_energy,
    solve_level,
    spectrum,
)
from .wavefunctions import WAVEFORM_NOTE, closed_form_psi, ground_state_from_W, node_count

__all__ = [
    "Branch",
    "PotentialParams",
    "GammaPair",
    "GridFunction",
    "HierarchyLevel",
    "Superpotential",
    "EnergyLevel",
    "LevelFlag",
    "PlusMinusPair",
    "OracleConfig",
    "OracleResult",
    "BandedOperator",
    "CompareReport",
    "CompareRow",
    "WAVEFORM_NOTE",
    "apply_ladder",
    "closed_form_energy",
    "closed_form_psi",
    "compare",
    "deformation_kernel",
    "discretize",
    "effective_potential",
    "effective_potential_direct",
    "energy_residual",
    "gammas",
    "ground_state_from_W",
    "hierarchy_potential",
    "level",
    "make_superpotential",
    "node_count",
    "nonhermitian_energy",
    "partner_eigenvalues",
    "partner_potentials",
    "pt_energy",
    "riccati_check",
    "riccati_residual",
    "scalar_potential",
    "solve_level",
    "solve_nu1",
    "solve_selfconsistent",
    "spectrum",
    "superpotential_derivative",
    "superpotential_eval",
    "vector_potential",
    "ConfigError",
    "DegenerateRootError",
    "DomainError",
    "GammaPositivityWarning",
    "KGHierarchyError",
    "NoBoundStateError",
    "NonConvergenceError",
    "NonNormalizableError",
    "NoRootError",
    "OuterDivergenceError",
    "ZeroNuError",
]

__version__ = "0.1.0"
