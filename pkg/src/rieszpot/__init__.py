"""Riesz potential theory on finite point clouds.

Discretizes spheres, balls, and truncated ball complements into node sets,
evaluates Riesz kernels and Gauss functionals on discrete measures, and
solves the two associated variational problems: minimization over the cone
of positive measures and over its unit-mass slice.  Analysis helpers audit
the solutions against their variational characterizations and classify
solvability across truncation families.
"""

from .cli import ConfigError, run_config, run_scenario, validate_config
from .presets import list_presets, preset_config
from .analysis import (
    AnalysisError,
    BalayageReport,
    CharacterizationReport,
    SweepClassification,
    SweepRecord,
    SweepVerdict,
    ThinnessVerdict,
    check_balayage_specialization,
    check_pseudo_balayage,
    check_weighted_equilibrium,
    complement_family,
    sweep_records_to_csv,
    thinness_series,
    truncation_sweep,
)
from .errors import DimensionError, SingularityError
from .geometry import (
    NodeSet,
    annulus_shell_radii,
    invert,
    make_ball,
    make_sphere,
    make_truncated_complement,
    nearest_neighbor_spacing,
)
from .kernel import (
    KernelContext,
    KernelMatrix,
    energy,
    gauss_functional,
    kernel_matrix,
    mutual_energy,
    offdiagonal_energy,
    potential,
    riesz_kernel,
    signed_potential,
)
from .measures import (
    DiscreteMeasure,
    SignedMeasure,
    atoms,
    dirac,
    kelvin_transform,
    signed_from_parts,
)
from .solvers import (
    Solution,
    SolveReport,
    SolverConfig,
    minimize_on_cone,
    minimize_on_simplex,
    project_onto_simplex,
    solve_capacitary,
    solve_gauss_variational,
    solve_pseudo_balayage,
)

__all__ = [
    "AnalysisError",
    "BalayageReport",
    "CharacterizationReport",
    "ConfigError",
    "DimensionError",
    "DiscreteMeasure",
    "KernelContext",
    "KernelMatrix",
    "NodeSet",
    "SignedMeasure",
    "SingularityError",
    "Solution",
    "SolveReport",
    "SolverConfig",
    "SweepClassification",
    "SweepRecord",
    "SweepVerdict",
    "ThinnessVerdict",
    "annulus_shell_radii",
    "atoms",
    "check_balayage_specialization",
    "check_pseudo_balayage",
    "check_weighted_equilibrium",
    "complement_family",
    "dirac",
    "energy",
    "gauss_functional",
    "invert",
    "kelvin_transform",
    "kernel_matrix",
    "list_presets",
    "make_ball",
    "make_sphere",
    "make_truncated_complement",
    "minimize_on_cone",
    "minimize_on_simplex",
    "mutual_energy",
    "nearest_neighbor_spacing",
    "offdiagonal_energy",
    "potential",
    "preset_config",
    "project_onto_simplex",
    "riesz_kernel",
    "run_config",
    "run_scenario",
    "signed_from_parts",
    "signed_potential",
    "solve_capacitary",
    "solve_gauss_variational",
    "solve_pseudo_balayage",
    "sweep_records_to_csv",
    "thinness_series",
    "truncation_sweep",
    "validate_config",
]
