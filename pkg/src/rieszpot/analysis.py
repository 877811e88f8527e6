"""Theory-conformance checkers and solvability diagnostics.

The checkers recompute variational residuals from a solution's stored
potential and field vectors, independently of the solver's internal
gradient.  Truncation sweeps solve the cone and unit-mass problems on a
nested family of annuli and classify solvability from the extrapolated
cone mass.
"""

from __future__ import annotations

import enum
import io
import json
from dataclasses import dataclass

import numpy as np

from .geometry import NodeSet, annulus_shell_radii, make_truncated_complement
from .kernel import KernelContext
from .measures import DiscreteMeasure, SignedMeasure, signed_from_parts
from .solvers import Solution, SolverConfig, solve_gauss_variational, solve_pseudo_balayage

# objectives on nested node sets are monotone up to solver accuracy
MONOTONICITY_SLACK = 1e-8


class AnalysisError(RuntimeError):
    """A structural property that should hold by construction was violated."""


@dataclass(frozen=True)
class CharacterizationReport:
    """Residuals of the variational characterization of a solution.

    ``min_excess`` is the worst pointwise violation of the potential
    inequality; ``complementarity`` measures how far the solution is from
    being orthogonal to its own excess.  For unit-mass solutions the
    residuals are shifted by the equilibrium constant and complementarity
    is the largest excess over the support.
    """

    min_excess: float
    complementarity: float
    passed: bool
    scale: float
    equilibrium_constant: float | None = None


def check_pseudo_balayage(sol: Solution, tol: float) -> CharacterizationReport:
    """Audit a cone solution: potential >= field on all nodes, equality in mean."""
    excess = sol.potential_values - sol.field_values
    w = sol.measure.weights
    scale = max(1.0, float(np.max(np.abs(sol.field_values)))) if len(w) else 1.0
    min_excess = float(np.min(excess))
    complementarity = float(w @ excess)
    passed = min_excess >= -tol and abs(complementarity) <= tol * scale
    return CharacterizationReport(
        min_excess=min_excess,
        complementarity=complementarity,
        passed=passed,
        scale=scale,
    )


def check_weighted_equilibrium(sol: Solution, tol: float) -> CharacterizationReport:
    """Audit a unit-mass solution against its equilibrium constant.

    The constant is recomputed two ways (directly as the weighted mean of
    the weighted potential, and via the objective minus the field integral)
    and must agree to 1e-8 relative.
    """
    w = sol.measure.weights
    weighted_potential = sol.potential_values - sol.field_values
    constant_direct = float(w @ weighted_potential)
    field_integral = -float(w @ sol.field_values)  # integral of f = -U^omega
    constant_via_objective = sol.report.objective - field_integral
    agree = abs(constant_direct - constant_via_objective) <= 1e-8 * max(
        1.0, abs(constant_direct)
    )
    scale = max(1.0, float(np.max(np.abs(sol.field_values)))) if len(w) else 1.0
    excess = weighted_potential - constant_direct
    min_excess = float(np.min(excess))
    support_excess = excess[w > 0.0]
    complementarity = max(0.0, float(np.max(support_excess))) if support_excess.size else 0.0
    passed = min_excess >= -tol and complementarity <= tol * scale and agree
    return CharacterizationReport(
        min_excess=min_excess,
        complementarity=complementarity,
        passed=passed,
        scale=scale,
        equilibrium_constant=constant_direct,
    )


@dataclass(frozen=True)
class BalayageReport:
    """Equality audit for the alpha <= 2 specialization."""

    max_equality_residual: float  # relative to the field scale
    total_mass: float
    passed: bool
    solution: Solution


def check_balayage_specialization(
    omega: DiscreteMeasure,
    A: NodeSet,
    ctx: KernelContext,
    tol: float,
    cfg: SolverConfig | None = None,
) -> BalayageReport:
    """For alpha <= 2 and a positive field measure, the cone solution must
    reproduce the field potential on ALL nodes of A, not only where it has
    mass.  The residual is relative to the largest field value.
    """
    if ctx.alpha > 2.0:
        raise ValueError(
            f"the potential-equality property requires alpha <= 2, got {ctx.alpha}"
        )
    sol = solve_pseudo_balayage(signed_from_parts(omega), A, ctx, cfg)
    scale = float(np.max(np.abs(sol.field_values)))
    residual = float(np.max(np.abs(sol.potential_values - sol.field_values)))
    rel = residual / scale if scale > 0.0 else residual
    return BalayageReport(
        max_equality_residual=rel,
        total_mass=sol.measure.total_mass(),
        passed=rel <= tol,
        solution=sol,
    )


class ThinnessVerdict(enum.Enum):
    DIVERGES_LIKELY = "diverges_likely"
    CONVERGES_LIKELY = "converges_likely"


def thinness_series(shell_capacities, q: float, alpha: float, dim: int):
    """Partial sums of the shell-capacity series c_j / q**(j*(dim-alpha)).

    Shell j covers q**j <= |x| < q**(j+1); entry k of ``shell_capacities``
    is shell j = k + 1.  The verdict is a heuristic over finitely many
    shells: if the trailing terms decay by less than a factor 0.9 per
    shell, the series is flagged as likely divergent.
    """
    if q <= 1.0:
        raise ValueError(f"q must exceed 1, got {q}")
    caps = np.asarray(shell_capacities, dtype=float)
    j = np.arange(1, len(caps) + 1)
    terms = caps / q ** (j * (dim - alpha))
    partial_sums = np.cumsum(terms)
    positive = terms[terms > 0.0]
    if len(positive) < 2:
        return partial_sums, ThinnessVerdict.CONVERGES_LIKELY
    window = positive[-min(10, len(positive)):]
    ratio = (window[-1] / window[0]) ** (1.0 / (len(window) - 1))
    verdict = (
        ThinnessVerdict.DIVERGES_LIKELY if ratio >= 0.9 else ThinnessVerdict.CONVERGES_LIKELY
    )
    return partial_sums, verdict


class SweepVerdict(enum.Enum):
    UNSOLVABLE_MASS_DEFICIT = "unsolvable_mass_deficit"
    SOLVABLE_EQUAL_PB = "solvable_equal_pb"
    SOLVABLE_STRICT = "solvable_strict"


@dataclass(frozen=True)
class SweepRecord:
    """One truncation's solve results."""

    truncation_radius: float
    cone_mass: float
    cone_objective: float
    slice_objective: float
    equilibrium_constant: float
    support_radius: float
    converged: bool


@dataclass(frozen=True)
class SweepClassification:
    verdict: SweepVerdict
    m_infinity: float
    margin: float
    cone_objective_limit: float
    slice_objective_limit: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "verdict": self.verdict.value,
                "m_infinity": self.m_infinity,
                "margin": self.margin,
                "cone_objective_limit": self.cone_objective_limit,
                "slice_objective_limit": self.slice_objective_limit,
            },
            indent=2,
            sort_keys=True,
        )


def complement_family(
    inner_radius: float,
    outer_radii,
    nodes_per_shell: int,
    dim: int,
    ratio: float = 1.15,
) -> list[NodeSet]:
    """Nested annulus truncations sharing all inner shells.

    Every member gets the same per-shell node count, so each member's
    nodes are a subset of the next one's.
    """
    members = []
    for outer in outer_radii:
        shells = annulus_shell_radii(inner_radius, outer, ratio)
        members.append(
            make_truncated_complement(
                inner_radius, outer, nodes_per_shell * len(shells), dim, ratio
            )
        )
    return members


def _extrapolate(radii, values, decay_exponent: float) -> float:
    """Intercept of a least-squares fit value(R) = v_inf + a * R**decay_exponent."""
    basis = np.column_stack([np.ones(len(radii)), np.asarray(radii) ** decay_exponent])
    coef, *_ = np.linalg.lstsq(basis, np.asarray(values), rcond=None)
    return float(coef[0])


def truncation_sweep(
    omega: SignedMeasure,
    family,
    ctx: KernelContext,
    cfg: SolverConfig | None = None,
    margin: float = 0.02,
    weight_threshold: float = 1e-9,
):
    """Solve both problems on each truncation and classify solvability.

    Returns (records, classification).  The classification extrapolates the
    cone mass over the last three records with the kernel's decay rate
    R**(alpha - dim); the margin separates the three verdicts.  Objectives
    must be non-increasing across the (nested) family; a violation beyond
    slack on converged records raises AnalysisError.
    """
    family = list(family)
    if len(family) < 3:
        raise ValueError(f"sweep needs at least 3 truncations, got {len(family)}")
    radii = [float(np.max(member.radii())) for member in family]
    if any(r2 <= r1 for r1, r2 in zip(radii, radii[1:])):
        raise ValueError("family radii must be strictly increasing")

    records = []
    for member, radius in zip(family, radii):
        cone = solve_pseudo_balayage(omega, member, ctx, cfg)
        slice_sol = solve_gauss_variational(omega, member, ctx, cfg)
        w = slice_sol.measure.weights
        carriers = w > weight_threshold * float(np.max(w)) if np.max(w) > 0 else w > 0
        support_radius = float(np.max(member.radii()[carriers])) if np.any(carriers) else 0.0
        records.append(
            SweepRecord(
                truncation_radius=radius,
                cone_mass=cone.measure.total_mass(),
                cone_objective=cone.report.objective,
                slice_objective=slice_sol.report.objective,
                equilibrium_constant=slice_sol.report.equilibrium_constant,
                support_radius=support_radius,
                converged=cone.report.converged and slice_sol.report.converged,
            )
        )

    if all(r.converged for r in records):
        for name in ("cone_objective", "slice_objective"):
            vals = [getattr(r, name) for r in records]
            jumps = [b - a for a, b in zip(vals, vals[1:])]
            if any(j > MONOTONICITY_SLACK for j in jumps):
                raise AnalysisError(
                    f"{name} increased along the truncation family: {vals}"
                )

    tail = records[-3:]
    decay = ctx.alpha - ctx.dim
    m_inf = _extrapolate(
        [r.truncation_radius for r in tail], [r.cone_mass for r in tail], decay
    )
    if m_inf < 1.0 - margin:
        verdict = SweepVerdict.UNSOLVABLE_MASS_DEFICIT
    elif m_inf <= 1.0 + margin:
        verdict = SweepVerdict.SOLVABLE_EQUAL_PB
    else:
        verdict = SweepVerdict.SOLVABLE_STRICT
    classification = SweepClassification(
        verdict=verdict,
        m_infinity=m_inf,
        margin=margin,
        cone_objective_limit=_extrapolate(
            [r.truncation_radius for r in tail], [r.cone_objective for r in tail], decay
        ),
        slice_objective_limit=_extrapolate(
            [r.truncation_radius for r in tail], [r.slice_objective for r in tail], decay
        ),
    )
    return records, classification


def sweep_records_to_csv(records) -> str:
    """CSV with one row per truncation."""
    buf = io.StringIO()
    buf.write(
        "radius,cone_mass,cone_objective,slice_objective,"
        "equilibrium_constant,support_radius,converged\n"
    )
    for r in records:
        buf.write(
            f"{r.truncation_radius!r},{r.cone_mass!r},{r.cone_objective!r},"
            f"{r.slice_objective!r},{r.equilibrium_constant!r},"
            f"{r.support_radius!r},{str(r.converged).lower()}\n"
        )
    return buf.getvalue()
