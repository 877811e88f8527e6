"""Gauss-functional minimization over the nonnegative cone and the unit-mass slice.

Both problems minimize the convex quadratic 0.5*w'Kw - b'w, where K is a
regularized kernel matrix and b the field potential at the nodes.  The
method is projected gradient descent: its stopping rule is exactly the
variational characterization of the minimizers (pointwise potential
inequality plus complementarity), so a converged run certifies the
solution by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np

from .geometry import NodeSet
from .kernel import KernelContext, KernelMatrix, kernel_matrix, signed_potential
from .measures import DiscreteMeasure

if TYPE_CHECKING:
    from .measures import SignedMeasure

STEP_RULES = ("adaptive_bb_with_monotone_fallback", "fixed_inverse_lipschitz")

# g recomputed from scratch this often to cap incremental-update drift
_REFRESH_EVERY = 128


@dataclass(frozen=True)
class SolverConfig:
    """Deterministic first-order solver settings.

    ``kkt_tol`` is relative: residuals are compared against
    ``kkt_tol * max(1, max|b|)``.
    """

    max_iters: int = 50_000
    kkt_tol: float = 1e-8
    step_rule: str = "adaptive_bb_with_monotone_fallback"

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.kkt_tol <= 0.0:
            raise ValueError(f"kkt_tol must be positive, got {self.kkt_tol}")
        if self.step_rule not in STEP_RULES:
            raise ValueError(f"step_rule must be one of {STEP_RULES}")


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one minimization.

    ``objective`` is the Gauss-functional value w'Kw - 2b'w (the doubled
    convention customary in weighted-energy problems); ``qp_objective`` is
    the raw quadratic-program value 0.5*w'Kw - b'w, i.e. half of it.  KKT
    residuals are normalized by max(1, max|b|), so ``converged`` implies
    both residuals are at most ``kkt_tol``.
    """

    objective: float
    qp_objective: float
    kkt_stationarity: float
    kkt_complementarity: float
    iterations: int
    converged: bool
    equilibrium_constant: float | None = None
    objective_trace: tuple = field(default=(), repr=False)

    def to_json_dict(self, total_mass: float) -> dict:
        return {
            "objective": self.qp_objective,
            "objective_paper_convention": self.objective,
            "kkt_stationarity": self.kkt_stationarity,
            "kkt_complementarity": self.kkt_complementarity,
            "iterations": self.iterations,
            "converged": self.converged,
            "equilibrium_constant": self.equilibrium_constant,
            "total_mass": total_mass,
        }

    def to_json(self, total_mass: float) -> str:
        return json.dumps(self.to_json_dict(total_mass), indent=2, sort_keys=True)


@dataclass(frozen=True)
class Solution:
    """A minimizing measure together with its certificate vectors."""

    measure: DiscreteMeasure
    report: SolveReport
    field_values: np.ndarray  # U^omega at the nodes
    potential_values: np.ndarray  # U^measure at the nodes


def project_onto_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {w >= 0, sum w = 1} by sort and threshold."""
    u = np.sort(v)[::-1]
    cumulative = np.cumsum(u)
    rho = np.nonzero(u + (1.0 - cumulative) / np.arange(1, len(v) + 1) > 0.0)[0][-1]
    shift = (1.0 - cumulative[rho]) / (rho + 1.0)
    return np.maximum(v + shift, 0.0)


def _as_matrix(K) -> np.ndarray:
    if isinstance(K, KernelMatrix):
        return K.entries
    return np.asarray(K, dtype=float)


def _spectral_norm_estimate(K: np.ndarray, iters: int = 30) -> float:
    """Power iteration from the all-ones vector; deterministic."""
    v = np.ones(K.shape[0])
    v /= np.linalg.norm(v)
    est = float(K[0, 0]) if K.shape[0] == 1 else 1.0
    for _ in range(iters):
        v = K @ v
        n = float(np.linalg.norm(v))
        if n == 0.0:
            return max(est, 1.0)
        est = n
        v /= n
    return max(est, np.finfo(float).tiny)


def _cone_residuals(w, g):
    stationarity = max(0.0, -float(np.min(g)))
    complementarity = abs(float(w @ g))
    return stationarity, complementarity


def _slice_residuals(w, g):
    c = float(w @ g)
    stationarity = max(0.0, c - float(np.min(g)))
    on_support = g[w > 0.0]
    complementarity = max(0.0, float(np.max(on_support)) - c) if on_support.size else 0.0
    return stationarity, complementarity


def _projected_gradient(
    K, b, project, residuals, cfg: SolverConfig, w0=None, deflate_constant=False
):
    """Shared driver; returns (w, stationarity, complementarity, iters, converged, trace).

    With ``deflate_constant`` the step direction is the gradient minus its
    current multiplier estimate w'g.  The simplex projection is invariant
    under shifts along the all-ones direction, so the iterates are
    unchanged in exact arithmetic, but the shift removes a large constant
    component that otherwise drowns the decrease test in rounding noise
    near the optimum.
    """
    n = len(b)
    scale = max(1.0, float(np.max(np.abs(b)))) if n else 1.0
    tol = cfg.kkt_tol * scale
    inv_l = 1.0 / _spectral_norm_estimate(K)
    adaptive = cfg.step_rule == "adaptive_bb_with_monotone_fallback"

    w = np.zeros(n) if w0 is None else project(np.asarray(w0, dtype=float))
    g = K @ w - b
    obj = 0.5 * float(w @ g - w @ b)
    trace = [obj]
    prev_w = prev_g = None
    iterations = 0
    stalled = False
    while iterations < cfg.max_iters:
        stat, comp = residuals(w, g)
        if stat <= tol and comp <= tol:
            # confirm against a freshly computed gradient before stopping;
            # the incremental update may sit a rounding error away from it
            g = K @ w - b
            stat, comp = residuals(w, g)
            if stat <= tol and comp <= tol:
                break

        step = inv_l
        if adaptive and prev_w is not None and not stalled:
            s = w - prev_w
            y = g - prev_g
            sy = float(s @ y)
            if sy > 0.0:
                # clamp to a sane multiple of the fixed step
                step = min(max(float(s @ s) / sy, 1e-3 * inv_l), 1e4 * inv_l)

        gdir = g - float(w @ g) if deflate_constant else g
        cand = project(w - step * gdir)
        d = cand - w
        Kd = K @ d
        decrease = float(gdir @ d) + 0.5 * float(d @ Kd)
        halvings = 0
        while decrease > 0.0 and halvings < 60:
            step *= 0.5
            cand = project(w - step * gdir)
            d = cand - w
            Kd = K @ d
            decrease = float(gdir @ d) + 0.5 * float(d @ Kd)
            halvings += 1
        if decrease > 0.0 or not np.any(d):
            if stalled:
                # stalled even on the fixed step with a fresh gradient: the
                # iterate cannot move at this precision
                break
            stalled = True
            iterations += 1
            g = K @ w - b
            continue
        stalled = False

        prev_w, prev_g = w, g
        w = cand
        obj += decrease
        iterations += 1
        if iterations % _REFRESH_EVERY == 0:
            g = K @ w - b
        else:
            g = g + Kd
        trace.append(obj)

    g = K @ w - b
    stat, comp = residuals(w, g)
    converged = stat <= tol and comp <= tol
    return w, g, stat / scale, comp / scale, iterations, converged, tuple(trace)


def _check_square_symmetric(K: np.ndarray, b: np.ndarray):
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"K must be square, got shape {K.shape}")
    if K.shape[0] != len(b):
        raise ValueError("b must match the side of K")
    if not np.array_equal(K, K.T):
        raise ValueError("K must be symmetric")


def minimize_on_cone(K, b, cfg: SolverConfig | None = None, w0=None):
    """Minimize 0.5*w'Kw - b'w over w >= 0.

    The stopping rule is the minimizer's characterization: the gradient
    Kw - b is (almost) nonnegative everywhere and (almost) orthogonal to w.
    Non-convergence is reported, not raised.
    """
    cfg = cfg or SolverConfig()
    Km = _as_matrix(K)
    b = np.asarray(b, dtype=float)
    _check_square_symmetric(Km, b)
    w, g, stat, comp, iters, ok, trace = _projected_gradient(
        Km, b, lambda v: np.maximum(v, 0.0), _cone_residuals, cfg, w0
    )
    gauss_value = float(w @ g - w @ b)  # w'Kw - 2b'w
    report = SolveReport(
        objective=gauss_value,
        qp_objective=0.5 * gauss_value,
        kkt_stationarity=stat,
        kkt_complementarity=comp,
        iterations=iters,
        converged=ok,
        objective_trace=trace,
    )
    return w, report


def minimize_on_simplex(K, b, cfg: SolverConfig | None = None, w0=None):
    """Minimize 0.5*w'Kw - b'w over w >= 0 with sum w = 1."""
    cfg = cfg or SolverConfig()
    Km = _as_matrix(K)
    b = np.asarray(b, dtype=float)
    _check_square_symmetric(Km, b)
    if w0 is None:
        w0 = np.full(len(b), 1.0 / len(b))
    w, g, stat, comp, iters, ok, trace = _projected_gradient(
        Km, b, project_onto_simplex, _slice_residuals, cfg, w0, deflate_constant=True
    )
    gauss_value = float(w @ g - w @ b)
    report = SolveReport(
        objective=gauss_value,
        qp_objective=0.5 * gauss_value,
        kkt_stationarity=stat,
        kkt_complementarity=comp,
        iterations=iters,
        converged=ok,
        equilibrium_constant=float(w @ g),
        objective_trace=trace,
    )
    return w, report


def solve_pseudo_balayage(
    omega: SignedMeasure, A: NodeSet, ctx: KernelContext, cfg: SolverConfig | None = None, w0=None
) -> Solution:
    """Project the signed field measure onto the positive measures on A.

    Minimizes the Gauss functional over all nonnegative weight vectors on
    A's nodes.  Field atoms may coincide with nodes of A; such entries use
    the regularized kernel diagonal.
    """
    if len(A) == 0:
        raise ValueError("A must contain at least one node")
    K = kernel_matrix(A, A, ctx)
    b = signed_potential(omega, A, ctx)
    w, report = minimize_on_cone(K, b, cfg, w0)
    return Solution(
        measure=DiscreteMeasure(A, w),
        report=report,
        field_values=b,
        potential_values=K.entries @ w,
    )


def solve_capacitary(Knodes: NodeSet, ctx: KernelContext, cfg: SolverConfig | None = None):
    """Capacitary (equilibrium) measure of a node set.

    Solves the cone problem with unit field b = 1, giving the measure with
    potential >= 1 on all nodes and = 1 where it has mass; its total mass
    is the set's capacity.
    """
    if len(Knodes) == 0:
        raise ValueError("node set must contain at least one node")
    K = kernel_matrix(Knodes, Knodes, ctx)
    b = np.ones(len(Knodes))
    w, report = minimize_on_cone(K, b, cfg)
    gamma = DiscreteMeasure(Knodes, w)
    return gamma, gamma.total_mass(), report


def solve_gauss_variational(
    omega: SignedMeasure, A: NodeSet, ctx: KernelContext, cfg: SolverConfig | None = None, w0=None
) -> Solution:
    """Minimize the Gauss functional over unit-mass measures on A.

    The minimizer's weighted potential sits at or above the equilibrium
    constant everywhere on A and at or below it on the support; the
    constant itself is returned in the report.
    """
    if len(A) == 0:
        raise ValueError("A must contain at least one node")
    K = kernel_matrix(A, A, ctx)
    b = signed_potential(omega, A, ctx)
    w, report = minimize_on_simplex(K, b, cfg, w0)
    return Solution(
        measure=DiscreteMeasure(A, w),
        report=report,
        field_values=b,
        potential_values=K.entries @ w,
    )


def report_with(report: SolveReport, **changes) -> SolveReport:
    """Copy of a report with selected fields replaced."""
    return replace(report, **changes)
