"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Criterion 10 re-runs criteria 3, 4, and 7 unchanged at
regularization factors 0.4 and 0.6.
"""

import numpy as np
import pytest

from rieszpot import (
    KernelContext,
    NodeSet,
    SolverConfig,
    SweepVerdict,
    atoms,
    check_balayage_specialization,
    check_pseudo_balayage,
    complement_family,
    dirac,
    kernel_matrix,
    make_ball,
    make_sphere,
    make_truncated_complement,
    minimize_on_cone,
    offdiagonal_energy,
    potential,
    signed_from_parts,
    solve_capacitary,
    solve_pseudo_balayage,
    truncation_sweep,
)
from rieszpot.measures import SignedMeasure, kelvin_transform

from test_solvers import cone_oracle, separated_cloud

TIGHT = SolverConfig(kkt_tol=1e-11)
SWEEP_RADII = [4.0, 8.0, 16.0, 32.0]


def _announce(number: int, name: str):
    print(f"ACCEPTANCE {number} ({name}): PASS")


def random_signed_field(rng, nodes, n_atoms=4, clearance=0.35):
    """Mixed-sign atoms kept clear of the target nodes."""
    positions = []
    while len(positions) < n_atoms:
        p = rng.uniform(-2.5, 2.5, 3)
        if np.min(np.linalg.norm(nodes.points - p, axis=1)) >= clearance:
            positions.append(p)
    masses = rng.uniform(0.2, 1.2, n_atoms) * rng.choice([-1.0, 1.0], n_atoms)
    plus = atoms(
        [p for p, m in zip(positions, masses) if m > 0] or np.zeros((0, 3)),
        masses[masses > 0],
        3,
    )
    minus = atoms(
        [p for p, m in zip(positions, masses) if m < 0] or np.zeros((0, 3)),
        -masses[masses < 0],
        3,
    )
    return SignedMeasure(plus=plus, minus=minus)


# --- criterion 1 -----------------------------------------------------------

def test_criterion_1_kkt_characterization():
    ctx = KernelContext(alpha=2.0, dim=3)
    cfg = SolverConfig()
    rng = np.random.default_rng(2024)
    for trial in range(20):
        nodes = separated_cloud(rng, int(rng.integers(15, 31)), min_sep=0.3)
        omega = random_signed_field(rng, nodes)
        sol = solve_pseudo_balayage(omega, nodes, ctx, cfg)
        assert sol.report.converged, f"trial {trial} did not converge"
        audit = check_pseudo_balayage(sol, tol=10.0 * cfg.kkt_tol)
        assert audit.passed, f"trial {trial}: {audit}"
    # oracle agreement on 10-node instances
    for trial in range(10):
        nodes = separated_cloud(rng, 10, min_sep=0.4)
        K = kernel_matrix(nodes, nodes, ctx).entries
        b = rng.uniform(-1.5, 2.0, 10)
        w, report = minimize_on_cone(K, b, TIGHT)
        assert report.converged
        w_ref, _ = cone_oracle(K, b)
        assert np.max(np.abs(w - w_ref)) < 1e-8
    _announce(1, "KKT characterization")


# --- criterion 2 -----------------------------------------------------------

def test_criterion_2_mass_bound():
    sphere = make_sphere((0, 0, 0), 1.0, 600, 3)
    annulus = make_truncated_complement(1.0, 3.0, 800, 3)
    exterior = signed_from_parts(dirac((2.0, 0.0, 0.0), 3))
    far_exterior = signed_from_parts(dirac((0.0, 0.0, 5.0), 3))
    center = signed_from_parts(dirac((0.0, 0.0, 0.0), 3))
    signed = SignedMeasure(
        plus=dirac((2.0, 0.0, 0.0), 3, mass=1.0),
        minus=dirac((0.0, 3.0, 0.0), 3, mass=0.5),
    )
    cases = []
    for alpha in (1.5, 2.0, 2.5):
        cases.append((alpha, sphere, exterior))
        cases.append((alpha, annulus, far_exterior))
        cases.append((alpha, sphere, signed))
    for alpha in (1.5, 2.5):
        cases.append((alpha, sphere, center))
        cases.append((alpha, annulus, center))
    for alpha, target, omega in cases:
        ctx = KernelContext(alpha=alpha, dim=3)
        sol = solve_pseudo_balayage(omega, target, ctx)
        assert sol.report.converged
        bound = 1.0 if alpha <= 2.0 else 2.0 ** (3.0 - alpha)
        mass = sol.measure.total_mass()
        plus_mass = omega.plus.total_mass()
        assert mass <= bound * plus_mass * (1.0 + 1e-6), (
            f"alpha={alpha}: mass {mass} exceeds {bound} * {plus_mass}"
        )
    _announce(2, "mass bound")


# --- criterion 3 -----------------------------------------------------------

def _criterion_3(reg_factor: float):
    ctx = KernelContext(alpha=2.5, dim=3, reg_factor=reg_factor)
    sphere = make_sphere((0, 0, 0), 1.0, 4000, 3)
    sol = solve_pseudo_balayage(signed_from_parts(dirac((0, 0, 0), 3)), sphere, ctx)
    assert sol.report.converged
    mass = sol.measure.total_mass()
    assert 1.005 < mass <= 2.0 ** 0.5, f"mass {mass} outside (1.005, sqrt(2)]"
    w = sol.measure.weights
    spread = w.std() / w.mean()
    assert spread <= 0.01, f"relative weight spread {spread:.4%} exceeds 1%"


def test_criterion_3_mass_increase():
    _criterion_3(0.5)
    _announce(3, "mass-increase phenomenon")


# --- criterion 4 -----------------------------------------------------------

def _criterion_4(reg_factor: float):
    ctx = KernelContext(alpha=2.0, dim=3, reg_factor=reg_factor)
    sphere = make_sphere((0, 0, 0), 1.0, 6000, 3)
    report = check_balayage_specialization(dirac((0, 0, 0), 3), sphere, ctx, tol=0.02)
    assert report.solution.report.converged
    assert report.passed, f"equality residual {report.max_equality_residual:.4%}"
    assert abs(report.total_mass - 1.0) <= 0.01, f"mass {report.total_mass}"


def test_criterion_4_balayage_specialization():
    _criterion_4(0.5)
    _announce(4, "balayage specialization")


# --- criterion 5 -----------------------------------------------------------

def test_criterion_5_kelvin_identities():
    ctx = KernelContext(alpha=2.5, dim=3)
    ball = make_ball((0, 0, 0), 1.0, 500, 3)
    gamma, _, report = solve_capacitary(ball, ctx)
    assert report.converged
    center = np.array([0.013, 0.007, -0.011])
    image = kelvin_transform(gamma, center, ctx)

    center_nodes = NodeSet(dim=3, points=center.reshape(1, 3))
    u_center = float(potential(gamma, center_nodes, ctx)[0])
    assert abs(image.total_mass() - u_center) <= 1e-12 * abs(u_center)

    e0 = offdiagonal_energy(gamma, ctx)
    assert abs(offdiagonal_energy(image, ctx) - e0) <= 1e-10 * abs(e0)

    probe = make_sphere(center, 3.0, 100, 3)
    lhs = potential(image, probe, ctx)
    diff = probe.points - center
    r2 = np.sum(diff * diff, axis=1)
    inverted = NodeSet(dim=3, points=center + diff / r2[:, None])
    rhs = np.sqrt(r2) ** ctx.exponent * potential(gamma, inverted, ctx)
    assert np.max(np.abs(lhs - rhs) / np.abs(rhs)) <= 1e-10
    _announce(5, "Kelvin identities")


# --- criterion 6 -----------------------------------------------------------

def test_criterion_6_capacity_homogeneity():
    for alpha in (1.5, 2.0, 2.5):
        ctx = KernelContext(alpha=alpha, dim=3)
        small = make_ball((0, 0, 0), 1.0, 2000, 3)
        large = make_ball((0, 0, 0), 2.0, 2000, 3)
        _, c_small, r1 = solve_capacitary(small, ctx)
        _, c_large, r2 = solve_capacitary(large, ctx)
        assert r1.converged and r2.converged
        ratio = c_large / c_small
        expected = 2.0 ** (3.0 - alpha)
        assert abs(ratio - expected) <= 0.03 * expected, (
            f"alpha={alpha}: ratio {ratio} vs {expected}"
        )
    _announce(6, "capacity homogeneity")


# --- criteria 7 and 8 ------------------------------------------------------

@pytest.fixture(scope="module")
def sweep_family():
    return complement_family(1.0, SWEEP_RADII, 100, 3, ratio=1.25)


def _run_three_sweeps(family, reg_factor: float):
    ctx2 = KernelContext(alpha=2.0, dim=3, reg_factor=reg_factor)
    ctx25 = KernelContext(alpha=2.5, dim=3, reg_factor=reg_factor)
    results = {}
    results["deficit"] = truncation_sweep(
        signed_from_parts(dirac((0, 0, 0), 3, mass=0.3)), family, ctx2
    )
    probe = solve_pseudo_balayage(
        signed_from_parts(dirac((0, 0, 0), 3)), family[-1], ctx25
    )
    q = probe.measure.total_mass()
    results["normalized"] = truncation_sweep(
        signed_from_parts(dirac((0, 0, 0), 3, mass=1.0 / q)), family, ctx25
    )
    results["strict"] = truncation_sweep(
        signed_from_parts(dirac((0, 0, 0), 3, mass=3.0)), family, ctx2
    )
    return results


def _criterion_7(results):
    for records, _ in results.values():
        assert all(r.converged for r in records)
    assert results["deficit"][1].verdict is SweepVerdict.UNSOLVABLE_MASS_DEFICIT
    assert results["normalized"][1].verdict is SweepVerdict.SOLVABLE_EQUAL_PB
    assert results["strict"][1].verdict is SweepVerdict.SOLVABLE_STRICT
    # vanishing equilibrium constant in the normalized regime
    assert abs(results["normalized"][0][-1].equilibrium_constant) <= 1e-3
    # nonzero constant and stabilized support in the strict regime
    strict_records = results["strict"][0]
    assert abs(strict_records[-1].equilibrium_constant) > 1e-2
    assert strict_records[-1].support_radius == pytest.approx(
        strict_records[-2].support_radius, rel=1e-9
    )


def _criterion_8(results):
    for records, classification in results.values():
        for name in ("cone_objective", "slice_objective"):
            values = [getattr(r, name) for r in records]
            assert all(b <= a + 1e-8 for a, b in zip(values, values[1:])), (
                f"{name} not monotone: {values}"
            )
    # in the deficit regime the two minimum values coincide in the limit;
    # the records converge at the kernel decay rate, so compare the
    # extrapolated limits of the two objective columns
    classification = results["deficit"][1]
    gap = abs(classification.cone_objective_limit - classification.slice_objective_limit)
    assert gap <= 1e-4 * abs(classification.cone_objective_limit)


@pytest.fixture(scope="module")
def sweeps_default(sweep_family):
    return _run_three_sweeps(sweep_family, 0.5)


def test_criterion_7_solvability_trichotomy(sweeps_default):
    _criterion_7(sweeps_default)
    _announce(7, "solvability trichotomy")


def test_criterion_8_monotone_convergence(sweeps_default):
    _criterion_8(sweeps_default)
    _announce(8, "monotone convergence")


# --- criterion 9 -----------------------------------------------------------

def test_criterion_9_scaling_and_degeneracy():
    ctx = KernelContext(alpha=2.5, dim=3)
    sphere = make_sphere((0, 0, 0), 1.0, 300, 3)
    base = solve_pseudo_balayage(
        signed_from_parts(dirac((0, 0, 0), 3)), sphere, ctx, TIGHT
    )
    for factor in (0.0, 0.5, 2.0):
        scaled = solve_pseudo_balayage(
            signed_from_parts(dirac((0, 0, 0), 3, mass=factor)), sphere, ctx, TIGHT
        )
        assert np.max(np.abs(scaled.measure.weights - factor * base.measure.weights)) < 1e-8
    # purely negative fields give the zero measure exactly
    negative = SignedMeasure(
        plus=dirac((0, 0, 0), 3, mass=0.0),
        minus=dirac((0, 0, 0), 3, mass=1.0),
    )
    sol = solve_pseudo_balayage(negative, sphere, ctx)
    assert np.array_equal(sol.measure.weights, np.zeros(300))
    assert sol.report.converged
    _announce(9, "scaling and degeneracy")


# --- criterion 10 ----------------------------------------------------------

@pytest.mark.parametrize("reg_factor", [0.4, 0.6])
def test_criterion_10_mass_increase_robustness(reg_factor):
    _criterion_3(reg_factor)
    _announce(10, f"criterion 3 at reg_factor={reg_factor}")


@pytest.mark.parametrize("reg_factor", [0.4, 0.6])
def test_criterion_10_balayage_robustness(reg_factor):
    _criterion_4(reg_factor)
    _announce(10, f"criterion 4 at reg_factor={reg_factor}")


@pytest.mark.parametrize("reg_factor", [0.4, 0.6])
def test_criterion_10_sweep_robustness(sweep_family, reg_factor):
    results = _run_three_sweeps(sweep_family, reg_factor)
    _criterion_7(results)
    _announce(10, f"criterion 7 at reg_factor={reg_factor}")
