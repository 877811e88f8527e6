import numpy as np
import pytest

from rieszpot import (
    DiscreteMeasure,
    KernelContext,
    Solution,
    SolverConfig,
    SweepVerdict,
    ThinnessVerdict,
    check_balayage_specialization,
    check_pseudo_balayage,
    check_weighted_equilibrium,
    complement_family,
    dirac,
    make_ball,
    make_sphere,
    make_truncated_complement,
    potential,
    signed_from_parts,
    solve_capacitary,
    solve_gauss_variational,
    solve_pseudo_balayage,
    sweep_records_to_csv,
    thinness_series,
    truncation_sweep,
)

CFG = SolverConfig()


def interior_dirac(mass=1.0):
    return signed_from_parts(dirac((0.0, 0.0, 0.0), 3, mass=mass))


def test_check_pseudo_balayage_zero_case():
    ctx = KernelContext(alpha=2.0, dim=3)
    sphere = make_sphere((0, 0, 0), 1.0, 30, 3)
    omega = signed_from_parts(dirac((4.0, 0.0, 0.0), 3, mass=0.0))
    sol = solve_pseudo_balayage(omega, sphere, ctx)
    report = check_pseudo_balayage(sol, tol=1e-12)
    assert report.passed
    assert report.min_excess == 0.0
    assert report.complementarity == 0.0


def test_check_pseudo_balayage_converged_solution_passes():
    ctx = KernelContext(alpha=2.5, dim=3)
    sphere = make_sphere((0, 0, 0), 1.0, 150, 3)
    sol = solve_pseudo_balayage(interior_dirac(), sphere, ctx, CFG)
    assert sol.report.converged
    assert check_pseudo_balayage(sol, tol=10.0 * CFG.kkt_tol).passed


def test_check_pseudo_balayage_detects_tampering():
    ctx = KernelContext(alpha=2.5, dim=3)
    sphere = make_sphere((0, 0, 0), 1.0, 100, 3)
    sol = solve_pseudo_balayage(interior_dirac(), sphere, ctx, CFG)
    w = sol.measure.weights.copy()
    w[int(np.argmax(w))] *= 2.0
    tampered_measure = DiscreteMeasure(sphere, w)
    tampered = Solution(
        measure=tampered_measure,
        report=sol.report,
        field_values=sol.field_values,
        potential_values=potential(tampered_measure, sphere, ctx),
    )
    report = check_pseudo_balayage(tampered, tol=10.0 * CFG.kkt_tol)
    assert not report.passed
    assert abs(report.complementarity) > 10.0 * CFG.kkt_tol


def test_check_weighted_equilibrium_zero_field():
    ctx = KernelContext(alpha=2.0, dim=3)
    sphere = make_sphere((0, 0, 0), 1.0, 80, 3)
    omega = signed_from_parts(dirac((6.0, 0.0, 0.0), 3, mass=0.0))
    sol = solve_gauss_variational(omega, sphere, ctx, CFG)
    _, capacity, _ = solve_capacitary(sphere, ctx, CFG)
    report = check_weighted_equilibrium(sol, tol=10.0 * CFG.kkt_tol)
    assert report.passed
    assert report.equilibrium_constant == pytest.approx(1.0 / capacity, rel=1e-6)


def test_check_weighted_equilibrium_constant_agreement():
    ctx = KernelContext(alpha=2.0, dim=3)
    annulus = make_truncated_complement(1.0, 4.0, 400, 3)
    sol = solve_gauss_variational(interior_dirac(3.0), annulus, ctx, CFG)
    assert sol.report.converged
    report = check_weighted_equilibrium(sol, tol=10.0 * CFG.kkt_tol)
    assert report.passed
    # the two computations of the constant agree (asserted inside the checker
    # at 1e-8 relative; compare against the solver's value here)
    assert report.equilibrium_constant == pytest.approx(
        sol.report.equilibrium_constant, rel=1e-10
    )


def test_balayage_check_rejects_large_alpha():
    ctx = KernelContext(alpha=2.5, dim=3)
    sphere = make_sphere((0, 0, 0), 1.0, 20, 3)
    with pytest.raises(ValueError, match="alpha"):
        check_balayage_specialization(dirac((0, 0, 0), 3), sphere, ctx, tol=0.02)


def test_balayage_check_field_already_on_target():
    # projecting a measure already on A returns it, with zero residual
    ctx = KernelContext(alpha=2.0, dim=3)
    sphere = make_sphere((0, 0, 0), 1.0, 60, 3)
    weights = np.full(60, 1.0 / 60.0)
    omega = DiscreteMeasure(sphere, weights)
    report = check_balayage_specialization(omega, sphere, ctx, tol=1e-6)
    assert report.passed
    assert report.max_equality_residual < 1e-7
    assert np.max(np.abs(report.solution.measure.weights - weights)) < 1e-8


def test_balayage_check_dense_discretization_oracle():
    # a 4x-denser solve reproduces the field potential at the coarse nodes;
    # the exact potential of an atomic measure only stands in for the
    # continuum at probes farther than the lattice scale from every atom
    from scipy.spatial import cKDTree

    ctx = KernelContext(alpha=1.5, dim=3)
    coarse = make_sphere((0, 0, 0), 1.0, 600, 3)
    dense = make_sphere((0, 0, 0), 1.0, 2400, 3)
    sol = solve_pseudo_balayage(interior_dirac(), dense, ctx, CFG)
    assert sol.report.converged
    separation, _ = cKDTree(dense.points).query(coarse.points)
    probes = separation >= 0.5 * dense.spacing.mean()
    assert probes.sum() > 100
    u = potential(sol.measure, coarse, ctx)[probes]
    field = np.linalg.norm(coarse.points[probes], axis=1) ** (1.5 - 3.0)
    assert np.max(np.abs(u - field) / field) <= 0.03


def test_balayage_check_equality_beyond_the_support():
    # center charge onto an annulus at alpha=2: the solution lives on the
    # inner shell, yet the field potential is reproduced on the zero-weight
    # outer nodes too — the property separating this regime from alpha > 2
    ctx = KernelContext(alpha=2.0, dim=3)
    annulus = make_truncated_complement(1.0, 4.0, 1000, 3)
    report = check_balayage_specialization(dirac((0, 0, 0), 3), annulus, ctx, tol=0.02)
    assert report.passed
    assert report.total_mass == pytest.approx(1.0, abs=0.01)
    weights = report.solution.measure.weights
    radii = np.linalg.norm(annulus.points, axis=1)
    assert weights[radii < 1.05].sum() > 0.9 * weights.sum()


def test_thinness_bounded_set_converges():
    sums, verdict = thinness_series([0.8, 0.4, 0.0, 0.0, 0.0], q=2.0, alpha=2.0, dim=3)
    assert verdict is ThinnessVerdict.CONVERGES_LIKELY
    assert sums[-1] == pytest.approx(sums[1])


def test_thinness_full_complement_diverges():
    # shells of the complement of the unit ball: capacity grows like the
    # denominator, so the terms plateau
    ctx = KernelContext(alpha=2.0, dim=3)
    caps = []
    for j in range(1, 7):
        shell = make_truncated_complement(2.0**j, 2.0 ** (j + 1), 300, 3)
        _, capacity, report = solve_capacitary(shell, ctx, CFG)
        assert report.converged
        caps.append(capacity)
    sums, verdict = thinness_series(caps, q=2.0, alpha=2.0, dim=3)
    assert verdict is ThinnessVerdict.DIVERGES_LIKELY


def test_thinness_sparse_ray_converges():
    # isolated unit balls along a ray: constant capacity, growing denominator
    ctx = KernelContext(alpha=2.0, dim=3)
    caps = []
    for j in range(1, 7):
        ball = make_ball((2.0**j, 0.0, 0.0), 1.0, 150, 3)
        _, capacity, report = solve_capacitary(ball, ctx, CFG)
        assert report.converged
        caps.append(capacity)
    sums, verdict = thinness_series(caps, q=2.0, alpha=2.0, dim=3)
    assert verdict is ThinnessVerdict.CONVERGES_LIKELY


def test_thinness_rejects_bad_q():
    with pytest.raises(ValueError):
        thinness_series([1.0, 2.0], q=1.0, alpha=2.0, dim=3)


@pytest.fixture(scope="module")
def small_family():
    return complement_family(1.0, [4.0, 8.0, 16.0], 40, 3, ratio=1.3)


def test_sweep_requires_three_members(small_family):
    ctx = KernelContext(alpha=2.0, dim=3)
    with pytest.raises(ValueError):
        truncation_sweep(interior_dirac(0.3), small_family[:2], ctx)


def test_sweep_mass_deficit(small_family):
    ctx = KernelContext(alpha=2.0, dim=3)
    records, cls = truncation_sweep(interior_dirac(0.3), small_family, ctx, CFG)
    assert cls.verdict is SweepVerdict.UNSOLVABLE_MASS_DEFICIT
    assert cls.m_infinity < 0.98
    assert all(r.converged for r in records)
    # objectives recorded non-increasing (the sweep itself enforces this)
    slice_objs = [r.slice_objective for r in records]
    assert all(b <= a + 1e-8 for a, b in zip(slice_objs, slice_objs[1:]))


def test_sweep_normalized_field_equal_regime(small_family):
    ctx = KernelContext(alpha=2.5, dim=3)
    probe = solve_pseudo_balayage(interior_dirac(), small_family[-1], ctx, CFG)
    q = probe.measure.total_mass()
    records, cls = truncation_sweep(interior_dirac(1.0 / q), small_family, ctx, CFG)
    assert cls.verdict is SweepVerdict.SOLVABLE_EQUAL_PB
    assert cls.m_infinity == pytest.approx(1.0, abs=1e-4)
    assert abs(records[-1].equilibrium_constant) < 1e-6


def test_sweep_strict_regime_supports_stabilize(small_family):
    ctx = KernelContext(alpha=2.0, dim=3)
    records, cls = truncation_sweep(interior_dirac(3.0), small_family, ctx, CFG)
    assert cls.verdict is SweepVerdict.SOLVABLE_STRICT
    assert cls.m_infinity > 1.02
    assert abs(records[-1].equilibrium_constant) > 1e-2
    radii = [r.support_radius for r in records]
    assert radii[-1] == pytest.approx(radii[-2], rel=1e-12)


def test_sweep_csv_and_json(small_family):
    ctx = KernelContext(alpha=2.0, dim=3)
    records, cls = truncation_sweep(interior_dirac(0.3), small_family, ctx, CFG)
    csv_text = sweep_records_to_csv(records)
    header = csv_text.splitlines()[0]
    assert header == (
        "radius,cone_mass,cone_objective,slice_objective,"
        "equilibrium_constant,support_radius,converged"
    )
    assert len(csv_text.strip().splitlines()) == len(records) + 1
    payload = cls.to_json()
    assert '"verdict": "unsolvable_mass_deficit"' in payload
    assert '"m_infinity"' in payload
    assert '"margin"' in payload
