"""Config-driven scenario runner.

Reads a JSON scenario, validates it against the published schema, runs the
requested solve or diagnostic, and writes CSV/JSON artifacts.  Exit codes:
0 success, 1 validation error, 2 solver non-convergence (artifacts are
still written).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib.resources import files
from pathlib import Path

import jsonschema
import numpy as np

from .analysis import (
    check_balayage_specialization,
    complement_family,
    sweep_records_to_csv,
    thinness_series,
    truncation_sweep,
)
from .geometry import NodeSet, make_ball, make_sphere, make_truncated_complement
from .kernel import KernelContext, offdiagonal_energy, potential
from .measures import DiscreteMeasure, SignedMeasure, atoms, kelvin_transform
from .presets import list_presets, preset_config
from .solvers import (
    SolverConfig,
    solve_capacitary,
    solve_gauss_variational,
    solve_pseudo_balayage,
)

DEFAULT_OUT = "riesz-out"
OUT_ENV_VAR = "RIESZ_OUT"


class ConfigError(ValueError):
    """Validation failure, carrying the offending key path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(message)


def _schema() -> dict:
    return json.loads(files("rieszpot").joinpath("schema.json").read_text())


def validate_config(cfg: dict) -> None:
    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = ".".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(path, err.message)

    kern = cfg["kernel"]
    if not kern["alpha"] < kern["dim"]:
        raise ConfigError(
            "kernel.alpha",
            f"alpha must lie in (0, dim); got alpha={kern['alpha']}, dim={kern['dim']}",
        )

    kind = cfg["kind"]
    geo = cfg["geometry"]
    generator = geo["generator"]
    if kind == "sweep":
        if generator != "truncated_complement":
            raise ConfigError("geometry.generator", "sweep scenarios need truncated_complement")
        for key in ("inner_radius", "outer_radii", "nodes_per_shell"):
            if key not in geo:
                raise ConfigError(f"geometry.{key}", "required for sweep scenarios")
        radii = geo["outer_radii"]
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ConfigError("geometry.outer_radii", "must be strictly increasing")
    elif generator in ("sphere", "ball"):
        for key in ("radius", "count"):
            if key not in geo:
                raise ConfigError(f"geometry.{key}", f"required for {generator}")
    else:
        for key in ("inner_radius", "outer_radius", "count"):
            if key not in geo:
                raise ConfigError(f"geometry.{key}", "required for truncated_complement")

    field = cfg.get("field", "none")
    needs_field = kind in ("pseudo_balayage", "gauss_variational", "balayage_check", "sweep")
    if needs_field:
        if field == "none" or field is None:
            raise ConfigError("field", f"{kind} scenarios need field atoms")
        for i, atom in enumerate(field["atoms"]):
            if len(atom["position"]) != kern["dim"]:
                raise ConfigError(
                    f"field.atoms.{i}.position", f"must have {kern['dim']} coordinates"
                )
    if kind == "balayage_check":
        if kern["alpha"] > 2.0:
            raise ConfigError("kernel.alpha", "balayage_check requires alpha <= 2")
        if any(atom["mass"] <= 0.0 for atom in field["atoms"]):
            raise ConfigError("field.atoms", "balayage_check needs a positive field measure")
    if kind == "kelvin_check":
        if "kelvin" not in cfg or "center" not in cfg["kelvin"]:
            raise ConfigError("kelvin.center", "kelvin_check needs an inversion center")
        if len(cfg["kelvin"]["center"]) != kern["dim"]:
            raise ConfigError("kelvin.center", f"must have {kern['dim']} coordinates")


def _kernel_context(cfg: dict) -> KernelContext:
    kern = cfg["kernel"]
    return KernelContext(
        alpha=float(kern["alpha"]),
        dim=int(kern["dim"]),
        reg_factor=float(kern.get("reg_factor", 0.5)),
    )


def _solver_config(cfg: dict) -> SolverConfig:
    block = cfg.get("solver", {})
    return SolverConfig(
        max_iters=int(block.get("max_iters", 50_000)),
        kkt_tol=float(block.get("kkt_tol", 1e-8)),
        step_rule=block.get("step_rule", "adaptive_bb_with_monotone_fallback"),
    )


def _build_nodes(cfg: dict) -> NodeSet:
    geo = cfg["geometry"]
    dim = cfg["kernel"]["dim"]
    center = geo.get("center", [0.0] * dim)
    if geo["generator"] == "sphere":
        return make_sphere(center, geo["radius"], geo["count"], dim)
    if geo["generator"] == "ball":
        return make_ball(center, geo["radius"], geo["count"], dim)
    return make_truncated_complement(
        geo["inner_radius"],
        geo["outer_radius"],
        geo["count"],
        dim,
        ratio=geo.get("ratio", 1.15),
    )


def _build_field(cfg: dict, nodes_for_normalization: NodeSet | None) -> SignedMeasure:
    dim = cfg["kernel"]["dim"]
    entries = cfg["field"]["atoms"]
    pos = [a["position"] for a in entries]
    mass = np.array([float(a["mass"]) for a in entries])
    plus = atoms(
        [p for p, m in zip(pos, mass) if m > 0.0] or np.zeros((0, dim)),
        mass[mass > 0.0],
        dim,
    )
    minus = atoms(
        [p for p, m in zip(pos, mass) if m < 0.0] or np.zeros((0, dim)),
        -mass[mass < 0.0],
        dim,
    )
    omega = SignedMeasure(plus=plus, minus=minus)
    if cfg["field"].get("normalize") == "cone_mass":
        ctx = _kernel_context(cfg)
        probe = solve_pseudo_balayage(omega, nodes_for_normalization, ctx, _solver_config(cfg))
        q = probe.measure.total_mass()
        if q <= 0.0:
            raise ConfigError("field.normalize", "cone mass is zero; cannot normalize")
        omega = SignedMeasure(plus=plus.scale(1.0 / q), minus=minus.scale(1.0 / q))
    return omega


def _float_json(value):
    return None if value is None else float(value)


def _run_solve(cfg: dict) -> tuple[int, dict[str, str], list[str]]:
    ctx = _kernel_context(cfg)
    solver_cfg = _solver_config(cfg)
    kind = cfg["kind"]
    nodes = _build_nodes(cfg)
    artifacts: dict[str, str] = {}
    lines: list[str] = []

    if kind == "capacitary":
        gamma, capacity, report = solve_capacitary(nodes, ctx, solver_cfg)
        artifacts["measure.csv"] = gamma.to_csv()
        artifacts["report.json"] = report.to_json(total_mass=capacity)
        lines.append(
            f"capacitary: converged={report.converged} iterations={report.iterations} "
            f"capacity={capacity!r}"
        )
        return (0 if report.converged else 2), artifacts, lines

    omega = _build_field(cfg, nodes)
    if kind == "pseudo_balayage":
        sol = solve_pseudo_balayage(omega, nodes, ctx, solver_cfg)
    elif kind == "gauss_variational":
        sol = solve_gauss_variational(omega, nodes, ctx, solver_cfg)
    else:  # balayage_check
        report = check_balayage_specialization(
            omega.plus, nodes, ctx, tol=0.02, cfg=solver_cfg
        )
        sol = report.solution
        artifacts["balayage.json"] = json.dumps(
            {
                "max_equality_residual": report.max_equality_residual,
                "total_mass": report.total_mass,
                "passed": report.passed,
            },
            indent=2,
            sort_keys=True,
        )
        lines.append(
            f"balayage_check: passed={report.passed} "
            f"residual={report.max_equality_residual!r} mass={report.total_mass!r}"
        )
    artifacts["measure.csv"] = sol.measure.to_csv()
    artifacts["report.json"] = sol.report.to_json(total_mass=sol.measure.total_mass())
    lines.append(
        f"{kind}: converged={sol.report.converged} iterations={sol.report.iterations} "
        f"total_mass={sol.measure.total_mass()!r} objective={sol.report.objective!r}"
    )
    return (0 if sol.report.converged else 2), artifacts, lines


def _run_sweep(cfg: dict) -> tuple[int, dict[str, str], list[str]]:
    ctx = _kernel_context(cfg)
    solver_cfg = _solver_config(cfg)
    geo = cfg["geometry"]
    family = complement_family(
        geo["inner_radius"],
        geo["outer_radii"],
        geo["nodes_per_shell"],
        ctx.dim,
        ratio=geo.get("ratio", 1.15),
    )
    omega = _build_field(cfg, family[-1])
    margin = cfg.get("sweep", {}).get("margin", 0.02)
    records, classification = truncation_sweep(
        omega, family, ctx, solver_cfg, margin=margin
    )
    artifacts = {
        "sweep.csv": sweep_records_to_csv(records),
        "classification.json": classification.to_json(),
    }
    lines = [
        f"sweep member radius={r.truncation_radius!r}: converged={r.converged} "
        f"cone_mass={r.cone_mass!r} equilibrium_constant={r.equilibrium_constant!r}"
        for r in records
    ]
    lines.append(
        f"sweep: verdict={classification.verdict.value} "
        f"m_infinity={classification.m_infinity!r} margin={margin!r}"
    )
    code = 0 if all(r.converged for r in records) else 2
    return code, artifacts, lines


def _run_thinness(cfg: dict) -> tuple[int, dict[str, str], list[str]]:
    ctx = _kernel_context(cfg)
    solver_cfg = _solver_config(cfg)
    block = cfg.get("thinness", {})
    q = float(block.get("q", 2.0))
    shells = int(block.get("shells", 6))
    shell_count = int(block.get("shell_count", 300))
    ratio = cfg["geometry"].get("ratio", 1.15)
    capacities = []
    all_converged = True
    for j in range(1, shells + 1):
        piece = make_truncated_complement(q**j, q ** (j + 1), shell_count, ctx.dim, ratio=ratio)
        _, capacity, report = solve_capacitary(piece, ctx, solver_cfg)
        all_converged = all_converged and report.converged
        capacities.append(capacity)
    sums, verdict = thinness_series(capacities, q, ctx.alpha, ctx.dim)
    artifacts = {
        "thinness.json": json.dumps(
            {
                "q": q,
                "alpha": ctx.alpha,
                "dim": ctx.dim,
                "shell_capacities": capacities,
                "partial_sums": list(sums),
                "verdict": verdict.value,
            },
            indent=2,
            sort_keys=True,
        )
    }
    lines = [f"thinness: verdict={verdict.value} shells={shells} q={q!r}"]
    return (0 if all_converged else 2), artifacts, lines


def _run_kelvin(cfg: dict) -> tuple[int, dict[str, str], list[str]]:
    ctx = _kernel_context(cfg)
    solver_cfg = _solver_config(cfg)
    nodes = _build_nodes(cfg)
    block = cfg["kelvin"]
    center = np.asarray(block["center"], dtype=float)
    samples = int(block.get("samples", 100))
    sample_radius = float(block.get("sample_radius", 3.0))

    gamma, capacity, report = solve_capacitary(nodes, ctx, solver_cfg)
    image = kelvin_transform(gamma, center, ctx)

    center_nodes = NodeSet(dim=ctx.dim, points=center.reshape(1, -1))
    u_center = float(potential(gamma, center_nodes, ctx)[0])
    mass_error = abs(image.total_mass() - u_center) / abs(u_center)

    e_orig = offdiagonal_energy(gamma, ctx)
    energy_error = abs(offdiagonal_energy(image, ctx) - e_orig) / abs(e_orig)

    probe = make_sphere(center, sample_radius, samples, ctx.dim)
    lhs = potential(image, probe, ctx)
    diff = probe.points - center
    r2 = np.sum(diff * diff, axis=1)
    inverted = NodeSet(dim=ctx.dim, points=center + diff / r2[:, None])
    rhs = np.sqrt(r2) ** ctx.exponent * potential(gamma, inverted, ctx)
    potential_error = float(np.max(np.abs(lhs - rhs) / np.abs(rhs)))

    payload = {
        "atoms": len(gamma.nodes),
        "capacity": capacity,
        "mass_identity_error": mass_error,
        "energy_identity_error": energy_error,
        "potential_identity_error": potential_error,
        "mass_identity_ok": mass_error <= 1e-12,
        "energy_identity_ok": energy_error <= 1e-10,
        "potential_identity_ok": potential_error <= 1e-10,
    }
    artifacts = {
        "kelvin.json": json.dumps(payload, indent=2, sort_keys=True),
        "measure.csv": gamma.to_csv(),
        "transformed_measure.csv": image.to_csv(),
    }
    lines = [
        "kelvin_check: "
        f"mass_err={mass_error!r} energy_err={energy_error!r} potential_err={potential_error!r}"
    ]
    return (0 if report.converged else 2), artifacts, lines


_RUNNERS = {
    "pseudo_balayage": _run_solve,
    "gauss_variational": _run_solve,
    "capacitary": _run_solve,
    "balayage_check": _run_solve,
    "sweep": _run_sweep,
    "thinness": _run_thinness,
    "kelvin_check": _run_kelvin,
}


def _resolve_out_dir(cfg: dict, flag_value: str | None) -> Path:
    if flag_value:
        return Path(flag_value)
    configured = cfg.get("output", {}).get("directory")
    if configured:
        return Path(configured)
    env = os.environ.get(OUT_ENV_VAR)
    if env:
        return Path(env)
    return Path(DEFAULT_OUT)


def _apply_overrides(cfg: dict, args: argparse.Namespace) -> None:
    if getattr(args, "alpha", None) is not None:
        cfg.setdefault("kernel", {})["alpha"] = args.alpha
    if getattr(args, "dim", None) is not None:
        cfg.setdefault("kernel", {})["dim"] = args.dim
    if getattr(args, "reg_factor", None) is not None:
        cfg.setdefault("kernel", {})["reg_factor"] = args.reg_factor
    if getattr(args, "nodes", None) is not None:
        geo = cfg.setdefault("geometry", {})
        if cfg.get("kind") == "sweep":
            geo["nodes_per_shell"] = args.nodes
        else:
            geo["count"] = args.nodes
        if cfg.get("kind") == "thinness":
            cfg.setdefault("thinness", {})["shell_count"] = args.nodes


def run_config(cfg: dict, out_flag: str | None = None) -> int:
    """Validate and run a scenario dict; write artifacts; return exit code."""
    try:
        validate_config(cfg)
        out_dir = _resolve_out_dir(cfg, out_flag)
        formats = set(cfg.get("output", {}).get("formats", ["csv", "json"]))
        code, artifacts, lines = _RUNNERS[cfg["kind"]](cfg)
    except ConfigError as err:
        print(f"config error at {err.path}: {err}", file=sys.stderr)
        return 1
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in artifacts.items():
        if name.rsplit(".", 1)[-1] in formats:
            (out_dir / name).write_text(text)
    for line in lines:
        print(line)
    return code


def run_scenario(
    config_path: str, out_flag: str | None = None, overrides: argparse.Namespace | None = None
) -> int:
    """Load a config file and run it; returns the process exit code."""
    try:
        text = Path(config_path).read_text()
    except OSError as err:
        print(f"config error at <file>: {err}", file=sys.stderr)
        return 1
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as err:
        print(f"config error at <json>: {err}", file=sys.stderr)
        return 1
    if not isinstance(cfg, dict):
        print("config error at <root>: expected a JSON object", file=sys.stderr)
        return 1
    if overrides is not None:
        _apply_overrides(cfg, overrides)
    return run_config(cfg, out_flag)


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="output directory (overrides config and RIESZ_OUT)")
    parser.add_argument("--alpha", type=float, help="override kernel.alpha")
    parser.add_argument("--dim", type=int, help="override kernel.dim")
    parser.add_argument("--nodes", type=int, help="override the node budget")
    parser.add_argument("--reg-factor", type=float, dest="reg_factor",
                        help="override kernel.reg_factor")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rieszpot",
        description="Run Riesz potential-theory scenarios on finite point clouds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run a JSON scenario config")
    run_parser.add_argument("config", help="path to the scenario JSON file")
    _add_common_options(run_parser)

    preset_parser = sub.add_parser("preset", help="run a named preset scenario")
    preset_parser.add_argument("name", help="preset name (see list-presets)")
    _add_common_options(preset_parser)

    sub.add_parser("list-presets", help="list available presets")

    args = parser.parse_args(argv)

    if args.command == "list-presets":
        for name, description in list_presets():
            print(f"{name}: {description}")
        return 0

    if args.command == "preset":
        try:
            cfg = preset_config(args.name)
        except KeyError as err:
            print(f"error: {err.args[0]}", file=sys.stderr)
            return 1
        _apply_overrides(cfg, args)
        return run_config(cfg, args.out)

    return run_scenario(args.config, args.out, overrides=args)


if __name__ == "__main__":
    sys.exit(main())
