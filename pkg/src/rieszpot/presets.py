"""Named scenario presets covering every scenario kind."""

import copy

_ORIGIN_DIRAC = {"atoms": [{"position": [0.0, 0.0, 0.0], "mass": 1.0}]}

_PRESETS = {
    "example_dirac_sphere": {
        "description": "Unit charge at the center projected onto a sphere at alpha=2.5: total mass rises above 1 with near-uniform weights",
        "config": {
            "kind": "pseudo_balayage",
            "geometry": {"generator": "sphere", "center": [0.0, 0.0, 0.0], "radius": 1.0, "count": 4000},
            "field": _ORIGIN_DIRAC,
            "kernel": {"alpha": 2.5, "dim": 3, "reg_factor": 0.5},
        },
    },
    "example_balayage_sphere": {
        "description": "Unit charge onto a sphere at alpha=2: mass is preserved and the field potential is reproduced on every node",
        "config": {
            "kind": "balayage_check",
            "geometry": {"generator": "sphere", "center": [0.0, 0.0, 0.0], "radius": 1.0, "count": 4000},
            "field": _ORIGIN_DIRAC,
            "kernel": {"alpha": 2.0, "dim": 3, "reg_factor": 0.5},
        },
    },
    "example_normalized_field": {
        "description": "Unit-mass problem with the cone-mass-normalized center charge on a truncated ball complement: equilibrium constant vanishes",
        "config": {
            "kind": "gauss_variational",
            "geometry": {
                "generator": "truncated_complement",
                "inner_radius": 1.0,
                "outer_radius": 8.0,
                "count": 1500,
                "ratio": 1.15,
            },
            "field": {"atoms": [{"position": [0.0, 0.0, 0.0], "mass": 1.0}], "normalize": "cone_mass"},
            "kernel": {"alpha": 2.5, "dim": 3, "reg_factor": 0.5},
        },
    },
    "capacity_unit_ball": {
        "description": "Equilibrium measure and capacity of the unit ball on a regular lattice",
        "config": {
            "kind": "capacitary",
            "geometry": {"generator": "ball", "center": [0.0, 0.0, 0.0], "radius": 1.0, "count": 1000},
            "field": "none",
            "kernel": {"alpha": 2.0, "dim": 3, "reg_factor": 0.5},
        },
    },
    "sweep_unsolvable_smallmass": {
        "description": "Truncation sweep with a 0.3-mass center charge: extrapolated cone mass stays below 1, the unit-mass problem has no limit solution",
        "config": {
            "kind": "sweep",
            "geometry": {
                "generator": "truncated_complement",
                "inner_radius": 1.0,
                "outer_radii": [4.0, 8.0, 16.0, 32.0],
                "nodes_per_shell": 100,
                "ratio": 1.25,
            },
            "field": {"atoms": [{"position": [0.0, 0.0, 0.0], "mass": 0.3}]},
            "kernel": {"alpha": 2.0, "dim": 3, "reg_factor": 0.5},
        },
    },
    "sweep_normalized_field": {
        "description": "Truncation sweep with the cone-mass-normalized charge: cone mass extrapolates to 1 and both problems share the minimizer",
        "config": {
            "kind": "sweep",
            "geometry": {
                "generator": "truncated_complement",
                "inner_radius": 1.0,
                "outer_radii": [4.0, 8.0, 16.0, 32.0],
                "nodes_per_shell": 100,
                "ratio": 1.25,
            },
            "field": {"atoms": [{"position": [0.0, 0.0, 0.0], "mass": 1.0}], "normalize": "cone_mass"},
            "kernel": {"alpha": 2.5, "dim": 3, "reg_factor": 0.5},
        },
    },
    "sweep_strict_largemass": {
        "description": "Truncation sweep with a 3.0-mass center charge: cone mass exceeds 1, the unit-mass minimizer keeps a compact support",
        "config": {
            "kind": "sweep",
            "geometry": {
                "generator": "truncated_complement",
                "inner_radius": 1.0,
                "outer_radii": [4.0, 8.0, 16.0, 32.0],
                "nodes_per_shell": 100,
                "ratio": 1.25,
            },
            "field": {"atoms": [{"position": [0.0, 0.0, 0.0], "mass": 3.0}]},
            "kernel": {"alpha": 2.0, "dim": 3, "reg_factor": 0.5},
        },
    },
    "thinness_ball_complement": {
        "description": "Shell-capacity series for the complement of the unit ball: terms plateau, the series diverges",
        "config": {
            "kind": "thinness",
            "geometry": {"generator": "truncated_complement", "inner_radius": 1.0, "outer_radius": 2.0, "count": 300},
            "field": "none",
            "kernel": {"alpha": 2.0, "dim": 3, "reg_factor": 0.5},
            "thinness": {"q": 2.0, "shells": 6, "shell_count": 300},
        },
    },
    "kelvin_capacitary_ball": {
        "description": "Kelvin transform of the unit-ball equilibrium measure: mass, energy, and potential identities hold to round-off",
        "config": {
            "kind": "kelvin_check",
            "geometry": {"generator": "ball", "center": [0.0, 0.0, 0.0], "radius": 1.0, "count": 500},
            "field": "none",
            "kernel": {"alpha": 2.5, "dim": 3, "reg_factor": 0.5},
            "kelvin": {"center": [0.013, 0.007, -0.011], "samples": 100, "sample_radius": 3.0},
        },
    },
}


def list_presets() -> list[tuple[str, str]]:
    """Preset names with one-line descriptions, in stable order."""
    return [(name, entry["description"]) for name, entry in _PRESETS.items()]


def preset_config(name: str) -> dict:
    """Deep copy of a preset's scenario configuration."""
    if name not in _PRESETS:
        known = ", ".join(_PRESETS)
        raise KeyError(f"unknown preset {name!r}; known presets: {known}")
    return copy.deepcopy(_PRESETS[name]["config"])
