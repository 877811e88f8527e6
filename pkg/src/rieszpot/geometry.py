"""Deterministic point-cloud generators and transforms.

Finite node sets stand in for the closed sets on which measures live:
spheres, balls, and truncated complements of balls (annuli).  Every
generator is a pure function of its arguments, so identical inputs give
bit-identical outputs.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import DimensionError, SingularityError

# Golden angle in radians, used for the dim-3 spiral lattice.
_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))

# Unit-ball volumes for the supported dimensions.
_BALL_VOLUME = {2: np.pi, 3: 4.0 * np.pi / 3.0}


def _as_point(p, dim: int | None = None) -> np.ndarray:
    x = np.asarray(p, dtype=float).reshape(-1)
    if x.size < 2:
        raise DimensionError(f"points need at least 2 coordinates, got {x.size}")
    if dim is not None and x.size != dim:
        raise DimensionError(f"expected a point in dimension {dim}, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point coordinates must be finite")
    return x


def nearest_neighbor_spacing(points: np.ndarray) -> np.ndarray:
    """Distance from each point to its nearest other point."""
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        return np.ones(len(points))
    dist, _ = cKDTree(points).query(points, k=2)
    return dist[:, 1]


@dataclass(frozen=True)
class NodeSet:
    """A finite point cloud with per-node nearest-neighbor spacing."""

    dim: int
    points: np.ndarray  # (N, dim)
    spacing: np.ndarray = field(default=None)  # (N,)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise DimensionError(
                f"points must have shape (N, {self.dim}), got {pts.shape}"
            )
        if self.dim < 2:
            raise DimensionError(f"dim must be >= 2, got {self.dim}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("node coordinates must be finite")
        if self.spacing is None:
            spc = nearest_neighbor_spacing(pts)
        else:
            spc = np.asarray(self.spacing, dtype=float)
            if spc.shape != (len(pts),):
                raise ValueError("spacing must have one entry per node")
            if np.any(spc <= 0.0):
                raise ValueError("spacing values must be positive")
        if len(pts) > 1 and len(np.unique(pts, axis=0)) != len(pts):
            raise ValueError("nodes must be distinct")
        pts = pts.copy()
        spc = spc.copy()
        pts.setflags(write=False)
        spc.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "spacing", spc)

    def __len__(self) -> int:
        return len(self.points)

    def radii(self, center=None) -> np.ndarray:
        """Distances of all nodes from ``center`` (origin by default)."""
        c = np.zeros(self.dim) if center is None else _as_point(center, self.dim)
        return np.linalg.norm(self.points - c, axis=1)

    def to_csv(self) -> str:
        """CSV with header ``x1,...,xd,spacing``, one row per node."""
        buf = io.StringIO()
        buf.write(",".join(f"x{i + 1}" for i in range(self.dim)) + ",spacing\n")
        for row, s in zip(self.points, self.spacing):
            buf.write(",".join(repr(float(v)) for v in row) + f",{float(s)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "NodeSet":
        lines = [ln for ln in text.strip().splitlines() if ln]
        header = lines[0].split(",")
        if header[-1] != "spacing" or not header[0].startswith("x"):
            raise ValueError("expected header 'x1,...,xd,spacing'")
        dim = len(header) - 1
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        return cls(dim=dim, points=data[:, :dim], spacing=data[:, dim])


def make_sphere(center, radius: float, count: int, dim: int) -> NodeSet:
    """Nodes on the sphere of the given center and radius.

    dim 2 uses equally spaced angles; dim 3 uses the golden-angle spiral,
    a deterministic quasi-uniform lattice.
    """
    if dim not in (2, 3):
        raise DimensionError(f"make_sphere supports dim 2 and 3, got {dim}")
    if count < 2:
        raise ValueError(f"count must be >= 2, got {count}")
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    c = _as_point(center, dim)
    if dim == 2:
        theta = 2.0 * np.pi * np.arange(count) / count
        unit = np.column_stack([np.cos(theta), np.sin(theta)])
    else:
        i = np.arange(count)
        z = 1.0 - 2.0 * (i + 0.5) / count
        rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        phi = i * _GOLDEN_ANGLE
        unit = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    return NodeSet(dim=dim, points=c + radius * unit)


def make_ball(center, radius: float, count: int, dim: int) -> NodeSet:
    """Nodes filling the closed ball on a regular grid.

    The grid pitch is chosen so that roughly ``count`` lattice points land
    inside the ball; the exact node count varies with the lattice geometry.
    Spacing is the grid pitch for every node.
    """
    if dim not in (2, 3):
        raise DimensionError(f"make_ball supports dim 2 and 3, got {dim}")
    if count < 2:
        raise ValueError(f"count must be >= 2, got {count}")
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    c = _as_point(center, dim)
    pitch = radius * (_BALL_VOLUME[dim] / count) ** (1.0 / dim)
    m = int(np.floor(radius / pitch))
    axes = [pitch * np.arange(-m, m + 1)] * dim
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    inside = np.linalg.norm(grid, axis=1) <= radius
    pts = c + grid[inside]
    return NodeSet(dim=dim, points=pts, spacing=np.full(len(pts), pitch))


def annulus_shell_radii(
    inner_radius: float, outer_radius: float, ratio: float = 1.15
) -> np.ndarray:
    """Shell radii inner * ratio**k, for every k with a radius <= outer.

    Anchoring the progression at the inner radius makes truncations at
    growing outer radius share every inner shell, so families of annuli
    are nested node sets.
    """
    if ratio <= 1.0:
        raise ValueError(f"ratio must exceed 1, got {ratio}")
    if inner_radius <= 0.0 or inner_radius > outer_radius:
        raise ValueError("need 0 < inner_radius <= outer_radius")
    n = int(np.floor(np.log(outer_radius / inner_radius) / np.log(ratio) + 1e-12))
    return inner_radius * ratio ** np.arange(n + 1)


def make_truncated_complement(
    inner_radius: float,
    outer_radius: float,
    count: int,
    dim: int,
    ratio: float = 1.15,
) -> NodeSet:
    """Nodes filling the annulus inner <= |x| <= outer around the origin.

    Shells follow a geometric radial progression anchored at the inner
    radius; ``count`` nodes are split evenly across shells.
    """
    if dim not in (2, 3):
        raise DimensionError(f"supported dims are 2 and 3, got {dim}")
    if inner_radius <= 0.0 or inner_radius >= outer_radius:
        raise ValueError(
            f"need 0 < inner_radius < outer_radius, got {inner_radius}, {outer_radius}"
        )
    if count < 2:
        raise ValueError(f"count must be >= 2, got {count}")
    radii = annulus_shell_radii(inner_radius, outer_radius, ratio)
    per_shell, extra = divmod(count, len(radii))
    origin = np.zeros(dim)
    shells = []
    for k, r in enumerate(radii):
        n_k = max(2, per_shell + (1 if k < extra else 0))
        shells.append(make_sphere(origin, r, n_k, dim).points)
    return NodeSet(dim=dim, points=np.vstack(shells))


def invert(nodes: NodeSet, center) -> NodeSet:
    """Image of the node set under inversion in the unit sphere at ``center``.

    x maps to center + (x - center)/|x - center|^2; spacing is recomputed
    from the mapped points.
    """
    c = _as_point(center, nodes.dim)
    diff = nodes.points - c
    r2 = np.sum(diff * diff, axis=1)
    hits = np.flatnonzero(r2 == 0.0)
    if hits.size:
        raise SingularityError(
            f"node {hits[0]} coincides with the inversion center"
        )
    return NodeSet(dim=nodes.dim, points=c + diff / r2[:, None])
