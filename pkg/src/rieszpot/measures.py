"""Discrete measures: nonnegative atom weights on node sets.

A signed measure is an ordered pair of positive measures with disjoint
atom locations; overlaps are canceled at construction so the two parts
stay mutually singular, mirroring a Hahn-Jordan decomposition.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SingularityError
from .geometry import NodeSet
from .kernel import KernelContext


@dataclass(frozen=True)
class DiscreteMeasure:
    """Nonnegative weights attached to the nodes of a NodeSet."""

    nodes: NodeSet
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.nodes),):
            raise ValueError(
                f"weights must have one entry per node ({len(self.nodes)}), got {w.shape}"
            )
        if np.any(w < 0.0):
            raise ValueError("weights must be nonnegative")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def scale(self, c: float) -> "DiscreteMeasure":
        if c < 0.0:
            raise ValueError(
                "scale factor must be nonnegative; signed scaling is a "
                "SignedMeasure construction"
            )
        return DiscreteMeasure(self.nodes, c * self.weights)

    def add(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        """Sum of two measures on the same node set."""
        if other.nodes is not self.nodes and not np.array_equal(
            other.nodes.points, self.nodes.points
        ):
            raise ValueError("can only add measures on the same node set")
        return DiscreteMeasure(self.nodes, self.weights + other.weights)

    def restrict(self, predicate: Callable[[np.ndarray], bool]) -> "DiscreteMeasure":
        """Zero the weights of nodes whose point fails the predicate."""
        keep = np.array([bool(predicate(p)) for p in self.nodes.points])
        return DiscreteMeasure(self.nodes, np.where(keep, self.weights, 0.0))

    def support_points(self, threshold: float = 0.0) -> np.ndarray:
        """Points carrying weight strictly above ``threshold``."""
        return self.nodes.points[self.weights > threshold]

    def to_csv(self) -> str:
        """CSV with header ``x1,...,xd,weight``."""
        dim = self.nodes.dim
        buf = io.StringIO()
        buf.write(",".join(f"x{i + 1}" for i in range(dim)) + ",weight\n")
        for row, w in zip(self.nodes.points, self.weights):
            buf.write(",".join(repr(float(v)) for v in row) + f",{float(w)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DiscreteMeasure":
        lines = [ln for ln in text.strip().splitlines() if ln]
        dim = len(lines[0].split(",")) - 1
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        return cls(NodeSet(dim=dim, points=data[:, :dim]), data[:, dim])


def dirac(point, dim: int, mass: float = 1.0) -> DiscreteMeasure:
    """Single atom of the given mass."""
    pts = np.asarray(point, dtype=float).reshape(1, dim)
    return DiscreteMeasure(NodeSet(dim=dim, points=pts), np.array([mass]))


def atoms(points, masses, dim: int) -> DiscreteMeasure:
    """Measure with the given atom locations and nonnegative masses."""
    pts = np.asarray(points, dtype=float).reshape(-1, dim)
    return DiscreteMeasure(NodeSet(dim=dim, points=pts), np.asarray(masses, dtype=float))


@dataclass(frozen=True)
class SignedMeasure:
    """Positive and negative parts with disjoint atom locations."""

    plus: DiscreteMeasure
    minus: DiscreteMeasure

    def __post_init__(self):
        pp, wp = self.plus.nodes.points, self.plus.weights
        pm, wm = self.minus.nodes.points, self.minus.weights
        index = {pt.tobytes(): i for i, pt in enumerate(pp)}
        overlap = [(index[pt.tobytes()], j) for j, pt in enumerate(pm) if pt.tobytes() in index]
        if overlap:
            # cancel the common part so the two parts stay mutually singular
            wp, wm = wp.copy(), wm.copy()
            for i, j in overlap:
                common = min(wp[i], wm[j])
                wp[i] -= common
                wm[j] -= common
            object.__setattr__(self, "plus", DiscreteMeasure(self.plus.nodes, wp))
            object.__setattr__(self, "minus", DiscreteMeasure(self.minus.nodes, wm))

    def total_variation(self) -> float:
        return self.plus.total_mass() + self.minus.total_mass()

    def to_csv(self) -> str:
        """Single-file form with a sign-carrying ``weight_signed`` column."""
        dim = self.plus.nodes.dim
        buf = io.StringIO()
        buf.write(",".join(f"x{i + 1}" for i in range(dim)) + ",weight_signed\n")
        for row, w in zip(self.plus.nodes.points, self.plus.weights):
            buf.write(",".join(repr(float(v)) for v in row) + f",{float(w)!r}\n")
        for row, w in zip(self.minus.nodes.points, self.minus.weights):
            buf.write(",".join(repr(float(v)) for v in row) + f",{float(-w)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SignedMeasure":
        lines = [ln for ln in text.strip().splitlines() if ln]
        dim = len(lines[0].split(",")) - 1
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        w = data[:, dim]
        pos, neg = w > 0.0, w < 0.0
        if not np.any(pos):
            raise ValueError("signed measure CSV has no positive atoms")
        plus = atoms(data[pos, :dim], w[pos], dim)
        if np.any(neg):
            minus = atoms(data[neg, :dim], -w[neg], dim)
        else:
            minus = DiscreteMeasure(plus.nodes, np.zeros(len(plus.nodes)))
        return cls(plus=plus, minus=minus)


def signed_from_parts(plus: DiscreteMeasure, minus: DiscreteMeasure | None = None) -> SignedMeasure:
    """Signed measure from a positive part and an optional negative part."""
    if minus is None:
        minus = DiscreteMeasure(plus.nodes, np.zeros(len(plus.nodes)))
    return SignedMeasure(plus=plus, minus=minus)


def kelvin_transform(mu: DiscreteMeasure, center, ctx: KernelContext) -> DiscreteMeasure:
    """Image of a measure under inversion in the unit sphere at ``center``.

    An atom at y with mass m maps to center + (y - center)/|y - center|^2
    with mass m * |y - center|**(alpha - dim).  Spacing of the image node
    set is recomputed; it is a discretization artifact, not a
    measure-theoretic quantity.
    """
    c = np.asarray(center, dtype=float).reshape(ctx.dim)
    diff = mu.nodes.points - c
    r2 = np.sum(diff * diff, axis=1)
    hits = np.flatnonzero(r2 == 0.0)
    if hits.size:
        raise SingularityError(f"atom {hits[0]} sits at the inversion center")
    image = NodeSet(dim=ctx.dim, points=c + diff / r2[:, None])
    masses = mu.weights * np.sqrt(r2) ** ctx.exponent
    return DiscreteMeasure(image, masses)
