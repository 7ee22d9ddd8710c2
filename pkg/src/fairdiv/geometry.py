"""Exact barycentric arithmetic on the regular unit-edge simplex.

All coordinates are `fractions.Fraction` values, so every comparison the
solvers make is exact.  Floating point shows up only in distance magnitudes
returned for reporting; threshold tests go through the squared-distance
helpers, which stay rational.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Ratio = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def as_ratio(value) -> Fraction:
    """Coerce ints, "p/q" strings and Fractions to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact ratio")


def ratio_str(value: Fraction) -> str:
    return str(Fraction(value))


def ceil_ratio(value: Fraction) -> int:
    """Exact ceiling of a rational."""
    return -((-value.numerator) // value.denominator)


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class BarycentricPoint:
    """A point of the (d-1)-simplex: d nonnegative coordinates summing to 1."""

    coords: tuple[Fraction, ...]

    def __post_init__(self):
        coords = tuple(as_ratio(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) < 2:
            raise ValueError("need at least 2 coordinates")
        if any(c < 0 for c in coords):
            raise ValueError(f"negative coordinate in {coords}")
        if sum(coords) != 1:
            raise ValueError(f"coordinates must sum to 1, got {sum(coords)}")

    @property
    def d(self) -> int:
        return len(self.coords)

    def coord(self, j: int) -> Fraction:
        """Coordinate for room j, 1-based as everywhere in the public API."""
        if not 1 <= j <= self.d:
            raise IndexError(f"room index {j} out of range 1..{self.d}")
        return self.coords[j - 1]

    @staticmethod
    def of(values: Iterable) -> "BarycentricPoint":
        return BarycentricPoint(tuple(as_ratio(v) for v in values))

    @staticmethod
    def vertex(d: int, j: int) -> "BarycentricPoint":
        return BarycentricPoint(tuple(ONE if k == j - 1 else ZERO for k in range(d)))

    @staticmethod
    def center_of(d: int) -> "BarycentricPoint":
        return BarycentricPoint(tuple(Fraction(1, d) for _ in range(d)))

    def to_json(self) -> list[str]:
        return [ratio_str(c) for c in self.coords]

    @staticmethod
    def from_json(data: Sequence[str]) -> "BarycentricPoint":
        return BarycentricPoint.of(data)


def bary_dist2(x: BarycentricPoint, y: BarycentricPoint) -> Fraction:
    """Exact squared distance between two points in the unit-edge embedding.

    For a regular simplex with unit edges the Gram matrix collapses the
    ambient quadratic form to sum(delta_j^2) / 2.
    """
    if x.d != y.d:
        raise DimensionMismatch(f"d={x.d} vs d={y.d}")
    return sum((a - b) ** 2 for a, b in zip(x.coords, y.coords)) / 2


def bary_distance(x: BarycentricPoint, y: BarycentricPoint) -> float:
    return math.sqrt(bary_dist2(x, y))


def height_factor2(d: int) -> Fraction:
    """Squared scaling between a coordinate gap and ambient plane distance.

    Moving from alpha_j = a to alpha_j = b across the simplex travels
    |a - b| * sqrt(d / (2(d-1))) in the unit-edge metric.
    """
    return Fraction(d, 2 * (d - 1))


def hyperplane_dist2(x: BarycentricPoint, j: int, a: Fraction) -> Fraction:
    """Exact squared distance from x to the slice {alpha_j = a} of the simplex's affine hull."""
    a = as_ratio(a)
    if not 0 <= a <= 1:
        raise ValueError(f"threshold {a} outside [0, 1]")
    delta = x.coord(j) - a
    return delta * delta * height_factor2(x.d)


def hyperplane_distance(x: BarycentricPoint, j: int, a: Fraction) -> float:
    return math.sqrt(hyperplane_dist2(x, j, a))


@dataclass(frozen=True)
class GridPoint:
    """[a_1, ..., a_d]_* notation: integer parts summing to the resolution n."""

    n: int
    parts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(int(p) for p in self.parts))
        if self.n <= 0:
            raise ValueError("grid resolution must be positive")
        if any(p < 0 for p in self.parts):
            raise ValueError(f"negative part in {self.parts}")
        if sum(self.parts) != self.n:
            raise ValueError(f"parts {self.parts} do not sum to n={self.n}")

    @property
    def d(self) -> int:
        return len(self.parts)

    def to_json(self) -> dict:
        return {"n": self.n, "parts": list(self.parts)}

    @staticmethod
    def from_json(data: dict) -> "GridPoint":
        return GridPoint(int(data["n"]), tuple(data["parts"]))


def normalize_grid(g: GridPoint) -> BarycentricPoint:
    return BarycentricPoint(tuple(Fraction(p, g.n) for p in g.parts))


def grid_points(n: int, d: int):
    """All grid points of resolution n in lexicographic part order."""

    def rec(prefix: list[int], remaining: int, slots: int):
        if slots == 1:
            yield GridPoint(n, tuple(prefix + [remaining]))
            return
        for v in range(remaining + 1):
            yield from rec(prefix + [v], remaining - v, slots - 1)

    yield from rec([], n, d)


@dataclass(frozen=True)
class SubSimplexState:
    """The shrinking regular sub-simplex {x in A : alpha_j >= lower_j for all j}.

    Invariant: sum(lower) + scale == 1 with scale > 0; the region is a regular
    simplex with edge length `scale`.
    """

    lower: tuple[Fraction, ...]
    scale: Fraction

    def __post_init__(self):
        lower = tuple(as_ratio(v) for v in self.lower)
        scale = as_ratio(self.scale)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "scale", scale)
        if any(v < 0 for v in lower):
            raise ValueError(f"negative lower bound in {lower}")
        if scale <= 0:
            raise ValueError(f"scale must be positive, got {scale}")
        if sum(lower) + scale != 1:
            raise ValueError("lower bounds plus scale must equal 1")

    @property
    def d(self) -> int:
        return len(self.lower)

    @staticmethod
    def whole(d: int) -> "SubSimplexState":
        return SubSimplexState(tuple(ZERO for _ in range(d)), ONE)

    def contains(self, x: BarycentricPoint) -> bool:
        return all(c >= l for c, l in zip(x.coords, self.lower))

    def vertices(self) -> list[BarycentricPoint]:
        out = []
        for j in range(self.d):
            coords = list(self.lower)
            coords[j] += self.scale
            out.append(BarycentricPoint(tuple(coords)))
        return out


def center(state: SubSimplexState) -> BarycentricPoint:
    """Center of the sub-simplex: lower_j + scale/d in every coordinate."""
    share = state.scale / state.d
    return BarycentricPoint(tuple(l + share for l in state.lower))


def cut(state: SubSimplexState, j0: int) -> SubSimplexState:
    """Keep the part of the sub-simplex on the vertex-j0 side of the
    hyperplane through its center parallel to facet F_j0.

    The result is again regular, with edge scaled by (d-1)/d.
    """
    d = state.d
    if not 1 <= j0 <= d:
        raise IndexError(f"room index {j0} out of range 1..{d}")
    lower = list(state.lower)
    lower[j0 - 1] += state.scale / d
    return SubSimplexState(tuple(lower), state.scale * Fraction(d - 1, d))
