"""Preference-set models, query oracles with accounting, covering validators.

Two ground-truth families: linear-threshold sets (half-spaces parallel to a
facet, the cake/rent cases) and convex polygons containing a facet (d = 3).
All sets are closed; boundary points are members.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from .geometry import (
    BarycentricPoint,
    GridPoint,
    as_ratio,
    grid_points,
    normalize_grid,
    ratio_str,
)
from .polygons import convex_hull, orient_sign, point_in_convex

KIND_LPS_LOWER = "lps_lower"
KIND_LPS_UPPER = "lps_upper"
KIND_CONVEX3 = "convex3"
KINDS = (KIND_LPS_LOWER, KIND_LPS_UPPER, KIND_CONVEX3)


class Sense(Enum):
    LOWER_BOUND = "lower"  # {alpha_j >= a}: contains vertex v_j (cake case)
    UPPER_BOUND = "upper"  # {alpha_j <= a}: contains facet F_j (rent case)


class InvalidProfile(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """A solver asked more queries than its own bound allows; a solver bug."""


class NoContainingSet(RuntimeError):
    """Minimal-mode query found no containing set; corrupted ground truth."""


@dataclass(frozen=True)
class LinearPreferenceSet:
    sense: Sense
    j: int
    a: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", as_ratio(self.a))
        if not 0 <= self.a <= 1:
            raise InvalidProfile(f"threshold {self.a} outside [0, 1]")


@dataclass(frozen=True)
class ConvexPreferenceSet:
    """Convex polygon inside the triangle, containing facet F_j (d = 3 only)."""

    j: int
    vertices: tuple[BarycentricPoint, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        k = len(self.vertices)
        if k < 3:
            raise InvalidProfile("convex preference set needs at least 3 vertices")
        for i in range(k):
            p = self.vertices[i - 1].coords
            q = self.vertices[i].coords
            r = self.vertices[(i + 1) % k].coords
            if orient_sign(p, q, r) <= 0:
                raise InvalidProfile("vertices must be in strictly convex CCW position")
        others = [m for m in (1, 2, 3) if m != self.j]
        for m in others:
            if not point_in_convex(BarycentricPoint.vertex(3, m), self.vertices):
                raise InvalidProfile(f"set for room {self.j} must contain facet F_{self.j}")


PreferenceSet = Union[LinearPreferenceSet, ConvexPreferenceSet]


def membership(pref_set: PreferenceSet, x: BarycentricPoint) -> bool:
    """Exact ground-truth membership; never counted as a query."""
    if isinstance(pref_set, LinearPreferenceSet):
        c = x.coord(pref_set.j)
        if pref_set.sense is Sense.LOWER_BOUND:
            return c >= pref_set.a
        return c <= pref_set.a
    return point_in_convex(x, pref_set.vertices)


@dataclass(frozen=True)
class PreferenceProfile:
    """d agents, each with a covering {A_i1, ..., A_id} of the simplex."""

    d: int
    kind: str
    sets: tuple[tuple[PreferenceSet, ...], ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidProfile(f"unknown profile kind {self.kind!r}")
        if self.d < 2:
            raise InvalidProfile("need at least 2 agents")
        if self.kind == KIND_CONVEX3 and self.d != 3:
            raise InvalidProfile("convex profiles are defined for d = 3 only")
        if len(self.sets) != self.d or any(len(row) != self.d for row in self.sets):
            raise InvalidProfile(f"need a {self.d}x{self.d} matrix of sets")
        for i, row in enumerate(self.sets, start=1):
            for j, s in enumerate(row, start=1):
                if s.j != j:
                    raise InvalidProfile(f"set at row {i} column {j} is for room {s.j}")
            self._check_row_covering(i, row)

    def _check_row_covering(self, i: int, row: tuple[PreferenceSet, ...]):
        if self.kind == KIND_LPS_LOWER:
            total = Fraction(0)
            for s in row:
                if s.sense is not Sense.LOWER_BOUND:
                    raise InvalidProfile("lps_lower profile needs lower-bound sets")
                if not 0 < s.a < 1:
                    raise InvalidProfile(f"cake thresholds must lie in (0, 1), got {s.a}")
                total += s.a
            if total > 1:
                raise InvalidProfile(f"row {i} thresholds sum to {total} > 1: not a covering")
        elif self.kind == KIND_LPS_UPPER:
            total = Fraction(0)
            for s in row:
                if s.sense is not Sense.UPPER_BOUND:
                    raise InvalidProfile("lps_upper profile needs upper-bound sets")
                total += s.a
            if total < 1:
                raise InvalidProfile(f"row {i} thresholds sum to {total} < 1: not a covering")
        else:
            # Polygon invariants are checked per set; a coarse grid pass
            # catches gross covering violations cheaply.  Full-resolution
            # checks go through validate_covering.
            for g in grid_points(8, 3):
                x = normalize_grid(g)
                if not any(membership(s, x) for s in row):
                    raise InvalidProfile(f"row {i} does not cover grid point {g.parts}")

    def agent_row(self, i: int) -> tuple[PreferenceSet, ...]:
        return self.sets[i - 1]

    def set_for(self, i: int, j: int) -> PreferenceSet:
        return self.sets[i - 1][j - 1]

    def thresholds(self) -> list[list[Fraction]]:
        if self.kind == KIND_CONVEX3:
            raise InvalidProfile("convex profiles have no threshold matrix")
        return [[s.a for s in row] for row in self.sets]


@dataclass
class QueryEntry:
    agent: int
    mode: str  # "binary" | "minimal"
    point: BarycentricPoint
    room: Optional[int]  # room asked about (binary mode only)
    response: Union[bool, int]

    def to_json(self) -> dict:
        return {
            "agent": self.agent,
            "mode": self.mode,
            "point": self.point.to_json(),
            "room": self.room,
            "response": self.response,
        }


@dataclass
class QueryTranscript:
    """Ordered oracle log with per-mode counters and optional budgets."""

    entries: list[QueryEntry] = field(default_factory=list)
    binary_count: int = 0
    minimal_count: int = 0
    binary_budget: Optional[int] = None
    minimal_budget: Optional[int] = None

    def record_binary(self, agent: int, point: BarycentricPoint, room: int, response: bool):
        if self.binary_budget is not None and self.binary_count + 1 > self.binary_budget:
            raise BudgetExceeded(
                f"binary budget {self.binary_budget} exhausted at query {self.binary_count + 1}"
            )
        self.entries.append(QueryEntry(agent, "binary", point, room, response))
        self.binary_count += 1

    def record_minimal(self, agent: int, point: BarycentricPoint, response: int):
        if self.minimal_budget is not None and self.minimal_count + 1 > self.minimal_budget:
            raise BudgetExceeded(
                f"minimal budget {self.minimal_budget} exhausted at query {self.minimal_count + 1}"
            )
        self.entries.append(QueryEntry(agent, "minimal", point, None, response))
        self.minimal_count += 1

    def to_json(self) -> dict:
        return {
            "entries": [e.to_json() for e in self.entries],
            "binary_count": self.binary_count,
            "minimal_count": self.minimal_count,
        }


class Oracle:
    """Answers preference queries from ground truth, with full accounting.

    Simulated minimal-mode answers return the smallest valid room index by
    default; pass a `random.Random` as tie_break to exercise solvers against
    arbitrary valid answers.  No memoization: repeated queries are recounted.
    """

    def __init__(self, profile: PreferenceProfile, transcript: Optional[QueryTranscript] = None,
                 tie_break: Union[str, random.Random] = "smallest"):
        self.profile = profile
        self.transcript = transcript if transcript is not None else QueryTranscript()
        self.tie_break = tie_break

    @property
    def d(self) -> int:
        return self.profile.d

    def binary_query(self, i: int, j: int, x: BarycentricPoint) -> bool:
        answer = membership(self.profile.set_for(i, j), x)
        self.transcript.record_binary(i, x, j, answer)
        return answer

    def minimal_query(self, i: int, x: BarycentricPoint) -> int:
        rooms = [j for j in range(1, self.d + 1) if membership(self.profile.set_for(i, j), x)]
        if not rooms:
            raise NoContainingSet(f"agent {i} holds no set containing {x.to_json()}")
        if isinstance(self.tie_break, random.Random):
            answer = self.tie_break.choice(rooms)
        else:
            answer = rooms[0]
        self.transcript.record_minimal(i, x, answer)
        return answer


@dataclass
class CoveringReport:
    covering: bool
    kkm: bool
    sperner: bool
    n_check: int
    detail: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "covering": self.covering,
            "kkm": self.kkm,
            "sperner": self.sperner,
            "n_check": self.n_check,
            "detail": self.detail,
        }


def _subsets(d: int):
    full = list(range(1, d + 1))
    for mask in range(1, 1 << d):
        yield [j for j in full if mask & (1 << (j - 1))]


def validate_covering(profile_or_rows, d: Optional[int] = None, kind: Optional[str] = None,
                      n_check: int = 64) -> CoveringReport:
    """Check the covering plus the KKM-face and Sperner-face conditions.

    LPS profiles are checked algebraically (exact); convex profiles on a grid
    of resolution n_check.  The report states which conditions hold and the
    first violation found.
    """
    if isinstance(profile_or_rows, PreferenceProfile):
        profile = profile_or_rows
        rows, d, kind = profile.sets, profile.d, profile.kind
    else:
        rows = profile_or_rows
        if d is None or kind is None:
            raise ValueError("d and kind are required when passing raw rows")

    if kind in (KIND_LPS_LOWER, KIND_LPS_UPPER):
        return _validate_lps(rows, d, kind, n_check)
    return _validate_convex(rows, n_check)


def _validate_lps(rows, d: int, kind: str, n_check: int) -> CoveringReport:
    covering, kkm, sperner = True, True, True
    detail = None
    for i, row in enumerate(rows, start=1):
        a = [s.a for s in row]
        total = sum(a)
        if kind == KIND_LPS_LOWER:
            if total > 1:
                covering = kkm = False
                detail = detail or f"agent {i}: sum of thresholds {total} > 1"
            if any(v <= 0 for v in a):
                sperner = False
                detail = detail or f"agent {i}: zero threshold breaks the Sperner condition"
        else:
            if total < 1:
                covering = False
                detail = detail or f"agent {i}: sum of thresholds {total} < 1"
            # Faces conv{v_j : j in J} demand sum_{j in J} a_ij >= 1; singleton
            # faces are the binding case.
            if any(v < 1 for v in a):
                kkm = False
            if d >= 2:
                sperner = False  # facet-containing sets always meet opposite faces
    if kind == KIND_LPS_LOWER:
        kkm = kkm and covering
    return CoveringReport(covering, kkm, sperner, n_check, detail)


def _validate_convex(rows, n_check: int) -> CoveringReport:
    covering, kkm, sperner = True, True, True
    detail = None
    for i, row in enumerate(rows, start=1):
        for g in grid_points(n_check, 3):
            x = normalize_grid(g)
            inside = [j for j in (1, 2, 3) if membership(row[j - 1], x)]
            if not inside:
                covering = False
                detail = detail or f"agent {i}: grid point {g.parts} uncovered"
            support = [j for j in (1, 2, 3) if g.parts[j - 1] > 0]
            if len(support) < 3:
                if not any(j in support for j in inside):
                    kkm = False
                    detail = detail or f"agent {i}: KKM fails on face {support} at {g.parts}"
                if any(j not in support for j in inside):
                    sperner = False
    kkm = kkm and covering
    return CoveringReport(covering, kkm, sperner, n_check, detail)


def generate_profile(kind: str, d: int, seed: int) -> PreferenceProfile:
    """Seeded random instance of the given kind; deterministic in (kind, d, seed)."""
    rng = random.Random(f"fairdiv:{kind}:{d}:{seed}")
    if kind == KIND_LPS_LOWER:
        rows = []
        for _ in range(d):
            a = [Fraction(rng.randint(1, 63), 64) for _ in range(d)]
            total = sum(a)
            if total > 1:
                a = [v / total for v in a]
            rows.append(tuple(LinearPreferenceSet(Sense.LOWER_BOUND, j + 1, v)
                              for j, v in enumerate(a)))
        return PreferenceProfile(d, kind, tuple(rows))
    if kind == KIND_LPS_UPPER:
        # Thresholds live in [1/4, 7/8]: a tenant accepting a room at nearly
        # the full rent collapses the instance into a simplex corner, which
        # is outside the regime the solvers are interesting for.  Rows are
        # redrawn until they cover (sum >= 1) so no rescale can push a
        # threshold back toward 1.
        rows = []
        for _ in range(d):
            while True:
                a = [Fraction(rng.randint(16, 56), 64) for _ in range(d)]
                if sum(a) >= 1:
                    break
            rows.append(tuple(LinearPreferenceSet(Sense.UPPER_BOUND, j + 1, v)
                              for j, v in enumerate(a)))
        return PreferenceProfile(d, kind, tuple(rows))
    if kind == KIND_CONVEX3:
        if d != 3:
            raise InvalidProfile("convex3 instances require d = 3")
        profile = _generate_convex3(rng)
        report = validate_covering(profile, n_check=16)
        if not report.covering:
            raise InvalidProfile(f"generated convex profile fails covering: {report.detail}")
        return profile
    raise InvalidProfile(f"unknown profile kind {kind!r}")


_GEN_RES = 24


def _generate_convex3(rng: random.Random) -> PreferenceProfile:
    # Per agent: an interior point p splits the triangle into conv(F_j, p),
    # which partition it; each set is then fattened with up to 2 extra points
    # drawn on its own side of p (alpha_j <= alpha_j(p)), which preserves the
    # covering since sets only grow.
    rows = []
    for _ in range(3):
        a = rng.randint(1, _GEN_RES - 2)
        b = rng.randint(1, _GEN_RES - 1 - a)
        p = normalize_grid(GridPoint(_GEN_RES, (a, b, _GEN_RES - a - b)))
        row = []
        for j in (1, 2, 3):
            others = [m for m in (1, 2, 3) if m != j]
            pts = [BarycentricPoint.vertex(3, m) for m in others] + [p]
            for _extra in range(rng.randint(0, 2)):
                q = _draw_side_point(rng, j, p.coord(j))
                if q is not None:
                    pts.append(q)
            hull = convex_hull(pts)
            row.append(ConvexPreferenceSet(j, tuple(hull)))
        rows.append(tuple(row))
    return PreferenceProfile(3, KIND_CONVEX3, tuple(rows))


def _draw_side_point(rng: random.Random, j: int, cap: Fraction) -> Optional[BarycentricPoint]:
    for _ in range(50):
        a = rng.randint(0, _GEN_RES)
        b = rng.randint(0, _GEN_RES - a)
        g = GridPoint(_GEN_RES, (a, b, _GEN_RES - a - b))
        x = normalize_grid(g)
        if x.coord(j) <= cap:
            return x
    return None


def profile_to_json(profile: PreferenceProfile) -> dict:
    if profile.kind == KIND_CONVEX3:
        return {
            "d": profile.d,
            "kind": profile.kind,
            "sets": [
                [{"j": s.j, "vertices": [v.to_json() for v in s.vertices]} for s in row]
                for row in profile.sets
            ],
        }
    return {
        "d": profile.d,
        "kind": profile.kind,
        "thresholds": [[ratio_str(s.a) for s in row] for row in profile.sets],
    }


def profile_from_json(data: dict) -> PreferenceProfile:
    kind = data["kind"]
    if kind == KIND_CONVEX3:
        rows = tuple(
            tuple(
                ConvexPreferenceSet(
                    int(s["j"]),
                    tuple(BarycentricPoint.from_json(v) for v in s["vertices"]),
                )
                for s in row
            )
            for row in data["sets"]
        )
        return PreferenceProfile(int(data.get("d", 3)), kind, rows)
    sense = Sense.LOWER_BOUND if kind == KIND_LPS_LOWER else Sense.UPPER_BOUND
    rows = tuple(
        tuple(LinearPreferenceSet(sense, j + 1, as_ratio(v)) for j, v in enumerate(row))
        for row in data["thresholds"]
    )
    return PreferenceProfile(int(data["d"]), kind, rows)
