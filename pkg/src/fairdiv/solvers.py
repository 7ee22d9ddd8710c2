"""The three logarithmic fair-division solvers.

- cake (binary mode): per agent and room, binary-search an approximation of
  the acceptance threshold from below, then pick a fair point among the
  assembled per-agent points via the ordering pivot.
- rent (minimal mode): per agent, repeatedly ask about the center of a
  shrinking regular sub-simplex and cut towards the named room; one final
  minimal query to the last agent selects the output.
- convex, d = 3 (binary mode): per agent, binary-search the covered/uncovered
  boundary over grid levels, read the transition pair off the zigzag between
  two adjacent levels, then intersect known polygon hulls over all six
  permutations.

Every solver owns a transcript whose budgets are set to the applicable bound
(plus the explicitly surfaced selection allowance), so an overdraw raises
instead of passing silently.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Generator, Optional

from .geometry import (
    BarycentricPoint,
    GridPoint,
    SubSimplexState,
    as_ratio,
    bary_dist2,
    ceil_ratio,
    center,
    cut,
    normalize_grid,
    ratio_str,
)
from .ordersel import OrderingFamily, build_assignment, select_fair_point, select_pivot
from .polygons import clip_polygon, halfplane_through, polygon_centroid
from .preferences import (
    KIND_CONVEX3,
    KIND_LPS_LOWER,
    KIND_LPS_UPPER,
    Oracle,
    membership,
)

log = logging.getLogger("fairdiv.solvers")


class InvalidProfileKind(ValueError):
    pass


class InconsistentScans(RuntimeError):
    """Level scans contradict convexity of the ground truth."""


class NoPermutationWorks(RuntimeError):
    """No permutation yields a common point; impossible for valid inputs."""


class BudgetOverrun(RuntimeError):
    def __init__(self, used: int, bound: int):
        super().__init__(f"spent {used} queries against a bound of {bound}")


class Level0Covered(Exception):
    """Control-flow signal: the bottom grid level is already covered."""

    def __init__(self, scan: "LevelScan"):
        super().__init__("level 0 is covered")
        self.scan = scan


def resolution(epsilon) -> int:
    """n = ceil(1/epsilon), by exact rational arithmetic."""
    eps = as_ratio(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    return max(1, ceil_ratio(1 / eps))


def ceil_log2(m: int) -> int:
    """Smallest t with 2^t >= m, for integer m >= 1."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return (m - 1).bit_length()


def ceil_log2_ratio(q: Fraction) -> int:
    """Smallest t >= 0 with 2^t >= q, for rational q."""
    if q <= 1:
        return 0
    return ceil_log2(ceil_ratio(q))


def ceil_log_ratio(n: int, d: int) -> int:
    """Smallest t >= 0 with (d/(d-1))^t >= n, in exact integer arithmetic."""
    if n < 1 or d < 2:
        raise ValueError("need n >= 1 and d >= 2")
    t = 0
    while n * (d - 1) ** t > d**t:
        t += 1
    return t


def budget_cake(d: int, n: int) -> int:
    return (d - 1) ** 2 * ceil_log2(n * (d - 1))


def budget_rent(d: int, n: int) -> int:
    return (d - 1) * ceil_log_ratio(n, d)


def budget_convex(n: int) -> int:
    k = ceil_log2(n)
    return 6 * (k * k + k)


@dataclass
class FairDivisionCertificate:
    """Solver output: the point, the room permutation and the query bill.

    Locate/search queries stay within `bound`; the handful of queries spent
    discovering the last agent's room are surfaced separately as
    selection_queries, so binary + minimal <= bound + selection always holds.
    """

    point: BarycentricPoint
    sigma: tuple[int, ...]
    epsilon: Fraction
    binary_queries: int
    minimal_queries: int
    selection_queries: int
    bound: int
    verified: Optional[bool] = None

    def __post_init__(self):
        d = self.point.d
        if sorted(self.sigma) != list(range(1, d + 1)):
            raise ValueError(f"sigma {self.sigma} is not a permutation of 1..{d}")
        if self.binary_queries + self.minimal_queries > self.bound + self.selection_queries:
            raise ValueError("query total exceeds bound plus selection allowance")

    def to_json(self) -> dict:
        return {
            "point": self.point.to_json(),
            "sigma": list(self.sigma),
            "epsilon": ratio_str(self.epsilon),
            "binary_queries": self.binary_queries,
            "minimal_queries": self.minimal_queries,
            "selection_queries": self.selection_queries,
            "bound": self.bound,
            "verified": self.verified,
        }

    @staticmethod
    def from_json(data: dict) -> "FairDivisionCertificate":
        return FairDivisionCertificate(
            point=BarycentricPoint.from_json(data["point"]),
            sigma=tuple(data["sigma"]),
            epsilon=as_ratio(data["epsilon"]),
            binary_queries=int(data["binary_queries"]),
            minimal_queries=int(data["minimal_queries"]),
            selection_queries=int(data["selection_queries"]),
            bound=int(data["bound"]),
            verified=data.get("verified"),
        )


# ---------------------------------------------------------------------------
# Cake (binary mode)


def find_threshold_approx(oracle: Oracle, i: int, j: int, delta) -> Fraction:
    """Binary-search c with max(a - delta, 0) <= c < a for agent i's room-j threshold.

    Query points put the remaining mass on room d: [.., mid at j, .., 1-mid at d].
    Spends exactly ceil(log2(1/delta)) binary queries.
    """
    delta = as_ratio(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    d = oracle.d
    if j == d:
        raise ValueError("threshold search is defined for rooms 1..d-1")
    steps = ceil_log2_ratio(1 / delta)
    lo, hi = Fraction(0), Fraction(1)
    for _ in range(steps):
        mid = (lo + hi) / 2
        coords = [Fraction(0)] * d
        coords[j - 1] = mid
        coords[d - 1] = 1 - mid
        if oracle.binary_query(i, j, BarycentricPoint(tuple(coords))):
            hi = mid
        else:
            lo = mid
    return lo


def solve_cake(oracle: Oracle, epsilon) -> FairDivisionCertificate:
    """Cake solver for lower-bound linear preferences (binary mode)."""
    if oracle.profile.kind != KIND_LPS_LOWER:
        raise InvalidProfileKind(f"solve_cake needs {KIND_LPS_LOWER}, got {oracle.profile.kind}")
    eps = as_ratio(epsilon)
    d = oracle.d
    n = resolution(eps)
    delta = eps / (d - 1)
    bound = budget_cake(d, n)
    oracle.transcript.binary_budget = bound + (d - 1)
    oracle.transcript.minimal_budget = 0

    c: dict[tuple[int, int], Fraction] = {}
    points: list[BarycentricPoint] = []
    for i in range(1, d):
        for j in range(1, d):
            c[i, j] = find_threshold_approx(oracle, i, j, delta)
        rest = 1 - sum(c[i, j] for j in range(1, d))
        c[i, d] = rest
        points.append(BarycentricPoint(tuple(c[i, j] for j in range(1, d + 1))))
    search_queries = oracle.transcript.binary_count
    if search_queries > bound:
        raise BudgetOverrun(search_queries, bound)

    # Column-wise inclusion orderings of the known family {alpha_j >= c_ij}:
    # a larger threshold means a smaller set, which must come first.
    orderings = tuple(
        tuple(sorted(range(1, d), key=lambda i: (-c[i, j], i))) for j in range(1, d + 1)
    )
    fam = OrderingFamily(d, orderings)

    def ask(x: BarycentricPoint) -> int:
        for j in range(1, d):
            if oracle.binary_query(d, j, x):
                return j
        return d  # the covering forces the last room

    point, sigma = select_fair_point(points, fam, ask)
    selection = oracle.transcript.binary_count - search_queries
    if __debug__:
        for i in range(1, d):
            assert point.coord(sigma[i - 1]) >= c[i, sigma[i - 1]]
    log.debug("solve_cake d=%d n=%d: %d search + %d selection queries (bound %d)",
              d, n, search_queries, selection, bound)
    return FairDivisionCertificate(
        point=point,
        sigma=sigma,
        epsilon=eps,
        binary_queries=oracle.transcript.binary_count,
        minimal_queries=oracle.transcript.minimal_count,
        selection_queries=selection,
        bound=bound,
    )


# ---------------------------------------------------------------------------
# Rent (minimal mode)


def rent_locate(oracle: Oracle, i: int, epsilon) -> BarycentricPoint:
    """Shrink a regular sub-simplex onto agent i's acceptable region.

    Exactly ceil(log_{d/(d-1)} n) minimal queries; the returned center is
    within epsilon of every one of agent i's sets.
    """
    eps = as_ratio(epsilon)
    d = oracle.d
    n = resolution(eps)
    state = SubSimplexState.whole(d)
    for _ in range(ceil_log_ratio(n, d)):
        j0 = oracle.minimal_query(i, center(state))
        state = cut(state, j0)
        if __debug__:
            # The slice {alpha_j0 = new lower} of the simplex stays inside
            # A_{i j0}: the answer certified its defining threshold.
            assert membership(oracle.profile.set_for(i, j0),
                              _slice_witness(state, j0))
    return center(state)


def _slice_witness(state: SubSimplexState, j: int) -> BarycentricPoint:
    coords = list(state.lower)
    k = 0 if j != 1 else 1
    coords[k] += state.scale
    return BarycentricPoint(tuple(coords))


def _upper_inclusion_family(d: int, xs: list[BarycentricPoint]) -> OrderingFamily:
    # {alpha_j <= x_ij} nests by threshold: smaller coordinate, smaller set.
    orderings = tuple(
        tuple(sorted(range(1, d), key=lambda i: (xs[i - 1].coord(j), i)))
        for j in range(1, d + 1)
    )
    return OrderingFamily(d, orderings)


def solve_rent(oracle: Oracle, epsilon) -> FairDivisionCertificate:
    """Rental-harmony solver for upper-bound linear preferences (minimal mode)."""
    if oracle.profile.kind != KIND_LPS_UPPER:
        raise InvalidProfileKind(f"solve_rent needs {KIND_LPS_UPPER}, got {oracle.profile.kind}")
    eps = as_ratio(epsilon)
    d = oracle.d
    n = resolution(eps)
    bound = budget_rent(d, n)
    oracle.transcript.minimal_budget = bound + 1
    oracle.transcript.binary_budget = 0

    xs = [rent_locate(oracle, i, eps) for i in range(1, d)]
    fam = _upper_inclusion_family(d, xs)
    point, sigma = select_fair_point(xs, fam, lambda x: oracle.minimal_query(d, x))
    log.debug("solve_rent d=%d n=%d: %d queries (bound %d + 1)",
              d, n, oracle.transcript.minimal_count, bound)
    return FairDivisionCertificate(
        point=point,
        sigma=sigma,
        epsilon=eps,
        binary_queries=oracle.transcript.binary_count,
        minimal_queries=oracle.transcript.minimal_count,
        selection_queries=1,
        bound=bound,
    )


@dataclass(frozen=True)
class RentQuery:
    """One suspended minimal-mode query of the rent protocol."""

    agent: int
    point: BarycentricPoint
    selection: bool  # True for the final fair-point-selection query


@dataclass(frozen=True)
class RentOutcome:
    point: BarycentricPoint
    sigma: tuple[int, ...]
    n: int
    locate_queries: int
    selection_queries: int


def rent_steps(d: int, epsilon) -> Generator[RentQuery, int, RentOutcome]:
    """The rent protocol as a generator: yields queries, receives room answers.

    Drives interactive sessions where a human is the oracle; solve_rent's
    oracle-backed run asks the same queries in the same order.
    """
    eps = as_ratio(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if d < 2:
        raise ValueError("need at least 2 agents")
    n = resolution(eps)
    steps = ceil_log_ratio(n, d)
    xs: list[BarycentricPoint] = []
    for i in range(1, d):
        state = SubSimplexState.whole(d)
        for _ in range(steps):
            j0 = yield RentQuery(i, center(state), False)
            if not 1 <= j0 <= d:
                raise ValueError(f"invalid room {j0}")
            state = cut(state, j0)
        xs.append(center(state))
    fam = _upper_inclusion_family(d, xs)
    res = select_pivot(fam)
    x0 = xs[res.i0 - 1]
    j0 = yield RentQuery(d, x0, True)
    if not 1 <= j0 <= d:
        raise ValueError(f"invalid room {j0}")
    pi = build_assignment(res, fam, j0)
    sigma = tuple(pi[i] for i in range(1, d)) + (j0,)
    return RentOutcome(x0, sigma, n, (d - 1) * steps, 1)


# ---------------------------------------------------------------------------
# Convex preferences, d = 3 (binary mode)


@dataclass(frozen=True)
class LevelScan:
    """Extent of A_i2 and A_i3 along one grid level a (first coordinate)."""

    a: int
    k2: int  # max b with [a, b, n-a-b]* in A_i2
    k3: int  # min b with [a, b, n-a-b]* in A_i3
    covered: bool  # k2 + 1 >= k3: the level is inside A_i2 union A_i3


def _grid3(n: int, a: int, b: int) -> GridPoint:
    return GridPoint(n, (a, b, n - a - b))


def scan_levels(oracle: Oracle, i: int, a: int, n: int) -> LevelScan:
    """Find k2(a) and k3(a) with at most ceil(log2 n) binary queries each.

    Membership along a level is monotone for convex sets anchored on the
    facets: [a, 0, n-a]* lies on F_2 and [a, n-a, 0]* on F_3.  At level 0 the
    search ranges are clamped by one grid step (k2 <= n-1, k3 >= 1), which
    keeps each search within ceil(log2 n) queries; the clamp changes neither
    the covered flag nor any downstream output.
    """
    if not 0 <= a <= n:
        raise ValueError(f"level {a} outside 0..{n}")
    m = n - a
    if __debug__ and m > 0:
        assert membership(oracle.profile.set_for(i, 2), normalize_grid(_grid3(n, a, 0)))
        assert membership(oracle.profile.set_for(i, 3), normalize_grid(_grid3(n, a, m)))

    cap = m - 1 if a == 0 and m > 0 else m
    lo, hi = 0, cap + 1  # membership known at b=0, virtual non-membership at cap+1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if oracle.binary_query(i, 2, normalize_grid(_grid3(n, a, mid))):
            lo = mid
        else:
            hi = mid
    k2 = lo

    floor3 = 1 if a == 0 and m > 0 else 0
    lo, hi = floor3 - 1, m  # membership known at b=m, virtual non-membership below floor
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if oracle.binary_query(i, 3, normalize_grid(_grid3(n, a, mid))):
            hi = mid
        else:
            lo = mid
    k3 = hi

    return LevelScan(a, k2, k3, k2 + 1 >= k3)


def find_boundary_level(
    oracle: Oracle, i: int, n: int, scan0: Optional[LevelScan] = None
) -> tuple[int, LevelScan, LevelScan]:
    """Binary-search a level a0 that is uncovered while a0 + 1 is covered.

    Works despite gaps in the covered set because the invariant only needs
    one uncovered and one covered anchor.  Raises Level0Covered (with the
    scan attached) when there is nothing to search; level n is covered for
    free since its single point lies on F_2 and F_3.
    """
    if scan0 is None:
        scan0 = scan_levels(oracle, i, 0, n)
    if scan0.covered:
        raise Level0Covered(scan0)
    lo, scan_lo = 0, scan0
    hi, scan_hi = n, LevelScan(n, 0, 0, True)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        scan = scan_levels(oracle, i, mid, n)
        if scan.covered:
            hi, scan_hi = mid, scan
        else:
            lo, scan_lo = mid, scan
    return lo, scan_lo, scan_hi


def z_transition(scan_a0: LevelScan, scan_a1: LevelScan, n: int) -> tuple[GridPoint, GridPoint]:
    """Locate adjacent grid points z_m in A_i2, z_{m+1} in A_i3 with no queries.

    The zigzag runs from [a0, k2(a0)]* through the level-(a0+1) points with
    b = k2(a0)..k3(a0)-1 to [a0, k3(a0)]*; the known scan of level a0+1 pins
    the transition.  The two points are one grid edge (1/n) apart.
    """
    if scan_a0.covered or not scan_a1.covered or scan_a1.a != scan_a0.a + 1:
        raise InconsistentScans(f"bad scan pair: {scan_a0} / {scan_a1}")
    a0, k2, k3 = scan_a0.a, scan_a0.k2, scan_a0.k3
    K2, K3 = scan_a1.k2, scan_a1.k3
    lo_b, hi_b = k2, k3 - 1
    if K2 < lo_b:
        zm, zm1 = _grid3(n, a0, k2), _grid3(n, a0 + 1, k2)
    elif K2 >= hi_b:
        zm, zm1 = _grid3(n, a0 + 1, hi_b), _grid3(n, a0, k3)
    else:
        zm, zm1 = _grid3(n, a0 + 1, K2), _grid3(n, a0 + 1, K2 + 1)
    assert bary_dist2(normalize_grid(zm), normalize_grid(zm1)) == Fraction(1, n * n)
    return zm, zm1


_FACET_EDGES = {1: (2, 3), 2: (3, 1), 3: (1, 2)}


def _hull_constraints(x: BarycentricPoint, j: int):
    """Half-planes carving conv(F_j, x) out of the triangle."""
    if x.coord(j) == 0:
        # x lies on F_j; the hull degenerates to the facet itself.
        coeffs = [Fraction(0)] * 3
        coeffs[j - 1] = Fraction(-1)
        return [tuple(coeffs)]
    p, q = _FACET_EDGES[j]
    vp = BarycentricPoint.vertex(3, p)
    vq = BarycentricPoint.vertex(3, q)
    return [
        halfplane_through(vq.coords, x.coords, vp.coords),
        halfplane_through(x.coords, vp.coords, vq.coords),
    ]


def combine_separate_players(
    x1: BarycentricPoint, x2: BarycentricPoint, x3: BarycentricPoint, epsilon
) -> tuple[BarycentricPoint, tuple[int, int, int]]:
    """Merge three per-agent points into one fair point plus a permutation.

    Builds the nine known hulls conv(F_j, x_i) and intersects triples by
    exact half-plane clipping, permutation by permutation in lexicographic
    order.  Costs zero oracle queries.  Provided each x_i is within epsilon
    of all of agent i's sets, some permutation must work; if none does the
    upstream certificates were violated and we raise rather than patch over.
    """
    del epsilon  # part of the contract; the construction itself is exact
    xs = (x1, x2, x3)
    if any(x.d != 3 for x in xs):
        raise ValueError("combine_separate_players is defined for d = 3")
    constraints = {
        (i, j): _hull_constraints(xs[i - 1], j) for i in (1, 2, 3) for j in (1, 2, 3)
    }
    triangle = [BarycentricPoint.vertex(3, j) for j in (1, 2, 3)]
    for sigma in itertools.permutations((1, 2, 3)):
        poly = triangle
        for i in (1, 2, 3):
            for plane in constraints[(i, sigma[i - 1])]:
                poly = clip_polygon(poly, plane)
                if not poly:
                    break
            if not poly:
                break
        if poly:
            return polygon_centroid(poly), sigma
    raise NoPermutationWorks("no permutation admits a common point; inputs violate their certificates")


def solve_convex3(oracle: Oracle, epsilon) -> FairDivisionCertificate:
    """Convex-preference rental solver for d = 3 (binary mode)."""
    if oracle.profile.kind != KIND_CONVEX3:
        raise InvalidProfileKind(f"solve_convex3 needs {KIND_CONVEX3}, got {oracle.profile.kind}")
    eps = as_ratio(epsilon)
    n = resolution(eps)
    bound = budget_convex(n)
    oracle.transcript.binary_budget = bound
    oracle.transcript.minimal_budget = 0

    xs: list[BarycentricPoint] = []
    for i in (1, 2, 3):
        scan0 = scan_levels(oracle, i, 0, n)
        if scan0.covered:
            xs.append(normalize_grid(_grid3(n, 0, scan0.k2)))
            continue
        a0, scan_lo, scan_hi = find_boundary_level(oracle, i, n, scan0=scan0)
        zm, _ = z_transition(scan_lo, scan_hi, n)
        xs.append(normalize_grid(zm))
    point, sigma = combine_separate_players(xs[0], xs[1], xs[2], eps)
    log.debug("solve_convex3 n=%d: %d queries (bound %d)",
              n, oracle.transcript.binary_count, bound)
    return FairDivisionCertificate(
        point=point,
        sigma=sigma,
        epsilon=eps,
        binary_queries=oracle.transcript.binary_count,
        minimal_queries=oracle.transcript.minimal_count,
        selection_queries=0,
        bound=bound,
    )
