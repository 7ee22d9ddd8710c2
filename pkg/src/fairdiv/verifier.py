"""Ground-truth certification of fairness claims.

Every threshold comparison is made on exact rational squared distances;
floats appear only in reported magnitudes.  Linear-threshold sets get a
closed-form exact distance (projection onto the bounding slice of the
simplex, with the active-set enumeration handling feet that leave the
simplex).  Convex polygons get an exact edge-projection distance plus an
honest sampling-based "grid" method whose error is bounded by the mesh.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .geometry import (
    BarycentricPoint,
    as_ratio,
    bary_dist2,
    ceil_ratio,
    grid_points,
    hyperplane_dist2,
    normalize_grid,
)
from .polygons import point_in_convex, polygon_dist2, segment_dist2
from .preferences import (
    KIND_CONVEX3,
    ConvexPreferenceSet,
    LinearPreferenceSet,
    PreferenceProfile,
    PreferenceSet,
    Sense,
    membership,
)
from .solvers import FairDivisionCertificate, resolution

log = logging.getLogger("fairdiv.verifier")

FAIR = "fair"
UNFAIR = "unfair"
INDETERMINATE = "indeterminate"

_MAX_EXACT_D = 8  # active-set enumeration is 2^(d-1) subsets


class UnsupportedDimension(ValueError):
    pass


def lps_dist2(pref_set: LinearPreferenceSet, x: BarycentricPoint) -> Fraction:
    """Exact squared distance from x (in the simplex) to a linear set.

    For upper-bound sets the perpendicular foot onto {alpha_j = a} stays in
    the simplex, so the plane distance is the answer.  For lower-bound sets
    the foot can leave the simplex; the nearest point then lies on the
    bounding slice, and we minimize over its faces by active-set enumeration.
    """
    d = x.d
    if d > _MAX_EXACT_D:
        raise UnsupportedDimension(f"exact method supports d <= {_MAX_EXACT_D}, got {d}")
    if membership(pref_set, x):
        return Fraction(0)
    j, a = pref_set.j, pref_set.a
    if pref_set.sense is Sense.UPPER_BOUND:
        return hyperplane_dist2(x, j, a)

    gap = a - x.coord(j)  # positive: x is below the threshold
    share = gap / (d - 1)
    if all(x.coord(k) >= share for k in range(1, d + 1) if k != j):
        return hyperplane_dist2(x, j, a)

    # Nearest point has alpha_j = a and distributes 1 - a over a support
    # subset S of the other coordinates: mu_k = x_k + t with a common shift.
    others = [x.coord(k) for k in range(1, d + 1) if k != j]
    base = (x.coord(j) - a) ** 2
    best: Optional[Fraction] = None
    m = len(others)
    for mask in range(1, 1 << m):
        support = [others[k] for k in range(m) if mask & (1 << k)]
        t = (1 - a - sum(support)) / len(support)
        if any(v + t < 0 for v in support):
            continue
        rest = sum(v * v for k, v in enumerate(others) if not mask & (1 << k))
        cand = (base + len(support) * t * t + rest) / 2
        if best is None or cand < best:
            best = cand
    assert best is not None  # the full support with clamping always yields a candidate
    return best


def convex_dist2(pref_set: ConvexPreferenceSet, x: BarycentricPoint) -> Fraction:
    """Exact squared distance to a convex polygon set (0 inside)."""
    return polygon_dist2(x, pref_set.vertices)


def set_dist2_exact(pref_set: PreferenceSet, x: BarycentricPoint) -> Fraction:
    if isinstance(pref_set, LinearPreferenceSet):
        return lps_dist2(pref_set, x)
    return convex_dist2(pref_set, x)


def set_dist2_grid(pref_set: PreferenceSet, x: BarycentricPoint, mesh: Fraction) -> Fraction:
    """Squared distance by sampling the set at spacing <= mesh.

    Returns 0 for members.  Otherwise the minimum over the samples, which
    overestimates the true distance by at most mesh (the nearest set point
    lies on the bounding slice / polygon boundary, and some sample is within
    mesh of it along that boundary).
    """
    if membership(pref_set, x):
        return Fraction(0)
    if isinstance(pref_set, LinearPreferenceSet):
        return min(bary_dist2(x, s) for s in _slice_samples(pref_set, x.d, mesh))
    best = None
    verts = pref_set.vertices
    k = len(verts)
    for idx in range(k):
        p, q = verts[idx], verts[(idx + 1) % k]
        # Exact per-edge projection counts as an adaptive sample of the edge;
        # it keeps the measurement from overshooting right at a threshold.
        cand = segment_dist2(x, p, q)
        for s in _segment_samples(p, q, mesh):
            cand = min(cand, bary_dist2(x, s))
        if best is None or cand < best:
            best = cand
    return best


def _slice_samples(pref_set: LinearPreferenceSet, d: int, mesh: Fraction):
    """Grid sample of the slice {alpha_j = a} of the simplex at spacing <= mesh."""
    j, a = pref_set.j, pref_set.a
    # The nearest boundary is {alpha_j = a}, a scaled copy of a facet with
    # edge length (1 - a); resolution chosen so sample spacing <= mesh.
    edge = 1 - a
    m = max(1, ceil_ratio(edge / mesh)) if edge > 0 else 1
    for g in grid_points(m, d - 1):
        coords = [Fraction(0)] * d
        coords[j - 1] = a
        others = [k for k in range(d) if k != j - 1]
        for slot, part in zip(others, g.parts):
            coords[slot] = (1 - a) * Fraction(part, m)
        yield BarycentricPoint(tuple(coords))


def _segment_samples(p: BarycentricPoint, q: BarycentricPoint, mesh: Fraction):
    length2 = bary_dist2(p, q)
    if length2 == 0:
        yield p
        return
    # ceil(length / mesh) sample intervals; comparing squares avoids sqrt.
    m = 1
    while length2 > m * m * mesh * mesh:
        m += 1
    for t in range(m + 1):
        frac = Fraction(t, m)
        yield BarycentricPoint(tuple(a + frac * (b - a) for a, b in zip(p.coords, q.coords)))


def default_mesh(epsilon: Fraction) -> Fraction:
    return min(as_ratio(epsilon) / 10, Fraction(1, 256))


def set_distance(pref_set: PreferenceSet, x: BarycentricPoint, method: str = "exact",
                 mesh=None) -> float:
    """Distance from x to a preference set, as a float magnitude."""
    if method == "exact":
        return math.sqrt(set_dist2_exact(pref_set, x))
    if method == "grid":
        if mesh is None:
            raise ValueError("grid method needs a mesh")
        return math.sqrt(set_dist2_grid(pref_set, x, as_ratio(mesh)))
    raise ValueError(f"unknown method {method!r}")


@dataclass
class Verdict:
    """Outcome of an epsilon-fairness check for one point.

    status is "fair" / "unfair" / "indeterminate"; the last only arises from
    grid-method measurements inside the (epsilon, epsilon + mesh] band.
    """

    fair: bool
    status: str
    sigma_checked: Optional[tuple[int, ...]]
    per_agent_distance: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "fair": self.fair,
            "status": self.status,
            "sigma_checked": list(self.sigma_checked) if self.sigma_checked else None,
            "per_agent_distance": list(self.per_agent_distance),
        }


def _pair_status(profile: PreferenceProfile, x: BarycentricPoint, i: int, j: int,
                 eps2: Fraction, band2: Fraction, use_grid: bool,
                 mesh: Fraction) -> tuple[str, Fraction]:
    pref_set = profile.set_for(i, j)
    if use_grid and isinstance(pref_set, ConvexPreferenceSet):
        d2 = set_dist2_grid(pref_set, x, mesh)
        if d2 <= eps2:
            return FAIR, d2
        if d2 > band2:
            return UNFAIR, d2
        return INDETERMINATE, d2
    d2 = set_dist2_exact(pref_set, x)
    return (FAIR if d2 <= eps2 else UNFAIR), d2


def check_eps_fair(profile: PreferenceProfile, x: BarycentricPoint, epsilon,
                   sigma: Optional[tuple[int, ...]] = None, mesh=None) -> Verdict:
    """Check epsilon-fairness of x, either for a given permutation or any.

    Exact rational comparisons throughout: fair means squared distance
    <= epsilon^2 for every agent's assigned room.  Convex sets are measured
    with the grid method; its mesh-wide uncertainty band maps to the
    indeterminate status rather than being absorbed.
    """
    eps = as_ratio(epsilon)
    if eps < 0:
        raise ValueError("epsilon must be nonnegative")
    d = profile.d
    if sigma is None and d > 6:
        raise ValueError("permutation search supported for d <= 6")
    mesh_r = as_ratio(mesh) if mesh is not None else default_mesh(eps) if eps > 0 else Fraction(1, 256)
    use_grid = profile.kind == KIND_CONVEX3
    eps2 = eps * eps
    band = eps + mesh_r
    band2 = band * band

    cache: dict[tuple[int, int], tuple[str, Fraction]] = {}

    def pair(i: int, j: int) -> tuple[str, Fraction]:
        if (i, j) not in cache:
            cache[i, j] = _pair_status(profile, x, i, j, eps2, band2, use_grid, mesh_r)
        return cache[i, j]

    def judge(perm: tuple[int, ...]) -> tuple[str, tuple[float, ...]]:
        statuses = []
        dists = []
        for i in range(1, d + 1):
            s, d2 = pair(i, perm[i - 1])
            statuses.append(s)
            dists.append(math.sqrt(d2))
        if all(s == FAIR for s in statuses):
            return FAIR, tuple(dists)
        if any(s == UNFAIR for s in statuses):
            return UNFAIR, tuple(dists)
        return INDETERMINATE, tuple(dists)

    if sigma is not None:
        sigma = tuple(sigma)
        if sorted(sigma) != list(range(1, d + 1)):
            raise ValueError(f"sigma {sigma} is not a permutation of 1..{d}")
        status, dists = judge(sigma)
        return Verdict(status == FAIR, status, sigma, dists)

    best: Optional[tuple[float, tuple[int, ...], tuple[float, ...]]] = None
    saw_indeterminate = False
    for perm in itertools.permutations(range(1, d + 1)):
        status, dists = judge(perm)
        if status == FAIR:
            return Verdict(True, FAIR, perm, dists)
        if status == INDETERMINATE:
            saw_indeterminate = True
        key = max(dists)
        if best is None or key < best[0]:
            best = (key, perm, dists)
    status = INDETERMINATE if saw_indeterminate else UNFAIR
    return Verdict(False, status, best[1], best[2])


def verify_certificate(profile: PreferenceProfile, cert: FairDivisionCertificate,
                       mesh=None) -> Verdict:
    """Check a certificate against ground truth with its own permutation."""
    return check_eps_fair(profile, cert.point, cert.epsilon, cert.sigma, mesh=mesh)


@dataclass
class GridSearchResult:
    point: Optional[BarycentricPoint]
    sigma: Optional[tuple[int, ...]]
    evaluations: int
    resolution: int

    @property
    def found(self) -> bool:
        return self.point is not None


def grid_search_fair(profile: PreferenceProfile, epsilon) -> GridSearchResult:
    """Brute-force baseline: scan grid vertices until one is epsilon-fair.

    The grid resolution makes cell edges at most epsilon, enumeration is
    lexicographic in the integer parts, and the returned count is the number
    of ground-truth set evaluations spent (the baseline's "query cost").
    """
    eps = as_ratio(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    d = profile.d
    n = resolution(eps)
    eps2 = eps * eps
    evals = 0

    # Float prefilter for polygon sets: a separating edge line already beyond
    # epsilon proves the distance is; exact arithmetic settles the rest.
    margins = _edge_margins(profile) if profile.kind == KIND_CONVEX3 else None
    eps_f = float(eps)

    for g in grid_points(n, d):
        x = normalize_grid(g)
        cache: dict[tuple[int, int], bool] = {}

        def accepts(i: int, j: int) -> bool:
            nonlocal evals
            if (i, j) not in cache:
                evals += 1
                cache[i, j] = _accepts(profile, i, j, x, eps2, eps_f, margins)
            return cache[i, j]

        for perm in itertools.permutations(range(1, d + 1)):
            if all(accepts(i, perm[i - 1]) for i in range(1, d + 1)):
                return GridSearchResult(x, perm, evals, n)
    log.warning("grid search exhausted resolution %d without a fair point", n)
    return GridSearchResult(None, None, evals, n)


def _accepts(profile, i, j, x, eps2, eps_f, margins) -> bool:
    pref_set = profile.set_for(i, j)
    if membership(pref_set, x):
        return True
    if margins is not None and isinstance(pref_set, ConvexPreferenceSet):
        lower = _float_lower_bound(x, pref_set, margins[i, j])
        if lower > eps_f * (1 + 1e-9) + 1e-12:
            return False
    return set_dist2_exact(pref_set, x) <= eps2


def _edge_margins(profile: PreferenceProfile) -> dict:
    out = {}
    for i in range(1, profile.d + 1):
        for j in range(1, profile.d + 1):
            s = profile.set_for(i, j)
            edges = []
            verts = s.vertices
            k = len(verts)
            for idx in range(k):
                p, q = verts[idx], verts[(idx + 1) % k]
                c = (
                    p.coords[1] * q.coords[2] - p.coords[2] * q.coords[1],
                    p.coords[2] * q.coords[0] - p.coords[0] * q.coords[2],
                    p.coords[0] * q.coords[1] - p.coords[1] * q.coords[0],
                )
                cf = tuple(float(v) for v in c)
                mean = sum(cf) / 3
                norm = math.sqrt(2 * sum((v - mean) ** 2 for v in cf))
                if norm > 0:
                    edges.append((cf, norm))
            out[i, j] = edges
    return out


def _float_lower_bound(x: BarycentricPoint, pref_set, edges) -> float:
    xf = tuple(float(c) for c in x.coords)
    best = 0.0
    for (c, norm) in edges:
        val = c[0] * xf[0] + c[1] * xf[1] + c[2] * xf[2]
        # CCW polygons keep the interior at positive functional values.
        if val < 0:
            best = max(best, -val / norm)
    return best
