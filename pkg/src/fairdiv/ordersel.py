"""Pivot selection over d linear orderings and fair-point selection.

Given d linear orderings of {1, ..., d-1} there is an element i0 such that
for every excluded ordering index j0 a bijection pi onto the remaining
indices exists with i0 <=_{pi(i)} i for every i.  The construction peels off
an element that is maximal in two of the surviving orderings; the recorded
trace lets pi be rebuilt for any j0 by pure replay.

Applied to nested preference families ("smaller set comes earlier" per
room), the pivot's point is a fair division point once a single query
reveals which of the last agent's sets contains it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .geometry import BarycentricPoint


@dataclass(frozen=True)
class OrderingFamily:
    """d linear orderings of {1, ..., d-1}, each listed smallest to largest."""

    d: int
    orderings: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "orderings", tuple(tuple(o) for o in self.orderings))
        if self.d < 1:
            raise ValueError("d must be positive")
        if len(self.orderings) != self.d:
            raise ValueError(f"need exactly {self.d} orderings, got {len(self.orderings)}")
        expected = set(range(1, self.d))
        for o in self.orderings:
            if set(o) != expected or len(o) != self.d - 1:
                raise ValueError(f"{o} is not a permutation of {sorted(expected)}")

    def rank(self, l: int, i: int) -> int:
        """Position of element i in ordering l (1-based ordering index)."""
        return self.orderings[l - 1].index(i)

    def leq(self, l: int, i1: int, i2: int) -> bool:
        """True iff i1 <=_l i2."""
        return self.rank(l, i1) <= self.rank(l, i2)


@dataclass(frozen=True)
class PivotResult:
    """Pivot i0 plus the per-level trace (removed element, removed ordering, spare)."""

    i0: int | None
    trace: tuple[tuple[int, int, int], ...]


def select_pivot(fam: OrderingFamily) -> PivotResult:
    """Find the pivot element; deterministic (smallest element, then orderings)."""
    elements = list(range(1, fam.d))
    live_orderings = list(range(1, fam.d + 1))
    trace: list[tuple[int, int, int]] = []
    remaining = set(elements)
    while remaining:
        k, l1, l2 = _max_in_two(fam, remaining, live_orderings)
        trace.append((k, l1, l2))
        remaining.remove(k)
        live_orderings.remove(l1)
    i0 = trace[-1][0] if trace else None
    return PivotResult(i0, tuple(trace))


def _max_in_two(fam: OrderingFamily, remaining: set[int], live: list[int]) -> tuple[int, int, int]:
    # |live| = |remaining| + 1 maxima over |remaining| elements: some element
    # is maximal in at least two orderings.
    maxima: dict[int, list[int]] = {}
    for l in live:
        best = max(remaining, key=lambda i: fam.rank(l, i))
        maxima.setdefault(best, []).append(l)
    for k in sorted(maxima):
        if len(maxima[k]) >= 2:
            ls = sorted(maxima[k])
            return k, ls[0], ls[1]
    raise AssertionError("pigeonhole violated: malformed ordering family")


def build_assignment(res: PivotResult, fam: OrderingFamily, j0: int) -> dict[int, int]:
    """Replay the trace into a bijection pi: {1..d-1} -> {1..d} minus {j0}.

    The defining inequality i0 <=_{pi(i)} i is re-verified on every call.
    """
    if not 1 <= j0 <= fam.d:
        raise ValueError(f"j0={j0} out of range 1..{fam.d}")
    pi: dict[int, int] = {}
    target = j0
    for k, l1, l2 in res.trace:
        if target != l1:
            pi[k] = l1
        else:
            pi[k] = l2
            target = l2
    if res.i0 is not None:
        for i, l in pi.items():
            if not fam.leq(l, res.i0, i):
                raise AssertionError(f"pivot property violated: {res.i0} </=_{l} {i}")
    if sorted(pi.values()) != sorted(set(range(1, fam.d + 1)) - {j0}):
        raise AssertionError("assignment is not a bijection onto the remaining indices")
    return pi


def select_fair_point(
    points: Sequence[BarycentricPoint],
    fam: OrderingFamily,
    ask_room: Callable[[BarycentricPoint], int],
) -> tuple[BarycentricPoint, tuple[int, ...]]:
    """Pick the fair division point among points x_1..x_{d-1}.

    `fam` encodes the inclusion orderings of a known nested family and each
    x_i must lie in the intersection of agent i's sets.  `ask_room` is
    consulted exactly once, at the pivot's point, for a room of agent d; the
    returned permutation assigns sigma[i-1] to agent i.
    """
    d = fam.d
    if len(points) != d - 1:
        raise ValueError(f"need {d - 1} points, got {len(points)}")
    res = select_pivot(fam)
    x = points[res.i0 - 1]
    j0 = ask_room(x)
    if not 1 <= j0 <= d:
        raise ValueError(f"oracle answered invalid room {j0}")
    pi = build_assignment(res, fam, j0)
    sigma = tuple(pi[i] for i in range(1, d)) + (j0,)
    return x, sigma
