from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from fairdiv.geometry import BarycentricPoint


@st.composite
def bary_points(draw, d: int, denom: int = 120):
    """Random rational points of the (d-1)-simplex with denominator `denom`."""
    cuts = sorted(draw(st.lists(st.integers(0, denom), min_size=d - 1, max_size=d - 1)))
    bounds = [0] + cuts + [denom]
    parts = [bounds[i + 1] - bounds[i] for i in range(d)]
    return BarycentricPoint(tuple(Fraction(p, denom) for p in parts))


def random_point(rng: random.Random, d: int, denom: int = 997) -> BarycentricPoint:
    cuts = sorted(rng.randint(0, denom) for _ in range(d - 1))
    bounds = [0] + cuts + [denom]
    return BarycentricPoint(tuple(Fraction(bounds[i + 1] - bounds[i], denom) for i in range(d)))
