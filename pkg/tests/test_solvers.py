"""Cake and rent solvers: worked traces, budgets, exact fairness."""
from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairdiv.geometry import BarycentricPoint
from fairdiv.preferences import (
    KIND_LPS_LOWER,
    KIND_LPS_UPPER,
    LinearPreferenceSet,
    Oracle,
    PreferenceProfile,
    QueryTranscript,
    Sense,
    generate_profile,
    membership,
)
from fairdiv.solvers import (
    FairDivisionCertificate,
    InvalidProfileKind,
    RentOutcome,
    budget_cake,
    budget_convex,
    budget_rent,
    ceil_log2,
    ceil_log_ratio,
    find_threshold_approx,
    rent_locate,
    rent_steps,
    resolution,
    solve_cake,
    solve_rent,
)
from fairdiv.verifier import verify_certificate


def upper_profile(rows):
    return PreferenceProfile(len(rows), KIND_LPS_UPPER, tuple(
        tuple(LinearPreferenceSet(Sense.UPPER_BOUND, j + 1, Fraction(a)) for j, a in enumerate(r))
        for r in rows))


def lower_profile(rows):
    return PreferenceProfile(len(rows), KIND_LPS_LOWER, tuple(
        tuple(LinearPreferenceSet(Sense.LOWER_BOUND, j + 1, Fraction(a)) for j, a in enumerate(r))
        for r in rows))


RENT_D2 = upper_profile([["7/10", "6/10"], ["1/2", "3/4"]])


class TestBudgets:
    def test_worked_values(self):
        assert budget_cake(3, 16) == 20
        assert budget_rent(2, 16) == 4
        assert budget_convex(16) == 120

    def test_ceil_log2(self):
        assert [ceil_log2(m) for m in (1, 2, 3, 4, 5, 8, 9)] == [0, 1, 2, 2, 3, 3, 4]

    def test_ceil_log_ratio_exact(self):
        # least t with n (d-1)^t <= d^t, cross-checked by direct inequality
        for d in (2, 3, 4, 5, 6):
            for n in (1, 2, 7, 64, 1000, 1024):
                t = ceil_log_ratio(n, d)
                assert n * (d - 1) ** t <= d**t
                if t > 0:
                    assert n * (d - 1) ** (t - 1) > d ** (t - 1)

    def test_resolution(self):
        assert resolution(Fraction(1, 4)) == 4
        assert resolution(Fraction(3, 10)) == 4
        assert resolution(Fraction(2)) == 1
        with pytest.raises(ValueError):
            resolution(Fraction(0))


class TestThresholdSearch:
    def test_hand_simulation(self):
        # threshold 3/10, delta 1/4: asks 1/2 (yes) then 1/4 (no)
        p = lower_profile([["3/10", "3/10"], ["3/10", "3/10"]])
        o = Oracle(p)
        c = find_threshold_approx(o, 1, 1, Fraction(1, 4))
        assert c == Fraction(1, 4)
        assert o.transcript.binary_count == 2
        assert [e.response for e in o.transcript.entries] == [True, False]
        a = Fraction(3, 10)
        assert max(a - Fraction(1, 4), 0) <= c < a

    def test_single_query_case(self):
        p = lower_profile([["501/1000", "1/10"], ["1/2", "1/10"]])
        o = Oracle(p)
        c = find_threshold_approx(o, 1, 1, Fraction(1, 2))
        assert c == Fraction(1, 2)
        assert o.transcript.binary_count == 1

    @given(st.data())
    @settings(max_examples=120, deadline=None)
    def test_bracket_property(self, data):
        num = data.draw(st.integers(1, 255))
        a = Fraction(num, 256)
        b = (1 - a) / 2  # keeps the row a covering: a + b <= 1
        delta = Fraction(1, data.draw(st.sampled_from([2, 3, 4, 16, 100])))
        p = lower_profile([[a, b], [a, b]])
        o = Oracle(p)
        c = find_threshold_approx(o, 1, 1, delta)
        assert max(a - delta, 0) <= c < a
        q = 1 / delta
        expected = 0 if q <= 1 else ceil_log2(-((-q.numerator) // q.denominator))
        assert o.transcript.binary_count == expected


class TestSolveCake:
    def test_worked_d2(self):
        p = lower_profile([["3/10", "3/10"], ["1/2", "1/4"]])
        cert = solve_cake(Oracle(p), Fraction(1, 4))
        assert cert.point.to_json() == ["1/4", "3/4"]
        assert cert.binary_queries - cert.selection_queries == 2
        assert cert.bound == budget_cake(2, 4) == 2
        assert verify_certificate(p, cert).fair

    def test_rejects_wrong_kind(self):
        with pytest.raises(InvalidProfileKind):
            solve_cake(Oracle(RENT_D2), Fraction(1, 4))

    def test_random_d3(self):
        for seed in range(15):
            p = generate_profile(KIND_LPS_LOWER, 3, seed)
            cert = solve_cake(Oracle(p), Fraction(1, 16))
            assert cert.binary_queries - cert.selection_queries <= budget_cake(3, 16) == 20
            assert cert.selection_queries <= 2
            assert verify_certificate(p, cert).fair

    def test_degenerate_epsilon_above_one(self):
        p = generate_profile(KIND_LPS_LOWER, 3, 1)
        cert = solve_cake(Oracle(p), Fraction(3, 2))
        assert verify_certificate(p, cert).fair

    def test_threshold_gap_invariant(self):
        # c_ij < a_ij with a_ij - c_ij <= eps/(d-1), exact comparisons
        eps = Fraction(1, 16)
        for seed in range(8):
            p = generate_profile(KIND_LPS_LOWER, 4, seed)
            delta = eps / 3
            o = Oracle(p)
            for i in (1, 2, 3):
                for j in (1, 2, 3):
                    c = find_threshold_approx(o, i, j, delta)
                    a = p.set_for(i, j).a
                    assert c < a
                    assert a - c <= delta

    def test_accounting_matches_transcript(self):
        p = generate_profile(KIND_LPS_LOWER, 3, 3)
        o = Oracle(p)
        cert = solve_cake(o, Fraction(1, 8))
        assert cert.binary_queries == o.transcript.binary_count
        assert cert.minimal_queries == o.transcript.minimal_count == 0


class TestRentLocate:
    def test_worked_d2_trace(self):
        o = Oracle(RENT_D2)
        x1 = rent_locate(o, 1, Fraction(1, 4))
        assert x1.to_json() == ["5/8", "3/8"]
        assert o.transcript.minimal_count == 2
        asked = [(e.point.to_json(), e.response) for e in o.transcript.entries]
        assert asked == [(["1/2", "1/2"], 1), (["3/4", "1/4"], 2)]
        assert membership(RENT_D2.set_for(1, 1), x1)
        assert membership(RENT_D2.set_for(1, 2), x1)

    def test_exact_query_count(self):
        for d in (2, 3, 5):
            for n_eps in (2, 64, 1024):
                p = generate_profile(KIND_LPS_UPPER, d, 0)
                o = Oracle(p)
                rent_locate(o, 1, Fraction(1, n_eps))
                assert o.transcript.minimal_count == ceil_log_ratio(n_eps, d)

    def test_final_scale_below_epsilon(self):
        # ((d-1)/d)^T <= 1/n, as exact rationals
        for d in (2, 3, 4, 5, 6):
            for n in (1, 2, 8, 64, 1024):
                t = ceil_log_ratio(n, d)
                assert Fraction(d - 1, d) ** t <= Fraction(1, n)

    def test_overwhelming_first_room(self):
        p = upper_profile([["1", "1/64", "1/64"]] * 3)
        o = Oracle(p)
        x = rent_locate(o, 1, Fraction(1, 16))
        assert all(e.response == 1 for e in o.transcript.entries)
        assert x.coord(1) >= 1 - Fraction(1, 16)


class TestSolveRent:
    def test_worked_d2(self):
        cert = solve_rent(Oracle(RENT_D2), Fraction(1, 4))
        assert cert.point.to_json() == ["5/8", "3/8"]
        assert cert.sigma == (1, 2)
        assert cert.minimal_queries == 3
        assert cert.selection_queries == 1
        assert cert.bound == 2
        assert membership(RENT_D2.set_for(1, 1), cert.point)
        assert membership(RENT_D2.set_for(2, 2), cert.point)
        assert verify_certificate(RENT_D2, cert).fair

    def test_certificate_json_shape(self):
        cert = solve_rent(Oracle(RENT_D2), Fraction(1, 4))
        data = cert.to_json()
        assert data == {
            "point": ["5/8", "3/8"],
            "sigma": [1, 2],
            "epsilon": "1/4",
            "binary_queries": 0,
            "minimal_queries": 3,
            "selection_queries": 1,
            "bound": 2,
            "verified": None,
        }
        assert FairDivisionCertificate.from_json(data).to_json() == data

    def test_random_d3(self):
        for seed in range(15):
            p = generate_profile(KIND_LPS_UPPER, 3, seed)
            cert = solve_rent(Oracle(p), Fraction(1, 64))
            assert cert.minimal_queries <= budget_rent(3, 64) + 1
            assert verify_certificate(p, cert).fair

    def test_all_sets_whole_simplex(self):
        p = upper_profile([["1", "1", "1"]] * 3)
        cert = solve_rent(Oracle(p), Fraction(1, 8))
        assert verify_certificate(p, cert).fair

    def test_randomized_tie_break_still_verifies(self):
        for seed in range(30):
            p = generate_profile(KIND_LPS_UPPER, 3, seed)
            o = Oracle(p, tie_break=random.Random(seed * 7 + 1))
            cert = solve_rent(o, Fraction(1, 32))
            assert verify_certificate(p, cert).fair

    def test_rejects_wrong_kind(self):
        p = generate_profile(KIND_LPS_LOWER, 3, 0)
        with pytest.raises(InvalidProfileKind):
            solve_rent(Oracle(p), Fraction(1, 4))

    def test_budgets_installed_on_transcript(self):
        o = Oracle(RENT_D2)
        solve_rent(o, Fraction(1, 4))
        assert o.transcript.minimal_budget == budget_rent(2, 4) + 1
        assert o.transcript.binary_budget == 0


class TestBudgetInvariantSweep:
    """Hard budget assertions across the full dimension/resolution grid.

    Budgets are enforced structurally (the transcript raises on overdraw);
    this sweep exercises that wiring on the extended grid, including n = 1
    and d = 6, at a dozen seeds per cell.
    """

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
    @pytest.mark.parametrize("n", [1, 2, 8, 64, 1024])
    def test_cake_and_rent(self, d, n):
        eps = Fraction(1, n)
        for seed in range(12):
            p = generate_profile(KIND_LPS_UPPER, d, seed)
            cert = solve_rent(Oracle(p), eps)
            assert cert.minimal_queries <= budget_rent(d, n) + 1
            assert verify_certificate(p, cert).fair
            pl = generate_profile(KIND_LPS_LOWER, d, seed)
            certl = solve_cake(Oracle(pl), eps)
            assert certl.binary_queries - certl.selection_queries <= budget_cake(d, n)
            assert certl.selection_queries <= d - 1
            assert verify_certificate(pl, certl).fair


class TestHostileInstances:
    """Degenerate and adversarial corners the generator avoids."""

    def test_rent_tight_covering(self):
        # rows sum to exactly 1: the fair region is as small as it gets
        p = upper_profile([
            ["1/2", "1/4", "1/4"],
            ["1/4", "1/2", "1/4"],
            ["1/4", "1/4", "1/2"],
        ])
        cert = solve_rent(Oracle(p), Fraction(1, 128))
        assert verify_certificate(p, cert).fair

    def test_rent_facet_only_set(self):
        # a_i2 = 0: room 2 acceptable only when free
        p = upper_profile([
            ["1", "0", "1"],
            ["1", "0", "1"],
            ["1/2", "1/2", "1/2"],
        ])
        cert = solve_rent(Oracle(p), Fraction(1, 32))
        assert verify_certificate(p, cert).fair

    def test_rent_identical_agents(self):
        p = upper_profile([["1/2", "1/2", "1/2"]] * 3)
        cert = solve_rent(Oracle(p), Fraction(1, 64))
        assert verify_certificate(p, cert).fair

    def test_cake_extreme_thresholds(self):
        p = lower_profile([
            ["9/10", "1/20", "1/20"],
            ["1/100", "1/100", "49/50"],
            ["1/3", "1/3", "1/3"],
        ])
        cert = solve_cake(Oracle(p), Fraction(1, 64))
        assert verify_certificate(p, cert).fair

    def test_irregular_epsilon(self):
        # epsilon not a unit fraction: n = ceil(17/3) = 6
        assert resolution(Fraction(3, 17)) == 6
        p = generate_profile(KIND_LPS_UPPER, 3, 5)
        cert = solve_rent(Oracle(p), Fraction(3, 17))
        assert cert.minimal_queries <= budget_rent(3, 6) + 1
        assert verify_certificate(p, cert).fair
        pl = generate_profile(KIND_LPS_LOWER, 3, 5)
        certl = solve_cake(Oracle(pl), Fraction(3, 17))
        assert verify_certificate(pl, certl).fair

    def test_higher_dimension_d8(self):
        for seed in range(3):
            p = generate_profile(KIND_LPS_UPPER, 8, seed)
            cert = solve_rent(Oracle(p), Fraction(1, 32))
            assert cert.minimal_queries <= budget_rent(8, 32) + 1
            assert verify_certificate(p, cert).fair
            pl = generate_profile(KIND_LPS_LOWER, 8, seed)
            certl = solve_cake(Oracle(pl), Fraction(1, 32))
            assert certl.selection_queries <= 7
            assert verify_certificate(pl, certl).fair


class TestRentProtocolGenerator:
    def drive(self, profile, epsilon):
        gen = rent_steps(profile.d, epsilon)
        oracle = Oracle(profile)
        query = next(gen)
        answers = 0
        try:
            while True:
                room = oracle.minimal_query(query.agent, query.point)
                answers += 1
                query = gen.send(room)
        except StopIteration as stop:
            return stop.value, answers

    def test_matches_solver_exactly(self):
        for seed in range(10):
            p = generate_profile(KIND_LPS_UPPER, 3, seed)
            outcome, answers = self.drive(p, Fraction(1, 16))
            assert isinstance(outcome, RentOutcome)
            cert = solve_rent(Oracle(p), Fraction(1, 16))
            assert outcome.point == cert.point
            assert outcome.sigma == cert.sigma
            assert answers == cert.minimal_queries

    def test_rejects_invalid_room(self):
        gen = rent_steps(2, Fraction(1, 4))
        next(gen)
        with pytest.raises(ValueError):
            gen.send(5)
