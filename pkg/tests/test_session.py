"""Session state machine and HTTP surface."""
from __future__ import annotations

from fractions import Fraction

import pytest
from fastapi.testclient import TestClient

from fairdiv.preferences import KIND_LPS_UPPER, Oracle, generate_profile
from fairdiv.session import (
    SessionError,
    SessionStore,
    create_app,
    create_session,
    format_cents,
    parse_money,
    split_cents,
)
from fairdiv.solvers import budget_rent, resolution
from fairdiv.verifier import verify_certificate


class TestMoney:
    def test_split_preserves_total(self):
        shares = (Fraction(1, 3), Fraction(1, 3), Fraction(1, 3))
        cents = split_cents(Fraction(100), shares)
        assert sum(cents) == 10000
        assert sorted(cents) == [3333, 3333, 3334]

    def test_format(self):
        assert format_cents(6250) == "62.50"
        assert format_cents(5) == "0.05"

    def test_parse_money_validation(self):
        assert parse_money(3000) == 3000
        assert parse_money("99.95") == Fraction("99.95")
        with pytest.raises(SessionError):
            parse_money("0.001")
        with pytest.raises(SessionError):
            parse_money(-5)


class TestSessionMachine:
    def test_d3_first_prices_equal_split(self):
        s = create_session(3, 3000, "1/64")
        state = s.state()
        assert state["phase"] == "awaiting_answer"
        assert state["agent"] == 1
        assert [p["amount"] for p in state["prices"]] == ["1000.00", "1000.00", "1000.00"]

    def test_worked_d2_flow(self):
        # mirrors the d=2 rent trace scaled by 100
        s = create_session(2, 100, "1/4")
        st1 = s.state()
        assert [p["amount"] for p in st1["prices"]] == ["50.00", "50.00"]
        st2 = s.submit(1, 1)
        assert [p["amount"] for p in st2["prices"]] == ["75.00", "25.00"]
        st3 = s.submit(1, 2)
        assert st3["phase"] == "selection_answer" and st3["agent"] == 2
        assert [p["amount"] for p in st3["prices"]] == ["62.50", "37.50"]
        done = s.submit(2, 2)
        assert done["phase"] == "done"
        rooms = {row["tenant"]: row["room"] for row in done["assignment"]}
        assert rooms == {1: 1, 2: 2}
        rents = {row["tenant"]: row["rent"] for row in done["assignment"]}
        assert rents == {1: "62.50", 2: "37.50"}
        assert done["note"].startswith("unverified")

    def test_wrong_turn_leaves_state_unchanged(self):
        s = create_session(2, 100, "1/4")
        before = s.state()
        with pytest.raises(SessionError) as exc:
            s.submit(2, 1)
        assert exc.value.code == "wrong_turn"
        assert s.state() == before

    def test_invalid_room(self):
        s = create_session(2, 100, "1/4")
        with pytest.raises(SessionError) as exc:
            s.submit(1, 3)
        assert exc.value.code == "invalid_room"

    def test_budget_respected_for_any_answers(self):
        import random

        rng = random.Random(4)
        for d in (2, 3, 4):
            s = create_session(d, 990, "1/32")
            while s.state()["phase"] not in ("done", "failed"):
                state = s.state()
                s.submit(state["agent"], rng.randint(1, d))
            final = s.state()
            assert final["phase"] == "done"
            assert final["answers_used"] <= budget_rent(d, resolution(Fraction(1, 32))) + 1

    def test_replay_determinism(self):
        answers = []
        s1 = create_session(3, 1500, "1/16")
        p = generate_profile(KIND_LPS_UPPER, 3, 12)
        oracle = Oracle(p)
        while s1.state()["phase"] == "awaiting_answer" or s1.state()["phase"] == "selection_answer":
            state = s1.state()
            from fairdiv.geometry import BarycentricPoint

            room = oracle.minimal_query(state["agent"], BarycentricPoint.from_json(state["point"]))
            answers.append((state["agent"], room))
            s1.submit(state["agent"], room)
        s2 = create_session(3, 1500, "1/16")
        for agent, room in answers:
            s2.submit(agent, room)
        d1, d2 = s1.state(), s2.state()
        assert d1["assignment"] == d2["assignment"]
        assert d1["certificate"] == d2["certificate"]

    def test_simulated_mode_reaches_verified_done(self):
        s = create_session(3, 3000, "1/64", mode="simulated", seed=9)
        state = s.state()
        assert state["phase"] == "done"
        assert state["verified"] is True
        assert state["answers_used"] <= budget_rent(3, 64) + 1
        total = sum(int(v.replace(".", "")) for v in state["rents"].values())
        assert total == 300000

    def test_simulated_certificate_checks_against_ground_truth(self):
        s = create_session(3, 3000, "1/64", mode="simulated", seed=21)
        profile = generate_profile(KIND_LPS_UPPER, 3, 21)
        assert verify_certificate(profile, s.certificate).fair

    def test_validation_errors(self):
        with pytest.raises(SessionError):
            create_session(1, 100, "1/4")
        with pytest.raises(SessionError):
            create_session(2, 100, "0")
        with pytest.raises(SessionError):
            create_session(2, 100, "1/4", mode="mystery")


class TestHttpApi:
    @pytest.fixture()
    def client(self):
        app = create_app(store=SessionStore())
        return TestClient(app)

    def test_create_poll_answer_flow(self, client):
        r = client.post("/sessions", json={"d": 2, "total_rent": 100, "epsilon": "1/4"})
        assert r.status_code == 200
        sid = r.json()["id"]
        state = r.json()["state"]
        assert state["phase"] == "awaiting_answer"

        # polling is idempotent
        g1 = client.get(f"/sessions/{sid}").json()
        g2 = client.get(f"/sessions/{sid}").json()
        assert g1 == g2 == state

        a1 = client.post(f"/sessions/{sid}/answer", json={"agent": 1, "room": 1})
        assert a1.status_code == 200
        a2 = client.post(f"/sessions/{sid}/answer", json={"agent": 1, "room": 2})
        sel = a2.json()
        assert sel["phase"] == "selection_answer"
        done = client.post(f"/sessions/{sid}/answer", json={"agent": 2, "room": 2}).json()
        assert done["phase"] == "done"
        rooms = sorted(row["room"] for row in done["assignment"])
        assert rooms == [1, 2]

    def test_unknown_session_404(self, client):
        r = client.get("/sessions/nope")
        assert r.status_code == 404
        assert r.json()["code"] == "unknown_session"

    def test_wrong_turn_409(self, client):
        r = client.post("/sessions", json={"d": 2, "total_rent": 100, "epsilon": "1/4"})
        sid = r.json()["id"]
        bad = client.post(f"/sessions/{sid}/answer", json={"agent": 2, "room": 1})
        assert bad.status_code == 409
        assert bad.json()["code"] == "wrong_turn"

    def test_invalid_inputs_400(self, client):
        r = client.post("/sessions", json={"d": 2, "total_rent": 100, "epsilon": "0"})
        assert r.status_code == 400
        r2 = client.post("/sessions", json={"d": 2, "epsilon": "1/4"})
        assert r2.status_code == 400
        r3 = client.post("/sessions", json={"d": 2, "total_rent": 100, "epsilon": "1/4"})
        sid = r3.json()["id"]
        bad = client.post(f"/sessions/{sid}/answer", json={"agent": 1, "room": 9})
        assert bad.status_code == 400
        assert bad.json()["code"] == "invalid_room"

    def test_simulated_over_http(self, client):
        r = client.post("/sessions", json={"d": 3, "total_rent": 3000, "epsilon": "1/64",
                                           "mode": "simulated", "seed": 4})
        state = r.json()["state"]
        assert state["phase"] == "done" and state["verified"] is True

    def test_session_log_written(self, tmp_path):
        store = SessionStore(log_dir=tmp_path)
        app = create_app(store=store)
        client = TestClient(app)
        r = client.post("/sessions", json={"d": 2, "total_rent": 100, "epsilon": "1/4",
                                           "mode": "simulated", "seed": 1})
        sid = r.json()["id"]
        log_file = tmp_path / f"session-{sid}.jsonl"
        lines = log_file.read_text().splitlines()
        assert any('"event": "created"' in line for line in lines)
        assert any('"event": "done"' in line for line in lines)
