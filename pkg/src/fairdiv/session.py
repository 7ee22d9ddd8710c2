"""Interactive rental-harmony sessions over HTTP/JSON.

Each session owns a suspended rent-protocol computation; tenants answer
minimal-mode queries ("which room suits you at these prices?") and the
protocol advances one cut at a time.  Prices shown to humans are rounded to
cents with a largest-remainder split so they always sum to the total rent;
the underlying point stays rational.

Human answers are trusted as ground truth.  In simulated mode a seeded
upper-threshold profile answers truthfully and the resulting certificate is
checked by the verifier; human-mode outcomes are flagged unverified.
"""
from __future__ import annotations

import json
import logging
import threading
import uuid
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .geometry import BarycentricPoint, as_ratio, ratio_str
from .preferences import KIND_LPS_UPPER, Oracle, generate_profile, profile_to_json
from .solvers import (
    FairDivisionCertificate,
    RentOutcome,
    RentQuery,
    budget_rent,
    rent_steps,
    resolution,
)
from .verifier import verify_certificate

log = logging.getLogger("fairdiv.session")


class SessionError(Exception):
    status = 400
    code = "invalid_request"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class UnknownSession(SessionError):
    status = 404
    code = "unknown_session"


class WrongTurn(SessionError):
    status = 409
    code = "wrong_turn"


class InvalidRoom(SessionError):
    status = 400
    code = "invalid_room"


def parse_money(value) -> Fraction:
    """Money amounts: positive, at most two decimal places."""
    try:
        amount = as_ratio(value) if not isinstance(value, float) else Fraction(str(value))
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise SessionError(f"bad money amount {value!r}") from exc
    if amount <= 0:
        raise SessionError("total_rent must be positive")
    if (amount * 100).denominator != 1:
        raise SessionError("total_rent must be a whole number of cents")
    return amount


def split_cents(total: Fraction, shares: tuple[Fraction, ...]) -> list[int]:
    """Largest-remainder split of total (in currency units) into cents.

    The returned cents always sum to exactly total * 100.
    """
    total_cents = int(total * 100)
    exact = [total_cents * s for s in shares]
    floors = [e.numerator // e.denominator for e in exact]
    rem = total_cents - sum(floors)
    order = sorted(range(len(shares)), key=lambda k: (floors[k] - exact[k], k))
    for idx in order[:rem]:
        floors[idx] += 1
    return floors


def format_cents(cents: int) -> str:
    return f"{cents // 100}.{cents % 100:02d}"


@dataclass
class Session:
    """One rental-harmony run; all mutation happens under the session lock."""

    id: str
    d: int
    total_rent: Fraction
    epsilon: Fraction
    mode: str
    seed: Optional[int] = None
    log_path: Optional[Path] = None

    def __post_init__(self):
        self.lock = threading.RLock()
        self.n = resolution(self.epsilon)
        self.max_answers = budget_rent(self.d, self.n) + 1
        self.answers_used = 0
        self.history: list[dict] = []
        self.outcome: Optional[RentOutcome] = None
        self.certificate: Optional[FairDivisionCertificate] = None
        self.verified: Optional[bool] = None
        self.failure: Optional[str] = None
        self._gen = rent_steps(self.d, self.epsilon)
        self.pending: Optional[RentQuery] = next(self._gen)
        self._log({"event": "created", "d": self.d, "total_rent": ratio_str(self.total_rent),
                   "epsilon": ratio_str(self.epsilon), "mode": self.mode, "seed": self.seed})

    def _log(self, payload: dict):
        if self.log_path is None:
            return
        with self.log_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps({"session": self.id, **payload}) + "\n")

    def _prices(self, point: BarycentricPoint) -> list[dict]:
        cents = split_cents(self.total_rent, point.coords)
        return [
            {
                "room": j + 1,
                "amount": format_cents(cents[j]),
                "share": ratio_str(point.coords[j]),
            }
            for j in range(self.d)
        ]

    def state(self) -> dict:
        with self.lock:
            return self._state_locked()

    def _state_locked(self) -> dict:
        if self.failure is not None:
            return {"phase": "failed", "id": self.id, "reason": self.failure}
        if self.pending is not None:
            q = self.pending
            return {
                "phase": "selection_answer" if q.selection else "awaiting_answer",
                "id": self.id,
                "d": self.d,
                "agent": q.agent,
                "selection": q.selection,
                "prices": self._prices(q.point),
                "point": q.point.to_json(),
                "allowed_rooms": list(range(1, self.d + 1)),
                "answers_used": self.answers_used,
                "max_answers": self.max_answers,
                "history": self.history,
            }
        assert self.outcome is not None and self.certificate is not None
        point = self.outcome.point
        cents = split_cents(self.total_rent, point.coords)
        sigma = self.outcome.sigma
        assignment = [
            {
                "tenant": i,
                "room": sigma[i - 1],
                "rent": format_cents(cents[sigma[i - 1] - 1]),
                "rent_exact": ratio_str(self.total_rent * point.coord(sigma[i - 1])),
            }
            for i in range(1, self.d + 1)
        ]
        payload = {
            "phase": "done",
            "id": self.id,
            "d": self.d,
            "certificate": self.certificate.to_json(),
            "assignment": assignment,
            "rents": {str(j + 1): format_cents(cents[j]) for j in range(self.d)},
            "total_rent": format_cents(int(self.total_rent * 100)),
            "answers_used": self.answers_used,
            "max_answers": self.max_answers,
            "history": self.history,
        }
        if self.verified is None:
            payload["note"] = "unverified - human oracle"
        else:
            payload["verified"] = self.verified
        return payload

    def submit(self, agent: int, room: int) -> dict:
        with self.lock:
            if self.failure is not None:
                raise WrongTurn("session already failed")
            if self.pending is None:
                raise WrongTurn("session is complete")
            if agent != self.pending.agent:
                raise WrongTurn(f"it is agent {self.pending.agent}'s turn, not agent {agent}'s")
            if not isinstance(room, int) or not 1 <= room <= self.d:
                raise InvalidRoom(f"room must be in 1..{self.d}")
            query = self.pending
            self.history.append({
                "agent": agent,
                "selection": query.selection,
                "prices": self._prices(query.point),
                "point": query.point.to_json(),
                "room": room,
            })
            self.answers_used += 1
            self._log({"event": "answer", "agent": agent, "room": room})
            try:
                self.pending = self._gen.send(room)
            except StopIteration as stop:
                self.pending = None
                self._finish(stop.value)
            except Exception as exc:  # pragma: no cover - defensive
                self.pending = None
                self.failure = str(exc)
                log.exception("session %s failed", self.id)
            assert self.answers_used <= self.max_answers
            return self.state()

    def _finish(self, outcome: RentOutcome):
        self.outcome = outcome
        self.certificate = FairDivisionCertificate(
            point=outcome.point,
            sigma=outcome.sigma,
            epsilon=self.epsilon,
            binary_queries=0,
            minimal_queries=outcome.locate_queries + outcome.selection_queries,
            selection_queries=outcome.selection_queries,
            bound=budget_rent(self.d, self.n),
        )
        self._log({"event": "done", "certificate": self.certificate.to_json()})


def create_session(d: int, total_rent, epsilon, mode: str = "human",
                   seed: Optional[int] = None, log_dir: Optional[Path] = None) -> Session:
    if not isinstance(d, int) or d < 2:
        raise SessionError("need at least 2 tenants")
    try:
        eps = as_ratio(epsilon)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise SessionError(f"bad epsilon {epsilon!r}") from exc
    if eps <= 0:
        raise SessionError("epsilon must be positive")
    rent = parse_money(total_rent)
    if mode not in ("human", "simulated"):
        raise SessionError(f"unknown mode {mode!r}")
    sid = uuid.uuid4().hex[:12]
    log_path = (log_dir / f"session-{sid}.jsonl") if log_dir else None
    session = Session(sid, d, rent, eps, mode, seed=seed, log_path=log_path)
    if mode == "simulated":
        _autoplay(session, seed if seed is not None else 0)
    return session


def _autoplay(session: Session, seed: int):
    """Drive the session to completion with a truthful simulated oracle."""
    profile = generate_profile(KIND_LPS_UPPER, session.d, seed)
    oracle = Oracle(profile)
    while session.pending is not None:
        q = session.pending
        room = oracle.minimal_query(q.agent, q.point)
        session.submit(q.agent, room)
    verdict = verify_certificate(profile, session.certificate)
    session.verified = verdict.fair
    session.certificate.verified = verdict.fair
    session._log({"event": "verified", "fair": verdict.fair,
                  "profile": profile_to_json(profile)})


class SessionStore:
    def __init__(self, log_dir: Optional[Path] = None):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self.log_dir = log_dir
        if log_dir is not None:
            Path(log_dir).mkdir(parents=True, exist_ok=True)

    def add(self, session: Session):
        with self._lock:
            self._sessions[session.id] = session

    def get(self, sid: str) -> Session:
        with self._lock:
            session = self._sessions.get(sid)
        if session is None:
            raise UnknownSession(f"no session {sid!r}")
        return session


def create_app(store: Optional[SessionStore] = None, default_total_rent=None) -> FastAPI:
    """FastAPI application exposing the session protocol."""
    app = FastAPI(title="fairdiv rental harmony", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions = store if store is not None else SessionStore()
    app.state.store = sessions

    @app.exception_handler(SessionError)
    async def _session_error(_req: Request, exc: SessionError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.post("/sessions")
    async def post_sessions(request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            raise SessionError("expected a JSON object")
        total = body.get("total_rent", default_total_rent)
        if total is None:
            raise SessionError("total_rent is required")
        d = body.get("d")
        if not isinstance(d, int):
            raise SessionError("d must be an integer")
        session = create_session(
            d=d,
            total_rent=total,
            epsilon=body.get("epsilon"),
            mode=body.get("mode", "human"),
            seed=body.get("seed"),
            log_dir=sessions.log_dir,
        )
        sessions.add(session)
        return {"id": session.id, "state": session.state()}

    @app.get("/sessions/{sid}")
    async def get_session(sid: str):
        return sessions.get(sid).state()

    @app.post("/sessions/{sid}/answer")
    async def post_answer(sid: str, request: Request):
        session = sessions.get(sid)
        body = await request.json()
        if not isinstance(body, dict):
            raise SessionError("expected a JSON object")
        agent, room = body.get("agent"), body.get("room")
        if not isinstance(agent, int) or not isinstance(room, int):
            raise SessionError("agent and room must be integers")
        return session.submit(agent, room)

    return app
