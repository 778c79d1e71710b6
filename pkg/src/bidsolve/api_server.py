"""HTTP play service: live sessions of a human against the solved engine.

Versioned JSON API under ``/v1``.  Sessions live in memory (optionally
snapshotted to disk as JSON, one file per session id); value tables are
shared read-only between sessions and built on demand per (game, chip
total).  Per-session mutations are serialized with a lock; the engine's
bids come from one seeded generator per session, so identical seeds and
human inputs replay identically.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import dag_solver
from .dag_solver import ValueTable, best_move, choose_designation, sample_from, turn_strategies
from .errors import BidsolveError, GraphTooLarge
from .game_graph import (
    PLAYER_A,
    PLAYER_B,
    ChipState,
    GameGraph,
    PlayerId,
    VertexId,
    graph_hash,
    opponent,
    successors,
)

PHASE_BID = "awaiting_bid"
PHASE_MOVE = "awaiting_human_move"
PHASE_DONE = "finished"


class CreateGameRequest(BaseModel):
    game: str | None = None
    chips_total: int | None = None
    human_player: str = PLAYER_A
    seed: int | None = None


class BidRequest(BaseModel):
    bid: int


class MoveRequest(BaseModel):
    designate: str
    move: str | None = None


@dataclass
class GameSession:
    id: str
    game: str
    graph: GameGraph
    table: ValueTable
    vertex: VertexId
    chips: ChipState
    human: PlayerId
    seed: int
    rng: np.random.Generator
    phase: str = PHASE_BID
    winner: PlayerId | None = None
    must_move: PlayerId | None = None
    turn: int = 0
    draws: int = 0
    history: list[dict] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def engine(self) -> PlayerId:
        return opponent(self.human)

    def chips_of(self, p: PlayerId) -> int:
        return self.chips.a if p == PLAYER_A else self.chips.b


class PlayService:
    """Owns the tables and sessions behind the HTTP surface."""

    def __init__(
        self,
        default_game: str = "ttt",
        default_chips: int = 200,
        x: float | None = None,
        pretable: str | None = None,
        snapshot_dir: str | None = None,
    ) -> None:
        self.default_game = default_game
        self.default_chips = default_chips
        self.x = x
        self.snapshot_dir = snapshot_dir
        self.sessions: dict[str, GameSession] = {}
        self.tables: dict[tuple[str, int], tuple[GameGraph, ValueTable]] = {}
        self.graphs: dict[str, GameGraph] = {}
        self._build_lock = threading.Lock()
        if pretable:
            table, graph = dag_solver.load_table_bundle(pretable)
            if graph is None:
                raise BidsolveError("pretable file has no embedded graph")
            self.tables[(graph_hash(graph), table.total)] = (graph, table)

    # -- tables ---------------------------------------------------------------

    def _graph_for(self, selector: str) -> GameGraph:
        if selector not in self.graphs:
            from .cli import select_game

            self.graphs[selector] = select_game(selector)
        return self.graphs[selector]

    def table_for(self, selector: str, chips_total: int) -> tuple[GameGraph, ValueTable]:
        graph = self._graph_for(selector)
        key = (graph_hash(graph), chips_total)
        if key in self.tables:
            return self.tables[key]
        with self._build_lock:
            if key not in self.tables:
                from .cli import solve_with_cache

                x = self.x if self.x is not None else dag_solver.default_precision(graph, chips_total)
                table = solve_with_cache(graph, chips_total, x, strategies=False)
                self.tables[key] = (graph, table)
        return self.tables[key]

    # -- sessions ---------------------------------------------------------------

    def create_session(self, req: CreateGameRequest) -> GameSession:
        selector = req.game or self.default_game
        chips_total = req.chips_total if req.chips_total is not None else self.default_chips
        if chips_total < 0:
            raise HTTPException(422, "chips_total must be nonnegative")
        if req.human_player not in (PLAYER_A, PLAYER_B):
            raise HTTPException(422, "human_player must be A or B")
        try:
            graph, table = self.table_for(selector, chips_total)
        except GraphTooLarge as exc:
            raise HTTPException(507, str(exc)) from exc
        except (BidsolveError, FileNotFoundError) as exc:
            raise HTTPException(400, str(exc)) from exc
        seed = req.seed if req.seed is not None else int.from_bytes(os.urandom(4), "big")
        a = chips_total - chips_total // 2  # odd totals give the spare chip to A
        session = GameSession(
            id=uuid.uuid4().hex,
            game=selector,
            graph=graph,
            table=table,
            vertex=graph.root,
            chips=ChipState(a, chips_total // 2),
            human=req.human_player,
            seed=seed,
            rng=np.random.default_rng(seed),
        )
        self.sessions[session.id] = session
        self._snapshot(session)
        return session

    def get_session(self, session_id: str) -> GameSession:
        if session_id not in self.sessions:
            restored = self._restore(session_id)
            if restored is None:
                raise HTTPException(404, f"no session {session_id!r}")
            self.sessions[session_id] = restored
        return self.sessions[session_id]

    # -- play ----------------------------------------------------------------------

    def place_bids(self, session: GameSession, human_bid: int) -> dict:
        s = session
        if s.phase != PHASE_BID:
            raise HTTPException(409, f"phase is {s.phase}")
        if not isinstance(human_bid, int) or not 0 <= human_bid <= s.chips_of(s.human):
            raise HTTPException(422, f"bid must be in 0..{s.chips_of(s.human)}")
        strategies = turn_strategies(s.graph, s.table, s.vertex, s.chips)
        engine_probs = strategies[0 if s.engine == PLAYER_A else 1].probs
        engine_bid = sample_from(engine_probs, s.rng)
        s.draws += 1
        bid_a, bid_b = (
            (human_bid, engine_bid) if s.human == PLAYER_A else (engine_bid, human_bid)
        )
        if bid_a > bid_b:
            winner, reason = PLAYER_A, "higher-bid"
        elif bid_b > bid_a:
            winner, reason = PLAYER_B, "higher-bid"
        else:
            winner, reason = s.chips.advantage, "advantage"
        s.chips = ChipState(s.chips.a - bid_a + bid_b, s.chips.b - bid_b + bid_a)
        s.turn += 1
        entry = {
            "turn": s.turn,
            "vertex": s.vertex,
            "bid_a": bid_a,
            "bid_b": bid_b,
            "winner": winner,
            "reason": reason,
            "chips_after": {"a": s.chips.a, "b": s.chips.b},
            "mover": None,
            "moved_to": None,
        }
        s.history.append(entry)
        reveal = {
            "bid_a": bid_a,
            "bid_b": bid_b,
            "winner": winner,
            "reason": reason,
        }
        if winner == s.engine:
            mover = choose_designation(s.graph, s.table, s.vertex, s.chips, winner)
            if mover == s.engine:
                self._apply_move(s, mover, best_move(s.graph, s.table, s.vertex, s.chips, mover))
                outcome = "engine_moved" if s.phase != PHASE_DONE else "finished"
            else:
                s.phase = PHASE_MOVE
                s.must_move = s.human
                entry["mover"] = s.human
                outcome = "human_must_move"
        else:
            s.phase = PHASE_MOVE
            s.must_move = None
            outcome = "human_won_bid"
        self._snapshot(s)
        return {"reveal": reveal, "outcome": outcome, "state": self.state(s)}

    def apply_human_designation(self, session: GameSession, designate: str, move: str | None) -> dict:
        s = session
        if s.phase != PHASE_MOVE:
            raise HTTPException(409, f"phase is {s.phase}")
        if designate not in (PLAYER_A, PLAYER_B):
            raise HTTPException(422, "designate must be A or B")
        if s.must_move is not None and designate != s.must_move:
            raise HTTPException(422, f"the bid winner designated {s.must_move} to move")
        mover = designate
        if not successors(s.graph, s.vertex, mover):
            raise HTTPException(422, f"{mover} has no legal move here")
        if mover == s.human:
            if move is None:
                raise HTTPException(422, "move required when moving yourself")
            if move not in successors(s.graph, s.vertex, mover):
                raise HTTPException(422, f"illegal move {move!r}")
            target = move
        else:
            target = best_move(s.graph, s.table, s.vertex, s.chips, mover)
        self._apply_move(s, mover, target)
        self._snapshot(s)
        return {"state": self.state(s)}

    def _apply_move(self, s: GameSession, mover: PlayerId, target: VertexId) -> None:
        entry = s.history[-1]
        entry["mover"] = mover
        entry["moved_to"] = target
        s.vertex = target
        s.must_move = None
        if s.graph.is_terminal(target):
            s.phase = PHASE_DONE
            s.winner = PLAYER_A if target == s.graph.win_a else PLAYER_B
        else:
            s.phase = PHASE_BID

    def hint(self, session: GameSession) -> dict:
        s = session
        if s.phase == PHASE_DONE:
            raise HTTPException(409, "game is finished")
        strategies = turn_strategies(s.graph, s.table, s.vertex, s.chips)
        human_strategy = strategies[0 if s.human == PLAYER_A else 1]
        value_a = s.table.value(s.vertex, s.chips.a)
        value = value_a if s.human == PLAYER_A else 1.0 - value_a
        error_bound = s.graph.max_depth * s.table.x * s.table.total
        return {
            "player": s.human,
            "strategy": [float(p) for p in human_strategy.probs],
            "value": round(float(min(max(value, 0.0), 1.0)), 6),
            "error_bound": error_bound,
        }

    # -- rendering --------------------------------------------------------------

    def state(self, s: GameSession) -> dict:
        payload = {
            "session_id": s.id,
            "game": s.game,
            "vertex": s.vertex,
            "board": s.vertex,
            "chips": {"a": s.chips.a, "b": s.chips.b},
            "human": s.human,
            "engine": s.engine,
            "advantage": s.chips.advantage,
            "phase": s.phase,
            "turn": s.turn,
            "winner": s.winner,
            "history": s.history,
        }
        if s.phase == PHASE_MOVE:
            legal_designations = [
                p
                for p in (PLAYER_A, PLAYER_B)
                if successors(s.graph, s.vertex, p)
                and (s.must_move is None or p == s.must_move)
            ]
            payload["must_move"] = s.must_move
            payload["legal_designations"] = legal_designations
            payload["legal_moves"] = list(successors(s.graph, s.vertex, s.human))
        return payload

    # -- snapshots ----------------------------------------------------------------

    def _snapshot_path(self, session_id: str) -> str | None:
        if not self.snapshot_dir:
            return None
        os.makedirs(self.snapshot_dir, exist_ok=True)
        return os.path.join(self.snapshot_dir, f"{session_id}.json")

    def _snapshot(self, s: GameSession) -> None:
        path = self._snapshot_path(s.id)
        if not path:
            return
        payload = {
            "id": s.id,
            "game": s.game,
            "chips_total": s.chips.total,
            "vertex": s.vertex,
            "chips_a": s.chips.a,
            "human": s.human,
            "seed": s.seed,
            "phase": s.phase,
            "winner": s.winner,
            "must_move": s.must_move,
            "turn": s.turn,
            "draws": s.draws,
            "history": s.history,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)

    def _restore(self, session_id: str) -> GameSession | None:
        path = self._snapshot_path(session_id)
        if not path or not os.path.exists(path):
            return None
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        graph, table = self.table_for(data["game"], data["chips_total"])
        rng = np.random.default_rng(data["seed"])
        for _ in range(data["draws"]):
            rng.random()
        session = GameSession(
            id=data["id"],
            game=data["game"],
            graph=graph,
            table=table,
            vertex=data["vertex"],
            chips=ChipState(data["chips_a"], data["chips_total"] - data["chips_a"]),
            human=data["human"],
            seed=data["seed"],
            rng=rng,
            phase=data["phase"],
            winner=data["winner"],
            must_move=data["must_move"],
            turn=data["turn"],
            draws=data["draws"],
            history=data["history"],
        )
        return session


def create_app(
    game: str = "ttt",
    chips_total: int = 200,
    x: float | None = None,
    pretable: str | None = None,
    snapshot_dir: str | None = None,
) -> FastAPI:
    service = PlayService(
        default_game=game,
        default_chips=chips_total,
        x=x,
        pretable=pretable,
        snapshot_dir=snapshot_dir,
    )
    app = FastAPI(title="bidsolve play service", version="1")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.service = service

    @app.post("/v1/games")
    def create_game(req: CreateGameRequest):
        session = service.create_session(req)
        return {"session_id": session.id, "state": service.state(session)}

    @app.get("/v1/games/{session_id}")
    def get_state(session_id: str):
        session = service.get_session(session_id)
        with session.lock:
            return service.state(session)

    @app.post("/v1/games/{session_id}/bids")
    def post_bid(session_id: str, req: BidRequest):
        session = service.get_session(session_id)
        with session.lock:
            return service.place_bids(session, req.bid)

    @app.post("/v1/games/{session_id}/moves")
    def post_move(session_id: str, req: MoveRequest):
        session = service.get_session(session_id)
        with session.lock:
            return service.apply_human_designation(session, req.designate, req.move)

    @app.get("/v1/games/{session_id}/hint")
    def get_hint(session_id: str):
        session = service.get_session(session_id)
        with session.lock:
            return service.hint(session)

    return app
