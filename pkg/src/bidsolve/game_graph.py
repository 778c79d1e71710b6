"""Acyclic colored game graphs with win vertices for each player.

A game is a DAG in which every edge belongs to one of the two players:
player A moves along red edges (``edges_a``), player B along blue edges
(``edges_b``).  Two marked sink vertices are the winning terminals.  The
token starts at ``root`` and whoever drives it into their own terminal
wins; draws do not exist (generators map drawn positions onto one of the
terminals).

Built-in families:

* :func:`race_graph` -- player A needs ``k`` moves to win, player B needs
  ``m``; each move consumes one of the mover's remaining steps.
* :func:`tictactoe_graph` -- all boards reachable when move counts need
  not alternate (under bidding, one player may move many times in a row).
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field, replace
from functools import cached_property

from .errors import (
    CyclicGraph,
    DanglingTerminalEdge,
    DeadEndVertex,
    InvalidParameter,
    TerminalVertex,
    UnreachableTerminal,
)

VertexId = str
PlayerId = str

PLAYER_A: PlayerId = "A"
PLAYER_B: PlayerId = "B"
WIN_A: VertexId = "WIN_A"
WIN_B: VertexId = "WIN_B"


def opponent(p: PlayerId) -> PlayerId:
    return PLAYER_B if p == PLAYER_A else PLAYER_A


@dataclass(frozen=True)
class ChipState:
    """A chip split; the game total ``a + b`` is invariant over play."""

    a: int
    b: int

    def __post_init__(self) -> None:
        if self.a < 0 or self.b < 0:
            raise InvalidParameter(f"negative chip count: {self}")

    @property
    def total(self) -> int:
        return self.a + self.b

    @property
    def advantage(self) -> PlayerId:
        """Tie-break holder: the player with more chips, A on equality."""
        return PLAYER_A if self.a >= self.b else PLAYER_B


@dataclass(frozen=True)
class GameGraph:
    """Immutable colored DAG.  Build through a generator or ``from_json``,
    then pass through :func:`validate_graph`; afterwards the graph is safe
    to share read-only across threads."""

    vertices: tuple[VertexId, ...]
    edges_a: dict[VertexId, tuple[VertexId, ...]]
    edges_b: dict[VertexId, tuple[VertexId, ...]]
    win_a: VertexId = WIN_A
    win_b: VertexId = WIN_B
    root: VertexId = ""
    topo_order: tuple[VertexId, ...] = ()

    def is_terminal(self, v: VertexId) -> bool:
        return v == self.win_a or v == self.win_b

    @cached_property
    def index(self) -> dict[VertexId, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def max_depth(self) -> int:
        """Length (in moves) of the longest path in the graph; bounds the
        number of turns a play can last."""
        depth: dict[VertexId, int] = {}
        for v in reversed(self.topo_order or topological_order(self)):
            succ = self.edges_a.get(v, ()) + self.edges_b.get(v, ())
            depth[v] = 1 + max((depth[w] for w in succ), default=-1)
        return max(depth.values())

    def to_json(self) -> dict:
        edges = []
        for v in self.vertices:
            for w in self.edges_a.get(v, ()):
                edges.append({"from": v, "to": w, "player": PLAYER_A})
            for w in self.edges_b.get(v, ()):
                edges.append({"from": v, "to": w, "player": PLAYER_B})
        return {
            "vertices": list(self.vertices),
            "edges": edges,
            "win_a": self.win_a,
            "win_b": self.win_b,
        }


def graph_hash(g: GameGraph) -> str:
    """Stable content hash used to pair value tables with their graph."""
    payload = json.dumps(g.to_json(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def topological_order(g: GameGraph) -> tuple[VertexId, ...]:
    """Kahn's algorithm over the union of both edge colors."""
    indeg = {v: 0 for v in g.vertices}
    for v in g.vertices:
        for w in g.edges_a.get(v, ()) + g.edges_b.get(v, ()):
            if w not in indeg:
                raise InvalidParameter(f"edge target {w!r} is not a vertex")
            indeg[w] += 1
    ready = deque(v for v in g.vertices if indeg[v] == 0)
    order: list[VertexId] = []
    while ready:
        v = ready.popleft()
        order.append(v)
        for w in g.edges_a.get(v, ()) + g.edges_b.get(v, ()):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    if len(order) != len(g.vertices):
        raise CyclicGraph("graph contains a directed cycle")
    return tuple(order)


def validate_graph(g: GameGraph) -> GameGraph:
    """Check every structural invariant and attach a topological order.

    Raises CyclicGraph, DanglingTerminalEdge, DeadEndVertex or
    UnreachableTerminal on the first violation found.
    """
    seen = set(g.vertices)
    if len(seen) != len(g.vertices):
        raise InvalidParameter("duplicate vertex ids")
    for t in (g.win_a, g.win_b):
        if t not in seen:
            raise InvalidParameter(f"terminal {t!r} is not a vertex")
        if g.edges_a.get(t) or g.edges_b.get(t):
            raise DanglingTerminalEdge(f"terminal {t!r} has outgoing edges")
    if g.win_a == g.win_b:
        raise InvalidParameter("win_a and win_b must be distinct")
    if g.root and g.root not in seen:
        raise InvalidParameter(f"root {g.root!r} is not a vertex")

    for v in g.vertices:
        if g.is_terminal(v):
            continue
        if not g.edges_a.get(v) and not g.edges_b.get(v):
            raise DeadEndVertex(f"non-terminal {v!r} has no outgoing edges")

    order = topological_order(g)  # raises CyclicGraph

    # Reverse reachability from the terminals over the union graph.
    rev: dict[VertexId, list[VertexId]] = {v: [] for v in g.vertices}
    for v in g.vertices:
        for w in g.edges_a.get(v, ()) + g.edges_b.get(v, ()):
            rev[w].append(v)
    alive = {g.win_a, g.win_b}
    frontier = deque(alive)
    while frontier:
        w = frontier.popleft()
        for v in rev[w]:
            if v not in alive:
                alive.add(v)
                frontier.append(v)
    dead = [v for v in g.vertices if v not in alive]
    if dead:
        raise UnreachableTerminal(f"no terminal reachable from {dead[:5]!r}")

    return replace(g, topo_order=order)


def successors(g: GameGraph, v: VertexId, p: PlayerId) -> tuple[VertexId, ...]:
    """The positions player ``p`` may move to from ``v``, in edge order."""
    if g.is_terminal(v):
        raise TerminalVertex(f"{v!r} is terminal")
    return g.edges_a.get(v, ()) if p == PLAYER_A else g.edges_b.get(v, ())


# -- built-in game families ---------------------------------------------------

def race_graph(k: int, m: int) -> GameGraph:
    """A race: A wins after ``k`` own moves, B after ``m`` own moves.

    State ``(i, j)`` means A still needs ``i`` moves and B needs ``j``.
    """
    if k < 1 or m < 1:
        raise InvalidParameter("race_graph needs k >= 1 and m >= 1")

    def name(i: int, j: int) -> VertexId:
        return f"{i},{j}"

    vertices = [name(i, j) for i in range(k, 0, -1) for j in range(m, 0, -1)]
    vertices += [WIN_A, WIN_B]
    edges_a: dict[VertexId, tuple[VertexId, ...]] = {}
    edges_b: dict[VertexId, tuple[VertexId, ...]] = {}
    for i in range(1, k + 1):
        for j in range(1, m + 1):
            v = name(i, j)
            edges_a[v] = (WIN_A,) if i == 1 else (name(i - 1, j),)
            edges_b[v] = (WIN_B,) if j == 1 else (name(i, j - 1),)
    g = GameGraph(
        vertices=tuple(vertices),
        edges_a=edges_a,
        edges_b=edges_b,
        root=name(k, m),
    )
    return validate_graph(g)


_TTT_LINES = (
    (0, 1, 2), (3, 4, 5), (6, 7, 8),
    (0, 3, 6), (1, 4, 7), (2, 5, 8),
    (0, 4, 8), (2, 4, 6),
)
_EMPTY_BOARD = "." * 9


def _completes_line(board: str, mark: str) -> bool:
    return any(all(board[i] == mark for i in line) for line in _TTT_LINES)


def tictactoe_graph(draw_winner: PlayerId = PLAYER_B) -> GameGraph:
    """Every board reachable under bidding play (X and O counts are free).

    A places X, B places O; any board completing a line for X collapses to
    the A terminal, for O to the B terminal; full boards with no line go to
    ``draw_winner``'s terminal.  Boards are 9-character strings over ``.XO``
    in row-major order; there is no symmetry reduction.
    """
    if draw_winner not in (PLAYER_A, PLAYER_B):
        raise InvalidParameter(f"draw_winner must be A or B, got {draw_winner!r}")
    draw_terminal = WIN_A if draw_winner == PLAYER_A else WIN_B

    edges_a: dict[VertexId, tuple[VertexId, ...]] = {}
    edges_b: dict[VertexId, tuple[VertexId, ...]] = {}
    vertices: list[VertexId] = [_EMPTY_BOARD]
    seen = {_EMPTY_BOARD}
    queue = deque([_EMPTY_BOARD])
    while queue:
        board = queue.popleft()
        for player, mark, win in ((PLAYER_A, "X", WIN_A), (PLAYER_B, "O", WIN_B)):
            out: list[VertexId] = []
            for cell in range(9):
                if board[cell] != ".":
                    continue
                child = board[:cell] + mark + board[cell + 1:]
                if _completes_line(child, mark):
                    child = win
                elif "." not in child:
                    child = draw_terminal
                out.append(child)
                if child not in seen and child not in (WIN_A, WIN_B):
                    seen.add(child)
                    vertices.append(child)
                    queue.append(child)
            if player == PLAYER_A:
                edges_a[board] = tuple(out)
            else:
                edges_b[board] = tuple(out)
    vertices += [WIN_A, WIN_B]
    g = GameGraph(
        vertices=tuple(vertices),
        edges_a=edges_a,
        edges_b=edges_b,
        root=_EMPTY_BOARD,
    )
    return validate_graph(g)


# -- JSON ingestion -----------------------------------------------------------

def from_json(spec: dict) -> GameGraph:
    """Build and validate a graph from the game-spec JSON format.

    ``{"vertices": [...], "edges": [{"from": v, "to": w, "player": "A"|"B"}],
    "win_a": v, "win_b": w}``.  The first listed non-terminal vertex is
    taken as the root.
    """
    try:
        vertices = tuple(str(v) for v in spec["vertices"])
        win_a = str(spec["win_a"])
        win_b = str(spec["win_b"])
        raw_edges = spec["edges"]
    except (KeyError, TypeError) as exc:
        raise InvalidParameter(f"malformed game spec: {exc}") from exc
    edges_a: dict[VertexId, list[VertexId]] = {}
    edges_b: dict[VertexId, list[VertexId]] = {}
    for e in raw_edges:
        try:
            src, dst, player = str(e["from"]), str(e["to"]), e["player"]
        except (KeyError, TypeError) as exc:
            raise InvalidParameter(f"malformed edge {e!r}") from exc
        if player == PLAYER_A:
            edges_a.setdefault(src, []).append(dst)
        elif player == PLAYER_B:
            edges_b.setdefault(src, []).append(dst)
        else:
            raise InvalidParameter(f"edge player must be A or B, got {player!r}")
    root = next((v for v in vertices if v not in (win_a, win_b)), win_a)
    g = GameGraph(
        vertices=vertices,
        edges_a={v: tuple(ws) for v, ws in edges_a.items()},
        edges_b={v: tuple(ws) for v, ws in edges_b.items()},
        win_a=win_a,
        win_b=win_b,
        root=root,
    )
    return validate_graph(g)


def load_graph_file(path: str) -> GameGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return from_json(json.load(fh))
