"""Retrograde solve of a whole game: values and strategies for every
(vertex, chip split) pair.

Vertices are processed in reverse topological order, so when a vertex is
reached every successor value at every split of the chip total is already
known.  Per vertex the two designation profiles are assembled once; each
split then yields the adjusted advantage-player matrix and a single-turn
equilibrium solve, warm-started with the neighboring split's strategy
length.  Terminals anchor at exactly 1 and 0; chip bonuses enter only
through the per-turn matrix adjustment.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .equilibrium import Strategy, solve_turn
from .errors import (
    FormatMismatch,
    GraphHashMismatch,
    GraphTooLarge,
    InvalidParameter,
    MissingValue,
    TerminalVertex,
)
from .game_graph import (
    PLAYER_A,
    PLAYER_B,
    ChipState,
    GameGraph,
    PlayerId,
    VertexId,
    from_json,
    graph_hash,
    opponent,
    successors,
)
from .payoff_matrix import ToeplitzPayoff, adjust_precision, matrix_from_profiles, opponent_matrix

TABLE_FORMAT_VERSION = 1
DEFAULT_ENTRY_CAP = 50_000_000


def default_precision(g: GameGraph, n_total: int) -> float:
    """Per-chip bonus keeping the total value distortion near 1e-6."""
    denom = max(1, g.max_depth * max(1, n_total))
    return max(1e-6 / denom, 1e-9)


@dataclass(frozen=True)
class BidOutcome:
    """One resolved bidding round; chips always re-sum to the game total."""

    bid_a: int
    bid_b: int
    winner: PlayerId
    mover: PlayerId
    next_vertex: VertexId
    next_chips: ChipState


@dataclass
class ValueTable:
    """Memoized adjusted values ``v_A^x(vertex, a)`` for one chip total."""

    graph_hash: str
    total: int
    x: float
    vertices: tuple[VertexId, ...]
    values: np.ndarray                  # (|V|, N+1) float
    lengths: np.ndarray                 # (|V|, N+1) int16, advantage strategy length
    strategies: dict[tuple[VertexId, int], tuple[np.ndarray, np.ndarray]] | None = None
    solves: int = 0                     # equilibrium solves performed (memo audit)

    @cached_property
    def index(self) -> dict[VertexId, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def value(self, v: VertexId, a: int) -> float:
        try:
            row = self.index[v]
        except KeyError:
            raise MissingValue(f"vertex {v!r} not in table") from None
        if not 0 <= a <= self.total:
            raise MissingValue(f"chip count {a} outside 0..{self.total}")
        return float(self.values[row, a])

    def length(self, v: VertexId, a: int) -> int:
        return int(self.lengths[self.index[v], a])

    def lookup(self, v: VertexId, a: int) -> float:
        return self.value(v, a)

    def strategy_pair(self, v: VertexId, a: int) -> tuple[Strategy, Strategy]:
        if self.strategies is None:
            raise MissingValue("table was solved without strategy storage")
        try:
            sa, sb = self.strategies[(v, a)]
        except KeyError:
            raise MissingValue(f"no stored strategies at ({v!r}, {a})") from None
        return Strategy(sa), Strategy(sb)


def _degenerate_turn(
    decide_a: np.ndarray, decide_b: np.ndarray, a: int, b: int, x: float
) -> tuple[float, int, np.ndarray, np.ndarray]:
    """One-sided bid space: the turn is a scan of a single row or column.

    Returns (value to A, advantage strategy length, A probs, B probs).
    """
    if a == 0 and b == 0:
        return float(decide_a[0]), 1, np.ones(1), np.ones(1)
    if a == 0:
        # B holds advantage and picks the bid minimizing A's adjusted payoff.
        payoffs = decide_b + x * np.arange(b + 1)
        bid = int(np.argmin(payoffs))
        sb = np.zeros(b + 1)
        sb[bid] = 1.0
        return float(payoffs[bid]), bid + 1, np.ones(1), sb
    # b == 0: A holds advantage, B is forced to bid 0.
    post = decide_a + x * np.arange(a + 1)   # indexed by post-bid chips a' = a - j
    payoffs = post[::-1]                     # indexed by A's bid j
    bid = int(np.argmax(payoffs))
    sa = np.zeros(a + 1)
    sa[bid] = 1.0
    return float(payoffs[bid]), bid + 1, sa, np.ones(1)


def solve_game(
    g: GameGraph,
    n_total: int,
    x: float | None = None,
    store_strategies: bool = False,
    entry_cap: int = DEFAULT_ENTRY_CAP,
) -> ValueTable:
    """Solve every (vertex, split) of ``g`` at chip total ``n_total``."""
    if not g.topo_order:
        raise InvalidParameter("graph must pass validate_graph first")
    if n_total < 0:
        raise InvalidParameter("chip total must be nonnegative")
    if x is None:
        x = default_precision(g, n_total)
    if x <= 0:
        raise InvalidParameter("precision x must be positive")
    n_entries = (n_total + 1) * len(g.vertices)
    if n_entries > entry_cap:
        raise GraphTooLarge(f"{n_entries} table entries exceed cap {entry_cap}")

    idx = {v: i for i, v in enumerate(g.vertices)}
    values = np.zeros((len(g.vertices), n_total + 1))
    lengths = np.zeros((len(g.vertices), n_total + 1), dtype=np.int16)
    values[idx[g.win_a], :] = 1.0
    lengths[idx[g.win_a], :] = 1
    lengths[idx[g.win_b], :] = 1
    strategies: dict[tuple[VertexId, int], tuple[np.ndarray, np.ndarray]] | None = (
        {} if store_strategies else None
    )
    solves = 0

    for v in reversed(g.topo_order):
        if g.is_terminal(v):
            continue
        succ_a = g.edges_a.get(v, ())
        succ_b = g.edges_b.get(v, ())
        best_a = np.maximum.reduce([values[idx[w]] for w in succ_a]) if succ_a else None
        best_b = np.minimum.reduce([values[idx[w]] for w in succ_b]) if succ_b else None
        options = [p for p in (best_a, best_b) if p is not None]
        decide_a = np.maximum.reduce(options)
        decide_b = np.minimum.reduce(options)

        row = idx[v]
        hint: int | None = None
        for a in range(n_total + 1):
            b = n_total - a
            chips = ChipState(a, b)
            if a == 0 or b == 0:
                value, ell, sa, sb = _degenerate_turn(decide_a, decide_b, a, b, x)
            else:
                m = matrix_from_profiles(decide_a, decide_b, a, chips.advantage)
                mx = adjust_precision(m, x, chips)
                mat = mx if chips.advantage == PLAYER_A else opponent_matrix(mx)
                res = solve_turn(mat, length_hint=hint)
                solves += 1
                hint = res.length
                ell = res.length
                if chips.advantage == PLAYER_A:
                    value = res.value
                    sa, sb = res.s_a.probs, res.s_b.probs
                else:
                    value = mx.total - res.value
                    sa, sb = res.s_b.probs, res.s_a.probs
            values[row, a] = value
            lengths[row, a] = ell
            if strategies is not None:
                strategies[(v, a)] = (sa, sb)

    return ValueTable(
        graph_hash=graph_hash(g),
        total=n_total,
        x=x,
        vertices=g.vertices,
        values=values,
        lengths=lengths,
        strategies=strategies,
        solves=solves,
    )


# -- play primitives ------------------------------------------------------------

def turn_strategies(
    g: GameGraph, table: ValueTable, v: VertexId, chips: ChipState
) -> tuple[Strategy, Strategy]:
    """Equilibrium bid distributions (A's, B's) at a solved state; reads
    the stored pair when present, otherwise re-derives it from the value
    table (a single turn solve)."""
    if table.strategies is not None and (v, chips.a) in table.strategies:
        return table.strategy_pair(v, chips.a)
    if chips.total != table.total:
        raise MissingValue(f"chip total {chips.total} != table total {table.total}")
    idx = table.index
    succ_a = g.edges_a.get(v, ())
    succ_b = g.edges_b.get(v, ())
    best_a = np.maximum.reduce([table.values[idx[w]] for w in succ_a]) if succ_a else None
    best_b = np.minimum.reduce([table.values[idx[w]] for w in succ_b]) if succ_b else None
    options = [p for p in (best_a, best_b) if p is not None]
    decide_a = np.maximum.reduce(options)
    decide_b = np.minimum.reduce(options)
    a, b = chips.a, chips.b
    if a == 0 or b == 0:
        _, _, sa, sb = _degenerate_turn(decide_a, decide_b, a, b, table.x)
        return Strategy(sa), Strategy(sb)
    m = matrix_from_profiles(decide_a, decide_b, a, chips.advantage)
    mx = adjust_precision(m, table.x, chips)
    if chips.advantage == PLAYER_A:
        res = solve_turn(mx, length_hint=int(table.lengths[idx[v], a]))
        return res.s_a, res.s_b
    res = solve_turn(opponent_matrix(mx), length_hint=int(table.lengths[idx[v], a]))
    return res.s_b, res.s_a


def best_move(
    g: GameGraph, table: ValueTable, v: VertexId, chips: ChipState, mover: PlayerId
) -> VertexId:
    """The mover's favorite successor at the current split; ties go to the
    earliest edge."""
    succ = successors(g, v, mover)  # raises TerminalVertex on terminals
    if not succ:
        raise InvalidParameter(f"{mover} has no moves at {v!r}")
    vals = [table.value(w, chips.a) for w in succ]
    pick = int(np.argmax(vals)) if mover == PLAYER_A else int(np.argmin(vals))
    return succ[pick]


def choose_designation(
    g: GameGraph, table: ValueTable, v: VertexId, chips: ChipState, winner: PlayerId
) -> PlayerId:
    """Who the bid winner sends to move: itself when its best own move beats
    the opponent's forced reply, mirroring the max/min nesting of the payoff
    entries.  Forced when only one side has moves."""
    own = successors(g, v, winner)
    other = successors(g, v, opponent(winner))
    if not own:
        return opponent(winner)
    if not other:
        return winner
    own_vals = [table.value(w, chips.a) for w in own]
    other_vals = [table.value(w, chips.a) for w in other]
    if winner == PLAYER_A:
        return PLAYER_A if max(own_vals) >= min(other_vals) else PLAYER_B
    return PLAYER_B if min(own_vals) <= max(other_vals) else PLAYER_A


def resolve_bids(
    g: GameGraph,
    table: ValueTable,
    v: VertexId,
    chips: ChipState,
    bid_a: int,
    bid_b: int,
) -> BidOutcome:
    """Resolve one bidding round with both moves decided from the table:
    exchange chips, pick the winner (advantage on ties), let the winner
    designate, and apply the mover's best move."""
    if not 0 <= bid_a <= chips.a or not 0 <= bid_b <= chips.b:
        raise InvalidParameter(f"bids ({bid_a}, {bid_b}) exceed chips {chips}")
    if bid_a > bid_b:
        winner = PLAYER_A
    elif bid_b > bid_a:
        winner = PLAYER_B
    else:
        winner = chips.advantage
    after = ChipState(chips.a - bid_a + bid_b, chips.b - bid_b + bid_a)
    mover = choose_designation(g, table, v, after, winner)
    nxt = best_move(g, table, v, after, mover)
    return BidOutcome(
        bid_a=bid_a, bid_b=bid_b, winner=winner, mover=mover,
        next_vertex=nxt, next_chips=after,
    )


def sample_from(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw; deterministic given the generator state."""
    cdf = np.cumsum(probs)
    r = rng.random() * cdf[-1]
    return int(min(np.searchsorted(cdf, r, side="right"), len(probs) - 1))


def sample_bid(s: Strategy, seed: int) -> int:
    """One seeded draw from a strategy: same seed, same bid."""
    probs = np.asarray(getattr(s, "probs", s), dtype=float)
    return sample_from(probs, np.random.default_rng(seed))


# -- persistence ------------------------------------------------------------------

def save_table(table: ValueTable, path: str, graph: GameGraph | None = None) -> None:
    """Write the table; embedding the graph makes the file self-contained
    for the CLI's table/simulate/serve commands."""
    header = {
        "format_version": TABLE_FORMAT_VERSION,
        "graph_hash": table.graph_hash,
        "total": table.total,
        "x": table.x,
        "has_strategies": table.strategies is not None,
        "has_graph": graph is not None,
    }
    arrays: dict[str, np.ndarray] = {
        "header": np.frombuffer(json.dumps(header).encode(), dtype=np.uint8),
        "vertices": np.array(table.vertices, dtype=np.str_),
        "values": table.values,
        "lengths": table.lengths,
    }
    if graph is not None:
        if graph_hash(graph) != table.graph_hash:
            raise GraphHashMismatch("embedded graph does not match the table")
        blob = json.dumps({**graph.to_json(), "root": graph.root})
        arrays["graph"] = np.frombuffer(blob.encode(), dtype=np.uint8)
    if table.strategies is not None:
        keys = sorted(table.strategies, key=lambda k: (table.index[k[0]], k[1]))
        arrays["strat_keys"] = np.array(
            [[table.index[v], a] for v, a in keys], dtype=np.int64
        ).reshape(len(keys), 2)
        arrays["strat_a_lens"] = np.array(
            [len(table.strategies[k][0]) for k in keys], dtype=np.int64
        )
        arrays["strat_b_lens"] = np.array(
            [len(table.strategies[k][1]) for k in keys], dtype=np.int64
        )
        arrays["strat_a_blob"] = (
            np.concatenate([table.strategies[k][0] for k in keys])
            if keys else np.zeros(0)
        )
        arrays["strat_b_blob"] = (
            np.concatenate([table.strategies[k][1] for k in keys])
            if keys else np.zeros(0)
        )
    with open(path, "wb") as fh:
        np.savez_compressed(fh, **arrays)


def load_table(path: str, graph: GameGraph | None = None) -> ValueTable:
    """Read a table back; verifies the format version and, when a graph is
    supplied, that the table was solved for exactly that graph."""
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        with np.load(io.BytesIO(raw), allow_pickle=False) as data:
            header = json.loads(bytes(data["header"]).decode())
            if header.get("format_version") != TABLE_FORMAT_VERSION:
                raise FormatMismatch(
                    f"format version {header.get('format_version')!r} unsupported"
                )
            vertices = tuple(str(v) for v in data["vertices"])
            table = ValueTable(
                graph_hash=str(header["graph_hash"]),
                total=int(header["total"]),
                x=float(header["x"]),
                vertices=vertices,
                values=np.array(data["values"]),
                lengths=np.array(data["lengths"]),
            )
            if header.get("has_strategies"):
                keys = data["strat_keys"]
                a_lens, b_lens = data["strat_a_lens"], data["strat_b_lens"]
                a_blob, b_blob = data["strat_a_blob"], data["strat_b_blob"]
                strategies = {}
                a_off = b_off = 0
                for (vi, a), la, lb in zip(keys, a_lens, b_lens):
                    strategies[(vertices[vi], int(a))] = (
                        a_blob[a_off : a_off + la].copy(),
                        b_blob[b_off : b_off + lb].copy(),
                    )
                    a_off += la
                    b_off += lb
                table.strategies = strategies
    except FormatMismatch:
        raise
    except Exception as exc:
        raise FormatMismatch(f"unreadable table file {path!r}: {exc}") from exc
    if graph is not None and graph_hash(graph) != table.graph_hash:
        raise GraphHashMismatch(
            f"table was solved for graph {table.graph_hash[:12]}..., "
            f"got {graph_hash(graph)[:12]}..."
        )
    return table


def load_table_bundle(path: str) -> tuple[ValueTable, GameGraph | None]:
    """Read a table together with its embedded graph, when present."""
    table = load_table(path)
    graph = None
    with open(path, "rb") as fh:
        raw = fh.read()
    with np.load(io.BytesIO(raw), allow_pickle=False) as data:
        if "graph" in data.files:
            spec = json.loads(bytes(data["graph"]).decode())
            graph = from_json(spec)
            root = spec.get("root")
            if root and root != graph.root:
                graph = replace(graph, root=root)
            if graph_hash(graph) != table.graph_hash:
                raise GraphHashMismatch("embedded graph hash does not match table")
    return table, graph
