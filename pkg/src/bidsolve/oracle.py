"""Independent ground-truth solvers used by the test suite.

Nothing here shares a code path with the production solver: equilibria
come from support enumeration with exact rational arithmetic, lengths
from a linear scan with the dense solver only, matrices from a per-entry
double loop, and win probabilities from Monte Carlo self-play.

Support enumeration screens the (row support, column support) pairs with
a cheap floating-point solve and only hands survivors and borderline
cases to exact arithmetic; everything it *reports* (value, equilibria,
best-response optimality) has been confirmed in exact rationals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dag_solver import ValueTable, best_move, choose_designation, sample_from
from .equilibrium import nonneg_solution_test
from .errors import TooLarge
from .game_graph import PLAYER_A, PLAYER_B, ChipState, GameGraph, PlayerId, VertexId, successors
from .payoff_matrix import ToeplitzPayoff, ValueLookup

MAX_ORACLE_DIM = 9
_PREFILTER_MARGIN = 1e-6


@dataclass(frozen=True)
class RationalMatrix:
    """Dense matrix of exact rationals; the oracle's mirror of a payoff
    matrix.  Floats convert exactly (they are binary rationals)."""

    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @classmethod
    def from_floats(cls, array) -> "RationalMatrix":
        return cls(tuple(tuple(Fraction(float(x)) for x in row) for row in array))

    @classmethod
    def from_toeplitz(cls, m: ToeplitzPayoff) -> "RationalMatrix":
        return cls.from_floats(m.dense())


@dataclass(frozen=True)
class ExactEquilibria:
    """All vertex equilibria of a zero-sum matrix game.

    ``equilibria`` holds (column strategy, row strategy) pairs, the column
    player being the matrix owner (payoff maximizer).  The game value is
    unique even when several equilibria exist.
    """

    value: Fraction
    equilibria: tuple[tuple[tuple[Fraction, ...], tuple[Fraction, ...]], ...]

    @property
    def column_strategies(self) -> tuple[tuple[Fraction, ...], ...]:
        seen: list[tuple[Fraction, ...]] = []
        for col, _ in self.equilibria:
            if col not in seen:
                seen.append(col)
        return tuple(seen)

    @property
    def row_strategies(self) -> tuple[tuple[Fraction, ...], ...]:
        seen: list[tuple[Fraction, ...]] = []
        for _, row in self.equilibria:
            if row not in seen:
                seen.append(row)
        return tuple(seen)


def _solve_exact(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Gaussian elimination over rationals; None when singular."""
    n = len(a)
    m = [row[:] + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        inv = Fraction(1, 1) / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def _equalization_system(
    m: RationalMatrix, rows: tuple[int, ...], cols: tuple[int, ...]
) -> tuple[list[Fraction], Fraction] | None:
    """Probabilities over ``cols`` equalizing the payoff across ``rows``,
    together with that payoff; None when the system is singular."""
    k = len(rows)
    a = [[m.entries[i][j] for j in cols] + [Fraction(-1)] for i in rows]
    a.append([Fraction(1)] * k + [Fraction(0)])
    b = [Fraction(0)] * k + [Fraction(1)]
    sol = _solve_exact(a, b)
    if sol is None:
        return None
    return sol[:k], sol[k]


def _float_candidate(
    f: np.ndarray, rows: tuple[int, ...], cols: tuple[int, ...]
) -> bool:
    """Cheap screen: can this support pair plausibly carry an equilibrium?"""
    k = len(rows)
    sub = f[np.ix_(rows, cols)]
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sys_x = np.zeros((k + 1, k + 1))
    sys_x[:k, :k] = sub
    sys_x[:k, k] = -1.0
    sys_x[k, :k] = 1.0
    # cheapest rejections first: most pairs die on the column player's side
    try:
        xv = np.linalg.solve(sys_x, rhs)
    except np.linalg.LinAlgError:
        return True  # let exact arithmetic decide
    x, v = xv[:k], xv[k]
    if x.min() < -_PREFILTER_MARGIN:
        return False
    full_x = np.zeros(f.shape[1])
    full_x[list(cols)] = x
    if (f @ full_x).min() < v - _PREFILTER_MARGIN:
        return False
    sys_y = np.zeros((k + 1, k + 1))
    sys_y[:k, :k] = sub.T
    sys_y[:k, k] = -1.0
    sys_y[k, :k] = 1.0
    try:
        yv = np.linalg.solve(sys_y, rhs)
    except np.linalg.LinAlgError:
        return True
    y = yv[:k]
    if y.min() < -_PREFILTER_MARGIN:
        return False
    full_y = np.zeros(f.shape[0])
    full_y[list(rows)] = y
    if (full_y @ f).max() > v + _PREFILTER_MARGIN:
        return False
    return True


def support_enumeration(m: RationalMatrix, prefilter: bool = True) -> ExactEquilibria:
    """Enumerate equal-size support pairs and return every equilibrium that
    sits at a support vertex, with the exact game value."""
    if m.rows > MAX_ORACLE_DIM or m.cols > MAX_ORACLE_DIM:
        raise TooLarge(f"{m.rows}x{m.cols} exceeds the {MAX_ORACLE_DIM} oracle guard")
    f = np.array([[float(x) for x in row] for row in m.entries])
    found: list[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]] = []
    values: list[Fraction] = []
    for k in range(1, min(m.rows, m.cols) + 1):
        for rows in itertools.combinations(range(m.rows), k):
            for cols in itertools.combinations(range(m.cols), k):
                if prefilter and not _float_candidate(f, rows, cols):
                    continue
                eq = _check_support_exact(m, rows, cols)
                if eq is not None:
                    x_full, y_full, v = eq
                    if (x_full, y_full) not in found:
                        found.append((x_full, y_full))
                        values.append(v)
    if not found:
        raise ValueError("no equilibrium found; support enumeration is exhaustive "
                         "for finite games, so this indicates a malformed matrix")
    assert all(v == values[0] for v in values), "zero-sum value must be unique"
    return ExactEquilibria(value=values[0], equilibria=tuple(found))


def _check_support_exact(
    m: RationalMatrix, rows: tuple[int, ...], cols: tuple[int, ...]
) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...], Fraction] | None:
    col_side = _equalization_system(m, rows, cols)
    if col_side is None:
        return None
    x, v = col_side
    if any(p < 0 for p in x):
        return None
    transposed = RationalMatrix(tuple(zip(*m.entries)))
    row_side = _equalization_system(transposed, cols, rows)
    if row_side is None:
        return None
    y, w = row_side
    if any(p < 0 for p in y) or w != v:
        return None
    x_full = [Fraction(0)] * m.cols
    for j, p in zip(cols, x):
        x_full[j] = p
    y_full = [Fraction(0)] * m.rows
    for i, p in zip(rows, y):
        y_full[i] = p
    # exact best-response optimality for both players
    for i in range(m.rows):
        if sum(m.entries[i][j] * x_full[j] for j in range(m.cols)) < v:
            return None
    for j in range(m.cols):
        if sum(y_full[i] * m.entries[i][j] for i in range(m.rows)) > v:
            return None
    return tuple(x_full), tuple(y_full), v


# -- independent length finder ---------------------------------------------------

def scan_length(m: ToeplitzPayoff) -> int:
    """Largest restriction passing the nonnegative-solution test, found by
    plain linear scan with the dense solver only."""
    best = 1
    for k in range(1, min(m.rows, m.cols) + 1):
        if nonneg_solution_test(m, k, dense_only=True):
            best = k
    return best


# -- independent matrix construction ----------------------------------------------

def naive_matrix(
    g: GameGraph,
    v: VertexId,
    chips: ChipState,
    values: ValueLookup,
    advantage: PlayerId | None = None,
) -> np.ndarray:
    """Per-entry double loop with no Toeplitz shortcut; validates
    ``payoff_matrix.build_matrix``."""
    if advantage is None:
        advantage = chips.advantage

    def value_at(w: VertexId, a2: int) -> float:
        if w == g.win_a:
            return 1.0
        if w == g.win_b:
            return 0.0
        return float(values(w, a2))

    succ_a = successors(g, v, PLAYER_A)
    succ_b = successors(g, v, PLAYER_B)
    out = np.zeros((chips.b + 1, chips.a + 1))
    for i in range(chips.b + 1):
        for j in range(chips.a + 1):
            a2 = chips.a - j + i
            move_a = max((value_at(w, a2) for w in succ_a), default=None)
            move_b = min((value_at(w, a2) for w in succ_b), default=None)
            options = [p for p in (move_a, move_b) if p is not None]
            if j > i or (j == i and advantage == PLAYER_A):
                out[i, j] = max(options)
            else:
                out[i, j] = min(options)
    return out


# -- Monte Carlo self-play ----------------------------------------------------------

@dataclass(frozen=True)
class SimulationResult:
    wins: int
    trials: int
    win_rate: float
    std_error: float
    log: tuple | None = None


def simulate(
    g: GameGraph,
    table: ValueTable,
    vertex: VertexId,
    a: int,
    trials: int,
    seed: int,
    collect_log: bool = False,
) -> SimulationResult:
    """Play full games sampling both players' stored strategies; returns
    A's win fraction with its binomial standard error.  Trial ``t`` uses
    the derived seed ``seed + t``, so runs are reproducible and trials
    independent."""
    if table.strategies is None:
        raise ValueError("simulate needs a table solved with store_strategies=True")
    wins = 0
    log: list[tuple] = []
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        v, chips = vertex, ChipState(a, table.total - a)
        trail: list[tuple] = []
        while not g.is_terminal(v):
            s_a, s_b = table.strategy_pair(v, chips.a)
            bid_a = sample_from(s_a.probs, rng)
            bid_b = sample_from(s_b.probs, rng)
            if bid_a > bid_b:
                winner = PLAYER_A
            elif bid_b > bid_a:
                winner = PLAYER_B
            else:
                winner = chips.advantage
            chips = ChipState(chips.a - bid_a + bid_b, chips.b - bid_b + bid_a)
            mover = choose_designation(g, table, v, chips, winner)
            v = best_move(g, table, v, chips, mover)
            if collect_log:
                trail.append((bid_a, bid_b, winner, mover, v, chips.a))
        if v == g.win_a:
            wins += 1
        if collect_log:
            log.append(tuple(trail))
    rate = wins / trials if trials else 0.0
    stderr = float(np.sqrt(rate * (1.0 - rate) / trials)) if trials else 0.0
    return SimulationResult(
        wins=wins,
        trials=trials,
        win_rate=rate,
        std_error=stderr,
        log=tuple(log) if collect_log else None,
    )
