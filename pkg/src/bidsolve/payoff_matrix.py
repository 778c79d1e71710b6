"""Toeplitz payoff matrices for a single bidding turn.

Because both players pay each other their bids, only the bid difference
``d = (A's bid) - (B's bid)`` matters: the payoff matrix is constant along
diagonals.  A matrix with ``rows`` opposing bids and ``cols`` own bids is
therefore stored as the single vector ``diag`` of length
``rows + cols - 1``, where ``diag`` is indexed by ``d`` running from
``-(rows-1)`` to ``cols-1`` (with offset ``rows-1``).  This is the only
matrix layout used anywhere in the package.

Entry convention for player A's matrix at chips ``(a, b)``: row ``i`` is
B's pure bid, column ``j`` is A's pure bid, and the entry is A's
probability of winning the game when A bids ``j`` and B bids ``i``, after
the chips move to ``(a - d, b + d)``.  The bid winner does not move
directly; it *designates* who moves, which neutralizes zugzwang: a winning
player A realizes ``max(best A move, forced B move)`` and a winning B the
``min`` of the same pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, InvalidLength, InvalidParameter, MissingValue
from .game_graph import PLAYER_A, PLAYER_B, ChipState, GameGraph, PlayerId, VertexId, successors

ValueLookup = Callable[[VertexId, int], float]


@dataclass(frozen=True)
class ToeplitzPayoff:
    """Diagonal-constant payoff matrix.

    ``total`` is the zero-sum utility split between the players: 1 for a
    plain win-probability matrix, ``1 + (a+b)x`` once adjusted.
    """

    diag: np.ndarray
    rows: int
    cols: int
    total: float = 1.0

    def __post_init__(self) -> None:
        d = np.asarray(self.diag, dtype=float)
        object.__setattr__(self, "diag", d)
        if self.rows < 1 or self.cols < 1:
            raise InvalidParameter("matrix must be at least 1x1")
        if d.shape != (self.rows + self.cols - 1,):
            raise InvalidParameter(
                f"diag length {d.shape} inconsistent with {self.rows}x{self.cols}"
            )

    def entry(self, i: int, j: int) -> float:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise DimensionMismatch(f"entry ({i},{j}) outside {self.rows}x{self.cols}")
        return float(self.diag[j - i + self.rows - 1])

    def dense(self) -> np.ndarray:
        first_col = self.diag[self.rows - 1 :: -1]
        first_row = self.diag[self.rows - 1 :]
        return scipy.linalg.toeplitz(first_col, first_row)

    @property
    def scale(self) -> float:
        """Largest entry magnitude; all relative tolerances refer to it."""
        return float(np.abs(self.diag).max())

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "diag": [float(x) for x in self.diag],
            "total": self.total,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ToeplitzPayoff":
        try:
            return cls(
                diag=np.asarray(data["diag"], dtype=float),
                rows=int(data["rows"]),
                cols=int(data["cols"]),
                total=float(data.get("total", 1.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidParameter(f"malformed matrix JSON: {exc}") from exc


# -- construction from a game position ----------------------------------------

def successor_profiles(
    g: GameGraph, v: VertexId, values: ValueLookup, total_chips: int
) -> tuple[np.ndarray, np.ndarray]:
    """Payoff to A over every post-bid chip split ``a' = 0..N``, split by
    which player won the bid and hence designates the mover.

    Returns ``(decide_a, decide_b)``: A designating realizes the max of
    {A's best own move, B's forced best reply}; B designating the min.
    """
    n = total_chips + 1

    def value_row(w: VertexId) -> np.ndarray:
        if w == g.win_a:
            return np.ones(n)
        if w == g.win_b:
            return np.zeros(n)
        try:
            return np.array([values(w, ap) for ap in range(n)], dtype=float)
        except KeyError as exc:
            raise MissingValue(f"no value for successor {w!r}") from exc

    succ_a = successors(g, v, PLAYER_A)
    succ_b = successors(g, v, PLAYER_B)
    best_a = np.maximum.reduce([value_row(w) for w in succ_a]) if succ_a else None
    best_b = np.minimum.reduce([value_row(w) for w in succ_b]) if succ_b else None
    options = [p for p in (best_a, best_b) if p is not None]
    decide_a = np.maximum.reduce(options)
    decide_b = np.minimum.reduce(options)
    return decide_a, decide_b


def matrix_from_profiles(
    decide_a: np.ndarray, decide_b: np.ndarray, a: int, advantage: PlayerId
) -> ToeplitzPayoff:
    """Assemble A's Toeplitz matrix for the split ``(a, N - a)`` from the
    decision profiles of :func:`successor_profiles`."""
    n = len(decide_a)
    b = n - 1 - a
    # offset k corresponds to d = k - b and post-bid chips a' = a - d = N - k
    d = np.arange(n) - b
    a_wins_bid = (d > 0) | ((d == 0) & (advantage == PLAYER_A))
    diag = np.where(a_wins_bid, decide_a[::-1], decide_b[::-1])
    return ToeplitzPayoff(diag, rows=b + 1, cols=a + 1)


def build_matrix(
    g: GameGraph,
    v: VertexId,
    chips: ChipState,
    values: ValueLookup,
    advantage: PlayerId | None = None,
) -> ToeplitzPayoff:
    """Player A's single-turn payoff matrix at ``v`` with chips ``(a, b)``.

    ``values`` must supply ``v_A(w, a')`` for every non-terminal successor
    ``w`` and every split of the same chip total; terminal successors
    contribute 1 (A's win vertex) or 0.  ``advantage`` defaults to the chip
    rule (more chips, ties to A).
    """
    if advantage is None:
        advantage = chips.advantage
    decide_a, decide_b = successor_profiles(g, v, values, chips.total)
    return matrix_from_profiles(decide_a, decide_b, chips.a, advantage)


# -- algebraic operations ------------------------------------------------------

def opponent_matrix(m: ToeplitzPayoff) -> ToeplitzPayoff:
    """The other player's matrix: ``total - transpose(m)`` entrywise."""
    return ToeplitzPayoff(
        diag=m.total - m.diag[::-1], rows=m.cols, cols=m.rows, total=m.total
    )


def transpose(m: ToeplitzPayoff) -> ToeplitzPayoff:
    return ToeplitzPayoff(diag=m.diag[::-1], rows=m.cols, cols=m.rows, total=m.total)


def adjust_precision(m: ToeplitzPayoff, x: float, chips: ChipState) -> ToeplitzPayoff:
    """Add the per-chip bonus ``x * (chips A holds after the turn)``.

    Entry ``(i, j)`` gains ``x * (a - j + i)``, i.e. ``x * (a - d)`` on
    diagonal ``d``.  Any positive ``x`` makes the turn precise: equal
    payoff entries become strictly ordered by the chips they leave A.
    """
    if x <= 0:
        raise InvalidParameter(f"x must be positive, got {x}")
    if chips.a != m.cols - 1 or chips.b != m.rows - 1:
        raise DimensionMismatch(
            f"chips {chips} do not match a {m.rows}x{m.cols} matrix"
        )
    d = np.arange(-(m.rows - 1), m.cols)
    return ToeplitzPayoff(
        diag=m.diag + x * (chips.a - d),
        rows=m.rows,
        cols=m.cols,
        total=m.total + x * chips.total,
    )


def restrict(m: ToeplitzPayoff, ell: int) -> ToeplitzPayoff:
    """Top-left ``ell x ell`` minor: the game with first-turn bids capped
    at ``ell - 1``."""
    if not 1 <= ell <= min(m.rows, m.cols):
        raise InvalidLength(f"restriction {ell} outside 1..{min(m.rows, m.cols)}")
    center = m.rows - 1
    return ToeplitzPayoff(
        diag=m.diag[center - (ell - 1) : center + ell],
        rows=ell,
        cols=ell,
        total=m.total,
    )


def apply(m: ToeplitzPayoff, s) -> np.ndarray:
    """``m @ s``: entry ``i`` is the payoff against the pure opposing bid
    ``i``.  Accepts a Strategy or a bare probability vector."""
    probs = np.asarray(getattr(s, "probs", s), dtype=float)
    if probs.shape != (m.cols,):
        raise DimensionMismatch(f"strategy length {probs.shape} != cols {m.cols}")
    # (m @ s)_i = sum_j diag[j-i] s_j: a sliding correlation of diag with s.
    return np.correlate(m.diag, probs, mode="valid")[::-1]


def expected_payoff(sb, m: ToeplitzPayoff, sa) -> float:
    """Bilinear form ``sb^T M sa``: the row player bids from ``sb``."""
    row = np.asarray(getattr(sb, "probs", sb), dtype=float)
    if row.shape != (m.rows,):
        raise DimensionMismatch(f"opposing strategy length {row.shape} != rows {m.rows}")
    return float(row @ apply(m, sa))
