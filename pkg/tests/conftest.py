"""Shared fixtures: the worked race-game matrices and a generator for
random precise turn matrices of the shape real games produce.

A real unadjusted turn matrix is always of profile form: two payoff
profiles over the post-bid chip splits (one per bid winner), each
nondecreasing in the owner's chips, with winning the bid never worse than
losing it.  Arbitrary random diagonals do not have this shape and the
precision theorems do not apply to them, so random instances are drawn
from the realizable class and then adjusted.
"""

from __future__ import annotations

import numpy as np
import pytest

from bidsolve.game_graph import PLAYER_A, ChipState, GameGraph, validate_graph, tictactoe_graph
from bidsolve.payoff_matrix import ToeplitzPayoff, adjust_precision, matrix_from_profiles
from bidsolve.dag_solver import solve_game

# The race game of the worked example: A two moves from winning, B one,
# with chips (5, 3).  Rows are B's bids, columns A's bids.
PAPER_MA_RACE = np.array(
    [
        [1, 1, 1, 0, 0, 0],
        [0, 1, 1, 1, 0, 0],
        [0, 0, 1, 1, 1, 0],
        [0, 0, 0, 1, 1, 1],
    ],
    dtype=float,
)
PAPER_MB_RACE = np.array(
    [
        [0, 1, 1, 1],
        [0, 0, 1, 1],
        [0, 0, 0, 1],
        [1, 0, 0, 0],
        [1, 1, 0, 0],
        [1, 1, 1, 0],
    ],
    dtype=float,
)


def paper_race_values(vertex: str, a: int) -> float:
    """Successor values that reproduce the worked example's printed
    matrices: the intermediate state is counted as won by A whenever A
    keeps at least 3 of the 8 chips."""
    assert vertex == "1,1"
    return 1.0 if a >= 3 else 0.0


# The 2x2 matrix of the bilinear example: M = (1  1/2 / 0  1).
PAPER_M_2X2 = ToeplitzPayoff(diag=np.array([0.0, 1.0, 0.5]), rows=2, cols=2)


def random_profiles(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nondecreasing (win, lose) payoff profiles over chip splits 0..n."""

    def draw() -> np.ndarray:
        raw = rng.uniform(0.0, 1.0, n + 1)
        if rng.random() < 0.35:
            # plateaus: quantized values exercise the degenerate cases
            levels = int(rng.integers(1, 4))
            raw = np.round(raw * levels) / levels
        return np.sort(raw)

    decide_a = draw()
    decide_b = np.minimum(draw(), decide_a)
    return decide_a, decide_b


def random_adjusted_matrix(
    rng: np.random.Generator,
    a: int | None = None,
    b: int | None = None,
    x: float = 1e-2,
) -> ToeplitzPayoff:
    """A random precise matrix for the advantage player with chips ``a``
    against ``b`` (both drawn from 3..8 when omitted).

    The owner gets the (weakly) larger stack, as the chip rule implies for
    every matrix the recursion actually solves.  The reverse/strategy
    theorems need that headroom: with a < b the optimal length can reach
    a+1 and the opponent's support can exclude bid 0, moving the
    equalization rows off the top-left minor.
    """
    if a is None and b is None:
        first, second = int(rng.integers(3, 9)), int(rng.integers(3, 9))
        a, b = max(first, second), min(first, second)
    elif a is None:
        a = int(rng.integers(b, 9))
    elif b is None:
        b = int(rng.integers(3, a + 1))
    decide_a, decide_b = random_profiles(rng, a + b)
    m = matrix_from_profiles(decide_a, decide_b, a, PLAYER_A)
    return adjust_precision(m, x, ChipState(a, b))


def zugzwang_graph() -> GameGraph:
    """Five vertices where each side's own move is a blunder: from the
    start, A's only move leads to a lost position and B's only move to a
    won-for-A position, so the bid winner always designates the opponent."""
    g = GameGraph(
        vertices=("s", "u", "w", "WIN_A", "WIN_B"),
        edges_a={"s": ("u",), "w": ("WIN_A",)},
        edges_b={"s": ("w",), "u": ("WIN_B",)},
        root="s",
    )
    return validate_graph(g)


@pytest.fixture(scope="session")
def ttt_graph():
    return tictactoe_graph()


@pytest.fixture(scope="session")
def ttt_table(ttt_graph):
    """Tic-Tac-Toe solved at N=10, x=1e-4; shared by the slow tests."""
    return solve_game(ttt_graph, 10, x=1e-4)
