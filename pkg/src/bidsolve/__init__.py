"""Solver engine and play service for discrete all-pay bidding games.

Core flow: describe a game as a colored DAG (``game_graph``), solve every
(vertex, chip split) by retrograde analysis (``dag_solver``), where each
single turn is a Toeplitz matrix game (``payoff_matrix``) solved in closed
form after a binary search for the optimal strategy length
(``equilibrium``, ``toeplitz_solver``).  ``oracle`` holds the independent
ground-truth solvers used by the tests, ``cli`` and ``api_server`` the
operational surfaces.
"""

from .equilibrium import (
    EquilibriumResult,
    Strategy,
    advantage_strategy,
    find_length,
    nonneg_solution_test,
    reverse,
    solve_turn,
    verify_equilibrium,
)
from .dag_solver import (
    BidOutcome,
    ValueTable,
    best_move,
    choose_designation,
    default_precision,
    load_table,
    sample_bid,
    save_table,
    solve_game,
)
from .game_graph import (
    ChipState,
    GameGraph,
    PLAYER_A,
    PLAYER_B,
    race_graph,
    successors,
    tictactoe_graph,
    validate_graph,
)
from .payoff_matrix import (
    ToeplitzPayoff,
    adjust_precision,
    apply,
    build_matrix,
    expected_payoff,
    opponent_matrix,
    restrict,
)
from .toeplitz_solver import SolveReport, dense_solve, levinson_solve

__all__ = [
    "BidOutcome",
    "ChipState",
    "EquilibriumResult",
    "GameGraph",
    "PLAYER_A",
    "PLAYER_B",
    "SolveReport",
    "Strategy",
    "ToeplitzPayoff",
    "ValueTable",
    "adjust_precision",
    "advantage_strategy",
    "apply",
    "best_move",
    "build_matrix",
    "choose_designation",
    "default_precision",
    "dense_solve",
    "expected_payoff",
    "find_length",
    "levinson_solve",
    "load_table",
    "nonneg_solution_test",
    "opponent_matrix",
    "race_graph",
    "restrict",
    "reverse",
    "sample_bid",
    "save_table",
    "solve_game",
    "solve_turn",
    "successors",
    "tictactoe_graph",
    "validate_graph",
    "verify_equilibrium",
]

__version__ = "0.1.0"
