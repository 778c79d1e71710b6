"""A single bidding turn, end to end.

Builds the payoff matrix for the race game where player A needs two moves
and player B one, at chips (5, 3); adjusts it for precision; finds the
optimal strategy length; and prints the equilibrium with its guarantees.
"""

import numpy as np

from bidsolve import (
    ChipState,
    adjust_precision,
    apply,
    build_matrix,
    opponent_matrix,
    race_graph,
    solve_game,
    solve_turn,
    verify_equilibrium,
)

g = race_graph(2, 1)
chips = ChipState(5, 3)

# Successor values come from solving the full game at this chip total.
table = solve_game(g, chips.total, x=1e-3)
m = build_matrix(g, g.root, chips, table.lookup)

print("Payoff matrix for player A at the root (rows: B's bid, cols: A's bid);")
print("entries are successor values, which already carry the solve's chip bonuses:")
print(m.dense())
print()

mx = adjust_precision(m, 1e-3, chips)
print("After this turn's own precision adjustment (+x per chip A keeps, x = 1e-3):")
print(np.round(mx.dense(), 4))
print()

result = solve_turn(mx)
print(f"Optimal strategy length: {result.length}")
print(f"Game value for A:        {result.value:.6f}")
print(f"A bids 0..{chips.a} with:   {np.round(result.s_a.probs, 4)}")
print(f"B bids 0..{chips.b} with:     {np.round(result.s_b.probs, 4)}  (the reverse of A's)")
print()

payoffs = apply(mx, result.s_a)
print("A's payoff against each pure bid of B:", np.round(payoffs, 6))
print("Equalized on B's support, never below the value elsewhere.")
print()

report = verify_equilibrium(mx, result.s_a, result.s_b)
print(f"Best response gap: {report.best_response_gap:.2e}")
print(f"All checks passed: {report.passed}")

mb = opponent_matrix(mx)
print(f"\nB's guarantee with the reversed strategy: "
      f"{apply(mb, result.s_b).min():.6f} "
      f"(zero-sum total {mx.total:.4f} minus A's value {result.value:.6f})")
