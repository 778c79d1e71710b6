"""Solving a whole game graph and validating the values by self-play.

The solver walks the DAG backwards from the terminals, solving one
bidding turn per (vertex, chip split).  The resulting value is A's win
probability under optimal play, which Monte Carlo self-play with the
stored strategies reproduces to statistical accuracy.
"""

import numpy as np

from bidsolve import race_graph, solve_game, tictactoe_graph
from bidsolve.oracle import simulate

g = race_graph(2, 2)
N = 6
table = solve_game(g, N, x=1e-6, store_strategies=True)

print(f"race(2,2), {N} chips. Root values by A's chips:")
for a in range(N + 1):
    print(f"  a={a}: v_A = {table.value(g.root, a):.6f}")

print("\nSelf-play check at the even split (3,3):")
result = simulate(g, table, g.root, a=3, trials=10_000, seed=7)
print(f"  empirical win rate {result.win_rate:.4f} +- {result.std_error:.4f}"
      f"  vs table value {table.value(g.root, 3):.4f}")

print("\nTic-tac-toe at 10 chips (11093 boards, a couple dozen seconds):")
ttt = tictactoe_graph()
ttt_table = solve_game(ttt, 10, x=1e-6)
root_row = ttt_table.values[ttt_table.index[ttt.root]]
print("  v_A(empty board, a) for a = 0..10:")
print(" ", np.round(root_row, 4))
print("""
With both players needing the same resource (move wins), whoever holds
more chips dominates; X's tie-advantage shows up as the jump at a=5,
and draws going to O tilt the even split below one half.""")
