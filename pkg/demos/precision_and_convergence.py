"""Why the per-chip bonus exists, and how fast its effect vanishes.

Many positions are imprecise: an extra chip changes nothing, the payoff
matrix has flat runs, and the equilibrium machinery loses its footing
(restricted minors go singular, strategies stop being unique).  Adding a
tiny utility x per chip breaks every tie; as x shrinks the adjusted value
and strategy converge to an equilibrium of the original game.
"""

import numpy as np

from bidsolve import race_graph, solve_game

g = race_graph(2, 1)
N = 8

print(f"race(2,1) with {N} chips total; root values v_A^x(start, a) by A's chips\n")
header = "x        " + "".join(f"a={a:<8}" for a in range(N + 1))
print(header)

previous = None
for x in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
    table = solve_game(g, N, x=x)
    row = table.values[table.index[g.root]]
    print(f"{x:<9.0e}" + "".join(f"{v:<9.5f}" for v in row))
    if previous is not None:
        delta = np.abs(row - previous).max()
        print(f"{'':9}max change from previous x: {delta:.2e}")
    previous = row

print("""
The deltas shrink by roughly the same factor as x: the adjusted game's
value error is bounded by depth * x * N.  The a=5 column is the worked
(5,3) split: it converges to 1/2, a genuinely mixed outcome, while
splits with a >= 6 are already deterministic wins for A.""")

print("Strategy convergence at the root, split (5,3):")
for x in (1e-3, 1e-5):
    table = solve_game(g, N, x=x, store_strategies=True)
    s_a, _ = table.strategy_pair(g.root, 5)
    print(f"  x={x:<8.0e} A bids with {np.round(s_a.probs, 5)}")
