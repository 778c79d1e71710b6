"""Retrograde solving, play primitives, sampling, and table persistence."""

import numpy as np
import pytest

from bidsolve.dag_solver import (
    ValueTable,
    best_move,
    choose_designation,
    load_table,
    resolve_bids,
    sample_bid,
    save_table,
    solve_game,
)
from bidsolve.equilibrium import Strategy, solve_turn
from bidsolve.errors import (
    FormatMismatch,
    GraphHashMismatch,
    GraphTooLarge,
    InvalidParameter,
    TerminalVertex,
)
from bidsolve.game_graph import (
    PLAYER_A,
    PLAYER_B,
    WIN_A,
    WIN_B,
    ChipState,
    race_graph,
)
from bidsolve.oracle import naive_matrix
from bidsolve.payoff_matrix import ToeplitzPayoff, adjust_precision, build_matrix

from conftest import zugzwang_graph


class TestSolveGame:
    def test_single_bid_race_thresholds(self):
        g = race_graph(1, 1)
        table = solve_game(g, 5, x=1e-6)
        tol = 1 * 1e-6 * 5 * (1 + 1e-9)  # depth * x * N, attained exactly at (5,0)
        for a in range(6):
            expected = 1.0 if a >= 3 else 0.0  # richer player wins, ties to A
            assert table.value(g.root, a) == pytest.approx(expected, abs=tol)

    def test_values_nondecreasing_in_chips(self):
        g = race_graph(2, 1)
        table = solve_game(g, 8, x=1e-6)
        root_vals = table.values[table.index[g.root]]
        assert np.all(np.diff(root_vals) >= -1e-9)

    def test_terminal_anchors(self):
        g = race_graph(2, 2)
        table = solve_game(g, 4, x=1e-3)
        assert np.all(table.values[table.index[WIN_A]] == 1.0)
        assert np.all(table.values[table.index[WIN_B]] == 0.0)

    def test_memo_bound_and_completeness(self):
        g = race_graph(2, 2)
        table = solve_game(g, 6, x=1e-6)
        assert table.solves <= 7 * len(g.vertices)
        # every (vertex, split) cell is populated exactly once
        assert table.values.shape == (len(g.vertices), 7)
        assert np.all(table.lengths >= 1)
        assert np.all(np.isfinite(table.values))

    def test_entry_cap(self):
        with pytest.raises(GraphTooLarge):
            solve_game(race_graph(2, 2), 100, x=1e-6, entry_cap=100)

    def test_matrices_match_standalone_construction(self):
        # the profile fast path must agree with build_matrix everywhere
        g = race_graph(2, 2)
        n = 6
        table = solve_game(g, n, x=1e-4)
        for v in g.vertices:
            if g.is_terminal(v):
                continue
            for a in range(1, n):
                chips = ChipState(a, n - a)
                m = build_matrix(g, v, chips, table.lookup)
                mx = adjust_precision(m, 1e-4, chips)
                res = solve_turn(mx if chips.advantage == PLAYER_A else
                                 __import__("bidsolve.payoff_matrix", fromlist=["opponent_matrix"]).opponent_matrix(mx))
                value = res.value if chips.advantage == PLAYER_A else mx.total - res.value
                assert value == pytest.approx(table.value(v, a), abs=1e-12)

    def test_chip_monotonicity_across_totals(self):
        g = race_graph(2, 2)
        t6 = solve_game(g, 6, x=1e-6)
        t7 = solve_game(g, 7, x=1e-6)
        # b fixed: values(v, a+1) at N+1 dominate values(v, a) at N
        assert np.all(t7.values[:, 1:] >= t6.values - 1e-9)

    def test_depth_limited_naive_recursion_matches(self, ttt_graph, ttt_table):
        # near-the-end positions: recompute values with a plain recursion
        # (no memo table, matrices built entrywise by the oracle)
        g, table = ttt_graph, ttt_table
        x, n = table.x, table.total

        def toeplitz_from_dense(dense: np.ndarray) -> ToeplitzPayoff:
            rows, cols = dense.shape
            diag = np.empty(rows + cols - 1)
            for t in range(rows + cols - 1):
                d = t - (rows - 1)
                diag[t] = dense[0, d] if d >= 0 else dense[-d, 0]
            return ToeplitzPayoff(diag, rows, cols)

        def naive_value(v, a):
            if v == g.win_a:
                return 1.0
            if v == g.win_b:
                return 0.0
            chips = ChipState(a, n - a)
            dense = naive_matrix(g, v, chips, lambda w, ap: naive_value(w, ap))
            mx = adjust_precision(toeplitz_from_dense(dense), x, chips)
            if chips.a == 0:  # A is forced to bid 0; B scans the first column
                return float(np.min(mx.dense()[:, 0]))
            if chips.b == 0:  # B forced; A scans the first row
                return float(np.max(mx.dense()[0, :]))
            if chips.advantage == PLAYER_A:
                return solve_turn(mx).value
            from bidsolve.payoff_matrix import opponent_matrix

            return mx.total - solve_turn(opponent_matrix(mx)).value

        cases = [("XXOXXOO..", (3, 7)), ("XXOXXO.O.", (5,)), ("XXOXXO...", (4,))]
        for board, splits in cases:
            assert board in table.index
            for a in splits:
                assert naive_value(board, a) == pytest.approx(
                    table.value(board, a), abs=1e-9
                ), (board, a)


class TestPlayPrimitives:
    def test_best_move_single_winning_move(self):
        g = race_graph(2, 1)
        table = solve_game(g, 6, x=1e-6)
        assert best_move(g, table, g.root, ChipState(3, 3), PLAYER_B) == WIN_B

    def test_best_move_completes_a_line(self, ttt_graph, ttt_table):
        # With chips against it, A's only value-1 option is the immediate
        # win (at advantage-holding splits, a delayed forced win carries a
        # bigger chip bonus and legitimately out-values the terminal).
        g = ttt_graph
        board = "XX.OO...."
        nxt = best_move(g, ttt_table, board, ChipState(2, 8), PLAYER_A)
        assert nxt == WIN_A

    def test_best_move_terminal_raises(self):
        g = race_graph(1, 1)
        table = solve_game(g, 2, x=1e-6)
        with pytest.raises(TerminalVertex):
            best_move(g, table, WIN_A, ChipState(1, 1), PLAYER_A)

    def test_zugzwang_designates_opponent(self):
        g = zugzwang_graph()
        table = solve_game(g, 4, x=1e-6)
        # from s, moving yourself is always the blunder
        assert choose_designation(g, table, "s", ChipState(2, 2), PLAYER_A) == PLAYER_B
        assert choose_designation(g, table, "s", ChipState(2, 2), PLAYER_B) == PLAYER_A
        # and the table values reflect that A's own move loses
        assert table.value("u", 2) == pytest.approx(0.0, abs=1e-5)
        assert table.value("w", 2) == pytest.approx(1.0, abs=1e-5)

    def test_resolve_bids_conserves_chips(self):
        g = race_graph(2, 2)
        table = solve_game(g, 6, x=1e-6)
        rng = np.random.default_rng(61)
        for _ in range(50):
            a = int(rng.integers(0, 7))
            chips = ChipState(a, 6 - a)
            bid_a = int(rng.integers(0, a + 1))
            bid_b = int(rng.integers(0, 6 - a + 1))
            out = resolve_bids(g, table, g.root, chips, bid_a, bid_b)
            assert out.next_chips.total == 6
            assert out.next_chips.a == a - bid_a + bid_b

    def test_resolve_bids_tie_uses_advantage(self):
        g = race_graph(2, 2)
        table = solve_game(g, 6, x=1e-6)
        out = resolve_bids(g, table, g.root, ChipState(4, 2), 2, 2)
        assert out.winner == PLAYER_A  # more chips
        out = resolve_bids(g, table, g.root, ChipState(2, 4), 2, 2)
        assert out.winner == PLAYER_B
        out = resolve_bids(g, table, g.root, ChipState(3, 3), 1, 1)
        assert out.winner == PLAYER_A  # equal chips tie to A


class TestSampling:
    def test_point_mass(self):
        s = Strategy(np.array([1.0, 0.0, 0.0]))
        assert all(sample_bid(s, seed) == 0 for seed in range(20))

    def test_even_coin_frequency(self):
        s = Strategy(np.array([0.5, 0.5]))
        rng = np.random.default_rng(0)
        from bidsolve.dag_solver import sample_from

        draws = [sample_from(s.probs, rng) for _ in range(100_000)]
        freq0 = draws.count(0) / len(draws)
        assert 0.49 <= freq0 <= 0.51

    def test_golden_seed(self):
        # frozen after the first run; guards the sampling layout
        s = Strategy(np.array([0.2, 0.3, 0.5]))
        assert sample_bid(s, 42) == 2


class TestPersistence:
    def test_round_trip(self, tmp_path):
        g = race_graph(2, 1)
        table = solve_game(g, 8, x=1e-5, store_strategies=True)
        path = str(tmp_path / "race.npz")
        save_table(table, path)
        loaded = load_table(path, graph=g)
        assert loaded.total == table.total and loaded.x == table.x
        assert np.array_equal(loaded.values, table.values)
        assert np.array_equal(loaded.lengths, table.lengths)
        assert loaded.strategies.keys() == table.strategies.keys()
        for k in table.strategies:
            assert np.array_equal(loaded.strategies[k][0], table.strategies[k][0])
            assert np.array_equal(loaded.strategies[k][1], table.strategies[k][1])

    def test_wrong_graph_hash(self, tmp_path):
        g = race_graph(2, 1)
        table = solve_game(g, 4, x=1e-5)
        path = str(tmp_path / "race.npz")
        save_table(table, path)
        with pytest.raises(GraphHashMismatch):
            load_table(path, graph=race_graph(1, 2))

    def test_truncated_file(self, tmp_path):
        g = race_graph(2, 1)
        table = solve_game(g, 4, x=1e-5)
        path = str(tmp_path / "race.npz")
        save_table(table, path)
        blob = open(path, "rb").read()
        open(path, "wb").write(blob[: len(blob) // 2])
        with pytest.raises(FormatMismatch):
            load_table(path)
