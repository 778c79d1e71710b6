"""Single-turn Nash equilibrium for a precise (adjusted) payoff matrix.

The matrix handed to this module always belongs to the player holding
advantage; "own bids" index its columns.  For a precise turn that player
has a unique equilibrium strategy.  Its length ``l`` is the largest ``k``
for which the ``k x k`` leading minor solves ``M(k) y = 1`` nonnegatively
(binary search, since the test is monotone in ``k``), and the strategy is
that solution normalized to sum 1.  The opponent's equilibrium is the
reverse of the advantage strategy, zero-padded to their bid cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateChips, DimensionMismatch, InvalidParameter, NegativeStrategyEntry, Singular
from .payoff_matrix import ToeplitzPayoff, apply, expected_payoff, opponent_matrix, restrict, transpose
from .toeplitz_solver import dense_solve, levinson_solve

CLAMP_BAND = 1e-12        # entries in [-band, 0) are float dust: clamp to 0
NONNEG_RTOL = 1e-9        # length-test negativity threshold, times matrix scale
STRATEGY_CLAMP = 1e-8     # round-off the length test already tolerates; genuine
                          # wrong-length negativity is orders of magnitude larger
EQUALIZATION_TOL = 1e-8
GAP_TOL = 1e-7


@dataclass(frozen=True)
class Strategy:
    """Probability vector over bids ``0..cap`` (``cap = len(probs) - 1``)."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "probs", p)
        if p.ndim != 1 or len(p) == 0:
            raise InvalidParameter("strategy must be a nonempty vector")
        if p.min() < -CLAMP_BAND:
            raise NegativeStrategyEntry(f"entry {p.min():g} below clamp band")
        if p.min() < 0:
            p = p.copy()
            p[p < 0] = 0.0
            object.__setattr__(self, "probs", p)
        if abs(p.sum() - 1.0) > 1e-9:
            raise InvalidParameter(f"probabilities sum to {p.sum()!r}, not 1")

    @cached_property
    def length(self) -> int:
        """One plus the largest bid with positive probability."""
        nz = np.nonzero(self.probs)[0]
        if len(nz) == 0:
            raise InvalidParameter("strategy has empty support")
        return int(nz[-1]) + 1

    @cached_property
    def gap_free(self) -> bool:
        nz = np.nonzero(self.probs)[0]
        return bool(len(nz) == nz[-1] - nz[0] + 1)

    def __len__(self) -> int:
        return len(self.probs)


def pure(bid: int, cap: int) -> Strategy:
    probs = np.zeros(cap + 1)
    probs[bid] = 1.0
    return Strategy(probs)


@dataclass(frozen=True)
class EquilibriumResult:
    value: float              # equalized payoff to the matrix owner
    s_a: Strategy             # advantage player's (unique) strategy
    s_b: Strategy             # opponent strategy: reverse of s_a
    length: int
    best_response_gap: float


def _restricted_solution(
    m: ToeplitzPayoff, k: int, dense_only: bool = False
) -> tuple[np.ndarray | None, float]:
    """Solve ``M(k) y = 1``; returns (solution or None-if-singular, scale)."""
    sub = restrict(m, k)
    solver = dense_solve if dense_only else levinson_solve
    try:
        report = solver(sub, np.ones(k))
    except Singular:
        return None, sub.scale
    return report.solution, sub.scale


def _passes(solution: np.ndarray | None, scale: float) -> bool:
    return solution is not None and bool(solution.min() >= -NONNEG_RTOL * scale)


def nonneg_solution_test(m: ToeplitzPayoff, k: int, dense_only: bool = False) -> bool:
    """Does ``M(k)^-1 1`` exist with all entries ``>= -1e-9 * scale``?

    Singularity counts as "no", matching the search's else branch.
    """
    return _passes(*_restricted_solution(m, k, dense_only))


def _find_length_with_solution(m: ToeplitzPayoff) -> tuple[int, np.ndarray | None]:
    if min(m.rows, m.cols) < 2:
        raise DegenerateChips("length search needs both bid spaces nontrivial")
    low, high = 1, min(m.rows, m.cols) + 1
    low_solution: np.ndarray | None = None
    while low + 1 < high:
        k = (low + high) // 2
        solution, scale = _restricted_solution(m, k)
        if _passes(solution, scale):
            low, low_solution = k, solution
        else:
            high = k
    return low, low_solution


def find_length(m: ToeplitzPayoff) -> int:
    """Binary search for the optimal strategy length.

    The nonneg test passes exactly for ``k <= l`` and fails beyond, so the
    search keeps a passing ``low`` and a failing (or out-of-range) ``high``
    and bisects; ``high`` starts one past the largest square minor so that
    ``l = min(a, b) + 1`` itself is reachable.
    """
    return _find_length_with_solution(m)[0]


def _strategy_from_solution(m: ToeplitzPayoff, ell: int, solution: np.ndarray) -> Strategy:
    y = solution / solution.sum()
    if y.min() < -STRATEGY_CLAMP:
        raise NegativeStrategyEntry(
            f"solution entry {y.min():g} at length {ell}; wrong restriction length"
        )
    np.clip(y, 0.0, None, out=y)
    probs = np.zeros(m.cols)
    probs[:ell] = y / y.sum()
    return Strategy(probs)


def advantage_strategy(m: ToeplitzPayoff, ell: int) -> Strategy:
    """The equilibrium strategy ``M(l)^-1 1`` normalized to sum 1, padded
    with zeros up to the bid cap.  Requires ``ell = find_length(m)``."""
    solution, _ = _restricted_solution(m, ell)
    if solution is None:
        raise Singular(f"restricted matrix M({ell}) is singular")
    return _strategy_from_solution(m, ell, solution)


def reverse(s: Strategy, cap: int | None = None) -> Strategy:
    """Support-order reversal, zero-padded to the opponent's bid cap."""
    ell = s.length
    n = len(s.probs) if cap is None else cap + 1
    if n < ell:
        raise DimensionMismatch(f"cap {n - 1} cannot hold a length-{ell} strategy")
    probs = np.zeros(n)
    probs[:ell] = s.probs[ell - 1 :: -1]
    return Strategy(probs)


def shift(s: Strategy) -> Strategy:
    """Prepend a zero bid: bid ``i + 1`` wherever ``s`` bids ``i``."""
    if s.probs[-1] != 0:
        raise DimensionMismatch("no headroom to shift within the bid cap")
    probs = np.zeros(len(s.probs))
    probs[1:] = s.probs[:-1]
    return Strategy(probs)


def best_response_gap(m: ToeplitzPayoff, s_a: Strategy, s_b: Strategy) -> float:
    """Largest improvement either player could get by a pure deviation."""
    u = expected_payoff(s_b, m, s_a)
    br_a = float(apply(transpose(m), s_b).max())
    mb = opponent_matrix(m)
    br_b = float(apply(transpose(mb), s_a).max())
    return max(br_a - u, br_b - (m.total - u), 0.0)


def solve_turn(m: ToeplitzPayoff, length_hint: int | None = None) -> EquilibriumResult:
    """Full single-turn solve of the advantage player's adjusted matrix.

    ``length_hint`` (e.g. the length at a neighboring chip split) is
    verified with the yes/no pair of nonneg tests that the length lemmas
    make conclusive; on mismatch the full binary search runs.
    """
    if m.rows < 2 or m.cols < 2:
        raise DegenerateChips(f"{m.rows}x{m.cols} turn has a trivial bid space")
    ell, solution = None, None
    if length_hint is not None and 1 <= length_hint <= min(m.rows, m.cols):
        candidate, scale = _restricted_solution(m, length_hint)
        if _passes(candidate, scale) and (
            length_hint == min(m.rows, m.cols)
            or not nonneg_solution_test(m, length_hint + 1)
        ):
            ell, solution = length_hint, candidate
    if ell is None:
        ell, solution = _find_length_with_solution(m)
    if solution is None:
        solution, _ = _restricted_solution(m, ell)
        if solution is None:
            raise Singular(f"restricted matrix M({ell}) is singular")
    s_a = _strategy_from_solution(m, ell, solution)
    s_b = reverse(s_a, cap=m.rows - 1)
    value = float(apply(m, s_a).min())
    gap = best_response_gap(m, s_a, s_b)
    return EquilibriumResult(value=value, s_a=s_a, s_b=s_b, length=ell, best_response_gap=gap)


@dataclass(frozen=True)
class VerificationReport:
    """Report-only equilibrium diagnostics; nothing here raises."""

    value: float
    equalization_deviation: float   # max |payoff - value| on the opponent's support
    gap_advantage: float            # best pure deviation gain for the matrix owner
    gap_opponent: float
    gap_free: bool
    bids_zero: bool                 # advantage player bids 0 with positive probability
    opponent_bids_one: bool         # opponent bids 1 with positive probability (l >= 2)

    @property
    def best_response_gap(self) -> float:
        return max(self.gap_advantage, self.gap_opponent, 0.0)

    @property
    def passed(self) -> bool:
        return (
            self.equalization_deviation <= EQUALIZATION_TOL
            and self.best_response_gap <= GAP_TOL
            and self.gap_free
            and self.bids_zero
            and self.opponent_bids_one
        )


def verify_equilibrium(m: ToeplitzPayoff, s_a: Strategy, s_b: Strategy) -> VerificationReport:
    """Check equalization, pure-deviation gaps and the structural shape of
    a claimed equilibrium of the advantage player's matrix ``m``."""
    pv = apply(m, s_a)
    support_b = np.nonzero(s_b.probs)[0]
    value = float(pv.min())
    equalization = float(np.abs(pv[support_b] - value).max())
    u = expected_payoff(s_b, m, s_a)
    gap_a = float(apply(transpose(m), s_b).max() - u)
    mb = opponent_matrix(m)
    gap_b = float(apply(transpose(mb), s_a).max() - (m.total - u))
    ell = s_a.length
    return VerificationReport(
        value=value,
        equalization_deviation=equalization,
        gap_advantage=gap_a,
        gap_opponent=gap_b,
        gap_free=s_a.gap_free and s_b.gap_free,
        bids_zero=bool(s_a.probs[0] > 0),
        opponent_bids_one=bool(ell < 2 or (len(s_b.probs) > 1 and s_b.probs[1] > 0)),
    )
