"""Fast solves of square Toeplitz systems with a robust dense fallback.

The Levinson recursion solves ``T y = rhs`` in O(n^2) by growing forward
and backward vectors one leading minor at a time.  A singular *leading
minor* breaks the recursion without implying that ``T`` itself is
singular, so breakdown falls back to LU with partial pivoting; only the
dense route may report ``Singular``.  Every returned solution satisfies
``max|T y - rhs| <= 1e-8 * (1 + max|rhs|)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidParameter, Singular
from .payoff_matrix import ToeplitzPayoff, apply

BREAKDOWN_RTOL = 1e-12   # leading-minor pivot cutoff, relative to matrix scale
SINGULAR_RTOL = 1e-12    # dense LU rank cutoff, relative to matrix scale
RESIDUAL_RTOL = 1e-8


@dataclass(frozen=True)
class SolveReport:
    solution: np.ndarray
    method: str  # "levinson" or "dense-fallback"
    min_pivot: float


class _Breakdown(Exception):
    """Internal: a leading-minor denominator vanished; retry dense."""


_SMALL_N = 4  # at most this, plain Python floats beat the LAPACK call overhead


def _residual_ok(t: ToeplitzPayoff, sol: np.ndarray, rhs: np.ndarray) -> bool:
    res = np.abs(apply(t, sol) - rhs).max()
    return bool(res <= RESIDUAL_RTOL * (1.0 + np.abs(rhs).max()))


def _levinson_small(col, row, rhs) -> tuple[list[float], float]:
    """The same recursion on Python floats; the systems arising from game
    turns are tiny and dominated by array-call overhead otherwise."""
    n = len(col)
    scale = max(max(col, key=abs), max(row, key=abs), key=abs)
    scale = abs(scale)
    if scale == 0.0:
        raise _Breakdown
    m0 = col[0]
    if abs(m0) < BREAKDOWN_RTOL * scale:
        raise _Breakdown
    min_pivot = abs(m0) / scale
    inv0 = 1.0 / m0
    f = [inv0]
    b = [inv0]
    x = [rhs[0] * inv0]
    for k in range(2, n + 1):
        eps_f = 0.0
        eps_b = 0.0
        eps_x = 0.0
        for i in range(k - 1):
            c = col[k - 1 - i]
            eps_f += c * f[i]
            eps_x += c * x[i]
            eps_b += row[i + 1] * b[i]
        delta = 1.0 - eps_f * eps_b
        if delta != delta or abs(delta) < BREAKDOWN_RTOL:
            raise _Breakdown
        if abs(delta) < min_pivot:
            min_pivot = abs(delta)
        inv = 1.0 / delta
        cf = eps_f * inv
        cb = eps_b * inv
        f_new = [inv * f[0]] + [inv * f[i] - cf * b[i - 1] for i in range(1, k - 1)] + [-cf * b[k - 2]]
        b_new = [-cb * f[0]] + [inv * b[i - 1] - cb * f[i] for i in range(1, k - 1)] + [inv * b[k - 2]]
        w = rhs[k - 1] - eps_x
        x = [x[i] + w * b_new[i] for i in range(k - 1)] + [w * b_new[k - 1]]
        f, b = f_new, b_new
    for v in x:
        if v != v or v in (float("inf"), float("-inf")):
            raise _Breakdown
    return x, min_pivot


def _levinson_recursion(t: ToeplitzPayoff, rhs: np.ndarray) -> tuple[np.ndarray, float]:
    n = t.rows
    # col[i] = T[i][0], row[j] = T[0][j]
    col = t.diag[n - 1 :: -1]
    row = t.diag[n - 1 :]
    if n <= _SMALL_N:
        sol, min_pivot = _levinson_small(col.tolist(), row.tolist(), rhs.tolist())
        return np.array(sol), min_pivot
    scale = t.scale
    if scale == 0.0:
        raise _Breakdown
    m0 = col[0]
    if abs(m0) < BREAKDOWN_RTOL * scale:
        raise _Breakdown
    min_pivot = abs(m0) / scale

    rcol = col[::-1].copy()  # rcol[n-k : n-1] == col[1:k] reversed
    f = np.array([1.0 / m0])  # T_k f = e_0
    b = np.array([1.0 / m0])  # T_k b = e_{k-1}
    x = np.array([rhs[0] / m0])
    for k in range(2, n + 1):
        head = rcol[n - k : n - 1]
        eps_f = float(head @ f)
        eps_b = float(row[1:k] @ b)
        delta = 1.0 - eps_f * eps_b
        if not np.isfinite(delta) or abs(delta) < BREAKDOWN_RTOL:
            raise _Breakdown
        min_pivot = min(min_pivot, abs(delta))
        inv = 1.0 / delta
        f_new = np.empty(k)
        b_new = np.empty(k)
        f_new[:-1] = inv * f
        f_new[-1] = 0.0
        f_new[1:] -= (eps_f * inv) * b
        b_new[0] = 0.0
        b_new[1:] = inv * b
        b_new[:-1] -= (eps_b * inv) * f
        eps_x = float(head @ x)
        x_new = np.empty(k)
        x_new[:-1] = x
        x_new[-1] = 0.0
        x_new += (rhs[k - 1] - eps_x) * b_new
        f, b, x = f_new, b_new, x_new
    if not np.all(np.isfinite(x)):
        raise _Breakdown
    return x, min_pivot


def dense_solve(t: ToeplitzPayoff, rhs: np.ndarray) -> SolveReport:
    """LU with partial pivoting on the materialized matrix.

    Raises Singular when the factorization is rank-deficient at
    ``1e-12 * scale`` or the refined solution still misses the residual
    bound.
    """
    rhs = _check_system(t, rhs)
    dense = t.dense()
    with warnings.catch_warnings():
        # exact singularity is detected below through the pivots
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(dense, check_finite=False)
    pivots = np.abs(np.diag(lu))
    tol = SINGULAR_RTOL * max(t.scale, 1e-300)
    if pivots.min() < tol:
        raise Singular(f"rank-deficient at tolerance {tol:g}")
    sol = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    if not _residual_ok(t, sol, rhs):
        # one step of iterative refinement rescues mildly ill-conditioned systems
        sol = sol + scipy.linalg.lu_solve((lu, piv), rhs - dense @ sol, check_finite=False)
        if not _residual_ok(t, sol, rhs):
            raise Singular("residual bound unattainable; system numerically singular")
    return SolveReport(solution=sol, method="dense-fallback", min_pivot=float(pivots.min()))


def levinson_solve(t: ToeplitzPayoff, rhs: np.ndarray) -> SolveReport:
    """Levinson recursion; transparently reruns densely on breakdown.

    Beyond a few unknowns the recursion runs through scipy's compiled
    Levinson-Durbin (same algorithm, same singular-principal-minor
    breakdown; validated against the in-house recursion in the tests).
    Those reports carry ``min_pivot = nan``, as the library does not
    expose the recursion denominators.
    """
    rhs = _check_system(t, rhs)
    n = t.rows
    if n > _SMALL_N:
        try:
            sol = scipy.linalg.solve_toeplitz(
                (t.diag[n - 1 :: -1], t.diag[n - 1 :]), rhs, check_finite=False
            )
        except np.linalg.LinAlgError:
            return dense_solve(t, rhs)
        if not np.all(np.isfinite(sol)) or not _residual_ok(t, sol, rhs):
            return dense_solve(t, rhs)
        return SolveReport(solution=sol, method="levinson", min_pivot=float("nan"))
    try:
        sol, min_pivot = _levinson_recursion(t, rhs)
    except _Breakdown:
        return dense_solve(t, rhs)
    if not _residual_ok(t, sol, rhs):
        return dense_solve(t, rhs)
    return SolveReport(solution=sol, method="levinson", min_pivot=min_pivot)


def _check_system(t: ToeplitzPayoff, rhs) -> np.ndarray:
    if t.rows != t.cols:
        raise InvalidParameter(f"system must be square, got {t.rows}x{t.cols}")
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (t.rows,):
        raise InvalidParameter(f"rhs length {rhs.shape} != n {t.rows}")
    return rhs
