"""Minimax solver for finite two-player zero-sum matrix games.

The row player maximizes. Games are solved through the classical linear
program: shift the payoffs to be strictly positive, then

    maximize 1'w  subject to  A w <= 1,  w >= 0,

whose optimum z gives the value 1/z of the shifted game. The column strategy
is w/z and the row strategy is read off the dual prices of the slack columns.
Pivoting follows the least-index (Bland) rule, so degenerate games terminate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SolverError",
    "MatrixGame",
    "GameSolution",
    "solve_matrix_game",
    "verify_solution",
    "matrix_game_values",
]

_PIVOT_EPS = 1e-12


class SolverError(RuntimeError):
    """The linear program could not be solved to the requested accuracy."""

    def __init__(self, message, payoff=None, gap=None, index=None):
        super().__init__(message)
        self.payoff = payoff
        self.gap = gap
        self.index = index


@dataclass(frozen=True)
class MatrixGame:
    payoff: np.ndarray

    def __post_init__(self):
        m = np.array(self.payoff, dtype=float)
        if m.ndim == 1:
            m = m[None, :]
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise ValueError(f"payoff must be a non-empty 2-d matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("payoff matrix has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "payoff", m)

    @property
    def shape(self):
        return self.payoff.shape


@dataclass(frozen=True)
class GameSolution:
    value: float
    row_strategy: np.ndarray
    col_strategy: np.ndarray
    duality_gap: float


def _simplex_max(A, max_pivots):
    """Maximize 1'w s.t. A w <= 1, w >= 0 for A > 0 with a full tableau.

    Returns (z, w, u) where u are the optimal dual prices.
    """
    m, n = A.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = 1.0
    T[m, :n] = -1.0
    basis = list(range(n, n + m))

    for _ in range(max_pivots):
        obj = T[m, :-1]
        candidates = np.flatnonzero(obj < -_PIVOT_EPS)
        if candidates.size == 0:
            break
        col = int(candidates[0])
        column = T[:m, col]
        rows = np.flatnonzero(column > _PIVOT_EPS)
        if rows.size == 0:
            # cannot happen for A > 0: the feasible set is bounded
            raise SolverError("linear program reported unbounded", payoff=A)
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + _PIVOT_EPS * max(1.0, abs(best))]
        row = int(min(tied, key=lambda r: basis[r]))
        T[row] /= T[row, col]
        others = np.arange(m + 1) != row
        T[others] -= np.outer(T[others, col], T[row])
        basis[row] = col
    else:
        raise SolverError(f"pivot limit {max_pivots} exhausted", payoff=A)

    w = np.zeros(n)
    for r, b in enumerate(basis):
        if b < n:
            w[b] = T[r, -1]
    u = T[m, n:n + m].copy()
    return T[m, -1], w, u


def _project_simplex(p):
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def verify_solution(game, sol):
    """Return the duality gap of ``sol`` for ``game``, recomputed from scratch.

    The gap is the largest amount by which either strategy fails to
    guarantee the claimed value: max(value - min_j (x'M)_j, max_i (My)_i - value, 0).
    """
    M = game.payoff if isinstance(game, MatrixGame) else np.asarray(game, dtype=float)
    x = np.asarray(sol.row_strategy, dtype=float)
    y = np.asarray(sol.col_strategy, dtype=float)
    if x.shape != (M.shape[0],) or y.shape != (M.shape[1],):
        raise ValueError(
            f"strategy lengths {x.shape}, {y.shape} do not match game shape {M.shape}"
        )
    row_guarantee = float(np.min(x @ M))
    col_guarantee = float(np.max(M @ y))
    return max(sol.value - row_guarantee, col_guarantee - sol.value, 0.0)


def solve_matrix_game(game, tol=1e-9, max_pivots=10_000):
    """Solve a matrix game, returning optimal mixed strategies and the value.

    Parameters
    ----------
    game : MatrixGame or array_like
        Payoff matrix for the maximizing row player.
    tol : float
        Maximum accepted duality gap of the returned strategies.
    max_pivots : int
        Cycling guard for the simplex loop.

    Raises
    ------
    SolverError
        If the pivot limit is reached or the certified gap exceeds ``tol``.
    """
    if not isinstance(game, MatrixGame):
        game = MatrixGame(game)
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = game.payoff
    shift = M.min() - 1.0
    A = M - shift
    z, w, u = _simplex_max(A, max_pivots)
    y = _project_simplex(w / z)
    x = _project_simplex(u / z)
    value = float(1.0 / z + shift)
    sol = GameSolution(value=value, row_strategy=x, col_strategy=y, duality_gap=0.0)
    gap = verify_solution(game, sol)
    if gap > tol:
        raise SolverError(
            f"duality gap {gap:.3e} exceeds tolerance {tol:.3e} for {M.shape} game",
            payoff=M,
            gap=gap,
        )
    return GameSolution(value=value, row_strategy=x, col_strategy=y, duality_gap=float(gap))


def matrix_game_values(mats, tol=1e-9):
    """Values of a stack of equally shaped matrix games, shape (B, m, n) -> (B,).

    Games with a pure saddle point and 2x2 games are handled in closed form;
    anything else goes through :func:`solve_matrix_game`.
    """
    mats = np.asarray(mats, dtype=float)
    lower = mats.min(axis=2).max(axis=1)
    upper = mats.max(axis=1).min(axis=1)
    values = lower.copy()
    mixed = np.flatnonzero(upper > lower)
    if mixed.size == 0:
        return values
    if mats.shape[1:] == (2, 2):
        sub = mats[mixed]
        a, b = sub[:, 0, 0], sub[:, 0, 1]
        c, d = sub[:, 1, 0], sub[:, 1, 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            closed = (a * d - b * c) / (a + d - b - c)
        # near-constant games make the denominator pure rounding noise; the
        # value always lies between the pure-strategy bounds
        closed = np.where(np.isfinite(closed), closed, lower[mixed])
        values[mixed] = np.clip(closed, lower[mixed], upper[mixed])
        return values
    for idx in mixed:
        try:
            values[idx] = solve_matrix_game(MatrixGame(mats[idx]), tol=tol).value
        except SolverError as exc:
            exc.index = int(idx)
            raise
    return values
