"""Finite zero-sum stochastic games and deterministic dynamic programs.

Both are turned into :class:`~tauber.operators.Operator` instances so the
n-stage and discounted values come from the same machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matrix_game import SolverError, matrix_game_values
from .operators import (
    DEFAULT_TOL,
    Operator,
    discounted_value,
    n_stage_value,
)

__all__ = [
    "FiniteGame",
    "DPProblem",
    "GeneratorConfig",
    "shapley_operator",
    "dp_operator",
    "random_game",
    "game_values",
]

PROB_TOL = 1e-12


@dataclass(frozen=True)
class FiniteGame:
    """Finite stochastic game with per-state action sets.

    ``payoff[k]`` has shape (m_k, n_k); ``transition[k]`` has shape
    (m_k, n_k, K) and each ``transition[k][i, j]`` is a distribution over
    next states.
    """

    payoff: tuple
    transition: tuple
    state_names: tuple = field(default=())

    def __post_init__(self):
        pay = tuple(np.array(g, dtype=float) for g in self.payoff)
        trans = tuple(np.array(q, dtype=float) for q in self.transition)
        K = len(pay)
        if K == 0 or len(trans) != K:
            raise ValueError("payoff and transition must list the same, nonzero number of states")
        for k, (g, q) in enumerate(zip(pay, trans)):
            if g.ndim != 2 or min(g.shape) < 1:
                raise ValueError(f"state {k}: payoff must be a non-empty matrix, got {g.shape}")
            if q.shape != g.shape + (K,):
                raise ValueError(f"state {k}: transition shape {q.shape}, expected {g.shape + (K,)}")
            if not (np.all(np.isfinite(g)) and np.all(np.isfinite(q))):
                raise ValueError(f"state {k}: non-finite entries")
            if np.any(q < 0) or np.max(np.abs(q.sum(axis=-1) - 1.0)) > PROB_TOL:
                raise ValueError(f"state {k}: transition rows must be distributions")
            g.setflags(write=False)
            q.setflags(write=False)
        names = tuple(self.state_names) or tuple(str(k) for k in range(K))
        if len(names) != K:
            raise ValueError("state_names length does not match number of states")
        object.__setattr__(self, "payoff", pay)
        object.__setattr__(self, "transition", trans)
        object.__setattr__(self, "state_names", names)

    @property
    def num_states(self):
        return len(self.payoff)

    @property
    def payoff_bound(self):
        return max(float(np.max(np.abs(g))) for g in self.payoff)

    @property
    def uniform_actions(self):
        return len({g.shape for g in self.payoff}) == 1

    def stage_matrix(self, k, f):
        """Auxiliary one-shot game g(k,i,j) + sum_k' q(k,i,j)(k') f(k')."""
        return self.payoff[k] + self.transition[k] @ f


@dataclass(frozen=True)
class DPProblem:
    payoff: np.ndarray
    successors: tuple

    def __post_init__(self):
        g = np.array(self.payoff, dtype=float)
        succ = tuple(tuple(int(s) for s in row) for row in self.successors)
        if g.ndim != 1 or len(succ) != g.shape[0]:
            raise ValueError("need one successor list per state")
        for k, row in enumerate(succ):
            if not row:
                raise ValueError(f"state {k} has no successor")
            if any(s < 0 or s >= g.shape[0] for s in row):
                raise ValueError(f"state {k} has an out-of-range successor")
        g.setflags(write=False)
        object.__setattr__(self, "payoff", g)
        object.__setattr__(self, "successors", succ)

    @property
    def num_states(self):
        return self.payoff.shape[0]


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    num_states: int = 3
    actions1: int = 2
    actions2: int = 2
    payoff_low: float = -1.0
    payoff_high: float = 1.0
    sparsity: float = 0.0

    def __post_init__(self):
        if self.num_states < 1 or self.actions1 < 1 or self.actions2 < 1:
            raise ValueError("state and action counts must be positive")
        if not self.payoff_low <= self.payoff_high:
            raise ValueError("payoff_low must not exceed payoff_high")
        if not 0.0 <= self.sparsity < 1.0:
            raise ValueError("sparsity must lie in [0, 1)")


def shapley_operator(game: FiniteGame) -> Operator:
    """psi(f)(k) = val( g(k,.,.) + q(k,.,.) f ) over mixed actions.

    The declared scaling constant is ||g||; checking it is left to
    :func:`~tauber.operators.check_assumption1`.
    """
    K = game.num_states
    if game.uniform_actions:
        G = np.stack(game.payoff)
        Q = np.stack(game.transition)

        def apply(f):
            mats = G + Q @ f
            try:
                return matrix_game_values(mats)
            except SolverError as exc:
                k = exc.index
                raise SolverError(f"state {game.state_names[k]}: {exc}", exc.payoff, exc.gap, k) from exc

    else:

        def apply(f):
            out = np.empty(K)
            for k in range(K):
                try:
                    out[k] = matrix_game_values(game.stage_matrix(k, f)[None])[0]
                except SolverError as exc:
                    raise SolverError(f"state {game.state_names[k]}: {exc}", exc.payoff, exc.gap, k) from exc
            return out

    pb = game.payoff_bound
    return Operator(apply, K, bound=pb, payoff_bound=pb, name="shapley")


def dp_operator(problem: DPProblem) -> Operator:
    """psi(f)(k) = g(k) + max over successors k' of f(k')."""
    g = problem.payoff
    succ = [np.array(row) for row in problem.successors]

    def apply(f):
        return g + np.array([f[s].max() for s in succ])

    pb = float(np.max(np.abs(g)))
    return Operator(apply, problem.num_states, bound=pb, payoff_bound=pb, name="dp")


def random_game(config: GeneratorConfig) -> FiniteGame:
    """Seeded random game; identical configs give identical games."""
    rng = np.random.default_rng(config.seed)
    K, m, n = config.num_states, config.actions1, config.actions2
    payoff = rng.uniform(config.payoff_low, config.payoff_high, size=(K, m, n))
    weights = 1.0 - rng.random((K, m, n, K))  # in (0, 1]
    if config.sparsity > 0:
        mask = rng.random((K, m, n, K)) < config.sparsity
        # never drop a whole row
        keep = rng.integers(0, K, size=(K, m, n))
        np.put_along_axis(mask, keep[..., None], False, axis=-1)
        weights[mask] = 0.0
    trans = weights / weights.sum(axis=-1, keepdims=True)
    return FiniteGame(tuple(payoff), tuple(trans))


def game_values(game, n, lam, tol=DEFAULT_TOL):
    """(v_n, v_lam) from one Shapley operator."""
    op = shapley_operator(game)
    return n_stage_value(op, n), discounted_value(op, lam, tol=tol).value
