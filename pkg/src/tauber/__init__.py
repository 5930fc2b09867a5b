"""Tauberian experiments for zero-sum stochastic games.

Shapley operators of finite and hidden stochastic games, their n-stage and
discounted values, checkers for the inequalities linking the two, and the
closed-form discounted values of a game whose discounted and n-stage values
converge to different limits.
"""

from .matrix_game import GameSolution, MatrixGame, SolverError, solve_matrix_game, verify_solution
from .operators import (
    IterationReport,
    NonConvergenceError,
    Operator,
    apply_iterates,
    check_assumption1,
    check_lemma1,
    discounted_map,
    discounted_value,
    n_stage_value,
    psi_lambda_t,
    tauberian_gap,
)
from .stochastic import (
    DPProblem,
    FiniteGame,
    GeneratorConfig,
    dp_operator,
    game_values,
    random_game,
    shapley_operator,
)
from .hidden import (
    BeliefGrid,
    HiddenGameSpec,
    belief_shapley_operator,
    belief_update,
    hidden_values,
    lipschitz_check,
)

__version__ = "0.1.0"
