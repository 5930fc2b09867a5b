"""Seeded randomized property suites for operators and matrix games.

Each suite returns a :class:`SuiteResult`; the command-line ``check``
subcommand turns a failed suite into exit status 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matrix_game import GameSolution, MatrixGame, solve_matrix_game, verify_solution
from .operators import Operator, check_assumption1, check_lemma1, sup_norm
from .stochastic import GeneratorConfig, random_game, shapley_operator

__all__ = [
    "SuiteResult",
    "SUITES",
    "random_shapley_operators",
    "expanding_operator",
    "nonexpansive_excess",
    "monotone_excess",
    "homogeneity_error",
    "operator_suite",
    "lemma1_suite",
    "assumption1_suite",
    "matrix_suite",
    "run_suite",
]

DEFAULT_SLACK = 1e-9


@dataclass
class SuiteResult:
    name: str
    trials: int
    checks: int = 0
    failures: list = field(default_factory=list)
    worst: dict = field(default_factory=dict)

    @property
    def passed(self):
        return not self.failures

    def record(self, label, excess, slack, context=""):
        """Count one check whose violation amount is ``excess`` (> slack fails)."""
        self.checks += 1
        self.worst[label] = max(self.worst.get(label, -np.inf), excess)
        if excess > slack:
            self.failures.append(f"{label} violated by {excess:.3e} {context}".rstrip())

    def lines(self):
        status = "PASS" if self.passed else "FAIL"
        out = [f"{status} {self.name}: {self.checks} checks over {self.trials} trials"]
        for label in sorted(self.worst):
            out.append(f"  worst {label}: {self.worst[label]:.3e}")
        out.extend("  " + msg for msg in self.failures[:20])
        if len(self.failures) > 20:
            out.append(f"  ... {len(self.failures) - 20} more failures")
        return out


def random_shapley_operators(trials, seed, max_states=4, max_actions=3):
    """Yield (trial, game, operator) for seeded random games."""
    rng = np.random.default_rng(seed)
    for t in range(trials):
        cfg = GeneratorConfig(
            seed=int(rng.integers(2**32)),
            num_states=int(rng.integers(1, max_states + 1)),
            actions1=int(rng.integers(1, max_actions + 1)),
            actions2=int(rng.integers(1, max_actions + 1)),
        )
        game = random_game(cfg)
        yield t, game, shapley_operator(game)


def expanding_operator(dim=3):
    """f -> 2f: a negative control that is not nonexpansive."""
    return Operator(lambda f: 2.0 * f, dim, bound=0.0, payoff_bound=1.0, name="expanding")


def _sample(rng, op, size=None):
    scale = 10.0 * max(op.payoff_bound, 1.0)
    return rng.uniform(-scale, scale, size=(op.dim,) if size is None else size)


def nonexpansive_excess(op, f, g):
    return sup_norm(op(f) - op(g)) - sup_norm(f - g)


def monotone_excess(op, f, g):
    """Largest entry of psi(f) - psi(g) for f <= g (should be <= 0)."""
    return float(np.max(op(f) - op(g)))


def homogeneity_error(op, f, c):
    return sup_norm(op(f + c) - op(f) - c)


def _operator_laws(result, op, rng, samples, slack, context):
    for _ in range(samples):
        f, g = _sample(rng, op), _sample(rng, op)
        result.record("nonexpansive", nonexpansive_excess(op, f, g), slack, context)
        lo = np.minimum(f, g)
        hi = np.maximum(f, g)
        result.record("monotone", monotone_excess(op, lo, hi), slack, context)
        c = float(rng.uniform(-10.0, 10.0))
        result.record("homogeneity", homogeneity_error(op, f, c), slack, context)


def operator_suite(trials=100, seed=0, samples=20, slack=DEFAULT_SLACK, adversarial=False):
    """Nonexpansiveness, monotonicity, additive homogeneity and the scaling bound."""
    result = SuiteResult("operator" + (" (adversarial)" if adversarial else ""), trials)
    rng = np.random.default_rng(seed + 1)
    if adversarial:
        ops = ((t, expanding_operator()) for t in range(trials))
    else:
        ops = ((t, op) for t, _, op in random_shapley_operators(trials, seed))
    for t, op in ops:
        ctx = f"(trial {t})"
        _operator_laws(result, op, rng, samples, slack, ctx)
        a1 = check_assumption1(op, samples, int(rng.integers(2**32)), slack=slack)
        result.record("assumption1", a1.estimate - a1.declared, slack, ctx)
    return result


def assumption1_suite(trials=100, seed=0, samples=50, slack=DEFAULT_SLACK):
    result = SuiteResult("assumption1", trials)
    rng = np.random.default_rng(seed + 2)
    for t, _, op in random_shapley_operators(trials, seed):
        a1 = check_assumption1(op, samples, int(rng.integers(2**32)), slack=slack)
        result.record("assumption1", a1.estimate - a1.declared, slack, f"(trial {t})")
    return result


def lemma1_suite(trials=100, seed=0, draws=50, max_n=50, slack=DEFAULT_SLACK):
    """Both iterate inequalities on random (f, g, n, t, lambda) draws."""
    result = SuiteResult("lemma1", trials)
    rng = np.random.default_rng(seed + 3)
    for t_idx, _, op in random_shapley_operators(trials, seed):
        for _ in range(draws):
            n = int(rng.integers(1, max_n + 1))
            t = int(rng.integers(1, n + 1))
            lam = float(1.0 - rng.random()) if rng.random() < 0.5 else float(10 ** rng.uniform(-3, 0))
            f, g = _sample(rng, op), _sample(rng, op)
            chk = check_lemma1(op, f, g, n, t, lam, slack=slack)
            ctx = f"(trial {t_idx}, n={n}, t={t}, lambda={lam:.3g})"
            result.record("lemma1(i)", -chk.contraction_slack, slack, ctx)
            result.record("lemma1(ii)", -chk.comparison_slack, slack, ctx)
    return result


def matrix_suite(trials=100, seed=0, slack=DEFAULT_SLACK, max_size=5):
    """Shift, scaling, exchange symmetry and duality gap of the LP solver."""
    result = SuiteResult("matrix", trials)
    rng = np.random.default_rng(seed + 4)
    for t in range(trials):
        m, n = (int(x) for x in rng.integers(1, max_size + 1, size=2))
        M = rng.uniform(-1.0, 1.0, size=(m, n))
        ctx = f"(trial {t}, {m}x{n})"
        sol = solve_matrix_game(M)
        result.record("duality_gap", sol.duality_gap, slack, ctx)

        c = float(rng.uniform(-5.0, 5.0))
        shifted = solve_matrix_game(M + c)
        result.record("shift", abs(shifted.value - sol.value - c), slack, ctx)
        cross = GameSolution(sol.value + c, sol.row_strategy, sol.col_strategy, 0.0)
        result.record("shift_strategies", verify_solution(MatrixGame(M + c), cross), slack, ctx)

        alpha = float(rng.uniform(0.1, 10.0))
        scaled = solve_matrix_game(alpha * M)
        result.record("scale", abs(scaled.value - alpha * sol.value), slack, ctx)
        cross = GameSolution(alpha * sol.value, sol.row_strategy, sol.col_strategy, 0.0)
        result.record("scale_strategies", verify_solution(MatrixGame(alpha * M), cross), slack, ctx)

        swapped = solve_matrix_game(-M.T)
        result.record("exchange", abs(swapped.value + sol.value), slack, ctx)
    return result


SUITES = {
    "operator": operator_suite,
    "lemma1": lemma1_suite,
    "assumption1": assumption1_suite,
    "matrix": matrix_suite,
}


def run_suite(name, trials=100, seed=0, adversarial=False):
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    if adversarial:
        if name != "operator":
            raise ValueError("the adversarial fixture applies to the operator suite")
        return operator_suite(trials=trials, seed=seed, adversarial=True)
    return SUITES[name](trials=trials, seed=seed)
