"""Nonexpansive operators on finite-dimensional sup-norm spaces.

An :class:`Operator` wraps a map ``psi`` on real vectors together with the
constant ``bound`` for which

    || lam * psi(f / lam) - mu * psi(f / mu) || <= bound * |lam - mu|

is claimed to hold. From ``psi`` we build the two value families

    v_n      = psi^n(0) / n                            (n-stage)
    v_lam    = lam * psi((1 - lam) / lam * v_lam)       (lam-discounted)

and numerical checkers for the inequalities relating them.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "NonConvergenceError",
    "Operator",
    "IterationReport",
    "Lemma1Check",
    "Assumption1Check",
    "GapRow",
    "as_value_vector",
    "sup_norm",
    "identity_operator",
    "shift_operator",
    "affine_operator",
    "apply_iterates",
    "n_stage_value",
    "discounted_map",
    "discounted_value",
    "psi_lambda_t",
    "check_lemma1",
    "check_assumption1",
    "tauberian_gap",
]

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 10**6
MIN_LAMBDA_SEPARATION = 1e-4
# fraction of tol the stopping rule may use; the rest absorbs rounding when
# the certificate is recomputed from the returned vector
STOP_FRACTION = 0.5


class NonConvergenceError(RuntimeError):
    """Fixed-point iteration hit its cap; ``last`` holds the final iterate."""

    def __init__(self, message, last=None, residual=None):
        super().__init__(message)
        self.last = last
        self.residual = residual


def sup_norm(f):
    return float(np.max(np.abs(f))) if np.size(f) else 0.0


def as_value_vector(f, dim=None):
    """Validate ``f`` as a finite 1-d float vector of length ``dim``."""
    v = np.asarray(f, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"value vector must be 1-d, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim} entries, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("value vector has non-finite entries")
    return v


@dataclass(frozen=True)
class Operator:
    """A map on R^dim, assumed nonexpansive in the sup-norm.

    ``bound`` is the declared constant in the scaling inequality above and
    ``payoff_bound`` bounds ||psi(0)||.
    """

    apply: Callable[[np.ndarray], np.ndarray]
    dim: int
    bound: float
    payoff_bound: float
    name: str = ""

    def __call__(self, f):
        f = as_value_vector(f, self.dim)
        out = np.asarray(self.apply(f), dtype=float)
        if out.shape != (self.dim,):
            raise ValueError(f"operator {self.name!r} returned shape {out.shape}")
        return out


@dataclass(frozen=True)
class IterationReport:
    parameter: float
    iterations_used: int
    residual: float
    value: np.ndarray


def identity_operator(dim):
    return Operator(lambda f: f.copy(), dim, bound=0.0, payoff_bound=0.0, name="identity")


def shift_operator(dim, c):
    """f -> f + c: the operator of a game paying ``c`` at every stage."""
    c = float(c)
    return Operator(lambda f: f + c, dim, bound=abs(c), payoff_bound=abs(c), name=f"shift({c:g})")


def affine_operator(g, P):
    """f -> g + P f for a row-substochastic matrix P."""
    g = np.asarray(g, dtype=float)
    P = np.asarray(P, dtype=float)
    if np.any(P < 0) or np.any(P.sum(axis=1) > 1 + 1e-12):
        raise ValueError("P must be nonnegative with row sums at most 1")
    gn = sup_norm(g)
    return Operator(lambda f: g + P @ f, g.shape[0], bound=gn, payoff_bound=gn, name="affine")


def _check_lambda(lam):
    if not (0.0 < lam <= 1.0):
        raise ValueError(f"discount factor must lie in (0, 1], got {lam!r}")
    return float(lam)


def apply_iterates(op, f, n):
    """Return psi^n(f); psi^0 is the identity."""
    if n < 0:
        raise ValueError("number of iterates must be nonnegative")
    f = as_value_vector(f, op.dim)
    for _ in range(n):
        f = op(f)
    return f


def n_stage_value(op, n):
    """v_n = psi^n(0) / n, accumulated unnormalized and divided once."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return apply_iterates(op, np.zeros(op.dim), n) / n


def discounted_map(op, lam, f):
    """f -> lam * psi((1 - lam) / lam * f), a (1 - lam)-contraction."""
    lam = _check_lambda(lam)
    f = as_value_vector(f, op.dim)
    return lam * op(((1.0 - lam) / lam) * f)


def discounted_value(op, lam, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Fixed point v_lam of :func:`discounted_map`, certified to ``tol``.

    Iterates from 0 until ((1 - lam) / lam) * ||f_{k+1} - f_k|| falls to
    STOP_FRACTION * tol. That quantity bounds the sup-norm distance from
    f_{k+1} to the true fixed point and is returned as ``residual``.
    """
    lam = _check_lambda(lam)
    if tol <= 0:
        raise ValueError("tol must be positive")
    factor = (1.0 - lam) / lam
    f = np.zeros(op.dim)
    bound = math.inf
    for k in range(1, max_iter + 1):
        nxt = lam * op(factor * f)
        bound = factor * sup_norm(nxt - f)
        f = nxt
        if bound <= STOP_FRACTION * tol:
            return IterationReport(parameter=lam, iterations_used=k, residual=bound, value=f)
    raise NonConvergenceError(
        f"no convergence for lambda={lam:g} within {max_iter} iterations "
        f"(error bound {bound:.3e})",
        last=f,
        residual=bound,
    )


def psi_lambda_t(op, lam, t, f):
    """t-fold iterate of the discounted map; t = 0 returns f."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    lam = _check_lambda(lam)
    f = as_value_vector(f, op.dim)
    for _ in range(t):
        f = discounted_map(op, lam, f)
    return f


@dataclass(frozen=True)
class Lemma1Check:
    """Slacks are right side minus left side; negative means violated."""

    contraction_holds: bool
    contraction_slack: float
    comparison_holds: bool
    comparison_slack: float


def check_lemma1(op, f, g, n, t, lam, slack=1e-9):
    """Evaluate both iterate inequalities at (f, g, n, t, lam).

    (i)  ||Psi^t_lam(f) - Psi^t_lam(g)|| <= (1 - lam)^t ||f - g||
    (ii) ||Psi^t_{1/n}(f) - psi^t((n - t) f) / n||
             <= (C + ||f||) * (t/n - 1 + (1 - 1/n)^t)
    """
    if not (1 <= t <= n):
        raise ValueError(f"need 1 <= t <= n, got t={t}, n={n}")
    f = as_value_vector(f, op.dim)
    g = as_value_vector(g, op.dim)

    lhs_i = sup_norm(psi_lambda_t(op, lam, t, f) - psi_lambda_t(op, lam, t, g))
    rhs_i = (1.0 - lam) ** t * sup_norm(f - g)

    inv = 1.0 / n
    lhs_ii = sup_norm(psi_lambda_t(op, inv, t, f) - apply_iterates(op, (n - t) * f, t) / n)
    # t/n - 1 + (1-1/n)^t suffers cancellation for t << n; expm1/log1p keep it accurate
    factor = t * inv + math.expm1(t * math.log1p(-inv)) if n > 1 else t * inv - 1.0
    rhs_ii = (op.bound + sup_norm(f)) * factor

    si = rhs_i - lhs_i
    sii = rhs_ii - lhs_ii
    return Lemma1Check(si >= -slack, si, sii >= -slack, sii)


@dataclass(frozen=True)
class Assumption1Check:
    estimate: float
    declared: float
    passed: bool
    samples: int


def check_assumption1(op, samples, rng_seed, slack=1e-9, scale=None):
    """Estimate the scaling constant by sampling (lam, mu, f).

    Reports the largest observed ratio
    ||lam psi(f/lam) - mu psi(f/mu)|| / |lam - mu| and whether it stays
    within the declared ``op.bound`` plus ``slack``.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(rng_seed)
    if scale is None:
        scale = 10.0 * max(op.payoff_bound, 1.0)
    worst = 0.0
    for s in range(samples):
        # near-equal pairs would only measure rounding error of size ~1e-15 / |lam - mu|
        while True:
            if s % 2:
                lam, mu = 10.0 ** rng.uniform(-4, 0, size=2)
            else:
                lam, mu = 1.0 - rng.random(2)
            if abs(lam - mu) >= MIN_LAMBDA_SEPARATION:
                break
        f = rng.uniform(-scale, scale, size=op.dim)
        diff = sup_norm(lam * op(f / lam) - mu * op(f / mu))
        worst = max(worst, diff / abs(lam - mu))
    return Assumption1Check(worst, op.bound, worst <= op.bound + slack, samples)


@dataclass(frozen=True)
class GapRow:
    n: int
    gap: float
    v_n: np.ndarray
    v_lambda: np.ndarray
    iterations: int


def _thread_count():
    try:
        return max(1, int(os.environ.get("TAUBER_THREADS", "1")))
    except ValueError:
        return 1


def tauberian_gap(op, n_schedule: Sequence[int], tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Sup-norm gaps ||v_n - v_{1/n}|| along an increasing schedule of n.

    The n-stage values share one pass of psi-iterates. Discounted values are
    independent fixed-point problems and run on up to ``TAUBER_THREADS``
    worker threads.
    """
    sched = [int(n) for n in n_schedule]
    if not sched:
        raise ValueError("schedule must be nonempty")
    if any(n < 1 for n in sched) or any(b <= a for a, b in zip(sched, sched[1:])):
        raise ValueError("schedule must be strictly increasing positive integers")

    stage_values = {}
    f = np.zeros(op.dim)
    wanted = set(sched)
    for k in range(1, sched[-1] + 1):
        f = op(f)
        if k in wanted:
            stage_values[k] = f / k

    def solve(n):
        return discounted_value(op, 1.0 / n, tol=tol, max_iter=max_iter)

    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        reports = list(pool.map(solve, sched))

    return [
        GapRow(n, sup_norm(stage_values[n] - rep.value), stage_values[n], rep.value, rep.iterations_used)
        for n, rep in zip(sched, reports)
    ]
