"""Closed-form discounted values of the one-shot reductions G, G1, G2, G3, G4.

Everything is driven by

    f(n, lam) = (1 - 2^-n)(1 - lam^2) / (1 + 2^(n+1) lam (1 - lam)^-n - lam)

and the one-shot payoff g(a, b) = (1 - f(b)) / (1 - f(a) f(b)). Because g
increases in f(a) and decreases in f(b), each player simply maximizes f over
their own action set, an arithmetic progression of multiples of ``r``. The
unconstrained maximizer sits near -log2(sqrt(2 lam)); whether it is an even
or odd multiple of ``r`` decides whether player 1 has an advantage, which
makes the discounted value of G oscillate as lam -> 0.

Only discounted quantities are computed here. The n-stage limits of these
games are carried as labelled inputs, never computed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

__all__ = [
    "WindowError",
    "ActionSet",
    "CounterexampleParams",
    "ArgmaxResult",
    "LimitReport",
    "DistinctLimitsSummary",
    "f_lambda",
    "one_minus_f",
    "g_lambda",
    "target_action",
    "window_limit",
    "argmax_f",
    "value_G",
    "value_G_sym",
    "value_G1",
    "value_G2",
    "value_G3",
    "value_G4",
    "sweep",
    "dyadic_grid",
    "aligned_lambda",
    "oscillation_scan",
    "distinct_limits_report",
    "n_m_gamma1",
    "n_m_gamma2",
    "SWEEP_COLUMNS",
]

LN2 = math.log(2.0)


class WindowError(RuntimeError):
    """The maximizer of f landed on the edge of the scanned window."""

    def __init__(self, message, lam=None, action=None):
        super().__init__(message)
        self.lam = lam
        self.action = action


class ActionSet(enum.Enum):
    MULTIPLES_OF_R = "rN"
    EVEN_MULTIPLES_OF_R = "2rN"
    ODD_MULTIPLES_OF_R = "r(2N+1)"
    NATURALS = "N"

    def first_and_step(self, r):
        if self is ActionSet.MULTIPLES_OF_R:
            return 0, r
        if self is ActionSet.EVEN_MULTIPLES_OF_R:
            return 0, 2 * r
        if self is ActionSet.ODD_MULTIPLES_OF_R:
            return r, 2 * r
        return 0, 1


@dataclass(frozen=True)
class CounterexampleParams:
    r: int = 2
    window_slack: int = 2
    x: float = 0.6

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 2:
            raise ValueError(f"r must be an integer >= 2, got {self.r!r}")
        if int(self.window_slack) != self.window_slack or self.window_slack < 1:
            raise ValueError(f"window_slack must be a positive integer, got {self.window_slack!r}")
        if not (0.5 < self.x < 1.0):
            raise ValueError(f"x must lie in (1/2, 1), got {self.x!r}")


def _check_lambda(lam):
    if not (0.0 < lam <= 1.0):
        raise ValueError(f"discount factor must lie in (0, 1], got {lam!r}")


def _log_tail(n, lam):
    # log of 2^(n+1) lam (1 - lam)^-n
    return (n + 1) * LN2 + math.log(lam) - n * math.log1p(-lam)


def f_lambda(n, lam):
    """f(n, lam) in [0, 1), evaluated in the log domain so large n cannot overflow."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    _check_lambda(lam)
    if n == 0 or lam == 1.0:
        return 0.0
    num = -math.expm1(-n * LN2) * (1.0 - lam) * (1.0 + lam)
    log_e = _log_tail(n, lam)
    if log_e < 0.0:
        return num / (1.0 - lam + math.exp(log_e))
    u = math.exp(-log_e)
    return num * u / (1.0 + (1.0 - lam) * u)


def one_minus_f(n, lam):
    """1 - f(n, lam) without cancellation when f is close to 1.

    With E = 2^(n+1) lam (1 - lam)^-n,
    1 - f = (E - lam (1 - lam) + 2^-n (1 - lam^2)) / (1 + E - lam),
    and E >= 2 lam keeps the numerator free of cancellation.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    _check_lambda(lam)
    if n == 0 or lam == 1.0:
        return 1.0
    a = lam * (1.0 - lam)
    b = math.exp(-n * LN2) * (1.0 - lam) * (1.0 + lam)
    log_e = _log_tail(n, lam)
    if log_e < 0.0:
        e = math.exp(log_e)
        return (e - a + b) / (1.0 + e - lam)
    u = math.exp(-log_e)
    return (1.0 - a * u + b * u) / (1.0 + (1.0 - lam) * u)


def _g_from_f(fa, oma, fb, omb):
    # 1 - fa*fb = (1 - fa) + fa (1 - fb)
    return omb / (oma + fa * omb)


def g_lambda(a, b, lam):
    """One-shot payoff (1 - f(b)) / (1 - f(a) f(b)), in (0, 1]."""
    return _g_from_f(f_lambda(a, lam), one_minus_f(a, lam), f_lambda(b, lam), one_minus_f(b, lam))


def target_action(lam):
    """-ln(sqrt(2 lam)) / ln 2, where the unconstrained maximizer of f sits."""
    _check_lambda(lam)
    return -(LN2 + math.log(lam)) / (2.0 * LN2)


def window_limit(lam, params):
    return max(math.ceil(2.0 * target_action(lam)), 0) + params.window_slack * params.r


class ArgmaxResult(NamedTuple):
    action: int
    max_value: float
    one_minus_max: float
    window: int


def argmax_f(lam, kind, params):
    """Exhaustive maximization of f(., lam) over a progression within the window.

    Ties go to the smallest action. The window always holds at least three
    elements of the progression; a maximizer on its last element raises
    :class:`WindowError`.
    """
    _check_lambda(lam)
    kind = ActionSet(kind)
    start, step = kind.first_and_step(params.r)
    limit = max(window_limit(lam, params), start + 2 * step)
    best_a, best_f = start, f_lambda(start, lam)
    a = start + step
    while a <= limit:
        fa = f_lambda(a, lam)
        if fa > best_f:
            best_a, best_f = a, fa
        a += step
    last = a - step
    if best_a == last:
        raise WindowError(
            f"maximizer {best_a} of f over {kind.value} is on the window edge "
            f"at lambda={lam:.6g}; increase window_slack",
            lam=lam,
            action=best_a,
        )
    return ArgmaxResult(best_a, best_f, one_minus_f(best_a, lam), limit)


def _best(lam, kind, params):
    res = argmax_f(lam, kind, params)
    return res.max_value, res.one_minus_max, res.action


def value_G(lam, params):
    """Value of G: player 1 on rN, player 2 on 2rN."""
    fa, oma, _ = _best(lam, ActionSet.MULTIPLES_OF_R, params)
    fb, omb, _ = _best(lam, ActionSet.EVEN_MULTIPLES_OF_R, params)
    return _g_from_f(fa, oma, fb, omb)


def value_G_sym(lam, params):
    """Value when both players use rN: 1 / (1 + max f)."""
    fa, _, _ = _best(lam, ActionSet.MULTIPLES_OF_R, params)
    return 1.0 / (1.0 + fa)


def _value_odd(lam, params):
    fa, oma, _ = _best(lam, ActionSet.MULTIPLES_OF_R, params)
    fb, omb, _ = _best(lam, ActionSet.ODD_MULTIPLES_OF_R, params)
    return _g_from_f(fa, oma, fb, omb)


def value_G1(lam, params):
    """lam/2 + (1 - lam) * value_G: one stage at payoff 1/2 before G."""
    return lam / 2.0 + (1.0 - lam) * value_G(lam, params)


def value_G2(lam, params):
    """As value_G1 with player 2 restricted to odd multiples r(2N+1)."""
    return lam / 2.0 + (1.0 - lam) * _value_odd(lam, params)


def value_G3(lam, params):
    """lam (2 - lam) / 2 + (1 - lam)^2 / (1 + max over rN of f)."""
    return lam * (2.0 - lam) / 2.0 + (1.0 - lam) ** 2 * value_G_sym(lam, params)


def value_G4(lam, params):
    """Player 2 picks between continuing into G3 and receiving x forever."""
    return lam / 2.0 + (1.0 - lam) * min(value_G3(lam, params), params.x)


def n_m_gamma1(m, r):
    """Stage counts 2^(4rm + 2r + 1) used to label the first game's n-stage subsequence."""
    return 2 ** (4 * r * m + 2 * r + 1)


def n_m_gamma2(m, r):
    """Stage counts 2^(4rm + 1) for the odd-multiples variant."""
    return 2 ** (4 * r * m + 1)


SWEEP_COLUMNS = (
    "lambda",
    "value_G",
    "value_G_sym",
    "value_G1",
    "value_G2",
    "value_G3",
    "value_G4",
    "argmax_rN",
    "argmax_2rN",
    "argmax_odd",
)


def sweep(params, lambdas):
    """One row (dict keyed by SWEEP_COLUMNS) per discount factor."""
    rows = []
    for lam in lambdas:
        rows.append(
            {
                "lambda": lam,
                "value_G": value_G(lam, params),
                "value_G_sym": value_G_sym(lam, params),
                "value_G1": value_G1(lam, params),
                "value_G2": value_G2(lam, params),
                "value_G3": value_G3(lam, params),
                "value_G4": value_G4(lam, params),
                "argmax_rN": argmax_f(lam, ActionSet.MULTIPLES_OF_R, params).action,
                "argmax_2rN": argmax_f(lam, ActionSet.EVEN_MULTIPLES_OF_R, params).action,
                "argmax_odd": argmax_f(lam, ActionSet.ODD_MULTIPLES_OF_R, params).action,
            }
        )
    return rows


def dyadic_grid(lambda_min, j_min=1):
    """[2^-j for j = j_min, j_min + 1, ...] down to the first value <= lambda_min."""
    if not (0.0 < lambda_min <= 1.0):
        raise ValueError("lambda_min must lie in (0, 1]")
    out = []
    j = j_min
    while True:
        lam = 2.0 ** -j
        out.append(lam)
        if lam <= lambda_min:
            return out
        j += 1


def aligned_lambda(m):
    """Discount factor 2^(-2m-1), for which -log2(sqrt(2 lam)) equals m."""
    return 2.0 ** (-2 * m - 1)


@dataclass
class LimitReport:
    lambdas: list
    values: list
    even: list = field(default_factory=list)  # (m, lambda, argmax, value_G)
    odd: list = field(default_factory=list)
    tail_threshold: float = 0.0
    liminf: float = 0.0
    limsup: float = 0.0
    flags: dict = field(default_factory=dict)

    @property
    def gap(self):
        return self.limsup - self.liminf


def _validate_grid(lambda_grid, reach=1e-10):
    grid = [float(x) for x in lambda_grid]
    if not grid:
        raise ValueError("lambda grid is empty")
    if any(not (0.0 < x <= 1.0) for x in grid):
        raise ValueError("lambda grid values must lie in (0, 1]")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("lambda grid must be strictly decreasing")
    if grid[-1] > reach:
        raise ValueError(f"lambda grid must reach {reach:g} or below, smallest is {grid[-1]:g}")
    return grid


def oscillation_scan(params, lambda_grid: Sequence[float]):
    """Estimate liminf / limsup of value_G as lambda -> 0.

    Besides the supplied grid, value_G is evaluated on lambda = 2^(-2m-1)
    down to the smallest grid value. An exhaustive scan of f over all of N
    classifies each such lambda by whether its maximizer is an even or an
    odd multiple of r. The estimates are the min and max of value_G over
    those aligned points in the tail lambda <= sqrt(min grid).
    """
    grid = _validate_grid(lambda_grid)
    values = [value_G(lam, params) for lam in grid]
    report = LimitReport(lambdas=grid, values=values)
    r = params.r
    m = 1
    while aligned_lambda(m) >= grid[-1]:
        lam = aligned_lambda(m)
        best = argmax_f(lam, ActionSet.NATURALS, params).action
        entry = (m, lam, best, value_G(lam, params))
        if best % (2 * r) == 0:
            report.even.append(entry)
        elif best % r == 0:
            report.odd.append(entry)
        m += 1

    report.tail_threshold = math.sqrt(grid[-1])
    tail = [e[3] for e in report.even + report.odd if e[1] <= report.tail_threshold]
    if not tail:
        tail = [e[3] for e in report.even + report.odd] or values
    report.liminf = min(tail)
    report.limsup = max(tail)
    report.flags = {
        "oscillates": report.limsup > report.liminf,
        "limsup_above_half": report.limsup > 0.5,
        "has_even_and_odd": bool(report.even) and bool(report.odd),
    }
    return report


@dataclass(frozen=True)
class DistinctLimitsSummary:
    x: float
    lambdas: tuple
    values_G4: tuple
    discounted_estimate: float
    deviation_first: float
    deviation_last: float
    envelope: tuple
    n_stage_limit: float
    n_stage_label: str = "asserted limit, not computed"

    def lines(self):
        return [
            f"discounted limit estimate (value_G4 at lambda={self.lambdas[-1]:.12g}): "
            f"{self.discounted_estimate:.12g}",
            f"deviation from 1/2: {self.deviation_first:.12g} at lambda={self.lambdas[0]:.12g}, "
            f"{self.deviation_last:.12g} at lambda={self.lambdas[-1]:.12g}",
            f"tail envelope of value_G4: [{self.envelope[0]:.12g}, {self.envelope[1]:.12g}]",
            f"n-stage limit: {self.n_stage_limit:.12g} ({self.n_stage_label})",
            f"discounted 1/2 vs n-stage {self.n_stage_limit:.12g}: distinct limits",
        ]


def distinct_limits_report(params, lambda_grid):
    """Juxtapose the computed discounted limit of G4 with the n-stage limit x."""
    grid = _validate_grid(lambda_grid)
    vals = [value_G4(lam, params) for lam in grid]
    half = len(vals) // 2
    tail = vals[half:] or vals
    return DistinctLimitsSummary(
        x=params.x,
        lambdas=tuple(grid),
        values_G4=tuple(vals),
        discounted_estimate=vals[-1],
        deviation_first=abs(vals[0] - 0.5),
        deviation_last=abs(vals[-1] - 0.5),
        envelope=(min(tail), max(tail)),
        n_stage_limit=params.x,
    )
