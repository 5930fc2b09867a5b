import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import tauber.counterexample as ce
from oracles import f_exact
from tauber.counterexample import (
    ActionSet,
    CounterexampleParams,
    WindowError,
    aligned_lambda,
    argmax_f,
    distinct_limits_report,
    dyadic_grid,
    f_lambda,
    g_lambda,
    n_m_gamma1,
    n_m_gamma2,
    one_minus_f,
    oscillation_scan,
    sweep,
    target_action,
    value_G,
    value_G1,
    value_G2,
    value_G3,
    value_G4,
    value_G_sym,
)

P = CounterexampleParams()
GRID = dyadic_grid(2.0**-40, j_min=2)


def exact_argmax(lam, start, step, upto):
    return max(range(start, upto + 1, step), key=lambda n: (f_exact(n, lam), -n))


def test_f_boundary_values():
    assert f_lambda(0, 0.3) == 0.0
    assert f_lambda(7, 1.0) == 0.0
    assert one_minus_f(0, 0.3) == 1.0


@pytest.mark.parametrize("lam", [0.5, 0.1, 1e-3, 2.0**-21, 1e-9])
def test_f_against_exact_rationals(lam):
    for n in [1, 2, 3, 10, 17, 40, 90, 200]:
        ex = f_exact(n, lam)
        assert f_lambda(n, lam) == pytest.approx(float(ex), rel=1e-12, abs=1e-300)
        assert one_minus_f(n, lam) == pytest.approx(float(1 - ex), rel=1e-10)


def test_f_huge_n_does_not_overflow():
    for lam in [1e-12, 1e-4, 0.5]:
        v = f_lambda(10_000, lam)
        assert 0.0 <= v < 1.0
        assert one_minus_f(10_000, lam) == pytest.approx(1.0)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10_000), st.floats(1e-12, 1.0))
def test_f_in_unit_interval(n, lam):
    v = f_lambda(n, lam)
    assert 0.0 <= v < 1.0
    assert one_minus_f(n, lam) > 0.0


def test_argmax_small_lambda_near_target():
    lam = 1e-4
    assert target_action(lam) == pytest.approx(6.14, abs=0.01)
    best = exact_argmax(lam, 0, 1, 60)
    assert abs(best - target_action(lam)) <= 2
    assert argmax_f(lam, ActionSet.NATURALS, P).action == best


def test_aligned_lambda_has_integer_target():
    for m in [1, 5, 12]:
        lam = aligned_lambda(m)
        assert target_action(lam) == pytest.approx(m, abs=1e-12)
        assert exact_argmax(Fraction(lam), 0, 1, 4 * m + 10) == m


@pytest.mark.parametrize("kind", list(ActionSet))
@pytest.mark.parametrize("lam", [0.3, 1e-2, 1e-4, 2.0**-27])
def test_argmax_against_wide_exact_scan(kind, lam):
    start, step = kind.first_and_step(P.r)
    res = argmax_f(lam, kind, P)
    assert res.action == exact_argmax(lam, start, step, 200)
    assert res.max_value == f_lambda(res.action, lam)


def test_argmax_at_lambda_one_picks_first_element():
    for kind in ActionSet:
        assert argmax_f(1.0, kind, P).action == kind.first_and_step(P.r)[0]


def test_superset_dominates():
    for lam in GRID[::5]:
        full = argmax_f(lam, ActionSet.MULTIPLES_OF_R, P).max_value
        assert full >= argmax_f(lam, ActionSet.EVEN_MULTIPLES_OF_R, P).max_value
        assert full >= argmax_f(lam, ActionSet.ODD_MULTIPLES_OF_R, P).max_value


def test_window_edge_raises(monkeypatch):
    monkeypatch.setattr(ce, "window_limit", lambda lam, params: 0)
    with pytest.raises(WindowError) as info:
        argmax_f(1e-8, ActionSet.MULTIPLES_OF_R, P)
    assert info.value.lam == 1e-8 and info.value.action == 4


def test_g_identities():
    lam = 0.01
    assert g_lambda(5, 0, lam) == pytest.approx(1.0)
    assert g_lambda(0, 5, lam) == pytest.approx(1 - f_lambda(5, lam))
    fa = f_lambda(6, lam)
    assert g_lambda(6, 6, lam) == pytest.approx(1 / (1 + fa))


def test_g_against_exact():
    lam = Fraction(1, 1000)
    for a, b in [(2, 4), (6, 8), (10, 3)]:
        fa, fb = f_exact(a, lam), f_exact(b, lam)
        assert g_lambda(a, b, float(lam)) == pytest.approx(float((1 - fb) / (1 - fa * fb)), rel=1e-12)


def test_g_monotone_in_both_actions():
    # increasing in f(a), decreasing in f(b): compare along a scan ordered by f
    lam = 1e-3
    acts = sorted(range(0, 40), key=lambda n: f_lambda(n, lam))
    for lo, hi in zip(acts, acts[1:]):
        assert g_lambda(hi, 5, lam) >= g_lambda(lo, 5, lam) - 1e-15
        assert g_lambda(5, hi, lam) <= g_lambda(5, lo, lam) + 1e-15


def test_value_g_at_least_half_on_grid():
    assert all(value_G(lam, P) >= 0.5 - 1e-12 for lam in GRID)
    assert value_G(1.0, P) == 1.0


def test_value_g_sym_above_half_and_shrinking():
    vals = [value_G_sym(lam, P) for lam in GRID]
    assert all(v > 0.5 for v in vals)
    along = [value_G_sym(4.0**-j, P) - 0.5 for j in range(2, 20)]
    assert all(b < a for a, b in zip(along, along[1:]))
    assert value_G_sym(1.0, P) == 1.0


def test_g1_g2_identities():
    for lam in [1.0, 0.2, 1e-5]:
        assert value_G1(lam, P) == pytest.approx(lam / 2 + (1 - lam) * value_G(lam, P))
    assert value_G1(1.0, P) == 0.5 and value_G2(1.0, P) == 0.5


def test_g3_identities():
    for lam in [0.5, 0.01, 2.0**-30]:
        g3 = value_G3(lam, P)
        assert g3 == pytest.approx(lam * (2 - lam) / 2 + (1 - lam) ** 2 * value_G_sym(lam, P), rel=1e-14)
        # player 2 choosing between the two stage-delayed games
        other = lam / 2 + (1 - lam) * min(value_G1(lam, P), value_G2(lam, P))
        assert g3 == pytest.approx(other, abs=1e-12)
    assert value_G3(1.0, P) == 0.5
    dev = [value_G3(4.0**-j, P) - 0.5 for j in range(3, 20)]
    assert all(b < a for a, b in zip(dev, dev[1:]))


def test_g4_branches():
    assert value_G4(1.0, P) == 0.5
    lam = 2.0**-30
    assert value_G3(lam, P) < P.x
    assert value_G4(lam, P) == pytest.approx(lam / 2 + (1 - lam) * value_G3(lam, P))
    big = CounterexampleParams(x=0.55)
    lam = 0.25
    assert value_G3(lam, big) > big.x
    assert value_G4(lam, big) == pytest.approx(lam / 2 + (1 - lam) * big.x)


def test_params_validation():
    for bad in [dict(x=0.4), dict(x=1.0), dict(r=1), dict(window_slack=0)]:
        with pytest.raises(ValueError):
            CounterexampleParams(**bad)


def test_n_m_labels():
    assert n_m_gamma1(0, 2) == 2**5
    assert n_m_gamma1(1, 2) == 2**13
    assert n_m_gamma2(1, 3) == 2**13


def test_dyadic_grid():
    g = dyadic_grid(0.1, j_min=1)
    assert g == [0.5, 0.25, 0.125, 0.0625]
    assert GRID[0] == 0.25 and GRID[-1] == 2.0**-40 and len(GRID) == 39
    with pytest.raises(ValueError):
        dyadic_grid(0.0)


def test_sweep_columns():
    rows = sweep(P, [0.25, 1e-3])
    assert set(rows[0]) == set(ce.SWEEP_COLUMNS)
    assert rows[1]["argmax_2rN"] % 4 == 0 and rows[1]["argmax_odd"] % 4 == 2


def test_oscillation_report():
    rep = oscillation_scan(P, GRID)
    assert rep.flags == {"oscillates": True, "limsup_above_half": True, "has_even_and_odd": True}
    assert rep.limsup > rep.liminf >= 0.5 - 1e-12
    assert rep.gap > 0
    for m, lam, best, _ in rep.even:
        assert best == m and best % 4 == 0
    for m, lam, best, _ in rep.odd:
        assert best % 4 == 2
    again = oscillation_scan(P, GRID)
    assert (again.liminf, again.limsup) == (rep.liminf, rep.limsup)


def test_oscillation_even_subsequence_tends_to_half():
    rep = oscillation_scan(P, GRID)
    even = [v for _, _, _, v in rep.even]
    assert even[-1] - 0.5 < even[0] - 0.5
    assert min(v for _, _, _, v in rep.odd) > 0.6


def test_grid_validation():
    with pytest.raises(ValueError):
        oscillation_scan(P, [0.5, 0.25])
    with pytest.raises(ValueError):
        oscillation_scan(P, [0.25, 0.5, 1e-11])


def test_distinct_limits_summary():
    s = distinct_limits_report(P, GRID)
    assert abs(s.discounted_estimate - 0.5) < 0.01
    assert s.deviation_last < s.deviation_first
    assert s.n_stage_limit == 0.6 and "not computed" in s.n_stage_label
    assert s.envelope[0] <= s.discounted_estimate <= s.envelope[1]
    text = "\n".join(s.lines())
    assert "not computed" in text and "distinct" in text
    assert math.isfinite(s.deviation_last)
