from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bayes_joint_table, blind_mdp_grid_values
from tauber.gamefile import load_game_file
from tauber.hidden import (
    BeliefGrid,
    HiddenGameSpec,
    belief_shapley_operator,
    belief_update,
    hidden_values,
    lipschitz_check,
    refinement_delta,
    revealing_spec,
)
from tauber.stochastic import game_values

GAMES = Path(__file__).resolve().parent.parent / "games"


def random_spec(seed, K=3, I=2, J=2, A=2):
    rng = np.random.default_rng(seed)
    payoff = rng.uniform(-1, 1, (K, I, J))
    kernel = rng.random((K, I, J, K, A))
    kernel /= kernel.sum(axis=(3, 4), keepdims=True)
    return HiddenGameSpec(payoff, kernel)


def test_belief_update_matches_joint_table():
    spec = random_spec(0)
    p = np.array([0.2, 0.5, 0.3])
    for i in range(2):
        for j in range(2):
            table = bayes_joint_table(p, spec.kernel, i, j)
            for a in range(2):
                upd = belief_update(spec, p, i, j, a)
                prob, post = table[a]
                assert upd.probability == pytest.approx(prob, abs=1e-15)
                np.testing.assert_allclose(upd.posterior, post, atol=1e-14)


def test_signal_probabilities_sum_to_one():
    spec = random_spec(1, A=3)
    p = np.array([0.6, 0.1, 0.3])
    assert sum(belief_update(spec, p, 1, 0, a).probability for a in range(3)) == pytest.approx(1.0)


def test_zero_probability_signal_has_no_posterior():
    kernel = np.zeros((2, 1, 1, 2, 2))
    kernel[0, 0, 0, 0, 0] = 1.0
    kernel[1, 0, 0, 1, 1] = 1.0
    spec = HiddenGameSpec(np.zeros((2, 1, 1)), kernel)
    upd = belief_update(spec, [1.0, 0.0], 0, 0, 1)
    assert upd.posterior is None and upd.probability == 0.0


@pytest.mark.parametrize("K,d", [(1, 5), (2, 20), (3, 4), (4, 3)])
def test_grid_size(K, d):
    grid = BeliefGrid(K, d)
    assert len(grid) == BeliefGrid.expected_size(K, d)
    np.testing.assert_allclose(grid.nodes.sum(axis=1), 1.0)
    assert len({tuple(c) for c in grid.counts}) == len(grid)


def test_vertex_indices_are_dirac():
    grid = BeliefGrid(3, 4)
    for k, idx in enumerate(grid.vertex_indices()):
        np.testing.assert_array_equal(grid.nodes[idx], np.eye(3)[k])


def test_interpolation_of_node_is_exact():
    grid = BeliefGrid(3, 5)
    for n, p in enumerate(grid.nodes):
        idx, w = grid.interpolate(p)
        assert list(idx) == [n] and w[0] == pytest.approx(1.0)


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 5), st.integers(1, 8), st.data())
def test_interpolation_reconstructs_point(K, d, data):
    raw = np.array(data.draw(st.lists(st.floats(0, 1), min_size=K, max_size=K)))
    if raw.sum() <= 1e-6:
        raw[0] = 1.0
    p = raw / raw.sum()
    grid = BeliefGrid(K, d)
    idx, w = grid.interpolate(p)
    assert np.all(w > 0) and w.sum() == pytest.approx(1.0)
    assert len(idx) <= K
    np.testing.assert_allclose(w @ grid.nodes[idx], p, atol=1e-12)
    # all vertices lie in one cell: pairwise count differences at most 1
    counts = grid.counts[idx]
    assert np.max(np.abs(counts[:, None, :] - counts[None, :, :])) <= 1


def test_revealing_vertices_match_full_observation():
    game = load_game_file(GAMES / "two_state.json")
    spec = revealing_spec(game)
    grid = BeliefGrid(2, 6)
    n, lam, tol = 40, 0.05, 1e-10
    vn, vl = hidden_values(spec, grid, n, lam, tol)
    fn, fl = game_values(game, n, lam, tol)
    verts = grid.vertex_indices()
    np.testing.assert_allclose(vn[verts], fn, atol=1e-12)
    np.testing.assert_allclose(vl[verts], fl, atol=2 * tol)


def test_single_state_reduces_to_matrix_game():
    spec = load_game_file(GAMES / "hidden_one_state.json")
    grid = BeliefGrid(1, 3)
    assert len(grid) == 1
    vn, vl = hidden_values(spec, grid, 10, 0.1)
    base = game_values(spec.base_game(), 10, 0.1)
    assert vn[0] == pytest.approx(base[0][0], abs=1e-12)
    assert vl[0] == pytest.approx(base[1][0], abs=1e-9)


def test_blind_mdp_against_interp_oracle():
    spec = load_game_file(GAMES / "hidden_blind_mdp.json")
    grid = BeliefGrid(2, 20)
    assert np.allclose(grid.nodes[:, 0], np.linspace(0, 1, 21))
    vn, vl = hidden_values(spec, grid, 30, 0.1, tol=1e-11)
    q = spec.transition
    np.testing.assert_allclose(vn, blind_mdp_grid_values(spec.payoff, q, 20, n=30), atol=1e-12)
    np.testing.assert_allclose(vl, blind_mdp_grid_values(spec.payoff, q, 20, lam=0.1, sweeps=600), atol=2e-11)


def test_constant_payoff_gives_constant_values():
    rng = np.random.default_rng(4)
    kernel = rng.random((3, 2, 2, 3, 2))
    kernel /= kernel.sum(axis=(3, 4), keepdims=True)
    spec = HiddenGameSpec(np.full((3, 2, 2), 0.3), kernel)
    vn, vl = hidden_values(spec, BeliefGrid(3, 4), 12, 0.2)
    np.testing.assert_allclose(vn, 0.3, atol=1e-13)
    np.testing.assert_allclose(vl, 0.3, atol=1e-9)


def test_lipschitz_of_linear_function():
    grid = BeliefGrid(3, 6)
    w = np.array([0.5, -1.0, 2.0])
    # |p.w - q.w| for neighbours is |w_a - w_b| / d and ||p - q||_1 = 2 / d
    assert lipschitz_check(grid, grid.nodes @ w) == pytest.approx(1.5)


def test_lipschitz_requires_full_vector():
    with pytest.raises(ValueError):
        lipschitz_check(BeliefGrid(2, 3), np.zeros(3))


def test_random_hidden_game_slope_bounded():
    spec = random_spec(7)
    spec = HiddenGameSpec(spec.payoff / spec.payoff_bound, spec.kernel)
    grid = BeliefGrid(3, 8)
    vn, vl = hidden_values(spec, grid, 30, 0.1)
    assert lipschitz_check(grid, vn) <= 1.05
    assert lipschitz_check(grid, vl) <= 1.05


def test_refinement_delta_is_reported():
    spec = load_game_file(GAMES / "hidden_blind_mdp.json")
    dn, dl = refinement_delta(spec, 5, 20, 0.1)
    assert dn >= 0 and dl >= 0
    # revealing signals put every posterior on a vertex, so refining changes nothing
    rev = load_game_file(GAMES / "hidden_revealing.json")
    assert max(refinement_delta(rev, 3, 20, 0.1, tol=1e-11)) <= 2e-11


def test_grid_mismatch_rejected():
    with pytest.raises(ValueError):
        belief_shapley_operator(random_spec(0), BeliefGrid(2, 3))


def test_spec_validation():
    with pytest.raises(ValueError):
        HiddenGameSpec(np.zeros((2, 1, 1)), np.full((2, 1, 1, 2, 1), 0.4))
    with pytest.raises(ValueError):
        HiddenGameSpec(np.zeros((2, 1)), np.zeros((2, 1, 1, 2, 1)))
