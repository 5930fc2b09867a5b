"""Hidden stochastic games: public signals, belief dynamics on the simplex.

Players observe past actions and a public signal but not the state, so the
relevant state variable is the common belief p over the K states. The
Shapley operator then lives on functions over the simplex; here those
functions are represented by their values at the rational grid points of
denominator d and extended by barycentric interpolation on the Freudenthal
triangulation. The interpolation weights are nonnegative and sum to one, so
the discretized operator is still monotone, additively homogeneous and
nonexpansive.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import NamedTuple, Optional

import numpy as np
from scipy import sparse

from .matrix_game import matrix_game_values
from .operators import DEFAULT_TOL, Operator, discounted_value, n_stage_value
from .stochastic import FiniteGame

__all__ = [
    "HiddenGameSpec",
    "BeliefUpdate",
    "BeliefGrid",
    "belief_update",
    "belief_shapley_operator",
    "hidden_values",
    "lipschitz_check",
    "refinement_delta",
    "revealing_spec",
]

PROB_TOL = 1e-12
ZERO_PROB = 1e-15


@dataclass(frozen=True)
class HiddenGameSpec:
    """Payoff g[k, i, j] and joint kernel kernel[k, i, j, k', a].

    ``kernel[k, i, j]`` is the joint law of (next state, public signal).
    Action sets are common to all states since the state is unobserved.
    """

    payoff: np.ndarray
    kernel: np.ndarray
    state_names: tuple = field(default=())
    signal_names: tuple = field(default=())

    def __post_init__(self):
        g = np.array(self.payoff, dtype=float)
        q = np.array(self.kernel, dtype=float)
        if g.ndim != 3:
            raise ValueError(f"payoff must have shape (K, I, J), got {g.shape}")
        K, I, J = g.shape
        if q.ndim != 5 or q.shape[:4] != (K, I, J, K):
            raise ValueError(f"kernel must have shape {(K, I, J, K, '|A|')}, got {q.shape}")
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(q))):
            raise ValueError("non-finite entries in hidden game")
        if np.any(q < 0):
            raise ValueError("kernel has negative entries")
        sums = q.sum(axis=(3, 4))
        if np.max(np.abs(sums - 1.0)) > PROB_TOL:
            raise ValueError("each kernel row must sum to one")
        states = tuple(self.state_names) or tuple(str(k) for k in range(K))
        signals = tuple(self.signal_names) or tuple(str(a) for a in range(q.shape[4]))
        if len(states) != K or len(signals) != q.shape[4]:
            raise ValueError("name lists do not match array shapes")
        g.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "payoff", g)
        object.__setattr__(self, "kernel", q)
        object.__setattr__(self, "state_names", states)
        object.__setattr__(self, "signal_names", signals)

    @property
    def num_states(self):
        return self.payoff.shape[0]

    @property
    def num_signals(self):
        return self.kernel.shape[4]

    @property
    def payoff_bound(self):
        return float(np.max(np.abs(self.payoff)))

    @property
    def transition(self):
        """Marginal of the kernel on next states, shape (K, I, J, K)."""
        return self.kernel.sum(axis=4)

    def base_game(self) -> FiniteGame:
        """The same game with the state publicly observed."""
        return FiniteGame(tuple(self.payoff), tuple(self.transition), self.state_names)


def revealing_spec(game: FiniteGame) -> HiddenGameSpec:
    """Hidden game whose signal announces the next state exactly."""
    if not game.uniform_actions:
        raise ValueError("hidden games need the same action sets in every state")
    q = np.stack(game.transition)
    K = game.num_states
    kernel = q[..., :, None] * np.eye(K)[None, None, None, :, :]
    return HiddenGameSpec(np.stack(game.payoff), kernel, game.state_names, game.state_names)


class BeliefUpdate(NamedTuple):
    posterior: Optional[np.ndarray]
    probability: float


def belief_update(spec, p, i, j, a):
    """Bayes update of the common belief after actions (i, j) and signal a.

    Returns the signal probability and the posterior over next states. When
    the signal has probability zero the posterior is ``None``; it carries no
    weight in any expectation.
    """
    p = np.asarray(p, dtype=float)
    joint = p @ spec.kernel[:, i, j, :, a]
    prob = float(joint.sum())
    if prob <= ZERO_PROB:
        return BeliefUpdate(None, prob)
    return BeliefUpdate(joint / prob, prob)


class BeliefGrid:
    """All points of the simplex over ``num_states`` states with denominator d."""

    def __init__(self, num_states, resolution):
        if num_states < 1 or resolution < 1:
            raise ValueError("num_states and resolution must be positive")
        self.num_states = int(num_states)
        self.resolution = int(resolution)
        self.counts = np.array(list(_compositions(self.resolution, self.num_states)), dtype=int)
        self.index = {tuple(c): n for n, c in enumerate(self.counts)}
        self.nodes = self.counts / self.resolution
        self.rule = "freudenthal"

    def __len__(self):
        return len(self.counts)

    @staticmethod
    def expected_size(num_states, resolution):
        return comb(resolution + num_states - 1, num_states - 1)

    def vertex_indices(self):
        """Grid indices of the Dirac beliefs, in state order."""
        d, K = self.resolution, self.num_states
        return [self.index[tuple(d * np.eye(K, dtype=int)[k])] for k in range(K)]

    def interpolate(self, p):
        """Barycentric weights of ``p`` on its Freudenthal simplex.

        Returns (indices, weights) with weights > 0 summing to one and
        sum(weights * nodes[indices]) == p up to rounding.
        """
        p = np.asarray(p, dtype=float)
        if p.shape != (self.num_states,):
            raise ValueError(f"belief has {p.shape} entries, expected {self.num_states}")
        d, K = self.resolution, self.num_states
        # tail sums x_i = d * sum_{l >= i} p_l, so x_0 = d >= x_1 >= ... >= x_{K-1} >= 0
        x = d * np.cumsum(p[::-1])[::-1]
        x[0] = d
        base = np.floor(x + 1e-12)
        resid = np.clip(x - base, 0.0, 1.0)
        resid[resid < 1e-12] = 0.0
        resid[0] = 0.0
        order = sorted(range(1, K), key=lambda i: (-resid[i], i))

        vertex = base.astype(int)
        vertices = [vertex.copy()]
        weights = [1.0 - (resid[order[0]] if order else 0.0)]
        for k, i in enumerate(order):
            vertex[i] += 1
            vertices.append(vertex.copy())
            nxt = resid[order[k + 1]] if k + 1 < len(order) else 0.0
            weights.append(resid[i] - nxt)

        idx, wts = [], []
        for v, w in zip(vertices, weights):
            if w <= 0.0:
                continue
            counts = v - np.append(v[1:], 0)
            idx.append(self.index[tuple(int(c) for c in counts)])
            wts.append(w)
        wts = np.array(wts)
        return np.array(idx), wts / wts.sum()

    def neighbor_pairs(self):
        """Index pairs of nodes that differ by moving 1/d mass between two states."""
        K = self.num_states
        pairs = []
        for n, c in enumerate(self.counts):
            for a in range(K):
                if c[a] == 0:
                    continue
                for b in range(K):
                    if b == a:
                        continue
                    nb = c.copy()
                    nb[a] -= 1
                    nb[b] += 1
                    m = self.index[tuple(nb)]
                    if n < m:
                        pairs.append((n, m))
        return pairs


def _compositions(total, parts):
    """Nonnegative integer vectors of length ``parts`` summing to ``total``."""
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 2 - prev)
        yield out


def belief_shapley_operator(spec: HiddenGameSpec, grid: BeliefGrid) -> Operator:
    """Shapley operator of the belief game, restricted to grid nodes.

    psi(f)(p) = val over (i, j) of
        sum_k p(k) g(k, i, j) + sum_a P(a | p, i, j) * fhat(posterior(p, i, j, a))
    where fhat interpolates f between grid nodes.
    """
    if grid.num_states != spec.num_states:
        raise ValueError("grid and game disagree on the number of states")
    K, I, J = spec.payoff.shape
    A = spec.num_signals
    N = len(grid)
    P = grid.nodes
    stage = np.einsum("nk,kij->nij", P, spec.payoff)
    joint = np.einsum("nk,kijla->nijal", P, spec.kernel)  # (N, I, J, A, K')
    probs = joint.sum(axis=-1)

    rows, cols, vals = [], [], []
    for n, i, j, a in zip(*np.nonzero(probs > ZERO_PROB)):
        pr = probs[n, i, j, a]
        idx, wts = grid.interpolate(joint[n, i, j, a] / pr)
        r = (n * I + i) * J + j
        rows.extend([r] * len(idx))
        cols.extend(idx)
        vals.extend(pr * wts)
    W = sparse.csr_matrix((vals, (rows, cols)), shape=(N * I * J, N))

    def apply(f):
        mats = stage + (W @ f).reshape(N, I, J)
        return matrix_game_values(mats)

    pb = spec.payoff_bound
    return Operator(apply, N, bound=pb, payoff_bound=pb, name=f"belief(d={grid.resolution})")


def hidden_values(spec, grid, n, lam, tol=DEFAULT_TOL):
    """(v_n, v_lam) on the grid nodes."""
    op = belief_shapley_operator(spec, grid)
    return n_stage_value(op, n), discounted_value(op, lam, tol=tol).value


def lipschitz_check(grid, values):
    """Largest |f(p) - f(q)| / ||p - q||_1 over neighbouring grid nodes."""
    values = np.asarray(values, dtype=float)
    if values.shape != (len(grid),):
        raise ValueError("need one value per grid node")
    pairs = grid.neighbor_pairs()
    if not pairs:
        return 0.0
    a, b = np.array(pairs).T
    step = 2.0 / grid.resolution
    return float(np.max(np.abs(values[a] - values[b])) / step)


def refinement_delta(spec, resolution, n, lam, tol=DEFAULT_TOL):
    """Sup difference between grid-d and grid-2d values on the coarse nodes.

    Returns (delta_n, delta_lambda).
    """
    coarse = BeliefGrid(spec.num_states, resolution)
    fine = BeliefGrid(spec.num_states, 2 * resolution)
    vn_c, vl_c = hidden_values(spec, coarse, n, lam, tol)
    vn_f, vl_f = hidden_values(spec, fine, n, lam, tol)
    common = [fine.index[tuple(2 * c)] for c in coarse.counts]
    return (
        float(np.max(np.abs(vn_c - vn_f[common]))),
        float(np.max(np.abs(vl_c - vl_f[common]))),
    )
