"""Belief-grid values for a game whose state is not observed.

The same two-state game is solved twice: once with signals that reveal the
next state, once with a single uninformative signal.
"""

from pathlib import Path

import numpy as np

from tauber.gamefile import load_game_file
from tauber.hidden import BeliefGrid, HiddenGameSpec, hidden_values, lipschitz_check, revealing_spec

game = load_game_file(Path(__file__).resolve().parent.parent / "games" / "two_state.json")
revealing = revealing_spec(game)
q = np.stack(game.transition)
blind = HiddenGameSpec(np.stack(game.payoff), q[..., None])

grid = BeliefGrid(2, 10)
for label, spec in (("revealing", revealing), ("blind", blind)):
    _, v = hidden_values(spec, grid, 50, 0.05)
    print(f"{label}: slope {lipschitz_check(grid, v):.3f}")
    for p, val in zip(grid.nodes[::2], v[::2]):
        print(f"  p(a)={p[0]:.1f}  v_lambda={val:+.6f}")
