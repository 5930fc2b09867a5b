"""Solve a few matrix games and check the returned strategies."""

import numpy as np

from tauber.matrix_game import solve_matrix_game, verify_solution

games = {
    "matching pennies": [[1, -1], [-1, 1]],
    "rock-paper-scissors": [[0, -1, 1], [1, 0, -1], [-1, 1, 0]],
    "pure saddle": [[4, 2], [3, 1]],
    "random 4x5": np.random.default_rng(0).uniform(-1, 1, (4, 5)),
}

for name, M in games.items():
    sol = solve_matrix_game(M)
    print(f"{name}: value {sol.value:+.6f}")
    print("  row strategy   ", np.round(sol.row_strategy, 4))
    print("  column strategy", np.round(sol.col_strategy, 4))
    print(f"  duality gap {verify_solution(M, sol):.1e}")
