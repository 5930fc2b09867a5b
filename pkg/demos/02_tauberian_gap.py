"""Compare n-stage and discounted values of a random stochastic game.

For a finite game both families converge to the same limit, so the gap
||v_n - v_{1/n}|| should shrink as n grows.
"""

from tauber.operators import tauberian_gap
from tauber.stochastic import GeneratorConfig, random_game, shapley_operator

game = random_game(GeneratorConfig(seed=7, num_states=3, actions1=2, actions2=2))
rows = tauberian_gap(shapley_operator(game), [10, 50, 250, 1000])

print(f"{'n':>6} {'gap':>12} {'iterations':>11}")
for row in rows:
    print(f"{row.n:>6} {row.gap:12.3e} {row.iterations:>11}")
print("v_n at n=1000:      ", rows[-1].v_n.round(6))
print("v_lambda at 1/1000: ", rows[-1].v_lambda.round(6))
