#! /usr/bin/env python3
# In the Boolean game each player competes on exactly `budget` battlefields.
# The symmetric equilibrium equalizes the marginal gain of competing across
# battlefields that are played with probability strictly between 0 and 1.

import numpy as np

from multiblotto import (
    BooleanCoupling,
    GameSpec,
    RngStream,
    boolean_exploitability,
    large_k_limit_probs,
    marginal_utility,
    solve_equilibrium,
)

spec = GameSpec.boolean(4, [1.0, 0.8, 0.3, 0.2], 2)
eq = solve_equilibrium(spec, epsilon=1e-6)
print("p =", np.round(eq.probs, 6), " sum =", eq.probs.sum())
print("marginal gains:", np.round(marginal_utility(eq.probs, spec.values_array, spec.k), 6))
print("best-response gain:", boolean_exploitability(spec, eq))

# with too few players nobody bothers with the cheap battlefield
for k in (3, 4, 5):
    p = solve_equilibrium(GameSpec.boolean(k, [1.0, 0.5], 1)).probs
    print(f"k={k}: p = {np.round(p, 4)}")

# the coupling plays exactly `budget` battlefields on every draw
c = BooleanCoupling(eq.probs)
draws = c.sample(RngStream(1), 100_000)
print("ones per draw:", np.unique(draws.sum(axis=1)))
print("frequencies:", np.round(draws.mean(axis=0), 4))

# many players: probabilities approach a value-proportional waterfall
v = np.array([1.0, 0.7, 0.4, 0.2, 0.1])
k = 1000
print(np.round(solve_equilibrium(GameSpec.boolean(k, v * k, 2)).probs, 4))
print(np.round(large_k_limit_probs(GameSpec.boolean(k, v, 2)), 4))
