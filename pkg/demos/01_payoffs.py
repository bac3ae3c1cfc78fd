#! /usr/bin/env python3
# Payoffs in a multiplayer Blotto game: the highest bid wins a battlefield,
# and tied bids split its value evenly.

import numpy as np

from multiblotto import GameSpec, payoff

spec = GameSpec.continuous(3, [1, 1])
bids = np.array([[0.5, 0.5],
                 [0.5, 0.5],
                 [1.0, 0.0]])
print(payoff(spec, bids))   # [0.5 0.5 1. ]

# battlefield 2 is tied at zero, so each player gets half of it
spec = GameSpec.continuous(2, [1, 2, 3])
print(payoff(spec, [[1, 0, 0], [0, 0, 1]]))   # [2. 4.]

# whatever everyone bids, the values are shared out completely
rng = np.random.default_rng(0)
bids = rng.dirichlet(np.ones(3), size=3)
print(payoff(GameSpec.continuous(3, [1, 2, 3]), bids).sum())   # 6.0
