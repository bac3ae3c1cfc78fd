#! /usr/bin/env python3
# When the battlefields split into k groups of equal value, one Dirichlet draw
# shared by each group gives an equilibrium bid vector. Every bid vector
# spends the whole budget.

import numpy as np

from multiblotto import GameSpec, PartitionSampler, RngStream, round_robin_partition

k, n = 3, 6
spec = GameSpec.continuous(k, [1.0] * n)
pi = round_robin_partition(n, k)
print("groups:", pi)

sampler = PartitionSampler(spec, pi)
bids = sampler.sample(RngStream(7), 100_000)
print("first bid vector:", np.round(bids[0], 4))
print("worst |sum - 1|:", np.abs(bids.sum(axis=1) - 1).max())

# each bid is (1/2) Beta(1/2, 1): P[A_j <= x] = sqrt(2x)
for x in (0.05, 0.2, 0.4):
    print(f"P[A_1 <= {x}] = {np.mean(bids[:, 0] <= x):.4f}   exact {np.sqrt(2 * x):.4f}")

# unequal values work too, as long as a balanced partition is supplied
spec = GameSpec.continuous(2, [2, 1, 1])
bids = PartitionSampler(spec, (1, 2, 2)).sample(RngStream(8), 5)
print(np.round(bids, 4))
