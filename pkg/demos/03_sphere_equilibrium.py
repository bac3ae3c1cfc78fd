#! /usr/bin/env python3
# Three players, any values with every v_j <= V/3. Build an n x 3 isometry M
# whose squared row norms are 3 v_j / V, then bid A_j = (M_j . U)^2 for a
# uniform point U on the sphere.

import numpy as np

from multiblotto import GameSpec, RngStream, SphereSampler, construct_m
from multiblotto.verify import check_isometry

M = construct_m([1, 0.5, 0.5], 2).matrix
print(M)   # rows (1, 0), (0, sqrt(.5)), (0, sqrt(.5))

spec = GameSpec.continuous(3, [5, 4, 3, 2, 1])
sampler = SphereSampler(spec)
M = sampler.isometry.matrix
print("M^T M =\n", np.round(M.T @ M, 12))
print("row norms^2:", np.round((M * M).sum(axis=1), 12))
for rec in check_isometry(sampler.isometry):
    print(rec.name, "ok" if rec.passed else "FAILED")

bids = sampler.sample(RngStream(3), 200_000)
print("worst |sum - 1|:", np.abs(bids.sum(axis=1) - 1).max())
print("mean bids:", np.round(bids.mean(axis=0), 4), "expected", np.array(spec.values) / 15)
