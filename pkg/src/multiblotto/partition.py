"""Equilibrium sampling when battlefields split into ``k`` equal-value groups.

One Dirichlet draw ``X ~ Dir(1/(k-1), ..., 1/(k-1))`` is shared by each group;
battlefield ``j`` in group ``g`` bids ``budget * (k v_j / V) * X_g``. Group
sums of ``k v_j / V`` are all 1, so the bids always sum to the budget, and
each coordinate of the Dirichlet is ``Beta(1/(k-1), 1)``.
"""

from __future__ import annotations

import numpy as np

from .errors import GameValidationError, LabelOutOfRange, NotDivisible, UnbalancedPartition
from .game import GameSpec
from .sampling import RngStream, beta_power_cdf, dirichlet_symmetric

BALANCE_RTOL = 1e-9


def round_robin_partition(n: int, k: int) -> tuple:
    """Labels ``1, 2, ..., k, 1, 2, ...`` for ``n`` battlefields (1-based)."""
    if k < 1 or n % k:
        raise NotDivisible(f"{k} players do not divide {n} battlefields")
    return tuple(j % k + 1 for j in range(n))


def validate_partition(spec: GameSpec, pi) -> tuple:
    """Check that every group of ``pi`` carries value ``V/k``.

    Labels are 1-based. Raises :class:`UnbalancedPartition` naming the group
    with the largest relative miss.
    """
    if spec.is_boolean:
        raise GameValidationError("partitions apply to the continuous variant")
    pi = tuple(int(g) for g in pi)
    if len(pi) != spec.n:
        raise LabelOutOfRange(f"partition has {len(pi)} labels for {spec.n} battlefields")
    if any(not 1 <= g <= spec.k for g in pi):
        raise LabelOutOfRange(f"partition labels must lie in 1..{spec.k}")
    sums = group_values(spec, pi)
    target = spec.total_value / spec.k
    deviation = np.abs(sums - target) / target
    worst = int(np.argmax(deviation))
    if deviation[worst] > BALANCE_RTOL:
        raise UnbalancedPartition(worst + 1, float(deviation[worst]))
    return pi


def group_values(spec: GameSpec, pi) -> np.ndarray:
    labels = np.asarray(pi) - 1
    return np.bincount(labels, weights=spec.values_array, minlength=spec.k)


class PartitionSampler:
    """Cached sampler for one ``(spec, partition)`` pair."""

    def __init__(self, spec: GameSpec, pi):
        self.spec = spec
        self.partition = validate_partition(spec, pi)
        self._labels = np.asarray(self.partition) - 1
        self.scales = spec.budget * spec.k * spec.values_array / spec.total_value
        self._alpha = 1.0 / (spec.k - 1)

    def sample(self, stream: RngStream, size=None) -> np.ndarray:
        x = dirichlet_symmetric(self.spec.k, self._alpha, stream, size)
        return self.scales * np.take(x, self._labels, axis=-1)

    def marginal_cdf(self, j: int):
        scale, k = self.scales[j], self.spec.k
        return lambda x: beta_power_cdf(x, scale, k)


def sample_partition_equilibrium(spec: GameSpec, pi, stream: RngStream) -> np.ndarray:
    """One equilibrium bid vector (length ``n``) for a player."""
    return PartitionSampler(spec, pi).sample(stream)
