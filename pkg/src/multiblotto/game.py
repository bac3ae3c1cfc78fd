"""Game definitions, validation and exact payoff evaluation.

A game is the tuple ``(k, n, budget, values, variant)``: ``k`` players each
split a common budget over ``n`` battlefields. Battlefield ``j`` goes to the
highest bidder; ties split ``values[j]`` evenly. In the Boolean variant bids
are 0/1 and the budget is an integer number of battlefields.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BudgetOutOfRange,
    BudgetViolation,
    DimensionMismatch,
    EmptyGame,
    GameValidationError,
    NonPositiveValueBoolean,
    ProbabilityOutOfRange,
    TooFewPlayers,
)

BUDGET_TOL = 1e-9
EXACT_ENUMERATION_MAX_K = 12


class Variant(str, enum.Enum):
    CONTINUOUS = "continuous"
    BOOLEAN = "boolean"


@dataclass(frozen=True)
class GameSpec:
    k: int
    n: int
    budget: float
    values: tuple
    variant: Variant = Variant.CONTINUOUS
    total_value: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "total_value", math.fsum(self.values))

    @property
    def values_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @property
    def is_boolean(self) -> bool:
        return self.variant is Variant.BOOLEAN

    @classmethod
    def continuous(cls, k, values, budget=1.0) -> "GameSpec":
        values = tuple(values)
        return validate_game(cls(k, len(values), budget, values, Variant.CONTINUOUS))

    @classmethod
    def boolean(cls, k, values, budget) -> "GameSpec":
        values = tuple(values)
        return validate_game(cls(k, len(values), budget, values, Variant.BOOLEAN))


def validate_game(spec: GameSpec) -> GameSpec:
    """Check the preconditions every equilibrium construction relies on.

    Returns ``spec`` unchanged (``total_value`` is derived on construction)
    or raises a :class:`GameValidationError` subclass naming the problem.
    """
    if int(spec.k) != spec.k or spec.k < 2:
        raise TooFewPlayers(f"need at least 2 players, got k={spec.k}")
    if int(spec.n) != spec.n or spec.n < 1:
        raise EmptyGame(f"need at least one battlefield, got n={spec.n}")
    if len(spec.values) != spec.n:
        raise DimensionMismatch(f"n={spec.n} but {len(spec.values)} values given")
    if not all(math.isfinite(v) for v in spec.values):
        raise GameValidationError("battlefield values must be finite")

    if spec.is_boolean:
        if int(spec.budget) != spec.budget or not 0 <= spec.budget <= spec.n:
            raise BudgetOutOfRange(
                f"Boolean budget must be an integer in [0, {spec.n}], got {spec.budget}"
            )
        if any(v <= 0 for v in spec.values):
            raise NonPositiveValueBoolean("Boolean games need every value > 0")
    else:
        if any(v < 0 for v in spec.values):
            raise GameValidationError("battlefield values must be nonnegative")
        if spec.total_value <= 0:
            raise EmptyGame("total battlefield value is zero")
        if not (math.isfinite(spec.budget) and spec.budget > 0):
            raise BudgetOutOfRange(f"continuous budget must be > 0, got {spec.budget}")
    return spec


def check_bids(spec: GameSpec, bids) -> np.ndarray:
    """Return ``bids`` as a float array after checking the bid-matrix rules.

    Accepts a single ``(k, n)`` matrix or a batch ``(..., k, n)``.
    """
    bids = np.asarray(bids, dtype=float)
    if bids.ndim < 2 or bids.shape[-2:] != (spec.k, spec.n):
        raise DimensionMismatch(
            f"expected bids of shape (..., {spec.k}, {spec.n}), got {bids.shape}"
        )
    if np.any(bids < 0) or not np.all(np.isfinite(bids)):
        raise GameValidationError("bids must be finite and nonnegative")
    totals = bids.sum(axis=-1)
    if spec.is_boolean:
        if np.any((bids != 0) & (bids != 1)):
            raise GameValidationError("Boolean bids must be 0 or 1")
        over = totals > spec.budget
    else:
        over = totals > spec.budget + BUDGET_TOL
    if np.any(over):
        where = np.argwhere(over)[0]
        player = int(where[-1])
        raise BudgetViolation(player, float(totals[tuple(where)]), spec.budget)
    return bids


def payoff(spec: GameSpec, bids) -> np.ndarray:
    """Realized utilities ``U_1..U_k`` for a bid matrix (or a batch of them).

    Ties are detected by exact float equality, so every tied top bidder gets
    an equal share of the battlefield.
    """
    bids = check_bids(spec, bids)
    return _split_values(spec.values_array, bids)


def _split_values(values: np.ndarray, bids: np.ndarray) -> np.ndarray:
    top = bids.max(axis=-2, keepdims=True)
    winners = bids == top
    shares = winners / winners.sum(axis=-2, keepdims=True)
    return shares @ values


@dataclass(frozen=True)
class ExpectedPayoff:
    mean: np.ndarray
    stderr: np.ndarray
    method: str


def symmetric_boolean_payoff(v: float, k: int, p: float, q: float) -> float:
    """Expected share of a value-``v`` battlefield for a player competing with
    probability ``q`` against ``k - 1`` opponents who each compete with ``p``."""
    u0 = v / k * (1.0 - p) ** (k - 1)
    # total value is conserved: p*u1 + (1-p)*u0 = v/k
    if p > 0:
        u1 = (v / k - (1.0 - p) * u0) / p
    else:
        u1 = v
    return q * u1 + (1.0 - q) * u0


def boolean_lotto_expected_payoff(
    spec: GameSpec,
    probs,
    *,
    method: str = "auto",
    samples: int = 100_000,
    stream=None,
) -> ExpectedPayoff:
    """Expected utilities when player ``i`` competes on battlefield ``j``
    independently with probability ``probs[i, j]``.

    ``method="exact"`` enumerates every compete/abstain outcome of the
    opponents (``2**(k-1)`` per battlefield); ``"montecarlo"`` samples rounds
    and reports a standard error. ``"auto"`` enumerates when ``k <= 12``.
    """
    if not spec.is_boolean:
        raise GameValidationError("expected payoff is defined for Boolean games")
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (spec.k, spec.n):
        raise DimensionMismatch(f"expected probs of shape ({spec.k}, {spec.n})")
    if np.any(~np.isfinite(probs)) or np.any(probs < 0) or np.any(probs > 1):
        raise ProbabilityOutOfRange("probabilities must lie in [0, 1]")

    if method == "auto":
        method = "exact" if spec.k <= EXACT_ENUMERATION_MAX_K else "montecarlo"
    if method == "exact":
        mean = _enumerate_expected(spec, probs)
        return ExpectedPayoff(mean, np.zeros(spec.k), "exact")
    if method == "montecarlo":
        if stream is None:
            raise ValueError("Monte Carlo evaluation needs an RngStream")
        u = stream.uniform((samples, spec.k, spec.n))
        bids = (u < probs).astype(float)
        utils = _split_values(spec.values_array, bids)
        mean = utils.mean(axis=0)
        se = utils.std(axis=0, ddof=1) / math.sqrt(samples)
        return ExpectedPayoff(mean, se, "montecarlo")
    raise ValueError(f"unknown method {method!r}")


def _enumerate_expected(spec: GameSpec, probs: np.ndarray) -> np.ndarray:
    k, values = spec.k, spec.values_array
    outcomes = np.array(list(itertools.product((0, 1), repeat=k - 1)), dtype=float)
    counts = outcomes.sum(axis=1)
    result = np.zeros(k)
    for i in range(k):
        others = np.delete(probs, i, axis=0)  # (k-1, n)
        # weight[o, j] = P[opponents realize outcome o on battlefield j]
        weight = np.prod(
            np.where(outcomes[:, :, None] == 1, others[None], 1.0 - others[None]),
            axis=1,
        )
        compete = (weight / (1.0 + counts[:, None])).sum(axis=0)
        nobody = weight[counts == 0].sum(axis=0) / k
        q = probs[i]
        result[i] = np.dot(values, q * compete + (1.0 - q) * nobody)
    return result
