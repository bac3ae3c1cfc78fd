"""Choosing an equilibrium sampler for a game, bulk drawing, and tournaments."""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .boolean import BooleanSampler, solve_equilibrium
from .errors import BlottoError, NoKnownEquilibrium
from .game import GameSpec, Variant, _split_values, check_bids, validate_game
from .partition import PartitionSampler, round_robin_partition
from .sampling import RngStream
from .sphere import SphereSampler

CHUNK = 1 << 15


@dataclass(frozen=True)
class GameConfig:
    spec: GameSpec
    partition: Optional[tuple] = None
    epsilon: Optional[float] = None


def parse_game(doc: dict) -> GameConfig:
    """Build a :class:`GameConfig` from a game-spec JSON document."""
    try:
        k, values = int(doc["k"]), list(doc["values"])
        n = int(doc.get("n", len(values)))
        variant = Variant(doc.get("variant", "continuous"))
        budget = doc.get("budget", 1.0)
    except (KeyError, TypeError, ValueError) as exc:
        raise BlottoError(f"malformed game spec: {exc}") from exc
    spec = validate_game(GameSpec(k, n, budget, tuple(values), variant))
    partition = doc.get("partition")
    epsilon = doc.get("epsilon")
    return GameConfig(
        spec,
        tuple(int(g) for g in partition) if partition is not None else None,
        float(epsilon) if epsilon is not None else None,
    )


def load_game(path) -> GameConfig:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise BlottoError(f"{path}: not valid JSON ({exc})") from exc
    return parse_game(doc)


def game_to_dict(config: GameConfig) -> dict:
    spec = config.spec
    doc = {
        "k": spec.k,
        "n": spec.n,
        "budget": spec.budget,
        "values": list(spec.values),
        "variant": spec.variant.value,
    }
    if config.partition is not None:
        doc["partition"] = list(config.partition)
    if config.epsilon is not None:
        doc["epsilon"] = config.epsilon
    return doc


class FixedStrategy:
    """A player who always submits the same bid vector."""

    def __init__(self, bids):
        self.bids = np.asarray(bids, dtype=float)

    def sample(self, stream: RngStream, size=None) -> np.ndarray:
        if size is None:
            return self.bids.copy()
        shape = size if isinstance(size, tuple) else (size,)
        return np.broadcast_to(self.bids, shape + self.bids.shape).copy()


def dispatch_sampler(spec: GameSpec, partition=None, epsilon: float = 1e-6):
    """Pick the equilibrium construction whose hypotheses the game meets.

    Boolean games use the solved coupling (pure top-budget play for k = 2).
    Continuous games use a supplied balanced partition, else round-robin
    groups when values are equal and ``k`` divides ``n``, else the sphere
    construction for three players with every ``v_j <= V/3``.
    """
    validate_game(spec)
    if spec.is_boolean:
        return BooleanSampler(spec, solve_equilibrium(spec, epsilon))
    if partition is not None:
        return PartitionSampler(spec, partition)
    homogeneous = len(set(spec.values)) == 1
    if homogeneous and spec.n % spec.k == 0:
        return PartitionSampler(spec, round_robin_partition(spec.n, spec.k))
    if spec.k == 3:
        if max(spec.values) <= spec.total_value / 3 * (1 + 1e-12):
            return SphereSampler(spec)
        raise NoKnownEquilibrium(
            "three-player game has a battlefield worth more than V/3 and no partition"
        )
    if homogeneous:
        raise NoKnownEquilibrium(
            f"{spec.k} players do not divide {spec.n} equal battlefields; supply a partition"
        )
    raise NoKnownEquilibrium(
        f"no construction for k={spec.k} with unequal values and no balanced partition"
    )


def draw(sampler, n_samples: int, stream: RngStream, workers: Optional[int] = None) -> np.ndarray:
    """``n_samples`` bid vectors, drawn in fixed-size chunks.

    Chunk ``c`` always uses ``stream.fork(c)``, so output does not depend on
    the number of workers.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    chunks = [(c, min(CHUNK, n_samples - c * CHUNK)) for c in range(math.ceil(n_samples / CHUNK))]

    def job(item):
        c, size = item
        return sampler.sample(stream.fork(c), size)

    workers = workers or min(len(chunks), os.cpu_count() or 1)
    if workers <= 1:
        parts = [job(item) for item in chunks]
    else:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(job, chunks))
    return np.concatenate(parts, axis=0)


@dataclass(frozen=True)
class TournamentResult:
    mean: np.ndarray
    stderr: np.ndarray
    rounds: int

    def to_dict(self) -> dict:
        return {
            "mean": [float(x) for x in self.mean],
            "stderr": [float(x) for x in self.stderr],
            "rounds": self.rounds,
        }


def run_payoff_tournament(
    spec: GameSpec, samplers: Sequence, rounds: int, stream: RngStream
) -> TournamentResult:
    """Mean realized utility (with standard error) for each player over
    ``rounds`` independent rounds; player ``i`` draws from ``stream.fork(i)``."""
    if len(samplers) != spec.k:
        raise BlottoError(f"need {spec.k} strategies, got {len(samplers)}")
    if rounds < 1:
        raise ValueError("need at least one round")
    bids = np.stack(
        [draw(s, rounds, stream.fork(i), workers=1) for i, s in enumerate(samplers)],
        axis=1,
    )
    check_bids(spec, bids)
    utils = _split_values(spec.values_array, bids)
    mean = utils.mean(axis=0)
    if rounds > 1:
        se = utils.std(axis=0, ddof=1) / math.sqrt(rounds)
    else:
        se = np.zeros(spec.k)
    return TournamentResult(mean, se, rounds)
