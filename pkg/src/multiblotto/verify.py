"""Statistical and exact checks of the equilibrium samplers.

Each check returns a list of :class:`CheckRecord`; :class:`VerificationReport`
collects them. Statistical thresholds come with their derivation:

* KS distance at ``N`` samples: ``3 / sqrt(N)``. By the DKW inequality the
  false-alarm probability is ``2 exp(-18)``, about 3e-8 (0.003 at N = 1e6).
* Frequencies and Monte Carlo means: 4 standard errors.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .boolean import marginal_utility
from .errors import EmptySample, GameValidationError, InfeasibleDeviation
from .game import BUDGET_TOL, GameSpec
from .sampling import RngStream, beta_power_cdf

KS_CONSTANT = 3.0
KS_DERIVATION = "DKW: P[D > 3/sqrt(N)] <= 2exp(-18)"
SIGMA_DERIVATION = "4 standard errors"
ISOMETRY_TOL = 1e-9


@dataclass
class CheckRecord:
    name: str
    statistic: float
    threshold: float
    passed: bool
    sample_count: int = 0
    seed: Optional[int] = None
    derivation: str = ""


@dataclass
class VerificationReport:
    records: list = field(default_factory=list)

    def extend(self, records):
        self.records.extend(records)
        return self

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self):
        return [r for r in self.records if not r.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "records": [asdict(r) for r in self.records],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def table(self) -> str:
        width = max([len(r.name) for r in self.records] + [5])
        lines = [f"{'check':<{width}}  {'statistic':>12}  {'threshold':>12}  result"]
        for r in self.records:
            verdict = "pass" if r.passed else "FAIL"
            lines.append(
                f"{r.name:<{width}}  {r.statistic:>12.4g}  {r.threshold:>12.4g}  {verdict}"
            )
        lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def ks_threshold(n_samples: int) -> float:
    return KS_CONSTANT / math.sqrt(n_samples)


def ks_statistic(samples, cdf: Callable) -> float:
    """Sup distance between the empirical CDF of sorted ``samples`` and ``cdf``."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise EmptySample("KS statistic needs at least one sample")
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def _seed(stream):
    return getattr(stream, "seed", None)


def _continuous_law(spec: GameSpec, j: int):
    scale = spec.budget * spec.k * spec.values[j] / spec.total_value
    return lambda x: beta_power_cdf(x, scale, spec.k)


def check_marginals(spec: GameSpec, sampler, n_samples: int, stream: RngStream) -> list:
    """Compare every battlefield's empirical law with the equilibrium law.

    Continuous games use ``budget * (k v_j / V) * Beta(1/(k-1), 1)``; Boolean
    samplers are checked against their own probabilities.
    """
    bids = sampler.sample(stream, n_samples)
    seed = _seed(stream)
    records = []
    if spec.is_boolean:
        probs = np.asarray(sampler.marginal_probs())
        freq = bids.mean(axis=0)
        for j in range(spec.n):
            p = probs[j]
            sd = math.sqrt(p * (1 - p) / n_samples)
            dev = abs(freq[j] - p)
            threshold = 4 * sd
            records.append(CheckRecord(
                f"marginal[{j + 1}] frequency", float(dev), threshold,
                bool(dev <= threshold), n_samples, seed, SIGMA_DERIVATION,
            ))
        return records
    threshold = ks_threshold(n_samples)
    for j in range(spec.n):
        if spec.values[j] == 0:
            # the law is a point mass at 0; its KS distance is the share of nonzero bids
            d = float(np.mean(bids[:, j] != 0))
        else:
            d = ks_statistic(np.sort(bids[:, j]), _continuous_law(spec, j))
        records.append(CheckRecord(
            f"marginal[{j + 1}] KS", d, threshold, bool(d <= threshold),
            n_samples, seed, KS_DERIVATION,
        ))
    return records


def check_budget_as(spec: GameSpec, sampler, n_samples: int, stream: RngStream) -> list:
    """Every sampled bid vector must spend the whole budget."""
    bids = sampler.sample(stream, n_samples)
    totals = bids.sum(axis=1)
    if spec.is_boolean:
        worst = float(np.max(np.abs(totals - spec.budget)))
        threshold = 0.0
    else:
        worst = float(np.max(np.abs(totals - spec.budget)))
        threshold = BUDGET_TOL
    return [CheckRecord(
        "budget almost surely", worst, threshold, worst <= threshold,
        n_samples, _seed(stream), "exact" if spec.is_boolean else "absolute 1e-9",
    )]


def deviation_library(spec: GameSpec, stream: RngStream, n_random: int = 20) -> list:
    """Structured pure deviations plus ``n_random`` random feasible ones.

    Returns ``(name, bids)`` pairs: everything on the most valuable
    battlefield, an even split, an even split over the top half by value,
    budget in proportion to value, and uniform points on the budget simplex.
    """
    n, b = spec.n, spec.budget
    order = np.argsort(-spec.values_array, kind="stable")
    out = []
    one = np.zeros(n)
    one[order[0]] = b
    out.append(("all-on-top", one))
    out.append(("uniform-split", np.full(n, b / n)))
    half = np.zeros(n)
    top = order[: max(1, n // 2)]
    half[top] = b / top.size
    out.append(("top-half-split", half))
    out.append(("value-proportional", b * spec.values_array / spec.total_value))
    draws = -np.log1p(-stream.uniform((n_random, n)))
    for i, e in enumerate(draws):
        out.append((f"random[{i}]", b * e / e.sum()))
    return out


def lotto_deviation_test(
    spec: GameSpec,
    sampler,
    deviations: Sequence,
    n_rounds: int,
    stream: RngStream,
    include_equilibrium: bool = True,
) -> list:
    """No fixed bid vector beats ``V/k`` against ``k - 1`` equilibrium players.

    For each deviation ``d`` the Monte Carlo mean payoff must satisfy
    ``mean <= V/k + 4 SE``, and each battlefield's mean must match the closed
    form ``v_j * min(1, d_j / scale_j)`` within 4 SE. With
    ``include_equilibrium`` a deviator who also plays the sampler must land
    within 4 SE of ``V/k``.
    """
    if spec.is_boolean:
        raise GameValidationError("deviation test applies to continuous games")
    k, n, V = spec.k, spec.n, spec.total_value
    values = spec.values_array
    scales = spec.budget * k * values / V
    fair = V / k
    seed = _seed(stream)
    opponents = sampler.sample(stream.fork(0), (n_rounds, k - 1))
    records = []

    named = [(d if isinstance(d, tuple) else (f"deviation[{i}]", d)) for i, d in enumerate(deviations)]
    for name, d in named:
        d = np.asarray(d, dtype=float)
        if d.shape != (n,) or np.any(d < 0) or d.sum() > spec.budget + BUDGET_TOL:
            raise InfeasibleDeviation(f"{name} is not a feasible bid vector")
        per_field = _deviator_shares(opponents, d) * values
        total = per_field.sum(axis=1)
        mean, se = total.mean(), total.std(ddof=1) / math.sqrt(n_rounds)
        bound = fair + 4 * se + 1e-12 * V
        records.append(CheckRecord(
            f"{name} payoff <= V/k", float(mean), float(bound), bool(mean <= bound),
            n_rounds, seed, SIGMA_DERIVATION,
        ))
        with np.errstate(divide="ignore", invalid="ignore"):
            closed = np.where(scales > 0, values * np.minimum(1.0, d / scales), 0.0)
        fmean = per_field.mean(axis=0)
        fse = per_field.std(axis=0, ddof=1) / math.sqrt(n_rounds)
        gap = np.abs(fmean - closed)
        allowed = 4 * fse + 1e-12 * V
        worst = int(np.argmax(gap - allowed))
        records.append(CheckRecord(
            f"{name} per-battlefield closed form", float(gap[worst]), float(allowed[worst]),
            bool(np.all(gap <= allowed)), n_rounds, seed, SIGMA_DERIVATION,
        ))

    if include_equilibrium:
        own = sampler.sample(stream.fork(1), n_rounds)
        shares = _deviator_shares(opponents, own) * values
        total = shares.sum(axis=1)
        mean, se = total.mean(), total.std(ddof=1) / math.sqrt(n_rounds)
        gap = abs(mean - fair)
        records.append(CheckRecord(
            "equilibrium payoff = V/k", float(gap), float(4 * se), bool(gap <= 4 * se),
            n_rounds, seed, SIGMA_DERIVATION,
        ))
    return records


def _deviator_shares(opponents: np.ndarray, own: np.ndarray) -> np.ndarray:
    """Fraction of each battlefield won by the deviator, per round."""
    own = np.broadcast_to(own, (opponents.shape[0], opponents.shape[2]))
    top = opponents.max(axis=1)
    ties = (opponents == own[:, None, :]).sum(axis=1)
    return np.where(own > top, 1.0, np.where(own == top, 1.0 / (ties + 1), 0.0))


def boolean_exploitability(spec: GameSpec, eq) -> float:
    """Exact best-response gain against opponents who all play ``eq``.

    Payoff is linear in the deviator's own probabilities, so a pure best
    response (the ``budget`` largest marginal utilities) is optimal.
    """
    probs = np.asarray(getattr(eq, "probs", eq), dtype=float)
    budget = int(spec.budget)
    if spec.k == 2:
        # marginal gain is v/2 whatever the opponent does
        gains = spec.values_array / 2
    else:
        gains = marginal_utility(probs, spec.values_array, spec.k)
    best = math.fsum(np.sort(gains)[::-1][:budget])
    current = math.fsum(probs * gains)
    return max(0.0, best - current)


def check_exploitability(spec: GameSpec, eq, epsilon: float) -> list:
    gain = boolean_exploitability(spec, eq)
    return [CheckRecord("exploitability <= epsilon", gain, epsilon, gain <= epsilon,
                        derivation="exact best response")]


def check_isometry(iso, tol: float = ISOMETRY_TOL) -> list:
    """Orthonormal columns and squared row norms on target, both at ``tol``."""
    M = np.asarray(iso.matrix)
    gram = float(np.max(np.abs(M.T @ M - np.eye(M.shape[1]))))
    rows = float(np.max(np.abs(np.sum(M * M, axis=1) - np.asarray(iso.targets))))
    return [
        CheckRecord("isometry M^T M = I", gram, tol, gram <= tol, derivation="absolute"),
        CheckRecord("isometry row norms", rows, tol, rows <= tol, derivation="absolute"),
    ]
