"""Boolean Blotto: equilibrium probabilities and the budget-exact coupling.

Against ``k - 1`` opponents who each compete with probability ``p``, entering
a value-``v`` battlefield gains ``m_v(p) = (v/k) * mu(p)`` with

    mu(0) = k - 1,    mu(p) = (1 - (1 - p)**(k-1)) / p.

``mu`` falls strictly from ``k - 1`` to 1 on [0, 1]. The symmetric equilibrium
plays ``p_j = mu^{-1}(k x* / v_j)`` where ``x*`` is the smallest level at which
these probabilities fit in the budget. ``mu^{-1}`` is extended by 1 below 1
and by 0 above ``k - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GameValidationError, NonIntegerMass
from .game import GameSpec, validate_game
from .sampling import RngStream

MASS_TOL = 1e-9
LATTICE_BITS = 52
_LATTICE = 1 << LATTICE_BITS
_MAX_BISECT = 200


@dataclass(frozen=True)
class BooleanEquilibrium:
    probs: np.ndarray
    x_star: float
    epsilon: float
    achieved_tol: float

    @property
    def budget(self) -> int:
        return int(round(math.fsum(self.probs)))

    def to_dict(self) -> dict:
        return {
            "p": [float(p) for p in self.probs],
            "x_star": float(self.x_star),
            "epsilon": float(self.epsilon),
            "achieved_tol": float(self.achieved_tol),
        }


def mu(p, k: int):
    """``mu(p) = (1 - (1-p)**(k-1)) / p`` with ``mu(0) = k - 1``.

    Evaluated as ``-expm1((k-1) log1p(-p)) / p`` so small ``p`` keeps full
    relative precision.
    """
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        body = -np.expm1((k - 1) * np.log1p(-p)) / p
    out = np.where(p == 0, float(k - 1), np.where(p == 1, 1.0, body))
    return out if out.ndim else float(out)


def marginal_utility(p, v, k: int):
    """Gain ``m_v(p)`` from competing on a value-``v`` battlefield."""
    return np.asarray(v, dtype=float) / k * mu(p, k)


def mu_inverse(x, k: int, tol: float):
    """Extended inverse of ``mu`` to within ``tol`` by bisection.

    Returns 1 for ``x <= 1`` and 0 for ``x >= k - 1``. Since ``|mu'| >= 1``
    the bracket on ``p`` is the error bound directly.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.where(x <= 1.0, 1.0, 0.0)
    inner = (x > 1.0) & (x < k - 1)
    if inner.any():
        xi = x[inner]
        lo = np.zeros_like(xi)
        hi = np.ones_like(xi)
        steps = min(_MAX_BISECT, max(1, math.ceil(math.log2(1.0 / (2.0 * tol)))))
        for _ in range(steps):
            mid = 0.5 * (lo + hi)
            right = mu(mid, k) > xi
            if not np.any((mid != lo) & (mid != hi)):
                break
            lo = np.where(right, mid, lo)
            hi = np.where(right, hi, mid)
        out[inner] = 0.5 * (lo + hi)
    return float(out[0]) if scalar else out


def budget_fn(x: float, spec: GameSpec, tol: float) -> float:
    """Total probability mass ``B(x) = sum_j mu^{-1}(k x / v_j)``, to within ``tol``."""
    v = spec.values_array
    return float(np.sum(mu_inverse(spec.k * x / v, spec.k, tol / spec.n)))


def two_player_pure(spec: GameSpec) -> np.ndarray:
    """Compete on the ``budget`` most valuable battlefields (lowest index wins ties)."""
    order = np.argsort(-spec.values_array, kind="stable")
    bids = np.zeros(spec.n)
    bids[order[: int(spec.budget)]] = 1.0
    return bids


def large_k_limit_probs(spec: GameSpec) -> np.ndarray:
    """Waterfall allocation: in decreasing value order, battlefield ``l`` gets
    ``min(1, remaining * v_l / sum_{j >= l} v_j)`` of the budget."""
    v = spec.values_array
    order = np.argsort(-v, kind="stable")
    vs = v[order]
    tail = np.cumsum(vs[::-1])[::-1]
    remaining = float(spec.budget)
    out = np.zeros(spec.n)
    for i in range(spec.n):
        share = min(1.0, remaining * vs[i] / tail[i])
        out[i] = share
        remaining -= share
    probs = np.empty(spec.n)
    probs[order] = out
    return probs


def rescale_to_budget(p, budget: float) -> np.ndarray:
    """Scale ``p`` to total ``budget`` without leaving [0, 1].

    Entries pushed above 1 are pinned at 1 and the shortfall is spread over
    the remaining entries in proportion to their size; repeats until stable
    (at most ``n`` passes).
    """
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    if budget >= p.size:
        return np.ones_like(p)
    if budget <= 0:
        return np.zeros_like(p)
    pinned = np.zeros(p.size, dtype=bool)
    for _ in range(p.size + 1):
        free = ~pinned
        need = budget - pinned.sum()
        mass = math.fsum(p[free])
        if mass > 0:
            p[free] = p[free] / mass * need
        else:
            p[free] = need / free.sum()
        over = free & (p > 1.0)
        if not over.any():
            break
        p[over] = 1.0
        pinned |= over
    # push the last rounding residual into the largest unpinned entry so
    # that fsum(p) == budget exactly
    for _ in range(8):
        resid = budget - math.fsum(p)
        if resid == 0:
            break
        free = np.flatnonzero(~pinned & (p > 0) & (p < 1))
        if free.size == 0:
            break
        j = free[np.argmax(p[free])]
        p[j] = min(1.0, max(0.0, p[j] + resid))
    return p


def solve_equilibrium(spec: GameSpec, epsilon: float = 1e-6) -> BooleanEquilibrium:
    """Probabilities of an ``epsilon``-approximate symmetric equilibrium.

    Bisects for the level ``x*`` on ``[0, (k-1) V]`` with the stopping rule
    and inner precision chosen so every ``p_j`` ends within
    ``epsilon / (V k n^2)`` of the exact value before the final rescale onto
    the budget. ``k = 2`` returns the pure top-``budget`` strategy.
    """
    validate_game(spec)
    if not spec.is_boolean:
        raise GameValidationError("solve_equilibrium needs a Boolean game")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    k, n, budget = spec.k, spec.n, int(spec.budget)
    v = spec.values_array
    V = spec.total_value

    if k == 2:
        probs = two_player_pure(spec)
        chosen = v[probs == 1]
        x_star = float(chosen.min()) / 2 if chosen.size else float(v.max()) / 2
        return BooleanEquilibrium(probs, x_star, epsilon, 0.0)
    if budget == n:
        return BooleanEquilibrium(np.ones(n), 0.0, epsilon, 0.0)
    if budget == 0:
        return BooleanEquilibrium(np.zeros(n), (k - 1) * float(v.max()) / k, epsilon, 0.0)

    v_min = float(v.min())
    x_tol = epsilon * v_min / (V * k**2 * n**2) / 2
    p_tol = epsilon / (V * k**2 * n**2) / 2
    b_tol = x_tol / (2 * V * k**2)

    lo, hi = 0.0, (k - 1) * V
    while hi - lo >= x_tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if budget_fn(mid, spec, b_tol) <= budget:
            hi = mid
        else:
            lo = mid
    # hi satisfies B(hi) <= budget, so the rescale below only scales up
    x_star = hi
    raw = mu_inverse(k * x_star / v, k, p_tol)
    probs = rescale_to_budget(raw, budget)
    return BooleanEquilibrium(probs, x_star, epsilon, epsilon / (V * k * n))


class BooleanCoupling:
    """Budget-exact coupling of independent-looking Bernoulli marginals.

    Lay the intervals ``[alpha_j, alpha_j + p_j)`` end to end over
    ``[0, budget)`` and pick a random offset ``beta``; battlefield ``j`` is
    played iff some point of ``beta + Z`` falls in its interval. Each interval
    has length at most 1, so exactly ``budget`` battlefields are played.

    Probabilities are held as integers in units of ``2**-52`` so the interval
    arithmetic, and hence the exact count, never depends on rounding.
    """

    def __init__(self, probs):
        probs = np.asarray(probs, dtype=float)
        if np.any(~np.isfinite(probs)) or np.any(probs < 0) or np.any(probs > 1):
            raise GameValidationError("probabilities must lie in [0, 1]")
        total = math.fsum(probs)
        budget = round(total)
        if abs(total - budget) > MASS_TOL:
            raise NonIntegerMass(f"probabilities sum to {total!r}, not an integer")
        self.probs = rescale_to_budget(probs, budget) if total != budget else probs
        self.budget = int(budget)
        self.lengths = _quantize(self.probs, self.budget)
        starts, edge = [], 0
        for length in self.lengths:
            starts.append(edge % _LATTICE)
            edge += int(length)
        self._starts = np.array(starts, dtype=np.int64)

    @property
    def lattice_probs(self) -> np.ndarray:
        """The marginals actually realized: multiples of ``2**-52``."""
        return self.lengths / float(_LATTICE)

    def from_offsets(self, offsets) -> np.ndarray:
        offsets = np.asarray(offsets, dtype=np.int64)
        r = np.mod(offsets[..., None] - self._starts, _LATTICE)
        return (r < self.lengths).astype(float)

    def from_beta(self, beta) -> np.ndarray:
        """Deterministic bids for a given offset ``beta`` in [0, 1)."""
        beta = np.asarray(beta, dtype=float)
        return self.from_offsets(np.floor(beta * _LATTICE).astype(np.int64))

    def sample(self, stream: RngStream, size=None) -> np.ndarray:
        return self.from_offsets(stream.integers(_LATTICE, size))

    def marginal_probs(self) -> np.ndarray:
        return self.lattice_probs


def _quantize(probs: np.ndarray, budget: int) -> np.ndarray:
    scaled = probs * _LATTICE
    lengths = np.floor(scaled).astype(np.int64)
    need = budget * _LATTICE - int(sum(int(x) for x in lengths))
    frac = np.flatnonzero((probs > 0) & (probs < 1))
    if need and frac.size == 0:
        raise NonIntegerMass("cannot place residual mass on 0/1 entries")
    # largest remainders first when adding, smallest first when removing
    rema = scaled[frac] - lengths[frac]
    order = frac[np.argsort(-rema if need > 0 else rema, kind="stable")]
    while need:
        moved = False
        for j in order:
            if need > 0 and lengths[j] < _LATTICE:
                step = min(need, _LATTICE - int(lengths[j]), max(1, need // frac.size))
                lengths[j] += step
                need -= step
                moved = True
            elif need < 0 and lengths[j] > 0:
                step = min(-need, int(lengths[j]), max(1, -need // frac.size))
                lengths[j] -= step
                need += step
                moved = True
            if not need:
                break
        if not moved:
            raise NonIntegerMass("residual mass does not fit in [0, 1]")
    return lengths


def sample_boolean_coupling(eq, stream: RngStream, size=None) -> np.ndarray:
    """0/1 bid vector(s) with marginals ``eq.probs`` and exactly ``budget`` ones."""
    probs = eq.probs if isinstance(eq, BooleanEquilibrium) else eq
    return BooleanCoupling(probs).sample(stream, size)


class BooleanSampler(BooleanCoupling):
    """Equilibrium sampler for a Boolean game (wraps the solved probabilities)."""

    def __init__(self, spec: GameSpec, eq: Optional[BooleanEquilibrium] = None, epsilon: float = 1e-6):
        self.spec = spec
        self.equilibrium = eq if eq is not None else solve_equilibrium(spec, epsilon)
        super().__init__(self.equilibrium.probs)
