"""Three-player equilibrium via a rotated sphere.

For a uniform point ``U`` on the unit 2-sphere and any ``c`` in R^3,
``(c . U)**2`` is ``|c|**2 * Beta(1/2, 1)``. So if ``M`` is an ``n x 3``
isometry (``M^T M = I``) whose squared row norms are ``3 v_j / V``, the bid
vector ``A_j = (M_j . U)**2`` has the three-player equilibrium marginals and
sums to ``|MU|**2 = 1`` on every draw.

``construct_m`` builds such an ``M`` greedily, starting from ``(I_m; 0)`` and
applying 2x2 rotations (``rotate_pair``) to pairs of rows until every row has
its target squared norm.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    PreconditionViolated,
    SumMismatch,
    TargetOutOfRange,
    ValueTooLarge,
    WrongPlayerCount,
)
from .game import GameSpec
from .sampling import RngStream, beta_power_cdf, unit_sphere3

ORDER_SLACK = 1e-12
ORTHO_RTOL = 1e-9
SUM_TOL = 1e-9


@dataclass(frozen=True)
class RotationResult:
    w1: np.ndarray
    w2: np.ndarray
    hit1: bool
    hit2: bool
    # squared norms of w1, w2; a hit norm is the target itself, not recomputed
    norm1: float
    norm2: float


@dataclass(frozen=True)
class Isometry:
    matrix: np.ndarray
    targets: np.ndarray

    @property
    def m(self) -> int:
        return self.matrix.shape[1]


def rotate_pair(u1, u2, t1, t2, norm1=None, norm2=None) -> RotationResult:
    """Rotate two orthogonal vectors within their span so one of them lands
    exactly on its squared-norm target.

    Requires ``|u1|^2 >= t1 >= t2 >= |u2|^2`` and ``u1 . u2 = 0``. The output
    ``w1 = a u1 - b u2``, ``w2 = b u1 + a u2`` (with ``a^2 + b^2 = 1``) keeps
    ``W W^T = U U^T``, still brackets the targets, and meets at least one of
    them exactly, flagged by ``hit1`` / ``hit2``. ``norm1``/``norm2`` let the
    caller pass tracked squared norms instead of recomputing them.
    """
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    n1 = float(u1 @ u1) if norm1 is None else float(norm1)
    n2 = float(u2 @ u2) if norm2 is None else float(norm2)

    dot = float(u1 @ u2)
    if abs(dot) > ORTHO_RTOL * math.sqrt(n1 * n2) + 1e-300:
        raise PreconditionViolated(f"rows are not orthogonal (dot={dot:.3e})")
    if not (n1 + ORDER_SLACK >= t1 and t1 + ORDER_SLACK >= t2 and t2 + ORDER_SLACK >= n2):
        raise PreconditionViolated(
            f"need |u1|^2 >= t1 >= t2 >= |u2|^2, got {n1}, {t1}, {t2}, {n2}"
        )
    t1 = min(t1, n1)
    t2 = min(max(t2, n2), t1)

    if n1 == n2:
        # forces t1 == t2 == n1: nothing to rotate
        return RotationResult(u1.copy(), u2.copy(), True, True, t1, t2)

    gap = n1 - n2
    if n1 - t1 >= t2 - n2:
        a2 = (n1 - t2) / gap
        hit1, hit2 = False, True
        norm1_out, norm2_out = n1 + n2 - t2, t2
    else:
        a2 = (t1 - n2) / gap
        hit1, hit2 = True, False
        norm1_out, norm2_out = t1, n1 + n2 - t1
    a2 = min(max(a2, 0.0), 1.0)
    a = math.sqrt(a2)
    b = math.sqrt(1.0 - a2)
    w1 = a * u1 - b * u2
    w2 = b * u1 + a * u2
    return RotationResult(w1, w2, hit1, hit2, norm1_out, norm2_out)


def construct_m(
    s,
    m: int,
    *,
    observer: Optional[Callable] = None,
) -> Isometry:
    """Build an ``n x m`` matrix with orthonormal columns and squared row
    norms ``s``.

    ``s`` must lie in [0, 1] and sum to ``m`` (within 1e-9; it is then
    rescaled onto ``m``). Runs in O(nm). If given, ``observer(M, j, l, s)``
    is called at the top of every loop iteration with the row-permuted state
    (0-based cursors), for auditing loop invariants.
    """
    s = np.asarray(s, dtype=float)
    n = s.size
    if m < 1:
        raise ValueError("m must be positive")
    if np.any(~np.isfinite(s)) or np.any(s < -SUM_TOL) or np.any(s > 1 + SUM_TOL):
        raise TargetOutOfRange("targets must lie in [0, 1]")
    total = math.fsum(s)
    if n < m or abs(total - m) > SUM_TOL:
        raise SumMismatch(f"targets sum to {total!r}, expected {m}")
    s = np.clip(s, 0.0, 1.0)
    s = np.clip(s * (m / math.fsum(s)), 0.0, 1.0)

    # the m largest targets go first: s_j >= s_l for every j < m <= l
    if n > m:
        top = np.argpartition(-s, m - 1)[:m]
        rest = np.setdiff1d(np.arange(n), top, assume_unique=True)
        perm = np.concatenate([top, rest])
    else:
        perm = np.arange(n)
    sp = s[perm]

    M = np.zeros((n, m))
    M[:m, :m] = np.eye(m)
    norms = np.zeros(n)
    norms[:m] = 1.0

    j, l = 0, m
    while j < m and l < n:
        if observer is not None:
            observer(M, j, l, sp)
        r = rotate_pair(M[j], M[l], sp[j], sp[l], norms[j], norms[l])
        M[j], M[l] = r.w1, r.w2
        norms[j], norms[l] = r.norm1, r.norm2
        if r.hit1:
            j += 1
        if r.hit2:
            l += 1

    out = np.empty_like(M)
    out[perm] = M
    return Isometry(out, s)


@functools.lru_cache(maxsize=64)
def _cached_isometry(values: tuple) -> Isometry:
    v = np.asarray(values, dtype=float)
    s = np.minimum(3.0 * v / math.fsum(values), 1.0)
    return construct_m(s, 3)


class SphereSampler:
    """Equilibrium sampler for a three-player game with every ``v_j <= V/3``.

    The isometry is built once per set of values and cached.
    """

    def __init__(self, spec: GameSpec, isometry: Optional[Isometry] = None):
        if spec.k != 3:
            raise WrongPlayerCount(f"sphere construction needs k=3, got k={spec.k}")
        limit = spec.total_value / 3.0
        worst = max(range(spec.n), key=lambda j: spec.values[j])
        if spec.values[worst] > limit + 1e-12 * spec.total_value:
            raise ValueTooLarge(
                f"battlefield {worst + 1} has value {spec.values[worst]} > V/3 = {limit}"
            )
        self.spec = spec
        self.isometry = isometry if isometry is not None else _cached_isometry(spec.values)
        self.scales = spec.budget * 3.0 * spec.values_array / spec.total_value

    def sample(self, stream: RngStream, size=None) -> np.ndarray:
        u = unit_sphere3(stream, size)
        return self.spec.budget * np.square(u @ self.isometry.matrix.T)

    def marginal_cdf(self, j: int):
        scale = self.scales[j]
        return lambda x: beta_power_cdf(x, scale, 3)


def sample_sphere_equilibrium(spec: GameSpec, stream: RngStream) -> np.ndarray:
    """One equilibrium bid vector (length ``n``) for a three-player game."""
    return SphereSampler(spec).sample(stream)
