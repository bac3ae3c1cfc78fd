"""Seedable random streams and the samplers the equilibrium constructions use.

Uniform bits come from numpy's counter-based Philox generator; everything
above that (Gaussians, Gamma, Beta, Dirichlet, sphere points) is built here
from uniforms so the transformations are pinned and auditable.

Every sampler takes an optional ``size``. With ``size=None`` a single draw is
returned; otherwise ``size`` leading axes are prepended.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateDraw

MAX_RETRIES = 100


class RngStream:
    """Deterministic stream of uniforms addressed by ``(seed, path)``.

    ``fork(i)`` derives an independent child stream; the same seed and fork
    path always reproduce the same sequence.
    """

    def __init__(self, seed: int = 0, path: tuple = ()):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.seed = seed
        self.path = tuple(int(p) for p in path)
        seq = np.random.SeedSequence(seed, spawn_key=self.path)
        self._gen = np.random.Generator(np.random.Philox(seq))

    def fork(self, index: int) -> "RngStream":
        return RngStream(self.seed, self.path + (int(index),))

    def uniform(self, size=None):
        """Uniform draws on [0, 1)."""
        return self._gen.random(size)

    def integers(self, high: int, size=None):
        """Uniform integers on [0, high)."""
        return self._gen.integers(0, high, size=size, dtype=np.int64)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, path={self.path})"


def uniform01(stream: RngStream, size=None):
    return stream.uniform(size)


def beta_power(theta, k: int, stream: RngStream, size=None):
    """``theta * Beta(1/(k-1), 1)`` by inverting the CDF ``(x/theta)**(1/(k-1))``."""
    return beta_power_from_uniform(theta, k, stream.uniform(size))


def beta_power_from_uniform(theta, k: int, u):
    return theta * np.power(u, k - 1)


def beta_power_cdf(x, theta, k: int):
    """CDF of ``theta * Beta(1/(k-1), 1)``; a point mass at 0 when theta is 0."""
    x = np.asarray(x, dtype=float)
    if theta <= 0:
        return np.where(x >= 0, 1.0, 0.0)
    ratio = np.clip(x / theta, 0.0, 1.0)
    return np.power(ratio, 1.0 / (k - 1))


def standard_normal(stream: RngStream, size=None):
    """Box-Muller transform; two uniforms make two Gaussians."""
    count = 1 if size is None else int(np.prod(size))
    pairs = (count + 1) // 2
    u = stream.uniform((pairs, 2))
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    angle = 2.0 * math.pi * u[:, 1]
    z = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)]).ravel()
    z = z[:count]
    return float(z[0]) if size is None else z.reshape(size)


def gamma_small_shape(alpha: float, stream: RngStream, size=None):
    """Draw ``Gamma(alpha, 1)`` for ``0 < alpha <= 1``.

    Shape 1 is the exponential inverse CDF. Below 1 this is the Ahrens-Dieter
    (1974) "GS" acceptance-rejection scheme, run batch-wise over the array.
    """
    if not 0 < alpha <= 1:
        raise ValueError(f"shape must lie in (0, 1], got {alpha}")
    shape = () if size is None else size
    count = int(np.prod(shape))
    if alpha == 1.0:
        out = -np.log1p(-stream.uniform(count))
    else:
        out = _ahrens_dieter_gs(alpha, count, stream)
    return float(out[0]) if size is None else out.reshape(shape)


def _ahrens_dieter_gs(alpha: float, count: int, stream: RngStream) -> np.ndarray:
    b = (math.e + alpha) / math.e
    out = np.empty(count)
    todo = np.arange(count)
    while todo.size:
        m = todo.size
        u = stream.uniform((m, 2))
        p = b * u[:, 0]
        low = p <= 1.0
        x = np.empty(m)
        accept = np.empty(m, dtype=bool)
        x[low] = np.power(p[low], 1.0 / alpha)
        accept[low] = u[low, 1] <= np.exp(-x[low])
        high = ~low
        x[high] = -np.log((b - p[high]) / alpha)
        accept[high] = u[high, 1] <= np.power(x[high], alpha - 1.0)
        out[todo[accept]] = x[accept]
        todo = todo[~accept]
    return out


def dirichlet_symmetric(m: int, alpha: float, stream: RngStream, size=None):
    """``Dir(alpha, ..., alpha)`` on the ``(m-1)``-simplex by normalizing
    ``m`` i.i.d. ``Gamma(alpha, 1)`` draws."""
    if m < 2:
        raise ValueError("Dirichlet dimension must be at least 2")
    shape = () if size is None else (size if isinstance(size, tuple) else (size,))
    count = int(np.prod(shape))
    y = gamma_small_shape(alpha, stream, (count, m))
    total = y.sum(axis=1)
    for _ in range(MAX_RETRIES):
        bad = total <= 0
        if not bad.any():
            break
        y[bad] = gamma_small_shape(alpha, stream, (int(bad.sum()), m))
        total[bad] = y[bad].sum(axis=1)
    else:
        raise DegenerateDraw("Gamma draws kept summing to zero")
    x = y / total[:, None]
    return x[0] if size is None else x.reshape(shape + (m,))


def unit_sphere3(stream: RngStream, size=None):
    """Uniform point on the unit 2-sphere: three Gaussians, normalized."""
    shape = () if size is None else (size if isinstance(size, tuple) else (size,))
    count = int(np.prod(shape))
    g = standard_normal(stream, (count, 3))
    norm = np.linalg.norm(g, axis=1)
    for _ in range(MAX_RETRIES):
        bad = norm == 0
        if not bad.any():
            break
        g[bad] = standard_normal(stream, (int(bad.sum()), 3))
        norm[bad] = np.linalg.norm(g[bad], axis=1)
    else:
        raise DegenerateDraw("Gaussian triple kept landing on the origin")
    u = g / norm[:, None]
    return u[0] if size is None else u.reshape(shape + (3,))
