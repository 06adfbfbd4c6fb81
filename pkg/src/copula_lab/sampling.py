"""Seeded random generation of copula-distributed points.

The default bivariate sampler is conditional inversion: draw u and w
uniformly and solve dC/du(u, v) = w for v by bisection. Archimedean
families with a catalogued frailty law also support mixture sampling,
which doubles as a numerical check of the mixture representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special, stats

from .families import conditional_solver
from .generators import generator
from .models import (
    EPS_CLAMP,
    CopulaModel,
    CountError,
    DegenerateDataError,
    UnsupportedOperationError,
)
from .quantiles import normal_cdf, t_cdf

_GAMMA64 = 0x9E3779B97F4A7C15
_MASK64 = 0xFFFFFFFFFFFFFFFF

# bisection iterations: interval width shrinks to 2^-46 < 1e-13
_BISECT_ITERS = 46


def derive_seed(base_seed: int, index: int) -> int:
    """Seed for repetition ``index``: one splitmix64 step from the base seed.

    Within a repetition every model reuses the same stream, so estimates at
    neighboring parameter values share their underlying uniforms.
    """
    x = (int(base_seed) + (int(index) + 1) * _GAMMA64) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


@dataclass(frozen=True)
class SampleMatrix:
    """M x d matrix of points strictly inside the open unit hypercube."""

    values: np.ndarray

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def _finish(values: np.ndarray) -> SampleMatrix:
    vals = np.clip(values, EPS_CLAMP, 1.0 - EPS_CLAMP)
    vals.setflags(write=False)
    return SampleMatrix(values=vals)


@dataclass(frozen=True)
class FrailtyLaw:
    """Positive mixing law whose Laplace transform equals the generator."""

    tag: str
    params: dict
    draw: Callable  # (rng, size) -> positive array


def _stable_draw(alpha: float):
    # Chambers-Mallows-Stuck one-sided stable, Laplace transform exp(-s^alpha)
    def draw(rng, size):
        if alpha >= 1.0:
            return np.ones(size)
        v = rng.uniform(0.0, math.pi, size)
        w = rng.exponential(1.0, size)
        return (np.sin(alpha * v) / np.sin(v) ** (1.0 / alpha)
                * (np.sin((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha))
    return draw


def _sibuya_draw(alpha: float):
    # P(X > n) = Gamma(n+1-alpha) / (Gamma(1-alpha) Gamma(n+1)); inversion by
    # bisection on n, switching to the n^-alpha tail beyond 2^50.
    def log_tail(n):
        return (special.gammaln(n + 1.0 - alpha) - special.gammaln(1.0 - alpha)
                - special.gammaln(n + 1.0))

    def draw(rng, size):
        if alpha >= 1.0:
            return np.ones(size)
        target = 1.0 - rng.random(size)
        n_cap = 2.0 ** 50
        asym = target < math.exp(log_tail(n_cap))
        lo = np.zeros(size)
        hi = np.full(size, n_cap)
        for _ in range(52):
            mid = np.floor((lo + hi) / 2.0)
            take = log_tail(mid) <= np.log(target)
            hi = np.where(take, mid, hi)
            lo = np.where(take, lo, mid)
        out = np.where(asym,
                       (target * math.gamma(1.0 - alpha)) ** (-1.0 / alpha),
                       hi)
        return np.maximum(out, 1.0)
    return draw


def frailty_law(model: CopulaModel) -> FrailtyLaw:
    """The catalogued mixing law for the family, or raise if none exists."""
    fam = model.family.removeprefix("mv_")
    theta = model.theta
    if fam == "clayton":
        return FrailtyLaw("gamma", {"shape": 1.0 / theta, "scale": theta},
                          lambda rng, n: rng.gamma(1.0 / theta, theta, n))
    if fam == "gumbel":
        return FrailtyLaw("positive_stable", {"index": 1.0 / theta},
                          _stable_draw(1.0 / theta))
    if fam == "frank":
        p = -math.expm1(-theta)
        return FrailtyLaw("logarithmic_series", {"p": p},
                          lambda rng, n: rng.logseries(p, n).astype(float))
    if fam == "joe":
        return FrailtyLaw("sibuya", {"alpha": 1.0 / theta},
                          _sibuya_draw(1.0 / theta))
    if fam == "amh":
        if not 0.0 < theta < 1.0:
            raise UnsupportedOperationError(
                "amh frailty sampling requires theta in (0, 1)")
        return FrailtyLaw("geometric", {"p": 1.0 - theta},
                          lambda rng, n: rng.geometric(1.0 - theta, n).astype(float))
    raise UnsupportedOperationError(f"no catalogued frailty law for {model.family}")


def sample_frailty(model: CopulaModel, count: int, seed: int) -> SampleMatrix:
    """Mixture sampling: u_i = psi(-log(e_i) / alpha) with alpha ~ frailty law."""
    if count < 1:
        raise CountError("count must be >= 1")
    law = frailty_law(model)
    gen = generator(model)
    rng = np.random.default_rng(seed)
    alpha = law.draw(rng, count)
    e = rng.random((count, model.dim))
    u = gen.psi(-np.log(np.clip(e, 1e-300, None)) / alpha[:, None])
    return _finish(u)


def _sample_elliptical(model: CopulaModel, count: int, rng) -> np.ndarray:
    z = rng.standard_normal((count, 2))
    theta = model.theta
    x1 = z[:, 0]
    x2 = theta * z[:, 0] + math.sqrt(1.0 - theta * theta) * z[:, 1]
    if model.family == "gaussian":
        return np.column_stack([normal_cdf(x1), normal_cdf(x2)])
    g = rng.chisquare(model.nu, count)
    scale = np.sqrt(model.nu / g)
    return np.column_stack([t_cdf(x1 * scale, model.nu),
                            t_cdf(x2 * scale, model.nu)])


def _solve_conditional(model: CopulaModel, u: np.ndarray, w: np.ndarray) -> np.ndarray:
    cond = conditional_solver(model)
    u = np.clip(u, EPS_CLAMP, 1.0 - EPS_CLAMP)
    lo = np.full_like(u, EPS_CLAMP)
    hi = np.full_like(u, 1.0 - EPS_CLAMP)
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        above = cond(u, mid) > w
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return 0.5 * (lo + hi)


def _sample_conditional(model: CopulaModel, count: int, rng) -> np.ndarray:
    u = rng.random(count)
    w = rng.random(count)
    return np.column_stack([u, _solve_conditional(model, u, w)])


def sample(model: CopulaModel, count: int, seed: int) -> SampleMatrix:
    """``count`` independent draws from the copula; bit-reproducible per seed."""
    if count < 1:
        raise CountError("count must be >= 1")
    rng = np.random.default_rng(seed)
    fam = model.family
    if fam == "independence":
        return _finish(rng.random((count, model.dim)))
    if fam in ("gaussian", "student_t"):
        return _finish(_sample_elliptical(model, count, rng))
    if fam.startswith("mv_"):
        return sample_frailty(model, count, seed)
    return _finish(_sample_conditional(model, count, rng))


def sample_many(model: CopulaModel, count: int, seeds) -> np.ndarray:
    """Stacked draws, one block per seed; elementwise-identical to sample().

    Returns an array of shape (len(seeds), count, dim). Per-seed raw uniform
    draws are taken exactly as in :func:`sample`, then the (elementwise)
    transforms run once over the stacked block, which is much faster than
    separate calls for small ``count``.
    """
    if count < 1:
        raise CountError("count must be >= 1")
    seeds = list(seeds)
    r = len(seeds)
    fam = model.family
    if fam == "independence":
        out = np.stack([np.random.default_rng(s).random((count, model.dim))
                        for s in seeds])
        return np.clip(out, EPS_CLAMP, 1.0 - EPS_CLAMP)
    if fam in ("gaussian", "student_t"):
        zs, gs = [], []
        for s in seeds:
            rng = np.random.default_rng(s)
            zs.append(rng.standard_normal((count, 2)))
            if fam == "student_t":
                gs.append(rng.chisquare(model.nu, count))
        z = np.concatenate(zs)
        theta = model.theta
        x1 = z[:, 0]
        x2 = theta * z[:, 0] + math.sqrt(1.0 - theta * theta) * z[:, 1]
        if fam == "gaussian":
            flat = np.column_stack([normal_cdf(x1), normal_cdf(x2)])
        else:
            scale = np.sqrt(model.nu / np.concatenate(gs))
            flat = np.column_stack([t_cdf(x1 * scale, model.nu),
                                    t_cdf(x2 * scale, model.nu)])
        return np.clip(flat.reshape(r, count, 2), EPS_CLAMP, 1.0 - EPS_CLAMP)
    if fam.startswith("mv_"):
        law = frailty_law(model)
        gen = generator(model)
        alphas, es = [], []
        for s in seeds:
            rng = np.random.default_rng(s)
            alphas.append(law.draw(rng, count))
            es.append(rng.random((count, model.dim)))
        alpha = np.concatenate(alphas)
        e = np.concatenate(es)
        u = gen.psi(-np.log(np.clip(e, 1e-300, None)) / alpha[:, None])
        return np.clip(u.reshape(r, count, model.dim), EPS_CLAMP, 1.0 - EPS_CLAMP)
    us, ws = [], []
    for s in seeds:
        rng = np.random.default_rng(s)
        us.append(rng.random(count))
        ws.append(rng.random(count))
    u = np.concatenate(us)
    v = _solve_conditional(model, u, np.concatenate(ws))
    flat = np.column_stack([u, v])
    return np.clip(flat.reshape(r, count, 2), EPS_CLAMP, 1.0 - EPS_CLAMP)


def pseudo_observations(data) -> SampleMatrix:
    """Column-wise average ranks divided by M + 1 (the copula-scale transform)."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    m = arr.shape[0]
    if m < 2:
        raise CountError("need at least 2 rows")
    out = np.empty_like(arr)
    for j in range(arr.shape[1]):
        col = arr[:, j]
        if np.all(col == col[0]):
            raise DegenerateDataError(f"column {j} is constant")
        out[:, j] = stats.rankdata(col, method="average") / (m + 1.0)
    return SampleMatrix(values=out)
