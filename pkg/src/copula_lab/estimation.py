"""Entropy, mutual information, KL divergence, and association measures.

Sign convention: the copula entropy is H = -E[log c] <= 0 for any
absolutely continuous copula, and mutual information is MI = -H >= 0.
All quantities are in nats.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .families import cdf, log_pdf
from .models import (
    ComparisonError,
    CopulaModel,
    CountError,
    DegenerateDataError,
    NumericError,
    ShapeError,
    UnsupportedOperationError,
)
from .quantiles import normal_cdf, normal_quantile, t_cdf, t_quantile
from .sampling import SampleMatrix

QUAD_EPS = 1e-6  # entropy integrals run over [eps, 1-eps]^2


@dataclass
class EntropyEstimate:
    """Per-parameter entropy statistics across repetitions (in nats)."""

    point_value: float
    rep_values: list = field(default_factory=list)
    mean: float = math.nan
    lo95: float = math.nan
    hi95: float = math.nan

    @classmethod
    def from_reps(cls, rep_values) -> "EntropyEstimate":
        vals = np.asarray(list(rep_values), dtype=float)
        lo, hi = (np.percentile(vals, [2.5, 97.5]) if vals.size > 1
                  else (vals[0], vals[0]))
        return cls(point_value=float(vals[0]), rep_values=[float(x) for x in vals],
                   mean=float(vals.mean()), lo95=float(lo), hi95=float(hi))


@dataclass(frozen=True)
class AssociationValue:
    kind: str
    value: float


def _check_sample(model: CopulaModel, sample: SampleMatrix) -> np.ndarray:
    vals = sample.values if isinstance(sample, SampleMatrix) else np.asarray(sample)
    if vals.ndim != 2 or vals.shape[1] != model.dim:
        raise ShapeError(f"sample dimension {vals.shape} does not match d={model.dim}")
    return vals


def empirical_entropy(model: CopulaModel, sample: SampleMatrix) -> float:
    """-(1/M) sum log c(row); exactly 0 for the independence copula."""
    vals = _check_sample(model, sample)
    return float(-np.mean(log_pdf(model, vals)))


def mutual_information(model: CopulaModel, sample: SampleMatrix) -> float:
    return -empirical_entropy(model, sample)


def kl_divergence(model_p: CopulaModel, model_q: CopulaModel,
                  sample_from_p: SampleMatrix) -> float:
    """(1/M) sum [log p - log q] on a sample from p; nonnegative in expectation."""
    if model_p.family != model_q.family or model_p.dim != model_q.dim:
        raise ComparisonError("KL divergence requires matching family and dimension")
    vals = _check_sample(model_p, sample_from_p)
    return float(np.mean(log_pdf(model_p, vals) - log_pdf(model_q, vals)))


@functools.lru_cache(maxsize=64)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def _panel_axis(lo: float, hi: float, breaks: tuple, n_target: int):
    """Composite Gauss-Legendre rule on [lo, hi] refined toward both ends."""
    brk = [lo] + [b for b in breaks if lo < b < hi] + [hi]
    per = max(4, int(round(n_target / (len(brk) - 1))))
    x0, w0 = _leggauss(per)
    nodes, weights = [], []
    for a, b in zip(brk[:-1], brk[1:]):
        half = 0.5 * (b - a)
        nodes.append(a + half * (x0 + 1.0))
        weights.append(half * w0)
    return np.concatenate(nodes), np.concatenate(weights)


_ENTROPY_BREAKS = (1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99,
                   0.999, 1.0 - 1e-4, 1.0 - 1e-5)


def _entropy_quad_once(model: CopulaModel, n_axis: int) -> float:
    x, w = _panel_axis(QUAD_EPS, 1.0 - QUAD_EPS, _ENTROPY_BREAKS, n_axis)
    uu, vv = np.meshgrid(x, x, indexing="ij")
    pts = np.column_stack([uu.ravel(), vv.ravel()])
    lc = log_pdf(model, pts)
    integrand = np.where(lc > -700.0, np.exp(lc) * lc, 0.0)
    ww = np.outer(w, w).ravel()
    return float(-np.sum(ww * integrand))


def _entropy_quad_conditional(model: CopulaModel, n_axis: int) -> float:
    # same integral after the exact substitution w = dC/du(u, v):
    # -int c log c dv du = -int log c(u, V(u, w)) dw du, which flattens
    # densities concentrated on narrow conditional ridges
    from .sampling import _solve_conditional

    x, w = _panel_axis(QUAD_EPS, 1.0 - QUAD_EPS, _ENTROPY_BREAKS, n_axis)
    uu, ww_ = np.meshgrid(x, x, indexing="ij")
    u_flat = uu.ravel()
    v_flat = _solve_conditional(model, u_flat, ww_.ravel())
    lc = log_pdf(model, np.column_stack([u_flat, v_flat]))
    weights = np.outer(w, w).ravel()
    return float(-np.sum(weights * lc))


def entropy_quadrature(model: CopulaModel, tol: float = 1e-4) -> float:
    """Deterministic tensor Gauss-Legendre estimate of -int c log c.

    Starts at 256 nodes per axis and doubles until the estimate moves by
    less than ``tol``. Densities too concentrated for the CDF-space grid
    (narrow conditional ridges) are retried in conditional-quantile
    coordinates, an exact reparametrization of the same integral.
    Bivariate only.
    """
    if model.dim != 2:
        raise UnsupportedOperationError("quadrature entropy is bivariate only")
    prev = _entropy_quad_once(model, 256)
    for n_axis in (512, 1024):
        cur = _entropy_quad_once(model, n_axis)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    prev = _entropy_quad_conditional(model, 256)
    for n_axis in (512,):
        cur = _entropy_quad_conditional(model, n_axis)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    raise NumericError(f"entropy quadrature did not converge for {model.describe()}")


def _spearman_integral_cdf(model: CopulaModel, n_axis: int) -> float:
    x, w = _leggauss(n_axis)
    u = 0.5 * (x + 1.0)
    uu, vv = np.meshgrid(u, u, indexing="ij")
    c = cdf(model, np.column_stack([uu.ravel(), vv.ravel()]))
    ww = np.outer(w, w).ravel() * 0.25
    return float(np.sum(ww * c))


def _spearman_integral_elliptical(model: CopulaModel, n_axis: int) -> float:
    # integral of C over the square, integrated by parts once:
    # int C du dv = int (1-p) dC/du(p, q) dp dq; one special-function call/node
    x, w = _leggauss(n_axis)
    p = 0.5 * (x + 1.0)
    theta = model.theta
    if model.family == "gaussian":
        xs = normal_quantile(p)
        arg = (xs[None, :] - theta * xs[:, None]) / math.sqrt(1.0 - theta * theta)
        g = normal_cdf(arg)
    else:
        nu = model.nu
        xs = t_quantile(p, nu)
        scale = np.sqrt((nu + xs * xs) * (1.0 - theta * theta) / (nu + 1.0))
        g = t_cdf((xs[None, :] - theta * xs[:, None]) / scale[:, None], nu + 1.0)
    ww = np.outer(w * (1.0 - p), w) * 0.25
    return float(np.sum(ww * g))


def spearman_analytic(model: CopulaModel) -> AssociationValue:
    """rho_s = 12 * int C(u,v) du dv - 3 by converged Gauss-Legendre quadrature."""
    if model.dim != 2:
        raise UnsupportedOperationError("analytic Spearman is bivariate only")
    integ = (_spearman_integral_elliptical
             if model.family in ("gaussian", "student_t")
             else _spearman_integral_cdf)
    prev = integ(model, 128)
    for n_axis in (256, 512):
        cur = integ(model, n_axis)
        if abs(cur - prev) < 1e-7 / 12.0:
            return AssociationValue("spearman_analytic", 12.0 * cur - 3.0)
        prev = cur
    return AssociationValue("spearman_analytic", 12.0 * prev - 3.0)


def _two_columns(sample, col_i: int, col_j: int):
    vals = sample.values if isinstance(sample, SampleMatrix) else np.asarray(sample)
    x, y = vals[:, col_i], vals[:, col_j]
    if x.size < 3:
        raise CountError("need at least 3 rows")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DegenerateDataError("constant column")
    return x, y


def spearman_sample(sample, col_i: int = 0, col_j: int = 1) -> AssociationValue:
    """Pearson correlation of average ranks."""
    x, y = _two_columns(sample, col_i, col_j)
    rx = stats.rankdata(x, method="average")
    ry = stats.rankdata(y, method="average")
    r = np.corrcoef(rx, ry)[0, 1]
    return AssociationValue("spearman_sample", float(r))


def kendall_sample(sample, col_i: int = 0, col_j: int = 1) -> AssociationValue:
    """Concordance-based Kendall tau (O(M log M) implementation)."""
    x, y = _two_columns(sample, col_i, col_j)
    tau = stats.kendalltau(x, y).statistic
    return AssociationValue("kendall_sample", float(tau))
