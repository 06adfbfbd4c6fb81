"""Numerical checkers for the monotonicity sufficient conditions.

Each checker returns a :class:`PropertyReport` whose ``worst_violation``
is comparable against the report tolerance; checks never prove a
property, they bound its worst violation on a finite grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .families import archimedean_cdf, cdf, log_pdf
from .generators import CompositionMap, GeneratorSpec, generator, generator_composition
from .models import (
    ComparisonError,
    CopulaModel,
    GridError,
    OrderingError,
    UnsupportedOperationError,
)
from .sampling import derive_seed, sample, sample_frailty

TOL_ALGEBRAIC = 1e-7
TOL_LOG_INEQUALITY = 1e-6


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid for the inequality checks."""

    resolution: int = 50
    lo: float = 0.01
    hi: float = 0.99
    pair_budget: int = 200_000

    def __post_init__(self):
        if self.resolution < 4:
            raise GridError("resolution must be >= 4")
        if not 0.0 < self.lo < self.hi < 1.0:
            raise GridError("need 0 < lo < hi < 1")

    def axis(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.resolution)


@dataclass
class PropertyReport:
    """Outcome of one numerical property check."""

    property: str
    model: str
    passed: bool
    worst_violation: float
    tolerance: float
    worst_location: Optional[tuple] = None
    pairs_tested: int = 0
    note: str = ""

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        loc = f" at {self.worst_location}" if self.worst_location else ""
        return (f"[{status}] {self.property} {self.model}: "
                f"worst={self.worst_violation:.3g} tol={self.tolerance:.3g}{loc}")


def _rectangle_pairs(res: int, budget: int, seed: int):
    """Index quadruples (i1<i2, j1<j2); all if affordable, else a seeded sample."""
    i1, i2 = np.triu_indices(res, k=1)
    k = i1.size
    if k * k <= budget:
        a = np.repeat(np.arange(k), k)
        b = np.tile(np.arange(k), k)
    else:
        rng = np.random.default_rng(seed)
        a = rng.integers(0, k, size=budget)
        b = rng.integers(0, k, size=budget)
    return (i1, i2), (a, b)


def check_tp2(model: CopulaModel, grid: GridSpec | None = None,
              tol: float = TOL_LOG_INEQUALITY, mode: str = "tp2",
              pair_seed: int = 0) -> PropertyReport:
    """Total positivity of order 2 of the density, tested in the log domain.

    On rectangles u1<u2, v1<v2 checks
    log c(u1,v1) + log c(u2,v2) >= log c(u1,v2) + log c(u2,v1) - tol
    (reversed for ``mode="rr2"``).
    """
    if model.dim != 2:
        raise UnsupportedOperationError("TP2 check is bivariate")
    if mode not in ("tp2", "rr2"):
        raise GridError(f"unknown mode {mode!r}")
    grid = grid or GridSpec()
    ax = grid.axis()
    uu, vv = np.meshgrid(ax, ax, indexing="ij")
    lc = log_pdf(model, np.column_stack([uu.ravel(), vv.ravel()]))
    lc = lc.reshape(len(ax), len(ax))
    (i1, i2), (a, b) = _rectangle_pairs(len(ax), grid.pair_budget, pair_seed)
    diff_rows = lc[i1, :] - lc[i2, :]          # (K, res)
    d = diff_rows[a, i1[b]] - diff_rows[a, i2[b]]
    violation = -d if mode == "tp2" else d
    worst = int(np.argmax(violation))
    loc = ((float(ax[i1[a[worst]]]), float(ax[i1[b[worst]]])),
           (float(ax[i2[a[worst]]]), float(ax[i2[b[worst]]])))
    worst_v = float(violation[worst])
    return PropertyReport(property=f"density_{mode}", model=model.describe(),
                          passed=worst_v <= tol, worst_violation=worst_v,
                          tolerance=tol, worst_location=loc,
                          pairs_tested=int(d.size))


def check_supermodular_logdensity(model: CopulaModel, grid: GridSpec | None = None,
                                  tol: float = TOL_LOG_INEQUALITY,
                                  mode: str = "super",
                                  pair_seed: int = 0) -> PropertyReport:
    """Supermodularity of log c via coordinatewise max/min of point pairs.

    Must agree verdict-for-verdict with :func:`check_tp2` on the same grid;
    only pairs differing in both coordinates are informative.
    """
    if model.dim != 2:
        raise UnsupportedOperationError("supermodularity check is bivariate")
    if mode not in ("super", "sub"):
        raise GridError(f"unknown mode {mode!r}")
    grid = grid or GridSpec()
    ax = grid.axis()
    uu, vv = np.meshgrid(ax, ax, indexing="ij")
    lc = log_pdf(model, np.column_stack([uu.ravel(), vv.ravel()]))
    lc = lc.reshape(len(ax), len(ax))
    res = len(ax)
    rng = np.random.default_rng(pair_seed)
    n_pairs = grid.pair_budget
    iu = rng.integers(0, res, size=n_pairs)
    ju = rng.integers(0, res, size=n_pairs)
    iv = rng.integers(0, res, size=n_pairs)
    jv = rng.integers(0, res, size=n_pairs)
    keep = (iu != iv) & (ju != jv) & ((iu < iv) != (ju < jv))  # discordant only
    iu, ju, iv, jv = iu[keep], ju[keep], iv[keep], jv[keep]
    hi_i, lo_i = np.maximum(iu, iv), np.minimum(iu, iv)
    hi_j, lo_j = np.maximum(ju, jv), np.minimum(ju, jv)
    d = lc[hi_i, hi_j] + lc[lo_i, lo_j] - lc[iu, ju] - lc[iv, jv]
    violation = -d if mode == "super" else d
    worst = int(np.argmax(violation))
    loc = ((float(ax[iu[worst]]), float(ax[ju[worst]])),
           (float(ax[iv[worst]]), float(ax[jv[worst]])))
    worst_v = float(violation[worst])
    return PropertyReport(property=f"logdensity_{mode}modular", model=model.describe(),
                          passed=worst_v <= tol, worst_violation=worst_v,
                          tolerance=tol, worst_location=loc,
                          pairs_tested=int(d.size))


def check_pqd_order(model_lo: CopulaModel, model_hi: CopulaModel,
                    grid: GridSpec | None = None,
                    tol: float = TOL_ALGEBRAIC) -> PropertyReport:
    """Pointwise CDF dominance cdf(model_lo) <= cdf(model_hi) + tol on a grid.

    The independence copula may stand on either side of any family (it is
    the common weak-dependence baseline); otherwise families must match.
    """
    families = {model_lo.family, model_hi.family}
    if model_lo.dim != model_hi.dim or \
            (len(families) == 2 and "independence" not in families):
        raise ComparisonError("PQD comparison requires matching family and dimension")
    grid = grid or GridSpec()
    if model_lo.dim == 2:
        ax = grid.axis()
        mesh = np.meshgrid(ax, ax, indexing="ij")
    else:
        ax = np.linspace(grid.lo, grid.hi, min(grid.resolution, 8))
        mesh = np.meshgrid(*([ax] * model_lo.dim), indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    diff = cdf(model_lo, pts) - cdf(model_hi, pts)
    worst = int(np.argmax(diff))
    worst_v = float(diff[worst])
    return PropertyReport(
        property="pqd_order",
        model=f"{model_lo.describe()} <= {model_hi.describe()}",
        passed=worst_v <= tol, worst_violation=worst_v, tolerance=tol,
        worst_location=tuple(float(x) for x in pts[worst]),
        pairs_tested=int(pts.shape[0]))


_DEFAULT_T_GRID = tuple(np.geomspace(0.05, 20.0, 25))


def check_completely_monotone(gen: GeneratorSpec, max_order: int = 6,
                              t_grid: Sequence[float] | None = None,
                              tol: float = TOL_LOG_INEQUALITY) -> PropertyReport:
    """psi(0) = 1 and (-1)^k psi^(k)(t) >= -tol for k = 1..max_order."""
    if max_order < 2:
        raise GridError("max_order must be >= 2")
    t = np.asarray(t_grid if t_grid is not None else _DEFAULT_T_GRID, dtype=float)
    worst_v = abs(float(gen.psi(0.0)) - 1.0)
    loc = ("psi(0)", 0.0)
    for k in range(1, max_order + 1):
        dk = np.asarray(gen.derivative(t, k), dtype=float)
        if not np.all(np.isfinite(dk)):
            bad = t[~np.isfinite(dk)][0]
            raise ArithmeticError(
                f"derivative order {k} overflowed at t={bad:g} for {gen.label}")
        signed = ((-1.0) ** k) * dk
        viol = -signed
        idx = int(np.argmax(viol))
        if viol[idx] > worst_v:
            worst_v = float(viol[idx])
            loc = (f"order {k}", float(t[idx]))
    label = gen.label + str(gen.params)
    return PropertyReport(property="completely_monotone", model=label,
                          passed=worst_v <= tol, worst_violation=worst_v,
                          tolerance=tol, worst_location=loc,
                          pairs_tested=int(t.size * max_order))


def check_lstar(comp: CompositionMap, max_order: int = 6,
                t_grid: Sequence[float] | None = None,
                tol: float = TOL_LOG_INEQUALITY) -> PropertyReport:
    """comp(0)=0, comp increasing and unbounded, derivatives alternating from +."""
    t = np.asarray(t_grid if t_grid is not None else _DEFAULT_T_GRID, dtype=float)
    worst_v = abs(float(comp(0.0)))
    loc = ("comp(0)", 0.0)
    vals = np.asarray(comp(t), dtype=float)
    growth = -(float(vals[-1]) - 1.0)  # expect comp(t_max) to exceed 1
    if growth > worst_v:
        worst_v, loc = growth, ("growth", float(t[-1]))
    for k in range(1, max_order + 1):
        dk = np.asarray(comp.derivative(t, k), dtype=float)
        signed = ((-1.0) ** (k - 1)) * dk
        viol = -signed
        idx = int(np.argmax(viol))
        if viol[idx] > worst_v:
            worst_v = float(viol[idx])
            loc = (f"order {k}", float(t[idx]))
    label = f"{comp.family}({comp.theta1:g},{comp.theta2:g})"
    return PropertyReport(property="lstar_class", model=label,
                          passed=worst_v <= tol, worst_violation=worst_v,
                          tolerance=tol, worst_location=loc,
                          pairs_tested=int(t.size * max_order))


def check_kl_chain(family: str, theta1: float, theta2: float,
                   count: int = 100_000, seed: int = 0,
                   delta: float | None = None, nu: float | None = None,
                   dim: int = 2) -> PropertyReport:
    """Monte Carlo version of the two-step expected-log-density chain.

    Verifies E_1[log c_1] <= E_2[log c_1] <= E_2[log c_2], each within three
    combined standard errors.
    """
    if theta1 > theta2:
        raise OrderingError(f"theta1={theta1} must be <= theta2={theta2}")
    m1 = CopulaModel(family=family, theta=theta1, delta=delta, nu=nu, dim=dim)
    m2 = CopulaModel(family=family, theta=theta2, delta=delta, nu=nu, dim=dim)
    s1 = sample(m1, count, derive_seed(seed, 0)).values
    s2 = sample(m2, count, derive_seed(seed, 1)).values
    l11 = log_pdf(m1, s1)
    l12 = log_pdf(m1, s2)
    l22 = log_pdf(m2, s2)
    a, b, c = float(np.mean(l11)), float(np.mean(l12)), float(np.mean(l22))
    se_ab = math.sqrt((np.var(l11) + np.var(l12)) / count)
    se_bc = float(np.std(l22 - l12) / math.sqrt(count))
    viol = max((a - b) - 3.0 * se_ab, (b - c) - 3.0 * se_bc)
    return PropertyReport(
        property="kl_chain", model=f"{m1.describe()} vs {m2.describe()}",
        passed=viol <= 0.0, worst_violation=viol, tolerance=0.0,
        worst_location=None, pairs_tested=2 * count,
        note=f"E1[l1]={a:.5f} E2[l1]={b:.5f} E2[l2]={c:.5f}")


def check_mixture_identity(model: CopulaModel, grid: GridSpec | None = None,
                           count: int = 20_000, seed: int = 0) -> PropertyReport:
    """The mixture representation at two levels.

    (i) algebraic: cdf equals the generator route within 1e-10;
    (ii) stochastic: the frailty-sampled empirical CDF matches cdf within
    3/sqrt(count). The report normalizes both deficits so tolerance = 1.
    """
    grid = grid or GridSpec(resolution=10)
    res = grid.resolution if model.dim == 2 else min(grid.resolution, 5)
    ax = np.linspace(grid.lo, grid.hi, res)
    mesh = np.meshgrid(*([ax] * model.dim), indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    exact = cdf(model, pts)
    alg = float(np.max(np.abs(exact - archimedean_cdf(model, pts))))
    draws = sample_frailty(model, count, seed).values
    inside = np.all(draws[:, None, :] <= pts[None, :, :], axis=2)
    emp = inside.mean(axis=0)
    sto = float(np.max(np.abs(emp - exact)))
    sto_tol = 3.0 / math.sqrt(count)
    worst = max(alg / 1e-10, sto / sto_tol)
    idx = int(np.argmax(np.abs(emp - exact)))
    return PropertyReport(
        property="mixture_identity", model=model.describe(),
        passed=worst <= 1.0, worst_violation=worst, tolerance=1.0,
        worst_location=tuple(float(x) for x in pts[idx]),
        pairs_tested=int(pts.shape[0]),
        note=f"algebraic={alg:.2e} (tol 1e-10), stochastic={sto:.4f} (tol {sto_tol:.4f})")


_CONDITION_A_FAMILIES = ("gaussian", "fgm", "frank", "gumbel", "clayton")
_CONDITION_B_FAMILIES = ("clayton", "frank", "gumbel", "joe", "amh",
                         "nelsen_4_14", "nelsen_4_19")


@dataclass
class TheoremConditionSummary:
    """Which sufficient conditions a family satisfies on a parameter grid."""

    family: str
    conditions: dict = field(default_factory=dict)
    reports: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)


def _pqd_consecutive(models, grid, reports) -> bool:
    # every catalogued family is PQD-nondecreasing in theta over its whole
    # domain (including the negative branch of fgm/amh), so consecutive
    # models in the given order must be CDF-dominated left to right
    ok = True
    for lo_m, hi_m in zip(models[:-1], models[1:]):
        rep = check_pqd_order(lo_m, hi_m, grid=grid)
        reports.append(rep)
        ok &= rep.passed
    return ok


def verify_theorem_conditions(models: Sequence[CopulaModel],
                              grid: GridSpec | None = None,
                              max_order: int = 6,
                              mode: str = "auto",
                              seed: int = 0) -> TheoremConditionSummary:
    """Run the applicable sufficient-condition battery over a parameter grid.

    Models must share one family; the grid is taken in the order given, so a
    deliberately reversed grid fails the ordering checks (a useful control).
    """
    models = list(models)
    if not models:
        raise ComparisonError("need at least one model")
    family = models[0].family
    if any(m.family != family for m in models) or \
       len({m.dim for m in models}) != 1:
        raise ComparisonError("all models must share family and dimension")
    summary = TheoremConditionSummary(family=family)
    reports = summary.reports
    grid = grid or GridSpec()

    if family == "independence":
        summary.conditions["trivial"] = True
        return summary

    if family.startswith("mv_"):
        cm_ok = True
        for m in models:
            rep = check_completely_monotone(generator(m), max_order=max_order)
            reports.append(rep)
            cm_ok &= rep.passed
        ls_ok = True
        for lo_m, hi_m in zip(models[:-1], models[1:]):
            comp = generator_composition(family, lo_m.theta, hi_m.theta)
            rep = check_lstar(comp, max_order=max_order)
            reports.append(rep)
            ls_ok &= rep.passed
        summary.conditions["multivariate_b"] = cm_ok and ls_ok
        return summary

    if family == "student_t":
        summary.conditions["d_elliptical"] = True
        reports.append(PropertyReport(
            property="elliptical_membership", model=models[0].describe(),
            passed=True, worst_violation=0.0, tolerance=0.0,
            note="covered by the elliptical sufficient condition"))
        _pqd_consecutive(models, grid, reports)
        summary.conditions["pqd_increasing"] = all(r.passed for r in reports)
        return summary

    # TP2 / RR2 branch of condition (a)
    tp2_ok = True
    rr2_seen = False
    run_a = family in _CONDITION_A_FAMILIES or family == "amh"
    if run_a:
        for m in models:
            if mode == "auto":
                m_mode = "rr2" if (m.theta < 0 and family in ("fgm", "amh")) else "tp2"
            else:
                m_mode = mode
            rr2_seen |= m_mode == "rr2"
            rep = check_tp2(m, grid=grid, mode=m_mode, pair_seed=seed)
            reports.append(rep)
            tp2_ok &= rep.passed
    pqd_ok = _pqd_consecutive(models, grid, reports)
    if run_a:
        summary.conditions["a_tp2_pqd" + ("_rr2" if rr2_seen else "")] = \
            tp2_ok and pqd_ok

    # complete monotonicity branch of condition (b)/(c)
    if family in _CONDITION_B_FAMILIES or family in ("bb1", "bb2", "bb6"):
        applicable = [m for m in models
                      if not (family == "amh" and m.theta <= 0.0)]
        if family in ("bb1", "bb2", "bb6") and \
           len({m.delta for m in models}) != 1:
            raise ComparisonError("two-parameter battery requires one fixed delta")
        cm_ok = bool(applicable)
        for m in applicable:
            rep = check_completely_monotone(generator(m), max_order=max_order)
            reports.append(rep)
            cm_ok &= rep.passed
        key = "c_eta_cm_pqd" if family in ("bb1", "bb2", "bb6") else "b_cm_pqd"
        if applicable:
            summary.conditions[key] = cm_ok and pqd_ok
    if family == "gaussian":
        summary.conditions["d_elliptical"] = True
    return summary
