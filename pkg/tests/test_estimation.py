"""Estimators: Monte Carlo vs quadrature cross-oracles, sign contracts,
association measures."""

import math

import numpy as np
import pytest

import copula_lab as cl
from conftest import make

GAUSS_MI = {0.2: 0.020202707317519466,
            0.5: 0.14384103622589045,
            0.8: 0.5108256237659907}  # -0.5*log(1-theta^2)


def _mc_se(model, sample):
    lp = cl.log_pdf(model, sample.values)
    return float(np.std(lp) / math.sqrt(sample.rows))


def test_empirical_entropy_independence_exact_zero():
    m = make("independence")
    s = cl.sample(m, 500, 1)
    assert cl.empirical_entropy(m, s) == 0.0


def test_mutual_information_sign_contract():
    m = make("clayton", theta=2.0)
    s = cl.sample(m, 400, 2)
    assert cl.mutual_information(m, s) == -cl.empirical_entropy(m, s)


@pytest.mark.parametrize("theta", [0.2, 0.5, 0.8])
def test_gaussian_mi_closed_form(theta):
    m = make("gaussian", theta=theta)
    s = cl.sample(m, 100_000, 17)
    mi = cl.mutual_information(m, s)
    assert abs(mi - GAUSS_MI[theta]) < 3 * _mc_se(m, s)


def test_frank_mi_ordered_in_theta():
    lo, hi = make("frank", theta=2.0), make("frank", theta=10.0)
    # quadrature fixes the ordering; the M=50000 estimates must agree with it
    assert cl.entropy_quadrature(hi) < cl.entropy_quadrature(lo)
    mi_hi = cl.mutual_information(hi, cl.sample(hi, 50_000, 31))
    mi_lo = cl.mutual_information(lo, cl.sample(lo, 50_000, 31))
    assert mi_hi > mi_lo


def test_entropy_estimate_shape_error():
    m = make("clayton", theta=2.0)
    s = cl.sample(make("mv_clayton", theta=1.0, dim=3), 100, 1)
    with pytest.raises(cl.ShapeError):
        cl.empirical_entropy(m, s)


# ---------------------------------------------------------------------------
# quadrature


def test_entropy_quadrature_independence():
    assert cl.entropy_quadrature(make("independence")) == pytest.approx(0.0, abs=1e-10)


def test_entropy_quadrature_gaussian_closed_form():
    # tail-truncation bias bound 2e-3
    h = cl.entropy_quadrature(make("gaussian", theta=0.5))
    assert h == pytest.approx(-GAUSS_MI[0.5], abs=2e-3)


def test_entropy_quadrature_fgm_vs_monte_carlo():
    m = make("fgm", theta=1.0)
    h = cl.entropy_quadrature(m)
    assert h < 0.0
    s = cl.sample(m, 100_000, 13)
    assert abs(cl.empirical_entropy(m, s) - h) < 3 * _mc_se(m, s)


def test_entropy_quadrature_clayton_vs_monte_carlo():
    m = make("clayton", theta=2.0)
    s = cl.sample(m, 100_000, 19)
    assert abs(cl.empirical_entropy(m, s) - cl.entropy_quadrature(m)) < 3 * _mc_se(m, s)


def test_entropy_quadrature_ridge_family():
    # density concentrated on a narrow conditional ridge: needs the
    # conditional-coordinate fallback
    m = make("nelsen_4_19", theta=0.5)
    s = cl.sample(m, 100_000, 23)
    assert abs(cl.empirical_entropy(m, s) - cl.entropy_quadrature(m)) < 3 * _mc_se(m, s)


def test_entropy_quadrature_rejects_multivariate():
    with pytest.raises(cl.UnsupportedOperationError):
        cl.entropy_quadrature(make("mv_clayton", theta=1.0, dim=3))


# ---------------------------------------------------------------------------
# KL divergence


def test_kl_same_model_is_zero():
    m = make("clayton", theta=2.0)
    s = cl.sample(m, 300, 5)
    assert cl.kl_divergence(m, m, s) == 0.0


def test_kl_clayton_positive():
    p, q = make("clayton", theta=2.0), make("clayton", theta=1.0)
    s = cl.sample(p, 100_000, 5)
    kl = cl.kl_divergence(p, q, s)
    diff = cl.log_pdf(p, s.values) - cl.log_pdf(q, s.values)
    se = np.std(diff) / math.sqrt(s.rows)
    assert kl > -3 * se
    assert kl > 0.05  # genuinely separated parameters


def test_kl_gaussian_matches_quadrature():
    p, q = make("gaussian", theta=0.8), make("gaussian", theta=0.2)
    s = cl.sample(p, 100_000, 6)
    kl_mc = cl.kl_divergence(p, q, s)
    # deterministic 2-D quadrature of c_p log(c_p/c_q)
    from copula_lab.estimation import _panel_axis, _ENTROPY_BREAKS, QUAD_EPS
    x, w = _panel_axis(QUAD_EPS, 1 - QUAD_EPS, _ENTROPY_BREAKS, 512)
    uu, vv = np.meshgrid(x, x, indexing="ij")
    pts = np.column_stack([uu.ravel(), vv.ravel()])
    lp, lq = cl.log_pdf(p, pts), cl.log_pdf(q, pts)
    integrand = np.where(lp > -700, np.exp(lp) * (lp - lq), 0.0)
    kl_quad = float(np.sum(np.outer(w, w).ravel() * integrand))
    diff = cl.log_pdf(p, s.values) - cl.log_pdf(q, s.values)
    se = np.std(diff) / math.sqrt(s.rows)
    assert abs(kl_mc - kl_quad) < 3 * se


def test_kl_family_mismatch():
    with pytest.raises(cl.ComparisonError):
        cl.kl_divergence(make("clayton", theta=1.0), make("frank", theta=1.0),
                         cl.sample(make("clayton", theta=1.0), 100, 1))


def test_mean_kl_and_mi_nonnegative_over_seeds():
    p, q = make("frank", theta=4.0), make("frank", theta=3.0)
    kls, mis = [], []
    for r in range(50):
        s = cl.sample(p, 400, cl.derive_seed(99, r))
        kls.append(cl.kl_divergence(p, q, s))
        mis.append(cl.mutual_information(p, s))
    assert np.mean(kls) > -3 * np.std(kls) / math.sqrt(50)
    assert np.mean(mis) > -3 * np.std(mis) / math.sqrt(50)


# ---------------------------------------------------------------------------
# association measures


def test_spearman_analytic_independence():
    assert cl.spearman_analytic(make("independence")).value == pytest.approx(0.0, abs=1e-8)


def test_spearman_analytic_fgm_closed_form():
    # integrating the printed FGM form gives rho = theta/3
    v = cl.spearman_analytic(make("fgm", theta=0.6)).value
    assert v == pytest.approx(0.2, abs=1e-6)


def test_spearman_analytic_gaussian_closed_form():
    v = cl.spearman_analytic(make("gaussian", theta=0.5)).value
    assert v == pytest.approx(0.48258373953099746, abs=1e-5)


def test_spearman_analytic_clayton_ordering():
    assert (cl.spearman_analytic(make("clayton", theta=2.0)).value
            > cl.spearman_analytic(make("clayton", theta=1.0)).value)


def test_spearman_sample_perfect_concordance():
    x = np.linspace(0.1, 0.9, 50)
    s = cl.SampleMatrix(values=np.column_stack([x, x ** 2]))
    assert cl.spearman_sample(s).value == pytest.approx(1.0, abs=1e-12)


def test_spearman_sample_independence_null():
    s = cl.sample(make("independence"), 10_000, 21)
    assert abs(cl.spearman_sample(s).value) < 0.03


def test_spearman_sample_matches_analytic():
    m = make("gaussian", theta=0.5)
    s = cl.sample(m, 50_000, 29)
    assert abs(cl.spearman_sample(s).value
               - cl.spearman_analytic(m).value) < 0.01


def test_spearman_degenerate_column():
    vals = np.column_stack([np.ones(10), np.arange(10.0)])
    with pytest.raises(cl.DegenerateDataError):
        cl.spearman_sample(cl.SampleMatrix(values=vals))


def test_kendall_sample_concordant():
    x = np.linspace(0.1, 0.9, 30)
    s = cl.SampleMatrix(values=np.column_stack([x, np.exp(x)]))
    assert cl.kendall_sample(s).value == pytest.approx(1.0, abs=1e-12)


def test_entropy_estimate_band_invariants():
    reps = [0.30, 0.10, 0.20, 0.25, 0.15]
    est = cl.EntropyEstimate.from_reps(reps)
    assert est.lo95 <= est.mean <= est.hi95
    assert est.mean == pytest.approx(0.2)
    assert est.point_value == 0.30


def test_spearman_magnitude_tracks_negative_entropy():
    # rank ordering of |rho_s| equals rank ordering of -H over each family's
    # default grid (subsampled for runtime); sign-changing families are
    # checked per monotone branch, since their two branches trace different
    # |rho|-vs-entropy curves (exactly tied for the even fgm family)
    from scipy.stats import spearmanr

    def branch_grids(family):
        grid = cl.default_theta_grid(family)[::4]
        if family in ("fgm", "amh"):
            return [grid[grid > 0], grid[grid < 0]]
        return [grid]

    for family in ("clayton", "frank", "gumbel", "joe", "gaussian", "fgm", "amh"):
        for grid in branch_grids(family):
            rho, neg_h = [], []
            for th in grid:
                m = make(family, theta=float(th))
                rho.append(abs(cl.spearman_analytic(m).value))
                neg_h.append(-cl.entropy_quadrature(m))
            stat = spearmanr(rho, neg_h).statistic
            assert stat == pytest.approx(1.0, abs=1e-12), (family, grid)
