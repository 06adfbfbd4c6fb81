import numpy as np
import pytest

import copula_lab as cl

# one representative parameterization per bivariate family
BIVARIATE_CASES = [
    ("gaussian", dict(theta=0.6)),
    ("student_t", dict(theta=0.6, nu=3.0)),
    ("fgm", dict(theta=0.8)),
    ("frank", dict(theta=5.0)),
    ("gumbel", dict(theta=3.0)),
    ("clayton", dict(theta=2.0)),
    ("joe", dict(theta=3.0)),
    ("amh", dict(theta=0.5)),
    ("nelsen_4_14", dict(theta=2.0)),
    ("nelsen_4_19", dict(theta=2.0)),
    ("bb1", dict(theta=2.0, delta=1.5)),
    ("bb2", dict(theta=1.5, delta=2.0)),
    ("bb6", dict(theta=2.0, delta=1.5)),
]

MULTIVARIATE_CASES = [
    ("mv_clayton", dict(theta=1.0, dim=5)),
    ("mv_frank", dict(theta=5.0, dim=5)),
    ("mv_gumbel", dict(theta=2.0, dim=5)),
    ("mv_joe", dict(theta=2.0, dim=5)),
]

ARCHIMEDEAN_CASES = [c for c in BIVARIATE_CASES
                     if c[0] not in ("gaussian", "student_t", "fgm")]


def make(family, **kw):
    return cl.model(family, **kw)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


def interior_grid(n=10, lo=0.05, hi=0.95):
    g = np.linspace(lo, hi, n)
    return np.column_stack([np.repeat(g, n), np.tile(g, n)])
