"""Normal and Student-t quantile/CDF pairs used by the elliptical families."""

from __future__ import annotations

import numpy as np
from scipy import special

from .models import DomainError


def normal_quantile(p):
    """Inverse standard normal CDF, monotone, |error| far below 1e-9."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise DomainError("quantile argument must lie in (0, 1)")
    return special.ndtri(p)


def normal_cdf(x):
    return special.ndtr(np.asarray(x, dtype=float))


def t_quantile(p, nu: float):
    """Inverse Student-t CDF via the regularized incomplete beta function."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise DomainError("quantile argument must lie in (0, 1)")
    return special.stdtrit(nu, p)


def t_cdf(x, nu: float):
    return special.stdtr(nu, np.asarray(x, dtype=float))


class QuantileEngine:
    """Bundled quantile/CDF maps satisfying cdf(quantile(p)) = p to 1e-9."""

    normal_quantile = staticmethod(normal_quantile)
    normal_cdf = staticmethod(normal_cdf)
    t_quantile = staticmethod(t_quantile)
    t_cdf = staticmethod(t_cdf)
