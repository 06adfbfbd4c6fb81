"""Copula family catalog: model values, parameter domains, default grids."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

# All coordinates are clipped to [EPS_CLAMP, 1 - EPS_CLAMP] before evaluation;
# every catalogued density diverges or vanishes at the boundary.
EPS_CLAMP = 1e-12

BIVARIATE_FAMILIES = (
    "gaussian", "student_t", "fgm", "frank", "gumbel", "clayton", "joe",
    "amh", "nelsen_4_14", "nelsen_4_19", "bb1", "bb2", "bb6",
)
MULTIVARIATE_FAMILIES = ("mv_clayton", "mv_frank", "mv_gumbel", "mv_joe")
ALL_FAMILIES = ("independence",) + BIVARIATE_FAMILIES + MULTIVARIATE_FAMILIES

ARCHIMEDEAN_FAMILIES = (
    "frank", "gumbel", "clayton", "joe", "amh", "nelsen_4_14", "nelsen_4_19",
    "bb1", "bb2", "bb6",
) + MULTIVARIATE_FAMILIES

# Families whose generator is completely monotone on (part of) the theta
# domain, hence admit a positive frailty mixture.
FRAILTY_FAMILIES = ("clayton", "frank", "gumbel", "joe", "amh",
                    "mv_clayton", "mv_frank", "mv_gumbel", "mv_joe")

TWO_PARAMETER_FAMILIES = ("bb1", "bb2", "bb6")
ELLIPTICAL_FAMILIES = ("gaussian", "student_t")


class CopulaLabError(Exception):
    """Base class for all library errors."""


class ParameterError(CopulaLabError, ValueError):
    """Parameter outside the family's admissible domain."""


class DomainError(CopulaLabError, ValueError):
    """Coordinate outside the open unit interval."""


class UnsupportedOperationError(CopulaLabError, ValueError):
    """Operation not defined for this family/dimension."""


class OrderingError(CopulaLabError, ValueError):
    """Parameters violate a required ordering."""


class ComparisonError(CopulaLabError, ValueError):
    """Models are not comparable (mixed family or dimension)."""


class DegenerateDataError(CopulaLabError, ValueError):
    """Data degenerate for the requested statistic (e.g. constant column)."""


class ShapeError(CopulaLabError, ValueError):
    """Array shape incompatible with the model."""


class CountError(CopulaLabError, ValueError):
    """Invalid sample or repetition count."""


class GridError(CopulaLabError, ValueError):
    """Degenerate evaluation grid."""


class NumericError(CopulaLabError, ArithmeticError):
    """Numerical failure (overflow, non-convergence) with location info."""


class ConfigError(CopulaLabError, ValueError):
    """Invalid experiment configuration."""


class ClampWarning(UserWarning):
    """Raised (as a warning) when boundary clamping fired during evaluation."""


# theta domain per family: (lo, hi, lo_closed, hi_closed)
_THETA_DOMAIN = {
    "independence": None,
    "gaussian": (0.0, 1.0, True, False),
    "student_t": (0.0, 1.0, True, False),
    "fgm": (-1.0, 1.0, True, True),
    "frank": (0.0, math.inf, False, False),
    "gumbel": (1.0, math.inf, True, False),
    "clayton": (0.0, math.inf, False, False),
    "joe": (1.0, math.inf, True, False),
    "amh": (-1.0, 1.0, True, True),
    "nelsen_4_14": (1.0, math.inf, True, False),
    "nelsen_4_19": (0.0, math.inf, False, False),
    "bb1": (0.0, math.inf, False, False),
    "bb2": (0.0, math.inf, False, False),
    "bb6": (1.0, math.inf, True, False),
    "mv_clayton": (0.0, math.inf, False, False),
    "mv_frank": (0.0, math.inf, False, False),
    "mv_gumbel": (1.0, math.inf, True, False),
    "mv_joe": (1.0, math.inf, True, False),
}

# Default theta grids used by the experiment harness and the verify battery.
_GRID_SPECS = {
    "gaussian": (0.05, 0.95, 0.05),
    "student_t": (0.05, 0.95, 0.05),
    "fgm": (-1.0, 1.0, 0.1),
    "frank": (0.5, 20.0, 0.5),
    "gumbel": (1.05, 10.0, 0.25),
    "clayton": (0.25, 10.0, 0.25),
    "joe": (1.05, 10.0, 0.25),
    "amh": (-0.95, 0.95, 0.05),
    "nelsen_4_14": (1.05, 10.0, 0.25),
    "nelsen_4_19": (0.25, 10.0, 0.25),
    "bb1": (0.25, 6.0, 0.25),
    "bb2": (0.25, 6.0, 0.25),
    "bb6": (1.05, 6.0, 0.25),
    "mv_clayton": (0.25, 10.0, 0.25),
    "mv_frank": (0.5, 20.0, 0.5),
    "mv_gumbel": (1.05, 10.0, 0.25),
    "mv_joe": (1.05, 10.0, 0.25),
}

DEFAULT_DELTA = {"bb1": 1.5, "bb2": 1.5, "bb6": 1.5}
DEFAULT_NU = 4.0


def default_theta_grid(family: str) -> np.ndarray:
    """Default dependence-parameter grid spanning weak to strong dependence."""
    if family not in _GRID_SPECS:
        raise ParameterError(f"no default grid for family {family!r}")
    lo, hi, step = _GRID_SPECS[family]
    n = int(round((hi - lo) / step)) + 1
    grid = lo + step * np.arange(n)
    return grid[grid <= hi + 1e-9]


def _check_theta(family: str, theta: float) -> None:
    dom = _THETA_DOMAIN[family]
    if dom is None:
        return
    lo, hi, lo_c, hi_c = dom
    ok = (theta >= lo if lo_c else theta > lo) and (theta <= hi if hi_c else theta < hi)
    if not ok:
        lo_b = "[" if lo_c else "("
        hi_b = "]" if hi_c else ")"
        raise ParameterError(
            f"{family}: theta={theta} outside {lo_b}{lo}, {hi}{hi_b}")


@dataclass(frozen=True)
class CopulaModel:
    """A copula family member: tag + parameters + dimension.

    Immutable; all library operations are pure functions of a model and
    their array inputs, so models are safe to share across threads.
    """

    family: str
    theta: float = 0.0
    delta: Optional[float] = None
    nu: Optional[float] = None
    dim: int = 2

    def __post_init__(self):
        if self.family not in ALL_FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}")
        if self.dim < 2:
            raise ParameterError("dim must be >= 2")
        if self.family == "independence":
            pass
        elif self.family in MULTIVARIATE_FAMILIES:
            _check_theta(self.family, self.theta)
        else:
            if self.dim != 2:
                raise ParameterError(f"{self.family} is bivariate (dim=2)")
            _check_theta(self.family, self.theta)
        if self.family in TWO_PARAMETER_FAMILIES:
            if self.delta is None:
                raise ParameterError(f"{self.family} requires delta")
            if self.delta < 1.0:
                raise ParameterError(f"{self.family}: delta={self.delta} must be >= 1")
        elif self.delta is not None:
            raise ParameterError(f"{self.family} does not take delta")
        if self.family == "student_t":
            if self.nu is None:
                raise ParameterError("student_t requires nu")
            if self.nu <= 2.0:
                raise ParameterError(f"student_t: nu={self.nu} must be > 2")
        elif self.nu is not None:
            raise ParameterError(f"{self.family} does not take nu")

    @property
    def is_archimedean(self) -> bool:
        return self.family in ARCHIMEDEAN_FAMILIES

    def describe(self) -> str:
        parts = [f"theta={self.theta:g}"]
        if self.delta is not None:
            parts.append(f"delta={self.delta:g}")
        if self.nu is not None:
            parts.append(f"nu={self.nu:g}")
        if self.family == "independence":
            parts = []
        if self.dim != 2:
            parts.append(f"d={self.dim}")
        inner = " ".join(parts)
        return f"{self.family}({inner})" if inner else self.family


def model(family: str, theta: float = 0.0, delta: float | None = None,
          nu: float | None = None, dim: int = 2) -> CopulaModel:
    """Convenience constructor mirroring :class:`CopulaModel`."""
    return CopulaModel(family=family, theta=theta, delta=delta, nu=nu, dim=dim)


def clip_unit(points: np.ndarray) -> tuple[np.ndarray, bool]:
    """Clip coordinates into [EPS_CLAMP, 1-EPS_CLAMP].

    Returns the clipped array and whether any value actually moved.
    Values outside [0, 1] are a caller error, not a boundary issue.
    """
    pts = np.asarray(points, dtype=float)
    if np.any(~np.isfinite(pts)) or np.any(pts < 0.0) or np.any(pts > 1.0):
        raise DomainError("coordinates must lie in the closed unit interval")
    clipped = np.clip(pts, EPS_CLAMP, 1.0 - EPS_CLAMP)
    return clipped, bool(np.any(clipped != pts))


def as_points(model_: CopulaModel, points) -> np.ndarray:
    """Validate and reshape input to (n, dim); scalars pairs become one row."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != model_.dim:
        raise ShapeError(
            f"expected points of dimension {model_.dim}, got shape {pts.shape}")
    return pts
