"""Archimedean generator machinery.

Each catalogued family exposes its generator psi, the inverse, and exact
k-th derivatives. Derivatives come from composition chains of primitives
(affine, power, exp, log) combined with the Faa di Bruno formula, so the
alternating-sign checks at order 6 are limited by float roundoff only.
A finite-difference fallback exists for generators supplied as raw
callables, but it is only trustworthy at low orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .models import (
    ARCHIMEDEAN_FAMILIES,
    CopulaModel,
    DomainError,
    OrderingError,
    ParameterError,
    UnsupportedOperationError,
)

_MV_TO_BIVARIATE = {
    "mv_clayton": "clayton",
    "mv_frank": "frank",
    "mv_gumbel": "gumbel",
    "mv_joe": "joe",
}


# ---------------------------------------------------------------------------
# derivative-sequence primitives


def _falling(alpha: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= alpha - j
    return out


class _Affine:
    def __init__(self, a: float, b: float):
        self.a, self.b = a, b

    def seq(self, x, order):
        x = np.asarray(x, dtype=float)
        out = np.zeros((order + 1,) + x.shape)
        out[0] = self.a + self.b * x
        if order >= 1:
            out[1] = self.b
        return out


class _Power:
    def __init__(self, alpha: float):
        self.alpha = alpha

    def seq(self, x, order):
        x = np.asarray(x, dtype=float)
        out = np.empty((order + 1,) + x.shape)
        for k in range(order + 1):
            out[k] = _falling(self.alpha, k) * x ** (self.alpha - k)
        return out


class _Exp:
    def __init__(self, c: float):
        self.c = c

    def seq(self, x, order):
        x = np.asarray(x, dtype=float)
        e = np.exp(self.c * x)
        out = np.empty((order + 1,) + x.shape)
        for k in range(order + 1):
            out[k] = (self.c ** k) * e
        return out


class _Log:
    def seq(self, x, order):
        x = np.asarray(x, dtype=float)
        out = np.empty((order + 1,) + x.shape)
        out[0] = np.log(x)
        for k in range(1, order + 1):
            out[k] = ((-1.0) ** (k - 1)) * math.factorial(k - 1) * x ** (-float(k))
        return out


def _compose_seq(outer_seq, inner_seq, order):
    """Faa di Bruno: derivatives of f(g(t)) from derivative stacks of f and g.

    ``outer_seq`` must be evaluated at g(t) (= inner_seq[0]).
    Uses the partial Bell polynomial recurrence
    B[n,k] = sum_j C(n-1, j-1) g^(j) B[n-j, k-1].
    """
    shape = inner_seq.shape[1:]
    bell = [[None] * (order + 1) for _ in range(order + 1)]
    bell[0][0] = np.ones(shape)
    for n in range(1, order + 1):
        bell[n][0] = np.zeros(shape)
        for k in range(1, n + 1):
            acc = np.zeros(shape)
            for j in range(1, n - k + 2):
                acc += math.comb(n - 1, j - 1) * inner_seq[j] * bell[n - j][k - 1]
            bell[n][k] = acc
    out = np.empty_like(inner_seq)
    out[0] = outer_seq[0]
    for n in range(1, order + 1):
        acc = np.zeros(shape)
        for k in range(1, n + 1):
            acc += outer_seq[k] * bell[n][k]
        out[n] = acc
    return out


class _Chain:
    """Composition f_m(...f_2(f_1(t))) with exact derivative stacks."""

    def __init__(self, funcs):
        self.funcs = funcs

    def seq(self, t, order):
        cur = self.funcs[0].seq(t, order)
        for f in self.funcs[1:]:
            outer = f.seq(cur[0], order)
            cur = _compose_seq(outer, cur, order)
        return cur

    def value(self, t):
        x = np.asarray(t, dtype=float)
        for f in self.funcs:
            x = f.seq(x, 0)[0]
        return x

    def derivative(self, t, k: int):
        return self.seq(t, k)[k]


def finite_difference_derivative(f: Callable, t, k: int):
    """k-th derivative by central differences, Richardson-extrapolated once.

    Step policy: h = max(1e-4,_t*1e-5). Only meaningful for small k; the
    alternating-sum roundoff grows like eps/h^k.
    """
    t = np.asarray(t, dtype=float)
    if k == 0:
        return f(t)
    h = np.maximum(1e-4, np.abs(t) * 1e-5)

    def central(step):
        acc = np.zeros_like(t)
        for j in range(k + 1):
            acc += ((-1.0) ** j) * math.comb(k, j) * f(t + (k / 2.0 - j) * step)
        return acc / step ** k

    d1 = central(h)
    d2 = central(h / 2.0)
    return (4.0 * d2 - d1) / 3.0


# ---------------------------------------------------------------------------
# per-family generator definitions


def _psi_clayton(theta):
    return lambda t: (1.0 + theta * np.asarray(t, float)) ** (-1.0 / theta)


def _inv_clayton(theta):
    return lambda u: np.expm1(-theta * np.log(np.asarray(u, float))) / theta


def _psi_gumbel(theta):
    return lambda t: np.exp(-np.asarray(t, float) ** (1.0 / theta))


def _inv_gumbel(theta):
    return lambda u: (-np.log(np.asarray(u, float))) ** theta


def _psi_frank(theta):
    p = -math.expm1(-theta)
    return lambda t: -np.log1p(-p * np.exp(-np.asarray(t, float))) / theta


def _inv_frank(theta):
    den = math.expm1(-theta)
    return lambda u: -np.log(np.expm1(-theta * np.asarray(u, float)) / den)


def _log_neg_expm1(x):
    """log(1 - exp(-x)) for x >= 0; -inf at x = 0 without warnings."""
    with np.errstate(divide="ignore"):
        return np.log(-np.expm1(-np.asarray(x, float)))


def _psi_joe(theta):
    return lambda t: -np.expm1(_log_neg_expm1(np.asarray(t, float)) / theta)


def _inv_joe(theta):
    return lambda u: -np.log1p(-(1.0 - np.asarray(u, float)) ** theta)


def _psi_amh(theta):
    def psi(t):
        e = np.exp(-np.asarray(t, float))
        return (1.0 - theta) * e / (1.0 - theta * e)
    return psi


def _inv_amh(theta):
    return lambda u: (np.log1p(-theta * (1.0 - np.asarray(u, float)))
                      - np.log(np.asarray(u, float)))


def _psi_n414(theta):
    return lambda t: np.exp(-theta * np.log1p(np.asarray(t, float) ** (1.0 / theta)))


def _inv_n414(theta):
    return lambda u: np.expm1(-np.log(np.asarray(u, float)) / theta) ** theta


def _psi_n419(theta):
    return lambda t: theta / np.log(np.asarray(t, float) + math.exp(theta))


def _inv_n419(theta):
    def inv(u):
        u = np.asarray(u, float)
        return math.exp(theta) * np.expm1(theta * (1.0 - u) / u)
    return inv


def _psi_bb1(theta, delta):
    return lambda t: np.exp(-np.log1p(np.asarray(t, float) ** (1.0 / delta)) / theta)


def _inv_bb1(theta, delta):
    return lambda u: np.expm1(-theta * np.log(np.asarray(u, float))) ** delta


def _psi_bb2(theta, delta):
    return lambda t: np.exp(-np.log1p(np.log1p(np.asarray(t, float)) / delta) / theta)


def _inv_bb2(theta, delta):
    return lambda u: np.expm1(delta * np.expm1(-theta * np.log(np.asarray(u, float))))


def _psi_bb6(theta, delta):
    def psi(t):
        x = np.asarray(t, float) ** (1.0 / delta)
        return -np.expm1(_log_neg_expm1(x) / theta)
    return psi


def _inv_bb6(theta, delta):
    return lambda u: (-np.log1p(-(1.0 - np.asarray(u, float)) ** theta)) ** delta


def _chain_for(family: str, theta: float, delta: float | None) -> _Chain:
    if family == "clayton":
        return _Chain([_Affine(1.0, theta), _Power(-1.0 / theta)])
    if family == "gumbel":
        return _Chain([_Power(1.0 / theta), _Exp(-1.0)])
    if family == "frank":
        p = -math.expm1(-theta)
        return _Chain([_Exp(-1.0), _Affine(1.0, -p), _Log(), _Affine(0.0, -1.0 / theta)])
    if family == "joe":
        return _Chain([_Exp(-1.0), _Affine(1.0, -1.0), _Power(1.0 / theta),
                       _Affine(1.0, -1.0)])
    if family == "amh":
        return _Chain([_Exp(1.0), _Affine(-theta, 1.0), _Power(-1.0),
                       _Affine(0.0, 1.0 - theta)])
    if family == "nelsen_4_14":
        return _Chain([_Power(1.0 / theta), _Affine(1.0, 1.0), _Power(-theta)])
    if family == "nelsen_4_19":
        return _Chain([_Affine(math.exp(theta), 1.0), _Log(), _Power(-1.0),
                       _Affine(0.0, theta)])
    if family == "bb1":
        return _Chain([_Power(1.0 / delta), _Affine(1.0, 1.0), _Power(-1.0 / theta)])
    if family == "bb2":
        return _Chain([_Affine(1.0, 1.0), _Log(), _Affine(1.0, 1.0 / delta),
                       _Power(-1.0 / theta)])
    if family == "bb6":
        return _Chain([_Power(1.0 / delta), _Exp(-1.0), _Affine(1.0, -1.0),
                       _Power(1.0 / theta), _Affine(1.0, -1.0)])
    raise UnsupportedOperationError(f"no generator chain for {family!r}")


_PSI_BUILDERS = {
    "clayton": (_psi_clayton, _inv_clayton),
    "frank": (_psi_frank, _inv_frank),
    "gumbel": (_psi_gumbel, _inv_gumbel),
    "joe": (_psi_joe, _inv_joe),
    "amh": (_psi_amh, _inv_amh),
    "nelsen_4_14": (_psi_n414, _inv_n414),
    "nelsen_4_19": (_psi_n419, _inv_n419),
}

_PSI_BUILDERS_2P = {
    "bb1": (_psi_bb1, _inv_bb1),
    "bb2": (_psi_bb2, _inv_bb2),
    "bb6": (_psi_bb6, _inv_bb6),
}


@dataclass
class GeneratorSpec:
    """An Archimedean generator: psi, its inverse, and k-th derivatives."""

    psi: Callable
    psi_inverse: Callable
    label: str = ""
    params: dict = field(default_factory=dict)
    chain: Optional[_Chain] = None

    def derivative(self, t, k: int):
        """k-th derivative of psi at t; exact when a chain is attached."""
        if k == 0:
            return self.psi(t)
        if self.chain is not None:
            return self.chain.derivative(t, k)
        return finite_difference_derivative(self.psi, t, k)


def generator(model: CopulaModel) -> GeneratorSpec:
    """The family's generator with analytic inverse and derivatives."""
    fam = model.family
    if fam not in ARCHIMEDEAN_FAMILIES:
        raise UnsupportedOperationError(f"{fam} is not Archimedean")
    base = _MV_TO_BIVARIATE.get(fam, fam)
    theta = model.theta
    if base == "amh" and abs(theta) >= 1.0 and theta > 0:
        raise ParameterError("amh generator degenerates at theta=1")
    if base in _PSI_BUILDERS_2P:
        mk_psi, mk_inv = _PSI_BUILDERS_2P[base]
        psi, inv = mk_psi(theta, model.delta), mk_inv(theta, model.delta)
        chain = _chain_for(base, theta, model.delta)
        params = {"theta": theta, "delta": model.delta}
    else:
        mk_psi, mk_inv = _PSI_BUILDERS[base]
        psi, inv = mk_psi(theta), mk_inv(theta)
        chain = _chain_for(base, theta, None)
        params = {"theta": theta}
    return GeneratorSpec(psi=psi, psi_inverse=inv, label=base, params=params,
                         chain=chain)


def eta_generator(theta: float, delta: float, family: str) -> GeneratorSpec:
    """Two-parameter generator built as outer-transform(-log inner-generator).

    Independent construction path from :func:`generator`; the two must agree
    for bb1/bb2/bb6, which is part of the test contract.
    """
    if family not in ("bb1", "bb2", "bb6"):
        raise UnsupportedOperationError(
            f"eta composition defined for bb1/bb2/bb6, got {family!r}")
    CopulaModel(family=family, theta=theta, delta=delta)  # domain validation
    if family in ("bb1", "bb6"):
        inner = [_Power(1.0 / delta), _Exp(-1.0)]            # Gumbel(delta)
        inner_inv = _inv_gumbel(delta)
    else:
        inner = [_Affine(1.0, 1.0), _Power(-1.0 / delta)]    # Clayton form (1+s)^(-1/d)
        inner_inv = lambda u: np.expm1(-delta * np.log(np.asarray(u, float)))
    neg_log = [_Log(), _Affine(0.0, -1.0)]
    if family in ("bb1", "bb2"):
        outer = [_Affine(1.0, 1.0), _Power(-1.0 / theta)]    # (1+x)^(-1/theta)
        outer_inv = lambda u: np.expm1(-theta * np.log(np.asarray(u, float)))
    else:
        outer = [_Exp(-1.0), _Affine(1.0, -1.0), _Power(1.0 / theta),
                 _Affine(1.0, -1.0)]                         # Joe(theta)
        outer_inv = _inv_joe(theta)
    chain = _Chain(inner + neg_log + outer)

    def inv(u):
        return inner_inv(np.exp(-outer_inv(u)))

    return GeneratorSpec(psi=chain.value, psi_inverse=inv,
                         label=f"eta_{family}",
                         params={"theta": theta, "delta": delta}, chain=chain)


@dataclass
class CompositionMap:
    """phi_theta1^-1 o phi_theta2 for a multivariate Archimedean family."""

    value: Callable
    chain: _Chain
    family: str
    theta1: float
    theta2: float

    def __call__(self, t):
        return self.value(t)

    def derivative(self, t, k: int):
        return self.chain.derivative(t, k)


def generator_composition(family: str, theta1: float, theta2: float) -> CompositionMap:
    """The composed map certifying the multivariate ordering condition."""
    if family not in _MV_TO_BIVARIATE:
        raise UnsupportedOperationError(
            f"composition defined for mv_* families, got {family!r}")
    if theta1 > theta2:
        raise OrderingError(f"theta1={theta1} must be <= theta2={theta2}")
    CopulaModel(family=family, theta=theta1)
    CopulaModel(family=family, theta=theta2)
    beta = theta1 / theta2
    if family == "mv_gumbel":
        chain = _Chain([_Power(beta)])

        def value(t):
            return np.asarray(t, float) ** beta
    elif family == "mv_clayton":
        chain = _Chain([_Affine(1.0, theta2), _Power(beta),
                        _Affine(-1.0 / theta1, 1.0 / theta1)])

        def value(t):
            return np.expm1(beta * np.log1p(theta2 * np.asarray(t, float))) / theta1
    elif family == "mv_frank":
        c2 = math.expm1(-theta2)
        c1 = math.expm1(-theta1)
        chain = _Chain([_Exp(-1.0), _Affine(1.0, c2), _Power(beta),
                        _Affine(-1.0 / c1, 1.0 / c1), _Log(), _Affine(0.0, -1.0)])

        def value(t):
            inner = np.log1p(c2 * np.exp(-np.asarray(t, float)))
            return -np.log(np.expm1(beta * inner) / c1)
    else:  # mv_joe
        chain = _Chain([_Exp(-1.0), _Affine(1.0, -1.0), _Power(beta),
                        _Affine(1.0, -1.0), _Log(), _Affine(0.0, -1.0)])

        def value(t):
            z = _log_neg_expm1(np.asarray(t, float))
            return -np.log1p(-np.exp(beta * z))
    return CompositionMap(value=value, chain=chain, family=family,
                          theta1=theta1, theta2=theta2)


def mixture_component(gen: GeneratorSpec, u):
    """The mixing CDF value exp(-psi_inverse(u)) from the frailty representation."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise DomainError("u must lie in the open unit interval")
    return np.exp(-gen.psi_inverse(u))
