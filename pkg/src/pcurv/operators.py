"""Pointwise p-Laplacian calculus on weighted graphs.

Every operator takes a graph, a vertex function ``f`` (see
:meth:`WeightedGraph.function`), a vertex and ``p > 1``.  The leading axis of
``f`` runs over vertices; trailing axes are carried along, so a batch of
functions can be evaluated at once by stacking them as columns.

Zero edge differences
---------------------
``phi_p(0) = 0`` for every ``p``.  A bare factor ``|t|**(p-2)`` at ``t = 0``
is 0 for ``p > 2`` and 1 for ``p = 2``.  For ``p < 2`` it is infinite: the
product with a nonzero cofactor is a signed infinity, with a zero cofactor
it is 0.  Sums mixing ``+inf`` and ``-inf`` come out NaN.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import MissingValueError, WeightedGraph

__all__ = [
    "DegenerateFunctionError",
    "check_p",
    "phi_p",
    "singular_power_product",
    "delta_p",
    "gamma_p",
    "gamma_p_bilinear",
    "gamma2_p",
    "cd_gap",
    "cd_ratio",
    "cd_terms",
]


class DegenerateFunctionError(ValueError):
    """``Gamma_p f(x) = 0``: the curvature ratio is undefined."""


def check_p(p: float) -> float:
    p = float(p)
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    return p


def _check_m(m: float) -> float:
    m = float(m)
    if not m > 0:
        raise ValueError(f"dimension must be positive or inf, got {m}")
    return m


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def phi_p(t, p: float):
    """``|t|**(p-2) * t``, continuous at 0."""
    t = np.asarray(t, dtype=float)
    return _out(np.sign(t) * np.abs(t) ** (p - 1))


def singular_power_product(t, cofactor, p: float):
    """``|t|**(p-2) * cofactor`` under the zero-difference convention."""
    t = np.asarray(t, dtype=float)
    cofactor = np.asarray(cofactor, dtype=float)
    if p == 2:
        return _out(cofactor * np.ones_like(t))
    a = np.abs(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = a ** (p - 2) * cofactor
        if p < 2:
            out = np.where(a == 0, np.where(cofactor == 0, 0.0, np.sign(cofactor) * np.inf), out)
    return _out(out)


def _values(g: WeightedGraph, f, needed) -> np.ndarray:
    f = g.function(f)
    vals = f[list(needed)]
    if np.isnan(vals).any():
        missing = [g.labels[v] for v, bad in zip(needed, np.isnan(vals).reshape(len(needed), -1).any(axis=1)) if bad]
        raise MissingValueError(f"function undefined at {missing}")
    return f


def _ball1(g, x):
    return [x, *(y for y, _ in g.adjacency[x])]


def _ball2(g, x):
    seen = dict.fromkeys(_ball1(g, x))
    for y, _ in g.adjacency[x]:
        for z, _ in g.adjacency[y]:
            seen.setdefault(z)
    return list(seen)


# unchecked kernels -- callers validate p, x and f


def _lap(g, f, x, p):
    s = 0.0
    for y, w in g.adjacency[x]:
        s = s + w * phi_p(f[y] - f[x], p)
    return s / g.mu[x]


def _gam(g, f, x, p):
    s = 0.0
    for y, w in g.adjacency[x]:
        s = s + w * np.abs(f[y] - f[x]) ** p
    return (p - 1) / (2 * g.mu[x]) * s


def _gam2(g, f, x, p):
    gx = _gam(g, f, x, p)
    lx = _lap(g, f, x, p)
    first = 0.0
    second = 0.0
    for y, w in g.adjacency[x]:
        d = f[y] - f[x]
        first = first + w * singular_power_product(d, _gam(g, f, y, p) - gx, p)
        second = second + w * phi_p(d, p) * (_lap(g, f, y, p) - lx)
    mu = g.mu[x]
    return first / (p * (p - 1) * mu) - second / (2 * (p - 1) * mu)


def delta_p(g: WeightedGraph, f, x, p: float):
    """p-Laplacian ``(1/mu(x)) sum_y w_xy phi_p(f(y) - f(x))``."""
    p = check_p(p)
    x = g.index(x)
    f = _values(g, f, _ball1(g, x))
    with np.errstate(invalid="ignore"):
        return _out(_lap(g, f, x, p))


def gamma_p(g: WeightedGraph, f, x, p: float):
    """p-energy density ``((p-1)/(2 mu(x))) sum_y w_xy |f(y) - f(x)|**p``."""
    p = check_p(p)
    x = g.index(x)
    f = _values(g, f, _ball1(g, x))
    return _out(_gam(g, f, x, p))


def gamma_p_bilinear(g: WeightedGraph, u, f, h, x, p: float):
    """``Gamma_{p,u}(f, h)(x)``: the form with weights ``|u(y) - u(x)|**(p-2)``."""
    p = check_p(p)
    x = g.index(x)
    near = _ball1(g, x)
    u, f, h = (_values(g, a, near) for a in (u, f, h))
    s = 0.0
    with np.errstate(invalid="ignore"):
        for y, w in g.adjacency[x]:
            s = s + w * singular_power_product(u[y] - u[x], (f[y] - f[x]) * (h[y] - h[x]), p)
        return _out((p - 1) / (2 * g.mu[x]) * s)


def gamma2_p(g: WeightedGraph, f, x, p: float):
    """Iterated form ``Gamma_{2,p} f(x)``.

    Depends on ``f`` only through the incomplete 2-ball at ``x``.  For
    ``p < 2`` a vanishing difference on a center edge can make the value
    infinite; see the module docstring.
    """
    p = check_p(p)
    x = g.index(x)
    f = _values(g, f, _ball2(g, x))
    with np.errstate(invalid="ignore"):
        return _out(_gam2(g, f, x, p))


def cd_terms(g: WeightedGraph, f, x, p: float):
    """``(Gamma_{2,p} f(x), Delta_p f(x), Gamma_p f(x))`` in one pass."""
    p = check_p(p)
    x = g.index(x)
    f = _values(g, f, _ball2(g, x))
    with np.errstate(invalid="ignore"):
        return _out(_gam2(g, f, x, p)), _out(_lap(g, f, x, p)), _out(_gam(g, f, x, p))


def cd_gap(g: WeightedGraph, f, x, p: float, m: float, K: float):
    """Slack in the CD_p(m, K) inequality at ``x`` for this ``f``.

    ``Gamma_{2,p} f - (p-1)/m (Delta_p f)**2 - K (Gamma_p f)**((2p-2)/p)``;
    ``m = inf`` drops the dimension term.
    """
    m = _check_m(m)
    g2, lap, gam = cd_terms(g, f, x, p)
    dim_term = 0.0 if math.isinf(m) else (p - 1) / m * np.square(lap)
    return _out(g2 - dim_term - K * np.power(gam, (2 * p - 2) / p))


def cd_ratio(g: WeightedGraph, f, x, p: float, m: float = math.inf):
    """The unique K making CD_p(m, K) tight at ``x`` for this ``f``.

    Invariant under ``f -> lam * f + c``.  The curvature is the infimum of
    this ratio over functions with ``Gamma_p f(x) > 0``.

    Raises
    ------
    DegenerateFunctionError
        If ``Gamma_p f(x) == 0`` (for any member of a batch).
    """
    m = _check_m(m)
    g2, lap, gam = cd_terms(g, f, x, p)
    if np.any(np.asarray(gam) == 0):
        raise DegenerateFunctionError("Gamma_p f(x) = 0; f is constant on the 1-ball")
    dim_term = 0.0 if math.isinf(m) else (p - 1) / m * np.square(lap)
    # the ratio overflows to -inf near a singular edge when p < 2
    with np.errstate(over="ignore", invalid="ignore"):
        return _out((g2 - dim_term) / np.power(gam, (2 * p - 2) / p))
