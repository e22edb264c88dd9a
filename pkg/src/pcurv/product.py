"""Operators on Cartesian products.

A product function is held as an ``(n1, n2)`` array ``F[a, b] = f(a, b)``
(trailing axes batch), so the row slice ``f^x`` is ``F[x]`` and the column
slice ``f_y`` is ``F[:, y]``.

Around ``(x, y)`` with ``x_i ~ x`` and ``y_k ~ y``::

    A_i  = f(x_i, y)   - f(x, y)      B_k  = f(x, y_k)   - f(x, y)
    C_ik = f(x_i, y_k) - f(x_i, y)    D_ik = f(x_i, y_k) - f(x, y_k)

and always ``C_ik - B_k = D_ik - A_i``.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from . import operators
from .graph import GraphError, MissingValueError, WeightedGraph, cartesian_product, extract_ball2_inc
from .operators import check_p, phi_p, singular_power_product

__all__ = [
    "GapBreakdown",
    "as_product_function",
    "slice_row",
    "slice_col",
    "check_additivity",
    "pair_differences",
    "gamma2_decomposition_gap",
    "quarter_sum",
    "counterexample_function",
    "verify_product_superadditivity_failure",
]


@dataclass
class GapBreakdown:
    """``Gamma_{2,p} f(x,y) - Gamma_{2,p} f^x(y) - Gamma_{2,p} f_y(x)``.

    ``gap`` is the sum of ``per_pair_terms`` (keyed by neighbour indices
    ``(x_i, y_k)``), or the direct value when the closed form does not apply.
    """

    gap: float
    direct: float
    per_pair_terms: dict[tuple[int, int], float] | None
    row: float  # Gamma_{2,p} f^x (y)
    col: float  # Gamma_{2,p} f_y (x)
    full: float  # Gamma_{2,p} f (x, y)


def as_product_function(g1: WeightedGraph, g2: WeightedGraph, f) -> np.ndarray:
    """Coerce ``f`` to an ``(n1, n2, ...)`` array.

    Accepts such an array, a flat array in product index order, or a mapping
    keyed by ``(a, b)`` pairs or ``"a|b"`` labels (missing entries are NaN).
    """
    n1, n2 = g1.n, g2.n
    if isinstance(f, Mapping):
        out = np.full((n1, n2), np.nan)
        for key, val in f.items():
            if isinstance(key, str):
                if key.count("|") < 1:
                    raise GraphError(f"product vertex label must look like 'a|b', got {key!r}")
                a, b = _split_label(g1, key)
            else:
                a, b = key
            out[g1.index(a), g2.index(b)] = val
        return out
    arr = np.asarray(f, dtype=float)
    if arr.shape[:2] == (n1, n2):
        return arr
    if arr.shape[:1] == (n1 * n2,):
        return arr.reshape(n1, n2, *arr.shape[1:])
    raise GraphError(f"product function needs shape ({n1}, {n2}, ...), got {arr.shape}")


def _split_label(g1, key):
    # left labels may themselves contain '|' (iterated products)
    for cut in range(len(key)):
        if key[cut] == "|" and key[:cut] in g1.labels:
            return key[:cut], key[cut + 1 :]
    raise GraphError(f"cannot split product label {key!r}")


def slice_row(g1, g2, f, x) -> np.ndarray:
    """``f^x = f(x, .)`` on ``V2``."""
    return as_product_function(g1, g2, f)[g1.index(x)]


def slice_col(g1, g2, f, y) -> np.ndarray:
    """``f_y = f(., y)`` on ``V1``."""
    return as_product_function(g1, g2, f)[:, g2.index(y)]


def _flat(F):
    return F.reshape(F.shape[0] * F.shape[1], *F.shape[2:])


def check_additivity(g1, g2, f, x, y, p, product=None):
    """Residuals ``|Delta_p f - Delta_p f_y(x) - Delta_p f^x(y)|`` and likewise for ``Gamma_p``."""
    p = check_p(p)
    F = as_product_function(g1, g2, f)
    pg = product if product is not None else cartesian_product(g1, g2)
    x, y = g1.index(x), g2.index(y)
    v = pg.vertex(x, y)
    flat = _flat(F)
    res_lap = np.abs(operators.delta_p(pg, flat, v, p) - operators.delta_p(g1, F[:, y], x, p) - operators.delta_p(g2, F[x], y, p))
    res_gam = np.abs(operators.gamma_p(pg, flat, v, p) - operators.gamma_p(g1, F[:, y], x, p) - operators.gamma_p(g2, F[x], y, p))
    return _scalar(np.max(res_lap)), _scalar(np.max(res_gam))


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


def pair_differences(g1, g2, f, x, y):
    """``(A, B, C, D)`` with shapes ``(d_x,)``, ``(d_y,)``, ``(d_x, d_y)``, ``(d_x, d_y)``.

    Neighbour order follows the factor adjacency lists.
    """
    F = as_product_function(g1, g2, f)
    x, y = g1.index(x), g2.index(y)
    xi = [a for a, _ in g1.adjacency[x]]
    yk = [b for b, _ in g2.adjacency[y]]
    A = F[xi, y] - F[x, y]
    B = F[x, yk] - F[x, y]
    C = F[np.ix_(xi, yk)] - F[xi, y][:, None]
    D = F[np.ix_(xi, yk)] - F[x, yk][None, :]
    return A, B, C, D


def _pair_terms(A, B, C, D, p):
    a = A[:, None]
    b = B[None, :]
    with np.errstate(invalid="ignore"):
        quad = (
            singular_power_product(a, np.abs(C) ** p, p)
            - singular_power_product(a, np.abs(b) ** p, p)
            + singular_power_product(b, np.abs(D) ** p, p)
            - singular_power_product(b, np.abs(a) ** p, p)
        ) / (2 * p)
        pa, pb = phi_p(a, p), phi_p(b, p)
        cross = (pa * phi_p(C, p) - pa * pb + pb * phi_p(D, p) - pa * pb) / (2 * (p - 1))
    return quad - cross


def quarter_sum(A, B, C, D):
    """``sum (1/4)((A_i - D_ik)^2 + (C_ik - B_k)^2)``: the p = 2 gap."""
    return float(np.sum(((A[:, None] - D) ** 2 + (C - B[None, :]) ** 2) / 4))


def gamma2_decomposition_gap(g1, g2, f, x, y, p, product=None, tol: float = 1e-10) -> GapBreakdown:
    """Gap by direct evaluation and, for unit factors, by the per-pair sum.

    Raises AssertionError if the two routes disagree by more than ``tol``
    relative to the size of the terms involved.
    """
    p = check_p(p)
    F = as_product_function(g1, g2, f)
    x, y = g1.index(x), g2.index(y)
    pg = product if product is not None else cartesian_product(g1, g2)
    v = pg.vertex(x, y)
    for needed, where in (
        (extract_ball2_inc(pg, v).vertices, "product 2-ball"),
    ):
        vals = _flat(F)[list(needed)]
        if np.isnan(vals).any():
            raise MissingValueError(f"function undefined on part of the {where}")
    full = operators.gamma2_p(pg, _flat(F), v, p)
    row = operators.gamma2_p(g2, F[x], y, p)
    col = operators.gamma2_p(g1, F[:, y], x, p)
    direct = float(full - row - col)
    if not (g1.is_unit() and g2.is_unit()):
        return GapBreakdown(direct, direct, None, float(row), float(col), float(full))

    A, B, C, D = pair_differences(g1, g2, F, x, y)
    terms = _pair_terms(A, B, C, D, p)
    xi = [a for a, _ in g1.adjacency[x]]
    yk = [b for b, _ in g2.adjacency[y]]
    per_pair = {(a, b): float(terms[i, k]) for i, a in enumerate(xi) for k, b in enumerate(yk)}
    gap = float(np.sum(terms))
    scale = max(1.0, abs(full), abs(row), abs(col), float(np.sum(np.abs(terms))))
    if np.isfinite(gap) and not abs(gap - direct) <= tol * scale:
        raise AssertionError(f"gap routes disagree: direct {direct!r} vs per-pair {gap!r}")
    return GapBreakdown(gap, direct, per_pair, float(row), float(col), float(full))


def counterexample_function(g1: WeightedGraph, g2: WeightedGraph, x, y) -> np.ndarray:
    """Witness with ``A_i = 1, B_k = 0, C_ik = 1, D_ik = 2`` at ``(x, y)``.

    ``f(x, .) = 0``, ``f(a, y) = 1`` for ``a != x`` and 2 everywhere else; on
    the product 2-ball this is the constant continuation of those values.
    """
    x, y = g1.index(x), g2.index(y)
    if not g1.adjacency[x] or not g2.adjacency[y]:
        raise GraphError("counterexample needs x and y to have neighbours")
    F = np.full((g1.n, g2.n), 2.0)
    F[:, y] = 1.0
    F[x, :] = 0.0
    return F


def verify_product_superadditivity_failure(g1, g2, x, y, p) -> bool:
    """True when the witness makes ``Gamma_{2,p} f(x,y) < Gamma_{2,p} f^x(y) + Gamma_{2,p} f_y(x)``."""
    p = check_p(p)
    if not p > 2:
        raise ValueError("the failure of superadditivity is a p > 2 statement")
    return gamma2_decomposition_gap(g1, g2, counterexample_function(g1, g2, x, y), x, y, p).gap < 0
