"""Closed-form values on paths, cycles and stars, used as test oracles.

The expansions here are written out term by term in the edge differences
around a vertex and deliberately do not call :mod:`pcurv.operators`.

Labelling on a path (and on cycles, where the same letters are reused)::

    z1 -- v1 -- u -- v2 -- z2
    A = f(v1) - f(u)     B = f(v2) - f(u)
    C = f(z1) - f(v1)    D = f(z2) - f(v2)

Stars are parametrised by the hub degree ``D``; a leaf then sees ``D - 1``
other leaves through the hub.
"""

from __future__ import annotations

import numpy as np

from .graph import WeightedGraph

__all__ = [
    "path_middle_delta",
    "path_middle_gamma",
    "path_middle_gamma2",
    "p3_middle_gamma2",
    "path_leaf_gamma2",
    "cycle3_gamma2",
    "cycle4_gamma2",
    "star_leaf_gamma2",
    "classical_gamma2",
    "star_leaf_curvature",
    "path_leaf_curvature",
    "aux_g",
    "aux_g_min",
    "aux_h",
    "aux_h_min",
    "negativity_threshold",
]


def _pw(t, e):
    # |t|**e, with 0**0 = 1
    return np.abs(t) ** e


def _phi(t, p):
    return np.sign(t) * np.abs(t) ** (p - 1)


def path_middle_delta(A, B, p):
    return _phi(A, p) + _phi(B, p)


def path_middle_gamma(A, B, p):
    return (p - 1) / 2 * (_pw(A, p) + _pw(B, p))


def path_middle_gamma2(A, B, C, D, p):
    """``Gamma_{2,p} f(u)`` at a vertex whose 2-ball is the path ``z1 v1 u v2 z2``."""
    a2, b2 = _pw(A, p - 2), _pw(B, p - 2)
    t1 = (a2 * _pw(C, p) - a2 * _pw(B, p) + b2 * _pw(D, p) - b2 * _pw(A, p)) / (2 * p)
    t2 = (
        2 * _pw(A, 2 * p - 2)
        + 2 * _pw(B, 2 * p - 2)
        + 2 * a2 * b2 * A * B
        - a2 * _pw(C, p - 2) * A * C
        - b2 * _pw(D, p - 2) * B * D
    ) / (2 * (p - 1))
    return t1 + t2


def p3_middle_gamma2(A, B, p):
    """Middle vertex of ``P_3`` (the path formula with ``C = D = 0``)."""
    a2, b2 = _pw(A, p - 2), _pw(B, p - 2)
    return (_pw(A, 2 * p - 2) + _pw(B, 2 * p - 2) + a2 * b2 * A * B) / (p - 1) - (
        a2 * _pw(B, p) + b2 * _pw(A, p)
    ) / (2 * p)


def path_leaf_gamma2(A, C, p):
    """Leaf ``u`` of a path ``u -- v -- z`` with ``A = f(v)-f(u)``, ``C = f(z)-f(v)``."""
    a2 = _pw(A, p - 2)
    return _pw(A, 2 * p - 2) / (p - 1) + a2 * _pw(C, p) / (2 * p) - a2 * _pw(C, p - 2) * A * C / (2 * (p - 1))


def cycle4_gamma2(A, B, C, D, p):
    """Vertex of ``C_4``: ``v1, v2`` neighbours, ``z`` opposite, ``C = f(z)-f(v1)``, ``D = f(z)-f(v2)``.

    Same expression as on a long path; on ``C_4`` the differences obey
    ``C - B = D - A``.
    """
    return path_middle_gamma2(A, B, C, D, p)


def cycle3_gamma2(A, B, C, p):
    """Vertex ``u`` of a triangle ``u, v, z``: ``A = f(v)-f(u)``, ``B = f(z)-f(u)``, ``C = f(z)-f(v)``."""
    a2, b2, c2 = _pw(A, p - 2), _pw(B, p - 2), _pw(C, p - 2)
    cp = _pw(C, p)
    return (
        (a2 * cp + b2 * cp - a2 * _pw(B, p) - _pw(A, p) * b2) / (2 * p)
        + (_pw(A, 2 * p - 2) + _pw(B, 2 * p - 2) + a2 * A * b2 * B) / (p - 1)
        + (-a2 * A * c2 * C + b2 * B * c2 * C) / (2 * (p - 1))
    )


def star_leaf_gamma2(A, Bs, p):
    """Leaf of a star: ``A`` to the hub, ``Bs`` the hub's differences to the other leaves."""
    Bs = np.asarray(Bs, dtype=float)
    a2 = _pw(A, p - 2)
    tail = np.sum(a2 * _pw(Bs, p) / (2 * p) - a2 * _pw(Bs, p - 2) * A * Bs / (2 * (p - 1)), axis=0)
    return _pw(A, 2 * p - 2) / (p - 1) + tail


def classical_gamma2(g: WeightedGraph, f) -> np.ndarray:
    """Bakry-Emery ``Gamma_2 f`` at every vertex, through the Leibniz forms.

    Uses ``Gamma(f, h) = (L(fh) - f Lh - h Lf) / 2`` and
    ``Gamma_2 f = L Gamma(f, f) / 2 - Gamma(f, L f)`` with the dense weighted
    Laplacian ``L``; an independent route to the ``p = 2`` operators.
    """
    # extended precision keeps the oracle's own rounding out of comparisons
    n = g.n
    W = np.zeros((n, n), dtype=np.longdouble)
    for i, j, w in g.edges():
        W[i, j] = W[j, i] = w
    L = (W - np.diag(W.sum(axis=1))) / g.mu.astype(np.longdouble)[:, None]
    f = np.asarray(g.function(f), dtype=np.longdouble)

    def gam(a, b):
        return 0.5 * (L @ (a * b) - a * (L @ b) - b * (L @ a))

    return (0.5 * (L @ gam(f, f)) - gam(f, L @ f)).astype(float)


# -- curvature values ----------------------------------------------------------


def _star_prefactor(p):
    return 4 / (p - 1) ** 2 * ((p - 1) / 2) ** (2 / p)


def star_leaf_curvature(center_degree: int, p: float) -> float:
    """m = inf curvature at a leaf of the star with hub degree ``D``.

    ``4/(p-1)^2 ((p-1)/2)^(2/p) (1/(p-1) - (D-1)/(2p(p-1)))``; derived for
    ``p >= 2``.  Linear and decreasing in ``D``, zero at ``D = 2p + 1``.
    """
    D = int(center_degree)
    if D < 1:
        raise ValueError(f"center degree must be >= 1, got {D}")
    p = float(p)
    return _star_prefactor(p) * (1 / (p - 1) - (D - 1) / (2 * p * (p - 1)))


def path_leaf_curvature(p: float) -> float:
    """m = inf curvature at a leaf of ``P_N``, ``N >= 3``, any ``p > 1``."""
    p = float(p)
    return (1 / (2 * p) + 1 / (2 * (p - 1))) * (2 / (p - 1)) ** ((2 * p - 2) / p)


def aux_g(y, p):
    """``y**p/(2p) - y**(p-1)/(2(p-1))`` for ``y >= 0``."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValueError("aux_g is defined for y >= 0")
    return y**p / (2 * p) - y ** (p - 1) / (2 * (p - 1))


def aux_g_min(p):
    """``(1, -1/(2p(p-1)))``: minimiser and minimum of :func:`aux_g`."""
    return 1.0, -1 / (2 * p * (p - 1))


def aux_h(z, x, p):
    """``x**(p-2) z**p/(2p) - x**(p-1) z**(p-1)/(2(p-1))`` for ``z, x >= 0``; 0 at ``x = 0``."""
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(z < 0) or np.any(x < 0):
        raise ValueError("aux_h is defined for z, x >= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        lead = x ** (p - 2) * z**p
    # x = 0 annihilates the term for every p
    lead = np.where(x == 0, 0.0, lead)
    return lead / (2 * p) - x ** (p - 1) * z ** (p - 1) / (2 * (p - 1))


def aux_h_min(x, p):
    """Minimiser ``z = x`` and minimum ``-x**(2p-2)/(2p(p-1))`` of :func:`aux_h`."""
    x = float(x)
    return x, -(x ** (2 * p - 2)) / (2 * p * (p - 1))


def negativity_threshold(p: float) -> float:
    """Hub degree past which a star leaf is negatively curved: ``2p + 1``."""
    return 2 * float(p) + 1
