"""Grid-search oracle for the curvature at a vertex.

Exponential in the ball size and meant only for checking
:func:`pcurv.solver.estimate_curvature` on tiny balls.  It evaluates the
ratio through :mod:`pcurv.operators` and shares no minimisation code with
the solver.
"""

from __future__ import annotations

import math

import numpy as np

from . import operators
from .graph import WeightedGraph, extract_ball2_inc

__all__ = ["BallTooLargeError", "brute_force_curvature", "MAX_FREE"]

MAX_FREE = 6


class BallTooLargeError(ValueError):
    pass


def _ratios(bg, F, p, c, q):
    g2, lap, gam = operators.cd_terms(bg, F, 0, p)
    g2, lap, gam = np.atleast_1d(g2), np.atleast_1d(lap), np.atleast_1d(gam)
    out = np.full(gam.shape, np.inf)
    ok = gam > 0
    with np.errstate(invalid="ignore"):
        out[ok] = (g2[ok] - c * lap[ok] ** 2) / gam[ok] ** q
    return np.where(np.isnan(out), np.inf, out)


def brute_force_curvature(
    g: WeightedGraph,
    x,
    p: float,
    m: float = math.inf,
    grid_resolution: int = 21,
    range_bound: float = 2.0,
    chunk: int = 65536,
    refine_tol: float = 1e-9,
) -> float:
    """Minimum of the ratio over a product grid, polished by coordinate descent.

    The center is pinned at 0 and every other ball value ranges over
    ``linspace(-range_bound, range_bound, grid_resolution)``; points with
    ``Gamma_p f(x) = 0`` are skipped.
    """
    p = operators.check_p(p)
    ball = extract_ball2_inc(g, x)
    k = ball.n_free
    if k > MAX_FREE:
        raise BallTooLargeError(f"ball has {k} free values, oracle handles at most {MAX_FREE}")
    if not ball.s1:
        raise operators.DegenerateFunctionError("isolated vertex")
    bg = ball.graph
    c = 0.0 if math.isinf(m) else (p - 1) / m
    q = (2 * p - 2) / p
    axis = np.linspace(-range_bound, range_bound, grid_resolution)
    shape = (grid_resolution,) * k
    total = grid_resolution**k

    best_val, best_pt = np.inf, None
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        F = np.zeros((bg.n, len(idx)))
        for row, digit in enumerate(np.unravel_index(idx, shape), start=1):
            F[row] = axis[digit]
        r = _ratios(bg, F, p, c, q)
        j = int(np.argmin(r))
        if r[j] < best_val:
            best_val, best_pt = float(r[j]), F[:, j].copy()
    if best_pt is None:
        raise operators.DegenerateFunctionError("no grid point with Gamma_p f(x) > 0")

    # coordinate descent with a shrinking step
    pt, val = best_pt, best_val
    h = 2 * range_bound / max(grid_resolution - 1, 1)
    while h > refine_tol and math.isfinite(val):
        trials = np.repeat(pt[:, None], 2 * k, axis=1)
        for i in range(k):
            trials[i + 1, 2 * i] += h
            trials[i + 1, 2 * i + 1] -= h
        r = _ratios(bg, trials, p, c, q)
        j = int(np.argmin(r))
        if r[j] < val:
            pt, val = trials[:, j], float(r[j])
        else:
            h *= 0.5
    return val
