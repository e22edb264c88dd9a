"""Curvature ratio on an incomplete 2-ball, flattened to index arrays.

The free variables are the ball values with the center pinned at 0, in ball
order (1-sphere then 2-sphere).  Value and gradient are hand-derived
reverse-mode; the solver never goes through :mod:`pcurv.operators` here.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import LocalBall


class BallObjective:
    def __init__(self, ball: LocalBall, p: float, m: float = math.inf):
        g = ball.graph
        self.p = float(p)
        self.m = float(m)
        self.c = 0.0 if math.isinf(self.m) else (self.p - 1) / self.m
        self.q = (2 * self.p - 2) / self.p
        self.n = g.n
        self.k = len(ball.s1)
        inner = self.k + 1
        src, dst, wts = [], [], []
        for v in range(inner):
            for u, w in g.adjacency[v]:
                src.append(v)
                dst.append(u)
                wts.append(w)
        self.src = np.array(src, dtype=np.intp)
        self.dst = np.array(dst, dtype=np.intp)
        self.w = np.array(wts, dtype=float)
        self.mu_inner = np.array(g.mu[:inner], dtype=float)
        self.mu_src = self.mu_inner[self.src]
        # center incidences come first and run over the 1-sphere in order
        deg0 = len(g.adjacency[0])
        self.w0 = self.w[:deg0].copy()
        self.y0 = self.dst[:deg0].copy()
        self.inner = inner
        self.smooth = self.p >= 3

    def full(self, z) -> np.ndarray:
        return np.concatenate(([0.0], z))

    def diffs(self, z) -> np.ndarray:
        f = self.full(z)
        return f[self.dst] - f[self.src]

    def gamma_center(self, z) -> float:
        r = self.diffs(z)[: len(self.w0)]
        return (self.p - 1) / (2 * self.mu_inner[0]) * float(np.dot(self.w0, np.abs(r) ** self.p))

    def normalize(self, z):
        """Rescale so that ``Gamma_p f(center) = 1``; None if the 1-ball is flat."""
        gam = self.gamma_center(z)
        if not gam > 0 or not math.isfinite(gam):
            return None
        return z / gam ** (1 / self.p)

    def _forward(self, z):
        p = self.p
        f = self.full(z)
        r = f[self.dst] - f[self.src]
        a = np.abs(r)
        ap = a**p
        phi = np.sign(r) * a ** (p - 1)
        gam = (p - 1) / 2 * np.bincount(self.src, self.w * ap, minlength=self.inner) / self.mu_inner
        lap = np.bincount(self.src, self.w * phi, minlength=self.inner) / self.mu_inner
        d = f[self.y0]
        ad = np.abs(d)
        with np.errstate(divide="ignore", invalid="ignore"):
            wd = ad ** (p - 2) if p != 2 else np.ones_like(ad)
        phid = np.sign(d) * ad ** (p - 1)
        dg = gam[self.y0] - gam[0]
        dl = lap[self.y0] - lap[0]
        mu0 = self.mu_inner[0]
        with np.errstate(invalid="ignore"):
            first = self.w0 * wd * dg
        if p < 2:
            first = np.where(ad == 0, np.where(dg == 0, 0.0, np.sign(dg) * np.inf), first)
        F = first.sum() / (p * (p - 1) * mu0) - np.dot(self.w0 * phid, dl) / (2 * (p - 1) * mu0)
        return f, r, a, phi, gam, lap, d, ad, wd, dg, dl, F

    def value(self, z) -> float:
        *_, gam, lap, _d, _ad, _wd, _dg, _dl, F = self._forward(z)
        G = gam[0]
        if not G > 0:
            return math.nan
        return float((F - self.c * lap[0] ** 2) / G**self.q)

    def value_grad(self, z):
        p, q, c = self.p, self.q, self.c
        f, r, a, phi, gam, lap, d, ad, wd, dg, dl, F = self._forward(z)
        G = gam[0]
        Dx = lap[0]
        num = F - c * Dx**2
        val = float(num / G**q)
        mu0 = self.mu_inner[0]

        dR_dF = 1.0 / G**q
        dR_dD = -2 * c * Dx * dR_dF
        dR_dG = -q * num / G ** (q + 1)

        # F through the inner Gamma_p and Delta_p values
        aG = self.w0 * wd / (p * (p - 1) * mu0)
        bL = -self.w0 * np.sign(d) * ad ** (p - 1) / (2 * (p - 1) * mu0)
        gGam = np.zeros(self.inner)
        gLap = np.zeros(self.inner)
        gGam[self.y0] = aG * dR_dF
        gLap[self.y0] = bL * dR_dF
        gGam[0] += -aG.sum() * dR_dF + dR_dG
        gLap[0] += -bL.sum() * dR_dF + dR_dD

        # F through the center differences directly
        with np.errstate(divide="ignore", invalid="ignore"):
            wdd = (p - 2) * ad ** (p - 4) * d if p != 2 else np.zeros_like(d)
            wphi = (p - 1) * ad ** (p - 2) if p != 2 else np.ones_like(d)
        gd = self.w0 * (wdd * dg / (p * (p - 1) * mu0) - wphi * dl / (2 * (p - 1) * mu0)) * dR_dF

        with np.errstate(divide="ignore", invalid="ignore"):
            dphi = (p - 1) * a ** (p - 2) if p != 2 else np.ones_like(a)
        coef = (
            gGam[self.src] * (p - 1) * p / 2 * self.w * phi / self.mu_src
            + gLap[self.src] * self.w * dphi / self.mu_src
        )
        grad = np.bincount(self.dst, coef, minlength=self.n) - np.bincount(self.src, coef, minlength=self.n)
        grad[self.y0] += gd
        return val, grad[1:]

    def min_abs_diff(self, z) -> float:
        return float(np.min(np.abs(self.diffs(z))))
