"""Numerical p-Bakry-Emery curvature at a vertex.

``K_{p,x}(m)`` is the infimum of :func:`pcurv.operators.cd_ratio` over
functions on the incomplete 2-ball of ``x``.  :func:`estimate_curvature`
approaches it from above by multistart local minimisation, with the center
pinned to 0 and ``Gamma_p f(x) = 1`` restored after every step.

For ``1 < p < 2`` the infimum is often ``-inf``; :func:`probe_divergence`
looks for that directly before any minimisation is attempted.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import operators
from ._objective import BallObjective
from .graph import LocalBall, WeightedGraph, extract_ball2_inc

__all__ = [
    "Status",
    "SolverConfig",
    "CurvatureEstimate",
    "DivergenceEvidence",
    "CDVerdict",
    "estimate_curvature",
    "probe_divergence",
    "check_cd",
    "curvature_profile",
]


class Status(str, enum.Enum):
    CONVERGED = "converged"
    DIVERGING = "diverging_to_minus_infinity"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class SolverConfig:
    restarts: int = 64
    seed: int = 0
    max_iterations: int = 2000
    step_tolerance: float = 1e-10
    value_tolerance: float = 1e-6
    smoothing_epsilon: float = 1e-6
    divergence_threshold: float = -1e6
    probe_divergence: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (self.step_tolerance > 0 and self.value_tolerance > 0):
            raise ValueError("tolerances must be positive")
        if self.smoothing_epsilon < 0:
            raise ValueError("smoothing_epsilon must be nonnegative")
        if not self.divergence_threshold < 0:
            raise ValueError("divergence_threshold must be negative")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class DivergenceEvidence:
    """A probe function whose ratio fell below the divergence threshold."""

    vertex: str  # the 1-sphere vertex whose edge difference was shrunk
    t: float
    ratio: float
    values: np.ndarray  # on the ball, ball order
    trace: list[tuple[float, float]] = field(default_factory=list)


@dataclass
class CurvatureEstimate:
    status: Status
    value: float
    witness: np.ndarray | None
    ball: LocalBall
    p: float
    m: float
    restarts_used: int = 0
    best_per_restart: list[float] = field(default_factory=list)
    evidence: DivergenceEvidence | None = None

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    def witness_values(self) -> dict[str, float]:
        """Witness keyed by vertex label."""
        if self.witness is None:
            return {}
        return dict(zip(self.ball.graph.labels, map(float, self.witness)))


@dataclass
class CDVerdict:
    falsified: bool
    gap: float
    witness: np.ndarray | None
    estimate: CurvatureEstimate


# -- divergence probe ----------------------------------------------------------


def probe_divergence(
    g: WeightedGraph,
    x,
    p: float,
    m: float = math.inf,
    threshold: float = -1e6,
    max_decades: int = 300,
):
    """Look for ``cd_ratio -> -inf`` by shrinking one 1-sphere edge difference.

    For each 1-sphere vertex ``y`` in turn: ``f(x) = 0``, ``f(y) = t``, every
    other 1-sphere vertex at 1, 2-sphere vertices adjacent to ``y`` at ``t``
    and the rest at 1.  ``t`` runs over ``1e-1, 1e-2, ...`` until the ratio
    drops below ``threshold`` or ``max_decades`` is reached.  The ratio
    blows up like ``-t**(p-2)`` whenever ``Gamma_p f(y) < Gamma_p f(x)`` in
    the limit, so slowly for ``p`` close to 2, which is why the family goes
    well past ``1e-8``.

    Returns
    -------
    DivergenceEvidence or None
    """
    p = operators.check_p(p)
    if not p < 2:
        raise ValueError("probe_divergence is meant for 1 < p < 2")
    ball = extract_ball2_inc(g, x)
    bg = ball.graph
    k = len(ball.s1)
    best = None
    for i in range(1, k + 1):
        near = {u for u, _ in bg.adjacency[i]}
        trace = []
        for dec in range(1, max_decades + 1):
            t = 10.0**-dec
            vals = np.ones(bg.n)
            vals[0] = 0.0
            vals[i] = t
            for j in range(k + 1, bg.n):
                if j in near:
                    vals[j] = t
            try:
                r = operators.cd_ratio(bg, vals, 0, p, m)
            except operators.DegenerateFunctionError:
                break
            trace.append((t, r))
            if r < threshold:
                ev = DivergenceEvidence(bg.labels[i], t, r, vals, trace)
                if best is None or ev.t > best.t:
                    best = ev
                break
    return best


# -- local minimisation ----------------------------------------------------------


def _pattern_search(obj: BallObjective, z, val, h, tol, max_evals=4000):
    evals = 0
    while h > tol and evals < max_evals:
        moved = False
        for i in range(len(z)):
            for sgn in (1.0, -1.0):
                trial = z.copy()
                trial[i] += sgn * h
                trial = obj.normalize(trial)
                evals += 1
                if trial is None:
                    continue
                v = obj.value(trial)
                if v < val:
                    z, val, moved = trial, v, True
                    break
        if not moved:
            h *= 0.5
    return z, val


def _minimize(obj: BallObjective, z0, cfg: SolverConfig):
    """Projected gradient descent, Barzilai-Borwein steps with Armijo backtracking."""
    z = obj.normalize(np.asarray(z0, dtype=float))
    if z is None:
        return None, math.nan
    val = obj.value(z)
    if not math.isfinite(val):
        return z, val
    val, g = obj.value_grad(z)
    kinky = obj.p < 3
    step = 1.0 / max(float(np.linalg.norm(g)), 1e-12)
    searched = False
    stall = 0
    for _ in range(cfg.max_iterations):
        if val < cfg.divergence_threshold:
            break
        near_kink = kinky and obj.min_abs_diff(z) < cfg.smoothing_epsilon
        if near_kink or not np.all(np.isfinite(g)):
            if searched:
                break
            z, val = _pattern_search(obj, z, val, 0.1 * float(np.max(np.abs(z))), cfg.step_tolerance)
            searched = True
            val, g = obj.value_grad(z)
            continue
        gn2 = float(g @ g)
        if gn2 <= (1e-10 * max(1.0, abs(val))) ** 2:
            break
        accepted = False
        while step > 1e-20:
            zn = obj.normalize(z - step * g)
            vn = obj.value(zn) if zn is not None else math.nan
            if vn <= val - 1e-4 * step * gn2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        vn, gnew = obj.value_grad(zn)
        s = zn - z
        yv = gnew - g
        sy = float(s @ yv)
        step = float(s @ s) / sy if sy > 0 else 2 * step
        # a value change this small is rounding noise once it repeats
        stall = stall + 1 if val - vn <= 1e-6 * cfg.value_tolerance * max(1.0, abs(val)) else 0
        z, val, g = zn, vn, gnew
        if stall >= 3 or float(np.linalg.norm(s)) <= cfg.step_tolerance:
            break
    if kinky and not searched and obj.min_abs_diff(z) < cfg.smoothing_epsilon:
        z, val = _pattern_search(obj, z, val, 0.1 * float(np.max(np.abs(z))), cfg.step_tolerance)
    return z, val


def _restart_start(obj: BallObjective, seed: int, index: int):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    while True:
        z = rng.standard_normal(obj.n - 1)
        if obj.normalize(z) is not None:
            return z


def estimate_curvature(
    g: WeightedGraph,
    x,
    p: float,
    m: float = math.inf,
    cfg: SolverConfig | None = None,
    initial=(),
) -> CurvatureEstimate:
    """Estimate ``K_{p,x,G}(m)``.

    Parameters
    ----------
    initial : sequence of vertex functions, optional
        Functions on ``g`` used as the first restarts in place of random
        starts.  The estimate never exceeds their ratio.

    Returns
    -------
    CurvatureEstimate
        ``value`` is the best local minimum over all restarts, an upper
        bound on the curvature, and equals ``cd_ratio(witness)``.
    """
    cfg = cfg or SolverConfig()
    p = operators.check_p(p)
    m = float(m)
    if not m > 0:
        raise ValueError("dimension must be positive or inf")
    ball = extract_ball2_inc(g, x)
    if not ball.s1:
        return CurvatureEstimate(Status.DEGENERATE, math.nan, None, ball, p, m)

    if p < 2 and cfg.probe_divergence:
        ev = probe_divergence(g, x, p, m, threshold=cfg.divergence_threshold)
        if ev is not None:
            return CurvatureEstimate(Status.DIVERGING, -math.inf, ev.values, ball, p, m, evidence=ev)

    obj = BallObjective(ball, p, m)
    starts = []
    for f in initial:
        fb = ball.restrict(f)
        starts.append(fb[1:] - fb[0])

    def run(r):
        z0 = starts[r] if r < len(starts) else _restart_start(obj, cfg.seed, r)
        return _minimize(obj, z0, cfg)

    n_runs = max(cfg.restarts, len(starts))
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(run, range(n_runs)))
    else:
        results = [run(r) for r in range(n_runs)]

    best_vals = [v for _, v in results]
    finite = [i for i, (z, v) in enumerate(results) if z is not None and not math.isnan(v)]
    if not finite:
        return CurvatureEstimate(Status.DEGENERATE, math.nan, None, ball, p, m, n_runs, best_vals)
    i_best = min(finite, key=lambda i: results[i][1])
    z_best, v_best = results[i_best]
    witness = obj.full(z_best)
    if v_best < cfg.divergence_threshold:
        ev = DivergenceEvidence("", math.nan, v_best, witness)
        return CurvatureEstimate(Status.DIVERGING, -math.inf, witness, ball, p, m, n_runs, best_vals, ev)
    value = float(operators.cd_ratio(ball.graph, witness, 0, p, m))
    return CurvatureEstimate(Status.CONVERGED, value, witness, ball, p, m, n_runs, best_vals)


def check_cd(g: WeightedGraph, x, p: float, m: float, K: float, cfg: SolverConfig | None = None) -> CDVerdict:
    """One-sided test of CD_p(m, K) at ``x``.

    Falsified when some function found by the solver has
    ``cd_gap < -value_tolerance``; not falsified is absence of a
    counterexample, not a proof.
    """
    cfg = cfg or SolverConfig()
    est = estimate_curvature(g, x, p, m, cfg)
    if est.status is Status.DEGENERATE:
        raise ValueError(f"vertex {g.label(x)!r} has no neighbours")
    gap = float(operators.cd_gap(est.ball.graph, est.witness, 0, p, m, K))
    return CDVerdict(gap < -cfg.value_tolerance, gap, est.witness, est)


def curvature_profile(g: WeightedGraph, x, p: float, m_list, cfg: SolverConfig | None = None):
    return [estimate_curvature(g, x, p, m, cfg) for m in m_list]
