"""Self-verification suite behind ``pcurv verify`` and the acceptance tests.

Each check returns a :class:`CheckResult`.  Operators are looked up through
their modules at call time, so a patched operator is what gets checked.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bruteforce, closed_forms, graph, operators, product, solver
from ._objective import BallObjective

__all__ = ["CheckResult", "CHECKS", "QUICK", "run_checks", "report"]

INF = math.inf


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0
    metrics: dict = field(default_factory=dict)


def _rng(tag: int):
    return np.random.default_rng(np.random.SeedSequence(20240611, spawn_key=(tag,)))


def _rel(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    den = np.maximum(np.abs(b), np.finfo(float).tiny)
    return float(np.max(np.abs(a - b) / den))


# -- 1 -------------------------------------------------------------------------


def check_path_closed_forms(n: int = 1000) -> CheckResult:
    """Middle of a long path against the term-by-term expansion."""
    rng = _rng(1)
    g = graph.make_path(5)
    worst = {}
    for p in (2.0, 2.5, 3.0, 4.0):
        A, B, C, D = rng.uniform(-5, 5, (4, n))
        F = np.stack([A + C, A, np.zeros(n), B, B + D])
        got = operators.gamma2_p(g, F, 2, p)
        want = closed_forms.path_middle_gamma2(A, B, C, D, p)
        r = _rel(got, want)
        r_lap = _rel(operators.delta_p(g, F, 2, p), closed_forms.path_middle_delta(A, B, p))
        r_gam = _rel(operators.gamma_p(g, F, 2, p), closed_forms.path_middle_gamma(A, B, p))
        worst[p] = max(r, r_lap, r_gam)
    ok = all(v <= 1e-10 for v in worst.values())
    return CheckResult(
        "path_closed_forms",
        ok,
        "max relative error " + ", ".join(f"p={p:g}: {v:.2e}" for p, v in worst.items()) + " (limit 1e-10)",
        metrics={str(k): v for k, v in worst.items()},
    )


# -- 2 -------------------------------------------------------------------------


def check_p2_reduction(n: int = 1000) -> CheckResult:
    """``p = 2`` against the classical Leibniz-form evaluation."""
    rng = _rng(2)
    graphs = {
        "P5": graph.make_path(5),
        "C4": graph.make_cycle(4),
        "C5": graph.make_cycle(5),
        **{f"star{D}": graph.make_star(D) for D in range(1, 5)},
    }
    worst = {}
    for name, g in graphs.items():
        F = rng.uniform(-5, 5, (g.n, n))
        want = closed_forms.classical_gamma2(g, F)
        got = np.stack([operators.gamma2_p(g, F, v, 2.0) for v in range(g.n)])
        worst[name] = float(np.max(np.abs(got - want)))
    ok = all(v <= 1e-12 for v in worst.values())
    top = max(worst, key=worst.get)
    return CheckResult(
        "p2_reduction",
        ok,
        f"max abs error {worst[top]:.2e} on {top} over {n} functions per graph (limit 1e-12)",
        metrics=worst,
    )


# -- 3 -------------------------------------------------------------------------

NONNEG_CASES = [
    ("P3 middle", lambda: graph.make_path(3), 1),
    ("P4 middle", lambda: graph.make_path(4), 1),
    ("P5 leaf", lambda: graph.make_path(5), 0),
    ("P7 center", lambda: graph.make_path(7), 3),
    ("C3", lambda: graph.make_cycle(3), 0),
    ("C4", lambda: graph.make_cycle(4), 0),
    ("C5", lambda: graph.make_cycle(5), 0),
]


def check_nonnegative_curvature(restarts: int = 64) -> CheckResult:
    cfg = solver.SolverConfig(restarts=restarts)
    vals = {}
    for p in (3.0, 4.0):
        for name, make, x in NONNEG_CASES:
            est = solver.estimate_curvature(make(), x, p, INF, cfg)
            vals[f"{name} p={p:g}"] = est.value if est.converged else -INF
    ok = all(v >= -1e-6 for v in vals.values())
    low = min(vals, key=vals.get)
    return CheckResult(
        "nonnegative_curvature",
        ok,
        f"smallest estimate {vals[low]:.3e} at {low} (limit -1e-6)",
        metrics=vals,
    )


# -- 4 -------------------------------------------------------------------------


def check_divergence() -> CheckResult:
    problems = []
    metrics = {}
    for p in (1.2, 1.5, 1.8):
        for name, g, x in (("P3 middle", graph.make_path(3), 1), ("P4 middle", graph.make_path(4), 1)):
            ev = solver.probe_divergence(g, x, p)
            if ev is None:
                problems.append(f"no divergence at {name}, p={p}")
                continue
            r = float(_ratio_on_ball(g, x, ev.values, p))
            metrics[f"{name} p={p:g}"] = r
            if not r < -1e6:
                problems.append(f"{name} p={p}: ratio {r:.3g}")
        verdict = solver.check_cd(graph.make_cycle(4), 0, p, INF, 0.0)
        metrics[f"C4 gap p={p:g}"] = verdict.gap
        if not verdict.falsified:
            problems.append(f"CD_p(inf, 0) not falsified on C4, p={p}")
        leaf = graph.make_path(5)
        if solver.probe_divergence(leaf, 0, p) is not None:
            problems.append(f"spurious divergence at the path leaf, p={p}")
        est = solver.estimate_curvature(leaf, 0, p)
        want = closed_forms.path_leaf_curvature(p)
        metrics[f"leaf p={p:g}"] = est.value
        if not (est.converged and abs(est.value - want) <= 5e-2):
            problems.append(f"leaf p={p}: {est.value} vs {want}")
    return CheckResult(
        "divergence",
        not problems,
        "; ".join(problems) or "P3/P4 middle ratios < -1e6, C4 falsified, leaf finite and matching for p in {1.2, 1.5, 1.8}",
        metrics=metrics,
    )


def _ratio_on_ball(g, x, ball_values, p):
    ball = graph.extract_ball2_inc(g, x)
    return operators.cd_ratio(g, ball.extend(ball_values), x, p)


# -- 5 -------------------------------------------------------------------------


def check_star_leaf(restarts: int = 64) -> CheckResult:
    cfg = solver.SolverConfig(restarts=restarts)
    problems = []
    metrics = {}
    for p, degrees in ((2.0, range(1, 7)), (3.0, range(1, 9))):
        for D in degrees:
            g = graph.make_star(D)
            est = solver.estimate_curvature(g, "leaf1", p, INF, cfg)
            want = closed_forms.star_leaf_curvature(D, p)
            metrics[f"D={D} p={p:g}"] = est.value
            if not (est.converged and abs(est.value - want) <= 1e-3):
                problems.append(f"D={D}, p={p}: {est.value} vs {want}")
    if not math.isclose(closed_forms.star_leaf_curvature(8, 3.0), -1 / 12, rel_tol=1e-14):
        problems.append("closed form at D=8, p=3 is not -1/12")
    for p in (2.0, 2.5, 3.0, 3.5, 4.0):
        D = int(closed_forms.negativity_threshold(p))
        at = closed_forms.star_leaf_curvature(D, p)
        before = closed_forms.star_leaf_curvature(D - 1, p)
        after = closed_forms.star_leaf_curvature(D + 1, p)
        if not (abs(at) <= 1e-15 and before > 0 > after):
            problems.append(f"zero crossing at D={D}, p={p} off: {before}, {at}, {after}")
    return CheckResult(
        "star_leaf",
        not problems,
        "; ".join(problems) or "p=2 (D<=6) and p=3 (D<=8) within 1e-3, sign flip at D=8, zero at D=2p+1",
        metrics=metrics,
    )


# -- 6 -------------------------------------------------------------------------


def _oracle_cases():
    out = [("K2", graph.make_complete(2)), ("P3", graph.make_path(3)), ("P4", graph.make_path(4))]
    out += [(f"star{D}", graph.make_star(D)) for D in range(1, 5)]
    out += [("C3", graph.make_cycle(3)), ("C4", graph.make_cycle(4))]
    return out


def check_solver_vs_oracle(grid_resolution: int = 21) -> CheckResult:
    worst, where = 0.0, ""
    metrics = {}
    for name, g in _oracle_cases():
        for p in (2.0, 3.0):
            for x in range(g.n):
                a = solver.estimate_curvature(g, x, p).value
                b = bruteforce.brute_force_curvature(g, x, p, grid_resolution=grid_resolution)
                d = abs(a - b)
                metrics[f"{name}:{g.labels[x]} p={p:g}"] = d
                if not d <= worst:
                    worst, where = d, f"{name} vertex {g.labels[x]} p={p:g}"
    return CheckResult(
        "solver_vs_oracle",
        worst <= 5e-2,
        f"largest |solver - grid oracle| {worst:.2e} at {where} (limit 5e-2)",
        metrics=metrics,
    )


# -- 7 -------------------------------------------------------------------------


def check_product_identities(n: int = 1000) -> CheckResult:
    rng = _rng(7)
    problems = []
    metrics = {}
    pairs = [
        (graph.make_complete(2), graph.make_complete(2)),
        (graph.make_path(2), graph.make_path(3)),
        (graph.make_path(3), graph.make_cycle(4)),
        (graph.make_star(3), graph.make_cycle(3)),
    ]
    res = 0.0
    for g1, g2 in pairs:
        pg = graph.cartesian_product(g1, g2)
        # O(1) values keep the absolute 1e-12 limit meaningful for p = 4
        F = rng.uniform(-1, 1, (g1.n, g2.n, n))
        for p in (1.5, 2.0, 2.5, 3.0, 4.0):
            for x in range(g1.n):
                for y in range(g2.n):
                    rl, rg = product.check_additivity(g1, g2, F, x, y, p, product=pg)
                    res = max(res, rl, rg)
    metrics["additivity"] = res
    if not res <= 1e-12:
        problems.append(f"additivity residual {res:.2e}")

    g1, g2 = graph.make_path(2), graph.make_path(3)
    pg = graph.cartesian_product(g1, g2)
    q_err, q_min = 0.0, math.inf
    for _ in range(n):
        F = rng.uniform(-1, 1, (2, 3))
        gb = product.gamma2_decomposition_gap(g1, g2, F, 0, 1, 2.0, product=pg)
        q = product.quarter_sum(*product.pair_differences(g1, g2, F, 0, 1))
        q_err = max(q_err, abs(gb.direct - q))
        q_min = min(q_min, gb.direct)
    metrics["quarter_sum"] = q_err
    if not (q_err <= 1e-12 and q_min >= -1e-12):
        problems.append(f"p=2 quarter-sum error {q_err:.2e}, min gap {q_min:.2e}")

    w_err = 0.0
    for g1, g2, x, y in (
        (graph.make_complete(2), graph.make_complete(2), 0, 0),
        (graph.make_path(3), graph.make_path(3), 1, 1),
        (graph.make_star(2), graph.make_cycle(4), "c", 0),
    ):
        F = product.counterexample_function(g1, g2, x, y)
        dxy = g1.degree(x) * g2.degree(y)
        for p in (2.5, 3.0, 4.0):
            gb = product.gamma2_decomposition_gap(g1, g2, F, x, y, p)
            w_err = max(w_err, abs(gb.direct - (-dxy / (2 * p * (p - 1)))))
    metrics["witness"] = w_err
    if not w_err <= 1e-12:
        problems.append(f"witness gap error {w_err:.2e}")
    return CheckResult(
        "product_identities",
        not problems,
        "; ".join(problems)
        or f"additivity {res:.1e}, quarter-sum {q_err:.1e}, witness {w_err:.1e} (limits 1e-12)",
        metrics=metrics,
    )


# -- 8 -------------------------------------------------------------------------


def toggle_edge(g: graph.WeightedGraph, u, v) -> graph.WeightedGraph:
    """Copy of ``g`` with the unit edge ``uv`` added or removed."""
    u, v = g.index(u), g.index(v)
    edges = [(g.labels[i], g.labels[j], w) for i, j, w in g.edges() if {i, j} != {u, v}]
    if len(edges) == g.num_edges:
        edges.append((g.labels[u], g.labels[v], 1.0))
    return graph.WeightedGraph(g.labels, edges, g.mu)


def check_invariances(n: int = 50) -> CheckResult:
    rng = _rng(8)
    problems = []
    cases = [(graph.make_path(5), 2), (graph.make_cycle(5), 0), (graph.make_star(3), 1), (graph.make_hypercube(2), 0)]
    scale = trans = even = 0.0
    for g, x in cases:
        for p in (1.5, 2.0, 3.0, 4.0):
            for _ in range(n):
                f = rng.normal(size=g.n)
                h = rng.normal(size=g.n)
                c = rng.normal() * 5
                r = operators.cd_ratio(g, f, x, p, 3.0)
                for lam in (-3.0, 0.01, 7.0):
                    scale = max(scale, abs(operators.cd_ratio(g, lam * f, x, p, 3.0) - r) / max(1.0, abs(r)))
                for op in (operators.delta_p, operators.gamma_p, operators.gamma2_p):
                    a, b = op(g, f, x, p), op(g, f + c, x, p)
                    trans = max(trans, abs(a - b) / max(1.0, abs(a)))
                a, b = operators.gamma_p_bilinear(g, f, f, h, x, p), operators.gamma_p_bilinear(g, f + c, f + c, h + c, x, p)
                trans = max(trans, abs(a - b) / max(1.0, abs(a)))
                a, b = operators.gamma2_p(g, f, x, p), operators.gamma2_p(g, -f, x, p)
                even = max(even, abs(a - b))
    for name, v, lim in (("scale", scale, 1e-9), ("translation", trans, 1e-9), ("evenness", even, 0.0)):
        if not v <= lim:
            problems.append(f"{name} violation {v:.2e}")

    # locality: the ball alone, and with 2-sphere edges toggled
    loc, exact = 0.0, True
    p5 = graph.make_path(5)
    for g, x, extra in (
        (p5, 2, [("0", "4")]),
        (graph.make_hypercube(3), 0, None),
        (graph.make_star(4), "leaf1", [("leaf2", "leaf3"), ("leaf3", "leaf4")]),
    ):
        ball = graph.extract_ball2_inc(g, x)
        xi = g.index(x)
        if extra is None:
            s2 = [g.labels[v] for v in ball.s2]
            extra = [(s2[i], s2[j]) for i in range(len(s2)) for j in range(i + 1, len(s2))]
        toggled = g
        for u, v in extra:
            toggled = toggle_edge(toggled, u, v)
        for p in (1.5, 2.0, 3.0):
            for _ in range(n):
                f = rng.normal(size=g.n)
                a = operators.gamma2_p(g, f, xi, p)
                b = operators.gamma2_p(ball.graph, ball.restrict(f), 0, p)
                c = operators.gamma2_p(toggled, f, xi, p)
                # restriction keeps adjacency order, so it must be exact;
                # toggling rebuilds the graph and may reorder the sums
                if a != b:
                    exact = False
                loc = max(loc, abs(a - c) / max(1.0, abs(a)))
    if not exact:
        problems.append("2-ball restriction changed Gamma_2,p")
    if not loc <= 1e-12:
        problems.append(f"2-sphere edge toggling changed Gamma_2,p by {loc:.2e}")

    cfg1 = solver.SolverConfig(restarts=8, seed=1234, workers=1)
    cfg4 = solver.SolverConfig(restarts=8, seed=1234, workers=4)
    for g, x, p in ((graph.make_cycle(4), 0, 3.0), (graph.make_star(3), "leaf1", 2.5)):
        e1 = solver.estimate_curvature(g, x, p, INF, cfg1)
        e4 = solver.estimate_curvature(g, x, p, INF, cfg4)
        if not (e1.value == e4.value and np.array_equal(e1.witness, e4.witness) and e1.best_per_restart == e4.best_per_restart):
            problems.append(f"worker count changed the result on {g.labels[0]}.., p={p}")
    return CheckResult(
        "invariances",
        not problems,
        "; ".join(problems)
        or f"scale {scale:.1e}, translation {trans:.1e}, evenness {even:.1e}, restriction exact, toggling {loc:.1e}, seeds deterministic",
        metrics={"scale": scale, "translation": trans, "evenness": even, "locality": loc},
    )


# -- 9 -------------------------------------------------------------------------


def check_gradient(n: int = 100, h: float = 1e-6) -> CheckResult:
    rng = _rng(9)
    cases = [(graph.make_path(5), 2), (graph.make_cycle(4), 0), (graph.make_star(3), "leaf1"), (graph.make_hypercube(2), 0)]
    worst = 0.0
    for p in (3.0, 4.0):
        for i in range(n):
            g, x = cases[i % len(cases)]
            obj = BallObjective(graph.extract_ball2_inc(g, x), p, (INF, 3.0)[i % 2])
            # smooth point: edge differences bounded away from 0
            while True:
                z = rng.normal(size=obj.n - 1)
                if obj.min_abs_diff(z) > 0.05:
                    break
            _, grad = obj.value_grad(z)
            fd = np.empty_like(z)
            for k in range(len(z)):
                e = np.zeros_like(z)
                e[k] = h
                fd[k] = (obj.value(z + e) - obj.value(z - e)) / (2 * h)
            worst = max(worst, float(np.linalg.norm(grad - fd) / max(np.linalg.norm(fd), 1e-8)))
    return CheckResult(
        "gradient",
        worst <= 1e-4,
        f"max relative gradient error {worst:.2e} over {n} points per p (limit 1e-4)",
        metrics={"worst": worst},
    )


CHECKS = {
    1: check_path_closed_forms,
    2: check_p2_reduction,
    3: check_nonnegative_curvature,
    4: check_divergence,
    5: check_star_leaf,
    6: check_solver_vs_oracle,
    7: check_product_identities,
    8: check_invariances,
    9: check_gradient,
}
QUICK = (1, 2, 7, 8, 9)


def run_checks(level: str = "quick") -> list[CheckResult]:
    if level not in ("quick", "full"):
        raise ValueError(f"level must be 'quick' or 'full', got {level!r}")
    ids = QUICK if level == "quick" else tuple(CHECKS)
    out = []
    for i in ids:
        t0 = time.perf_counter()
        try:
            res = CHECKS[i]()
        except Exception as exc:  # a crashing check is a failing check
            res = CheckResult(CHECKS[i].__name__.removeprefix("check_"), False, f"raised {type(exc).__name__}: {exc}")
        res.elapsed = time.perf_counter() - t0
        out.append(res)
    return out


def report(results: list[CheckResult]) -> str:
    lines = [f"[{'PASS' if r.passed else 'FAIL'}] {r.name} ({r.elapsed:.2f} s): {r.detail}" for r in results]
    summary = {
        "passed": all(r.passed for r in results),
        "checks": [{k: v for k, v in asdict(r).items() if k != "metrics"} for r in results],
    }
    lines.append(json.dumps(summary, default=float))
    return "\n".join(lines)
