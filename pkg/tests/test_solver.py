import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pcurv import closed_forms as cf
from pcurv import operators as ops
from pcurv._objective import BallObjective
from pcurv.bruteforce import BallTooLargeError, brute_force_curvature
from pcurv.graph import WeightedGraph, extract_ball2_inc, make_complete, make_cycle, make_hypercube, make_path, make_star
from pcurv.solver import (
    SolverConfig,
    Status,
    check_cd,
    curvature_profile,
    estimate_curvature,
    probe_divergence,
)

FAST = SolverConfig(restarts=16)
INF = math.inf


# -- configuration -------------------------------------------------------------------


@pytest.mark.parametrize(
    "kw",
    [
        {"restarts": 0},
        {"seed": -1},
        {"max_iterations": 0},
        {"step_tolerance": 0.0},
        {"value_tolerance": -1.0},
        {"smoothing_epsilon": -1e-3},
        {"divergence_threshold": 1.0},
        {"workers": 0},
    ],
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SolverConfig(**kw)


# -- known values ---------------------------------------------------------------------------


def test_star3_leaf_p2():
    est = estimate_curvature(make_star(3), "leaf1", 2.0, INF, FAST)
    assert est.converged
    assert est.value == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("p", [2.0, 2.5, 3.0])
def test_path_leaf(p):
    est = estimate_curvature(make_path(5), 0, p, INF, FAST)
    assert est.value == pytest.approx(cf.path_leaf_curvature(p), abs=1e-6)


def test_p3_middle_p3_nonnegative():
    assert estimate_curvature(make_path(3), 1, 3.0, INF, FAST).value >= -1e-6


def test_p3_middle_diverges_below_two():
    est = estimate_curvature(make_path(3), 1, 1.5)
    assert est.status is Status.DIVERGING
    assert est.value == -INF
    assert est.evidence.ratio < -1e6
    # the evidence is a real function on the ball
    assert ops.cd_ratio(est.ball.graph, est.evidence.values, 0, 1.5) == est.evidence.ratio


def test_degenerate_vertex():
    g = WeightedGraph(["a", "b", "c"], [("a", "b", 1.0)])
    est = estimate_curvature(g, "c", 2.0)
    assert est.status is Status.DEGENERATE and math.isnan(est.value)
    with pytest.raises(ValueError):
        check_cd(g, "c", 2.0, INF, 0.0)


def test_weighted_k2():
    # K_2 with weight w and measures mu: rescale of the unit case
    g = WeightedGraph(["a", "b"], [("a", "b", 3.0)], [1.5, 1.5])
    est = estimate_curvature(g, "a", 2.0, INF, FAST)
    unit = estimate_curvature(make_complete(2), 0, 2.0, INF, FAST).value
    assert est.value == pytest.approx(unit * 2.0, rel=1e-8)


# -- divergence probe -----------------------------------------------------------------------------------


@pytest.mark.parametrize("p", [1.2, 1.5, 1.8])
@pytest.mark.parametrize("g, x", [(make_path(3), 1), (make_path(4), 1), (make_cycle(4), 0)], ids=["P3", "P4", "C4"])
def test_probe_finds_divergence(p, g, x):
    ev = probe_divergence(g, x, p)
    assert ev is not None and ev.ratio < -1e6
    ratios = [r for _, r in ev.trace]
    assert ratios[-1] == ev.ratio


@pytest.mark.parametrize("p", [1.2, 1.5, 1.8])
@pytest.mark.parametrize("g, x", [(make_path(3), 0), (make_path(5), 0)], ids=["P3 leaf", "P5 leaf"])
def test_probe_quiet_at_leaf(p, g, x):
    assert probe_divergence(g, x, p) is None


def test_probe_only_below_two():
    with pytest.raises(ValueError):
        probe_divergence(make_path(3), 1, 2.0)


# -- check_cd ----------------------------------------------------------------------------------------------


@pytest.mark.parametrize(
    "g, x, p, falsified",
    [
        (make_path(5), 2, 3.0, False),
        (make_cycle(4), 0, 1.5, True),
        (make_star(8), "leaf1", 3.0, True),
    ],
    ids=["P5 middle p=3", "C4 p=1.5", "star8 leaf p=3"],
)
def test_check_cd(g, x, p, falsified):
    verdict = check_cd(g, x, p, INF, 0.0, FAST)
    assert verdict.falsified is falsified
    if falsified:
        assert verdict.gap < -FAST.value_tolerance
        assert ops.cd_gap(verdict.estimate.ball.graph, verdict.witness, 0, p, INF, 0.0) == verdict.gap


# -- invariants -------------------------------------------------------------------------------------------------


@pytest.mark.parametrize("g, x, p", [(make_cycle(5), 0, 3.0), (make_star(3), "leaf1", 2.5), (make_hypercube(2), 0, 4.0)])
def test_witness_consistency(g, x, p):
    est = estimate_curvature(g, x, p, INF, FAST)
    assert abs(ops.cd_ratio(est.ball.graph, est.witness, 0, p) - est.value) <= FAST.value_tolerance
    assert est.witness[0] == 0.0
    assert ops.gamma_p(est.ball.graph, est.witness, 0, p) == pytest.approx(1.0)
    # value is recomputed through the operators, so it may differ in the last bit
    assert est.value == pytest.approx(min(est.best_per_restart), rel=1e-12)
    assert set(est.witness_values()) == set(est.ball.graph.labels)


@settings(max_examples=15)
@given(st.lists(st.floats(-3, 3), min_size=5, max_size=5), st.sampled_from([2.0, 3.0, 4.0]))
def test_upper_bound_with_injected_start(vals, p):
    g = make_path(5)
    f = np.array(vals)
    try:
        r = ops.cd_ratio(g, f, 2, p)
    except ops.DegenerateFunctionError:
        return
    est = estimate_curvature(g, 2, p, INF, SolverConfig(restarts=1), initial=[f])
    assert est.value <= r + 1e-6


def test_seed_determinism_across_workers():
    cfgs = [SolverConfig(restarts=12, seed=77, workers=w) for w in (1, 3, 8)]
    runs = [estimate_curvature(make_cycle(5), 0, 3.0, INF, c) for c in cfgs]
    for est in runs[1:]:
        assert est.value == runs[0].value
        assert np.array_equal(est.witness, runs[0].witness)
        assert est.best_per_restart == runs[0].best_per_restart


def test_seed_changes_restarts():
    a = estimate_curvature(make_cycle(5), 0, 3.0, INF, SolverConfig(restarts=4, seed=1))
    b = estimate_curvature(make_cycle(5), 0, 3.0, INF, SolverConfig(restarts=4, seed=2))
    assert a.best_per_restart != b.best_per_restart


def test_profile_monotone_in_dimension():
    ms = [2.0, 4.0, 8.0, INF]
    prof = curvature_profile(make_star(3), "leaf1", 2.0, ms, FAST)
    vals = [e.value for e in prof]
    assert [e.m for e in prof] == ms
    for lo, hi in zip(vals, vals[1:]):
        assert lo <= hi + 2 * FAST.value_tolerance
    assert vals[-1] == estimate_curvature(make_star(3), "leaf1", 2.0, INF, FAST).value


def test_profile_duplicates_agree():
    a, b = curvature_profile(make_cycle(4), 0, 3.0, [5.0, 5.0], FAST)
    assert abs(a.value - b.value) <= 2 * FAST.value_tolerance


# -- objective gradient ------------------------------------------------------------------------------------------------


@pytest.mark.parametrize("p", [3.0, 4.0, 2.5])
@pytest.mark.parametrize("m", [INF, 3.0])
@pytest.mark.parametrize("g, x", [(make_path(5), 2), (make_cycle(4), 0), (make_star(3), "leaf1")], ids=["P5", "C4", "star3"])
def test_objective_matches_operators_and_fd(p, m, g, x, rng):
    obj = BallObjective(extract_ball2_inc(g, x), p, m)
    for _ in range(10):
        z = rng.normal(size=obj.n - 1)
        if obj.min_abs_diff(z) < 0.05:
            continue
        ball = extract_ball2_inc(g, x)
        assert obj.value(z) == pytest.approx(ops.cd_ratio(ball.graph, obj.full(z), 0, p, m), rel=1e-12)
        _, grad = obj.value_grad(z)
        h = 1e-6
        fd = np.array([(obj.value(z + h * e) - obj.value(z - h * e)) / (2 * h) for e in np.eye(len(z))])
        assert np.linalg.norm(grad - fd) <= 1e-4 * max(np.linalg.norm(fd), 1e-8)


# -- brute-force oracle -----------------------------------------------------------------------------------------


@pytest.mark.parametrize(
    "g, x, p, want",
    [(make_complete(2), 0, 2.0, 2.0), (make_path(3), 0, 3.0, 5 / 12), (make_star(4), "leaf1", 2.0, 0.5)],
    ids=["K2", "P3 leaf", "star4 leaf"],
)
def test_oracle_values(g, x, p, want):
    assert brute_force_curvature(g, x, p, grid_resolution=11) == pytest.approx(want, abs=5e-2)


def test_oracle_refuses_large_balls():
    with pytest.raises(BallTooLargeError):
        brute_force_curvature(make_star(7), "c", 2.0)


@pytest.mark.parametrize("g, x", [(make_path(4), 1), (make_cycle(3), 0), (make_star(2), "c")], ids=["P4", "C3", "star2 hub"])
def test_oracle_agrees_with_solver(g, x):
    for p in (2.0, 3.0):
        a = estimate_curvature(g, x, p, INF, FAST).value
        b = brute_force_curvature(g, x, p, grid_resolution=11)
        assert abs(a - b) <= 5e-2
