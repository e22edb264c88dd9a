import numpy as np
import pytest
from hypothesis import given, strategies as st

from pcurv import closed_forms as cf
from pcurv import operators as ops
from pcurv.graph import make_cycle, make_path, make_star

P_SMOOTH = (2.0, 2.5, 3.0, 4.0)
diffs = st.floats(-5, 5, allow_nan=False)


# -- expansions against the operators ---------------------------------------------


@pytest.mark.parametrize("p", P_SMOOTH)
def test_path_middle(p, rng):
    A, B, C, D = rng.uniform(-5, 5, (4, 1000))
    F = np.stack([A + C, A, np.zeros(1000), B, B + D])
    g = make_path(5)
    np.testing.assert_allclose(ops.gamma2_p(g, F, 2, p), cf.path_middle_gamma2(A, B, C, D, p), rtol=1e-10)
    np.testing.assert_allclose(ops.delta_p(g, F, 2, p), cf.path_middle_delta(A, B, p), rtol=1e-12)
    np.testing.assert_allclose(ops.gamma_p(g, F, 2, p), cf.path_middle_gamma(A, B, p), rtol=1e-12)


@pytest.mark.parametrize("p", P_SMOOTH)
@given(A=diffs, B=diffs)
def test_p3_middle(p, A, B):
    got = ops.gamma2_p(make_path(3), np.array([A, 0.0, B]), 1, p)
    assert got == pytest.approx(cf.p3_middle_gamma2(A, B, p), rel=1e-10, abs=1e-10)
    assert cf.p3_middle_gamma2(A, B, p) == pytest.approx(cf.path_middle_gamma2(A, B, 0.0, 0.0, p), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("p", P_SMOOTH)
@given(A=diffs, C=diffs)
def test_path_leaf(p, A, C):
    got = ops.gamma2_p(make_path(4), np.array([0.0, A, A + C, 9.0]), 0, p)
    assert got == pytest.approx(cf.path_leaf_gamma2(A, C, p), rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("p", P_SMOOTH)
@given(A=diffs, B=diffs, C=diffs)
def test_triangle(p, A, B, C):
    # C = f(z) - f(v) is fixed by A and B on a triangle
    C = B - A
    got = ops.gamma2_p(make_cycle(3), np.array([0.0, A, B]), 0, p)
    assert got == pytest.approx(cf.cycle3_gamma2(A, B, C, p), rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("p", P_SMOOTH)
@given(A=diffs, B=diffs, z=diffs)
def test_four_cycle(p, A, B, z):
    # cycle order 0-1-2-3: v1 = 1, opposite z = 2, v2 = 3
    got = ops.gamma2_p(make_cycle(4), np.array([0.0, A, z, B]), 0, p)
    assert got == pytest.approx(cf.cycle4_gamma2(A, B, z - A, z - B, p), rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("p", P_SMOOTH)
@pytest.mark.parametrize("D", [1, 2, 4])
def test_star_leaf_expansion(p, D, rng):
    g = make_star(D)
    for _ in range(50):
        f = rng.uniform(-3, 3, g.n)
        A = f[0] - f[1]
        Bs = f[2:] - f[0]
        assert ops.gamma2_p(g, f, "leaf1", p) == pytest.approx(cf.star_leaf_gamma2(A, Bs, p), rel=1e-10, abs=1e-10)


# -- p = 2 oracle ---------------------------------------------------------------------------


def test_classical_gamma2_known_values():
    # f = (1, 0, 1) on P_3: A = B = 1 at the middle
    assert cf.classical_gamma2(make_path(3), [1.0, 0.0, 1.0])[1] == pytest.approx(2.5)
    assert cf.classical_gamma2(make_path(3), [0.0, 1.0, 2.0])[0] == pytest.approx(0.75)


# -- curvature values ------------------------------------------------------------------------------


@pytest.mark.parametrize(
    "D, p, want",
    [(2, 2.0, 1.5), (6, 2.0, -0.5), (1, 3.0, 0.5), (8, 3.0, -1 / 12), (7, 3.0, 0.0), (5, 2.0, 0.0)],
)
def test_star_leaf_values(D, p, want):
    assert cf.star_leaf_curvature(D, p) == pytest.approx(want, abs=1e-15)


@pytest.mark.parametrize("D", range(1, 9))
def test_star_leaf_at_p2(D):
    assert cf.star_leaf_curvature(D, 2.0) == pytest.approx(2 - (D - 1) / 2, abs=1e-15)


@pytest.mark.parametrize("p", [2.0, 2.5, 3.0, 3.5, 4.0])
def test_star_zero_crossing_exact(p):
    D = cf.negativity_threshold(p)
    assert D == 2 * p + 1
    assert cf.star_leaf_curvature(int(D), p) == 0.0
    assert cf.star_leaf_curvature(int(D) - 1, p) > 0 > cf.star_leaf_curvature(int(D) + 1, p)


@pytest.mark.parametrize("p", P_SMOOTH)
def test_star_leaf_linear_in_degree(p):
    step = 4 / (p - 1) ** 2 * ((p - 1) / 2) ** (2 / p) / (2 * p * (p - 1))
    for D in range(1, 12):
        assert cf.star_leaf_curvature(D, p) - cf.star_leaf_curvature(D + 1, p) == pytest.approx(step, rel=1e-12)


@pytest.mark.parametrize("p", P_SMOOTH)
def test_star2_leaf_is_path_leaf(p):
    assert cf.star_leaf_curvature(2, p) == pytest.approx(cf.path_leaf_curvature(p), rel=1e-12)


@pytest.mark.parametrize("p, want", [(2.0, 1.5), (3.0, 5 / 12)])
def test_path_leaf_values(p, want):
    assert cf.path_leaf_curvature(p) == pytest.approx(want, rel=1e-14)


@given(st.floats(1.01, 6.0))
def test_path_leaf_positive(p):
    assert cf.path_leaf_curvature(p) > 0


def test_star_rejects_empty_hub():
    with pytest.raises(ValueError):
        cf.star_leaf_curvature(0, 2.0)


# -- auxiliary functions --------------------------------------------------------------------------------


GRID = np.arange(0.0, 10.0 + 5e-5, 1e-4)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
def test_aux_g_min_against_grid(p):
    y, val = cf.aux_g_min(p)
    vals = cf.aux_g(GRID, p)
    assert GRID[np.argmin(vals)] == pytest.approx(y, abs=1e-4)
    assert vals.min() == pytest.approx(val, abs=1e-6)
    assert val == pytest.approx(cf.aux_g(y, p))


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
def test_aux_h_min_against_grid(p, x):
    z, val = cf.aux_h_min(x, p)
    vals = cf.aux_h(GRID, x, p)
    assert GRID[np.argmin(vals)] == pytest.approx(z, abs=1e-4)
    assert vals.min() == pytest.approx(val, abs=1e-6)


def test_aux_examples():
    assert cf.aux_g(0.0, 2.5) == 0
    assert cf.aux_g(2.0, 2.0) == pytest.approx(0.0)
    assert cf.aux_g_min(3.0) == pytest.approx((1.0, -1 / 12))
    assert cf.aux_h_min(1.0, 3.0) == pytest.approx((1.0, -1 / 12))
    assert cf.aux_h_min(2.0, 2.0) == pytest.approx((2.0, -1.0))
    np.testing.assert_array_equal(cf.aux_h(np.array([0.0, 1.0, 5.0]), 0.0, 3.0), 0.0)


def test_aux_domain():
    with pytest.raises(ValueError):
        cf.aux_g(-1.0, 2.0)
    with pytest.raises(ValueError):
        cf.aux_h(1.0, -1.0, 2.0)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_aux_h_vanishes_at_zero_x(p):
    np.testing.assert_array_equal(cf.aux_h(np.array([0.0, 0.3, 4.0]), 0.0, p), 0.0)
