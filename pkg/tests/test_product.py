import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from pcurv import product as pr
from pcurv.graph import GraphError, MissingValueError, WeightedGraph, cartesian_product, make_complete, make_cycle, make_path, make_star

K2, P2, P3 = make_complete(2), make_path(2), make_path(3)
FACTORS = {
    "K2xK2": (K2, K2),
    "P2xP3": (P2, P3),
    "P3xC4": (P3, make_cycle(4)),
    "star3xC3": (make_star(3), make_cycle(3)),
    "P3xstar2": (P3, make_star(2)),
}
P_VALUES = (1.5, 2.0, 2.5, 3.0, 4.0)


def _fn(g1, g2):
    return arrays(np.float64, (g1.n, g2.n), elements=st.floats(-2, 2))


# -- slices ------------------------------------------------------------------------------


def test_slices_of_separable_function(rng):
    u, v = rng.normal(size=3), rng.normal(size=4)
    g2 = make_cycle(4)
    F = u[:, None] + v[None, :]
    np.testing.assert_allclose(pr.slice_row(P3, g2, F, 1), v + u[1])
    np.testing.assert_allclose(pr.slice_col(P3, g2, F, 2), u + v[2])


def test_constant_slices():
    F = np.full((3, 2), 4.0)
    assert np.all(pr.slice_row(P3, P2, F, 0) == 4.0)
    assert np.all(pr.slice_col(P3, P2, F, 1) == 4.0)


@given(_fn(P3, P2), st.integers(0, 2), st.integers(0, 1))
def test_slice_consistency(F, x, y):
    assert pr.slice_row(P3, P2, F, x)[y] == F[x, y] == pr.slice_col(P3, P2, F, y)[x]


def test_function_input_forms():
    F = np.arange(6.0).reshape(3, 2)
    flat = pr.as_product_function(P3, P2, F.ravel())
    keyed = pr.as_product_function(P3, P2, {f"{a}|{b}": F[a, b] for a in range(3) for b in range(2)})
    pairs = pr.as_product_function(P3, P2, {(str(a), str(b)): F[a, b] for a in range(3) for b in range(2)})
    for G in (flat, keyed, pairs):
        np.testing.assert_array_equal(G, F)
    # flat order matches the product graph's vertex order
    pg = cartesian_product(P3, P2)
    assert pg.labels[pg.vertex(2, 1)] == "2|1"
    assert F.ravel()[pg.vertex(2, 1)] == F[2, 1]
    with pytest.raises(GraphError):
        pr.as_product_function(P3, P2, np.zeros(5))
    with pytest.raises(GraphError):
        pr.as_product_function(P3, P2, {"nope": 1.0})


# -- additivity -------------------------------------------------------------------------------


@pytest.mark.parametrize("name", list(FACTORS))
@pytest.mark.parametrize("p", P_VALUES)
def test_additivity_random(name, p, rng):
    g1, g2 = FACTORS[name]
    pg = cartesian_product(g1, g2)
    F = rng.uniform(-1, 1, (g1.n, g2.n, 1000))
    for x in range(g1.n):
        for y in range(g2.n):
            rl, rg = pr.check_additivity(g1, g2, F, x, y, p, product=pg)
            assert rl <= 1e-12 and rg <= 1e-12


def test_additivity_weighted_factors(rng):
    g1 = WeightedGraph(["a", "b", "c"], [("a", "b", 2.0), ("b", "c", 0.5)], [1.0, 1.0, 1.0])
    g2 = WeightedGraph(["u", "v"], [("u", "v", 3.0)], [1.0, 1.0])
    F = rng.normal(size=(3, 2, 200))
    for p in P_VALUES:
        rl, rg = pr.check_additivity(g1, g2, F, "b", "u", p)
        assert rl <= 1e-12 and rg <= 1e-12


@pytest.mark.parametrize("F", [np.full((2, 3), 1.5), np.add.outer([0.0, 1.0], [2.0, -1.0, 0.5])], ids=["constant", "separable"])
def test_additivity_trivial(F):
    assert pr.check_additivity(P2, P3, F, 0, 1, 2.5) == (0.0, 0.0)


# -- decomposition gap ------------------------------------------------------------------------------------


@given(_fn(P3, P3), st.integers(0, 2), st.integers(0, 2))
def test_constraint_identity(F, x, y):
    A, B, C, D = pr.pair_differences(P3, P3, F, x, y)
    np.testing.assert_allclose(C - B[None, :], D - A[:, None], atol=1e-15)


@pytest.mark.parametrize("name", list(FACTORS))
@pytest.mark.parametrize("p", P_VALUES)
def test_two_routes_agree(name, p, rng):
    g1, g2 = FACTORS[name]
    pg = cartesian_product(g1, g2)
    for _ in range(30):
        F = rng.uniform(-2, 2, (g1.n, g2.n))
        x, y = rng.integers(g1.n), rng.integers(g2.n)
        gb = pr.gamma2_decomposition_gap(g1, g2, F, x, y, p, product=pg)
        assert gb.gap == pytest.approx(gb.direct, rel=1e-10, abs=1e-10)
        assert gb.gap == pytest.approx(sum(gb.per_pair_terms.values()), rel=1e-12, abs=1e-12)
        assert gb.direct == pytest.approx(gb.full - gb.row - gb.col)


@given(_fn(P2, P3))
def test_quarter_sum_at_p2(F):
    gb = pr.gamma2_decomposition_gap(P2, P3, F, 0, 1, 2.0)
    q = pr.quarter_sum(*pr.pair_differences(P2, P3, F, 0, 1))
    assert abs(gb.direct - q) <= 1e-12 * max(1.0, q)
    assert gb.direct >= -1e-12


def test_per_pair_term_depends_only_on_local_differences():
    F = np.zeros((3, 3))
    F[0, 1], F[1, 0], F[1, 1] = 1.0, 0.3, -0.7
    G = F.copy()
    G[2, 2] = 5.0  # moves other pairs only
    a = pr.gamma2_decomposition_gap(P3, P3, F, 1, 1, 3.0).per_pair_terms
    b = pr.gamma2_decomposition_gap(P3, P3, G, 1, 1, 3.0).per_pair_terms
    assert a[(0, 0)] == b[(0, 0)]
    assert a[(2, 2)] != b[(2, 2)]


def test_constant_gap_is_zero():
    gb = pr.gamma2_decomposition_gap(K2, K2, np.ones((2, 2)), 0, 0, 3.0)
    assert gb.gap == 0.0


def test_weighted_factors_use_direct_route(rng):
    g1 = WeightedGraph(["a", "b"], [("a", "b", 2.0)])
    gb = pr.gamma2_decomposition_gap(g1, P3, rng.normal(size=(2, 3)), 0, 1, 3.0)
    assert gb.per_pair_terms is None and gb.gap == gb.direct


def test_gap_requires_ball_values():
    F = np.full((3, 3), np.nan)
    F[1, 1] = 0.0
    with pytest.raises(MissingValueError):
        pr.gamma2_decomposition_gap(P3, P3, F, 1, 1, 3.0)


def test_gap_unaffected_outside_ball(rng):
    g1, g2 = make_path(5), make_path(5)
    F = rng.normal(size=(5, 5))
    G = F.copy()
    G[4, 4] += 10.0  # distance 4 from (2, 2)
    a = pr.gamma2_decomposition_gap(g1, g2, F, 1, 1, 2.5)
    b = pr.gamma2_decomposition_gap(g1, g2, G, 1, 1, 2.5)
    assert a.direct == b.direct


# -- counterexample -------------------------------------------------------------------------------------------


def test_witness_values_on_k2xk2():
    F = pr.counterexample_function(K2, K2, 0, 0)
    assert F.tolist() == [[0.0, 0.0], [1.0, 2.0]]
    A, B, C, D = pr.pair_differences(K2, K2, F, 0, 0)
    assert (A.tolist(), B.tolist(), C.tolist(), D.tolist()) == ([1.0], [0.0], [[1.0]], [[2.0]])


@pytest.mark.parametrize(
    "g1, g2, x, y",
    [
        (K2, K2, 0, 0),
        (P3, P3, 1, 1),
        (make_star(2), make_cycle(4), "c", 0),
        (make_star(2), make_star(2), "c", "c"),
        (P3, make_cycle(4), 1, 2),
        (make_star(3), P3, "leaf2", 0),
    ],
)
@pytest.mark.parametrize("p", [2.5, 3.0, 4.0, 6.0])
def test_witness_gap(g1, g2, x, y, p):
    F = pr.counterexample_function(g1, g2, x, y)
    gb = pr.gamma2_decomposition_gap(g1, g2, F, x, y, p)
    want = -g1.degree(x) * g2.degree(y) / (2 * p * (p - 1))
    assert abs(gb.direct - want) <= 1e-12
    assert all(t == pytest.approx(-1 / (2 * p * (p - 1)), abs=1e-14) for t in gb.per_pair_terms.values())
    assert pr.verify_product_superadditivity_failure(g1, g2, x, y, p)


@pytest.mark.parametrize("g1, g2, x, y, want", [(K2, K2, 0, 0, 0.5), (P3, P3, 1, 1, 2.0), (make_star(2), make_star(2), "c", "c", 2.0)])
def test_witness_gap_at_p2(g1, g2, x, y, want):
    F = pr.counterexample_function(g1, g2, x, y)
    assert pr.gamma2_decomposition_gap(g1, g2, F, x, y, 2.0).gap == pytest.approx(want, abs=1e-12)


def test_known_witness_gaps():
    F = pr.counterexample_function(K2, K2, 0, 0)
    assert pr.gamma2_decomposition_gap(K2, K2, F, 0, 0, 3.0).gap == pytest.approx(-1 / 12, abs=1e-12)
    s2 = make_star(2)
    F = pr.counterexample_function(s2, s2, "c", "c")
    assert pr.gamma2_decomposition_gap(s2, s2, F, "c", "c", 3.0).gap == pytest.approx(-1 / 3, abs=1e-12)
    c4 = make_cycle(4)
    F = pr.counterexample_function(P3, c4, 1, 0)
    assert pr.gamma2_decomposition_gap(P3, c4, F, 1, 0, 4.0).gap == pytest.approx(-1 / 6, abs=1e-12)


def test_counterexample_errors():
    lonely = WeightedGraph(["a", "b"])
    with pytest.raises(GraphError):
        pr.counterexample_function(lonely, K2, "a", 0)
    with pytest.raises(ValueError):
        pr.verify_product_superadditivity_failure(K2, K2, 0, 0, 2.0)
