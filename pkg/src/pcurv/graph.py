"""Weighted graphs, standard families, incomplete 2-balls and Cartesian products.

Graphs are immutable once built.  Vertices carry a string label at the I/O
boundary and a dense integer index everywhere else; every function in the
package accepts either form wherever a vertex is expected.
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "GraphError",
    "UnknownVertexError",
    "MissingValueError",
    "WeightedGraph",
    "ProductVertex",
    "ProductGraph",
    "LocalBall",
    "make_path",
    "make_cycle",
    "make_star",
    "make_complete",
    "make_hypercube",
    "cartesian_product",
    "extract_ball2_inc",
    "parse_graph",
    "serialize_graph",
    "load_graph",
    "save_graph",
    "canonical_form",
]


class GraphError(ValueError):
    """Invalid graph data (bad weights, measures, duplicate edges, ...)."""


class UnknownVertexError(GraphError, KeyError):
    pass


class MissingValueError(GraphError, KeyError):
    """A vertex function lacks a value the evaluation needs."""


class WeightedGraph:
    """Undirected weighted graph ``G = (V, w, mu)``.

    Parameters
    ----------
    labels : sequence of str
        Vertex labels, unique.  Position in the sequence is the dense index.
    edges : iterable of (u, v) or (u, v, w)
        Each undirected edge once; endpoints are labels or indices, ``w``
        defaults to 1 and must be positive.
    mu : sequence of float or mapping label -> float, optional
        Vertex measures, default 1, must be positive.

    Neighbour lists keep edge insertion order.  Evaluations sum over them in
    that order, which is what makes restriction to a :class:`LocalBall`
    reproduce values bit for bit.
    """

    __slots__ = ("_labels", "_index", "_mu", "_adj", "_w")

    def __init__(self, labels: Sequence[str], edges: Iterable = (), mu=None):
        labels = tuple(str(s) for s in labels)
        index = {s: i for i, s in enumerate(labels)}
        if len(index) != len(labels):
            raise GraphError("duplicate vertex label")
        n = len(labels)

        if mu is None:
            mu_arr = np.ones(n)
        elif isinstance(mu, Mapping):
            mu_arr = np.ones(n)
            for key, val in mu.items():
                mu_arr[self._lookup(index, n, key)] = val
        else:
            mu_arr = np.array(mu, dtype=float)
            if mu_arr.shape != (n,):
                raise GraphError(f"expected {n} measures, got shape {mu_arr.shape}")
        if not np.all(np.isfinite(mu_arr)) or np.any(mu_arr <= 0):
            raise GraphError("vertex measures must be positive and finite")

        adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        wmap: dict[tuple[int, int], float] = {}
        for e in edges:
            if len(e) == 2:
                (u, v), w = e, 1.0
            elif len(e) == 3:
                u, v, w = e
            else:
                raise GraphError(f"malformed edge {e!r}")
            i, j = self._lookup(index, n, u), self._lookup(index, n, v)
            w = float(w)
            if i == j:
                raise GraphError(f"self-loop at {labels[i]!r}")
            if not np.isfinite(w) or w <= 0:
                raise GraphError(f"edge weight must be positive, got {w} on ({labels[i]}, {labels[j]})")
            if (i, j) in wmap:
                raise GraphError(f"duplicate edge ({labels[i]}, {labels[j]})")
            wmap[i, j] = wmap[j, i] = w
            adj[i].append((j, w))
            adj[j].append((i, w))

        self._init(labels, index, mu_arr, tuple(tuple(a) for a in adj), wmap)

    def _init(self, labels, index, mu_arr, adj, wmap):
        mu_arr = np.array(mu_arr, dtype=float)
        mu_arr.setflags(write=False)
        object.__setattr__(self, "_labels", labels)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_mu", mu_arr)
        object.__setattr__(self, "_adj", adj)
        object.__setattr__(self, "_w", wmap)

    @classmethod
    def _from_adjacency(cls, labels, mu, adj):
        # adjacency must already be symmetric; used for subgraphs that keep
        # the parent's neighbour order
        g = cls.__new__(cls)
        labels = tuple(labels)
        wmap = {(i, j): w for i, nbrs in enumerate(adj) for j, w in nbrs}
        g._init(labels, {s: i for i, s in enumerate(labels)}, mu, tuple(tuple(a) for a in adj), wmap)
        return g

    def __setattr__(self, name, value):
        raise AttributeError("WeightedGraph is immutable")

    @staticmethod
    def _lookup(index, n, v) -> int:
        if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
            if 0 <= v < n:
                return int(v)
            raise UnknownVertexError(v)
        try:
            return index[str(v)]
        except KeyError:
            raise UnknownVertexError(v) from None

    # -- basic queries -----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self._labels)

    def __len__(self) -> int:
        return len(self._labels)

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def mu(self) -> np.ndarray:
        return self._mu

    @property
    def adjacency(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        return self._adj

    def index(self, v) -> int:
        """Dense index of ``v`` (a label or an index)."""
        return self._lookup(self._index, len(self._labels), v)

    def label(self, v) -> str:
        return self._labels[self.index(v)]

    def neighbors(self, v) -> tuple[tuple[int, float], ...]:
        return self._adj[self.index(v)]

    def degree(self, v) -> int:
        return len(self._adj[self.index(v)])

    def weight(self, u, v) -> float:
        return self._w.get((self.index(u), self.index(v)), 0.0)

    def edges(self) -> list[tuple[int, int, float]]:
        """Each undirected edge once as ``(i, j, w)`` with ``i < j``."""
        return sorted((i, j, w) for (i, j), w in self._w.items() if i < j)

    @property
    def num_edges(self) -> int:
        return len(self._w) // 2

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def is_unit(self) -> bool:
        """True when every edge weight and every measure equals 1."""
        return bool(np.all(self._mu == 1.0)) and all(w == 1.0 for w in self._w.values())

    def function(self, values) -> np.ndarray:
        """Vertex function as a float array indexed by dense index.

        ``values`` may be a mapping from labels (or indices) to numbers, in
        which case absent vertices hold NaN and count as undefined, or an
        array whose leading axis runs over vertices (extra axes batch).
        """
        if isinstance(values, Mapping):
            out = np.full(self.n, np.nan)
            for key, val in values.items():
                out[self.index(key)] = val
            return out
        out = np.asarray(values, dtype=float)
        if out.ndim == 0 or out.shape[0] != self.n:
            raise GraphError(f"vertex function needs leading axis of length {self.n}, got shape {out.shape}")
        return out

    def __eq__(self, other) -> bool:
        """Equality up to vertex order: same labels, measures and weights."""
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        if set(self._labels) != set(other._labels):
            return False
        for s in self._labels:
            if self._mu[self._index[s]] != other._mu[other._index[s]]:
                return False
        mine = {(frozenset((self._labels[i], self._labels[j])), w) for (i, j), w in self._w.items()}
        theirs = {(frozenset((other._labels[i], other._labels[j])), w) for (i, j), w in other._w.items()}
        return mine == theirs

    __hash__ = None

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, edges={self.num_edges})"


# -- families ------------------------------------------------------------------


def make_path(n: int) -> WeightedGraph:
    """Path ``P_n`` on vertices ``0 .. n-1`` with unit weights and measures."""
    if n < 2:
        raise GraphError(f"path needs at least 2 vertices, got {n}")
    return WeightedGraph([str(i) for i in range(n)], [(i, i + 1) for i in range(n - 1)])


def make_cycle(d: int) -> WeightedGraph:
    if d < 3:
        raise GraphError(f"cycle needs at least 3 vertices, got {d}")
    return WeightedGraph([str(i) for i in range(d)], [(i, (i + 1) % d) for i in range(d)])


def make_star(center_degree: int) -> WeightedGraph:
    """Star with hub ``"c"`` joined to leaves ``"leaf1" .. "leafD"``."""
    if center_degree < 1:
        raise GraphError(f"star needs center degree >= 1, got {center_degree}")
    leaves = [f"leaf{i}" for i in range(1, center_degree + 1)]
    return WeightedGraph(["c", *leaves], [("c", s) for s in leaves])


def make_complete(n: int) -> WeightedGraph:
    if n < 2:
        raise GraphError(f"complete graph needs at least 2 vertices, got {n}")
    return WeightedGraph([str(i) for i in range(n)], itertools.combinations(range(n), 2))


def make_hypercube(dim: int) -> WeightedGraph:
    """``Q_dim`` as an iterated product of ``K_2``, labels like ``"0|1|1"``."""
    if dim < 1:
        raise GraphError(f"hypercube dimension must be >= 1, got {dim}")
    g = make_complete(2)
    for _ in range(dim - 1):
        g = cartesian_product(g, make_complete(2))
    return g


# -- products ------------------------------------------------------------------


class ProductVertex(NamedTuple):
    left: int
    right: int


class ProductGraph(WeightedGraph):
    """``G1 x G2`` with vertex ``(a, b)`` at dense index ``a * n2 + b``."""

    __slots__ = ("left", "right")

    def pair(self, v) -> ProductVertex:
        i = self.index(v)
        return ProductVertex(*divmod(i, self.right.n))

    def vertex(self, a, b) -> int:
        return self.left.index(a) * self.right.n + self.right.index(b)


def cartesian_product(g1: WeightedGraph, g2: WeightedGraph) -> ProductGraph:
    """Cartesian product; a move changes one coordinate along a factor edge.

    Weights are inherited from the factor the move runs in and measures
    multiply, ``mu(a, b) = mu1(a) * mu2(b)``.
    """
    n2 = g2.n
    labels = [f"{a}|{b}" for a in g1.labels for b in g2.labels]
    mu = np.outer(g1.mu, g2.mu).ravel()
    edges = []
    for a in range(g1.n):
        for b in range(n2):
            here = a * n2 + b
            # neighbours in factor order: first coordinate moves, then second
            for a2, w in g1.adjacency[a]:
                if a2 > a:
                    edges.append((here, a2 * n2 + b, w))
            for b2, w in g2.adjacency[b]:
                if b2 > b:
                    edges.append((here, a * n2 + b2, w))
    g = ProductGraph.__new__(ProductGraph)
    WeightedGraph.__init__(g, labels, edges, mu)
    object.__setattr__(g, "left", g1)
    object.__setattr__(g, "right", g2)
    return g


# -- local structure -----------------------------------------------------------


@dataclass(frozen=True)
class LocalBall:
    """Incomplete 2-ball around ``center``.

    ``graph`` is the ball as a graph of its own, vertices ordered center,
    1-sphere, 2-sphere, so the center is index 0 there.  It holds every edge
    of the parent incident to the center or a 1-sphere vertex and nothing
    between two 2-sphere vertices.  ``s1``/``s2`` hold parent indices.
    """

    parent: WeightedGraph
    center: int
    s1: tuple[int, ...]
    s2: tuple[int, ...]
    graph: WeightedGraph

    @property
    def vertices(self) -> tuple[int, ...]:
        return (self.center, *self.s1, *self.s2)

    @property
    def n_free(self) -> int:
        """Number of ball values left once the center is pinned."""
        return len(self.s1) + len(self.s2)

    def edges(self) -> list[tuple[int, int, float]]:
        """Ball edges in parent indices."""
        verts = self.vertices
        return [(verts[i], verts[j], w) for i, j, w in self.graph.edges()]

    def restrict(self, f) -> np.ndarray:
        """Restrict a vertex function on the parent to ball order."""
        f = self.parent.function(f)
        return f[list(self.vertices)]

    def extend(self, values, fill: float = 0.0) -> np.ndarray:
        """Inverse of :meth:`restrict`: a parent function equal to ``fill`` off the ball."""
        values = np.asarray(values, dtype=float)
        out = np.full((self.parent.n, *values.shape[1:]), fill)
        out[list(self.vertices)] = values
        return out


def extract_ball2_inc(g: WeightedGraph, x) -> LocalBall:
    x = g.index(x)
    s1 = sorted(j for j, _ in g.adjacency[x])
    s1_set = set(s1)
    s2 = sorted({k for j in s1 for k, _ in g.adjacency[j] if k != x and k not in s1_set})
    order = [x, *s1, *s2]
    new = {v: i for i, v in enumerate(order)}
    s2_set = set(s2)
    adj = []
    for v in order:
        keep = []
        for u, w in g.adjacency[v]:
            if u in new and not (v in s2_set and u in s2_set):
                keep.append((new[u], w))
        adj.append(keep)
    sub = WeightedGraph._from_adjacency([g.labels[v] for v in order], g.mu[order], adj)
    return LocalBall(g, x, tuple(s1), tuple(s2), sub)


# -- I/O -----------------------------------------------------------------------


def parse_graph(text: str) -> WeightedGraph:
    """Read the JSON graph document (``vertices`` and ``edges`` arrays)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"malformed graph document: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("vertices"), list):
        raise GraphError("graph document needs a 'vertices' array")
    edges_doc = doc.get("edges", [])
    if not isinstance(edges_doc, list):
        raise GraphError("'edges' must be an array")

    labels, mu = [], []
    for item in doc["vertices"]:
        if isinstance(item, str):
            item = {"id": item}
        if not isinstance(item, dict) or "id" not in item:
            raise GraphError(f"vertex entry needs an 'id': {item!r}")
        labels.append(str(item["id"]))
        mu.append(_number(item.get("mu", 1.0), "mu"))

    edges = []
    for item in edges_doc:
        if not isinstance(item, dict) or "u" not in item or "v" not in item:
            raise GraphError(f"edge entry needs 'u' and 'v': {item!r}")
        u, v = str(item["u"]), str(item["v"])
        edges.append((u, v, _number(item.get("w", 1.0), "w")))
    for u, v, _ in edges:
        for s in (u, v):
            if s not in labels:
                raise GraphError(f"edge refers to unknown vertex {s!r}")
    return WeightedGraph(labels, edges, mu)


def _number(val, name) -> float:
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise GraphError(f"{name} must be a number, got {val!r}")
    return float(val)


def serialize_graph(g: WeightedGraph) -> str:
    verts = []
    for s, m in zip(g.labels, g.mu):
        verts.append({"id": s} if m == 1.0 else {"id": s, "mu": float(m)})
    edges = []
    for i, j, w in g.edges():
        e = {"u": g.labels[i], "v": g.labels[j]}
        if w != 1.0:
            e["w"] = w
        edges.append(e)
    return json.dumps({"vertices": verts, "edges": edges}, indent=1)


def load_graph(path) -> WeightedGraph:
    with open(path) as fh:
        return parse_graph(fh.read())


def save_graph(g: WeightedGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_graph(g) + "\n")


def canonical_form(g: WeightedGraph) -> tuple:
    """Label-free canonical form by brute force over permutations (tiny graphs only)."""
    n = g.n
    if n > 8:
        raise GraphError("canonical_form is brute force; use it on at most 8 vertices")
    best = None
    for perm in itertools.permutations(range(n)):
        pos = {v: i for i, v in enumerate(perm)}
        key = (
            tuple(float(g.mu[v]) for v in perm),
            tuple(sorted((min(pos[i], pos[j]), max(pos[i], pos[j]), w) for i, j, w in g.edges())),
        )
        if best is None or key < best:
            best = key
    return best
