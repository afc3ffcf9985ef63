"""Noncommuting (NC) graphs of alternating quasigroups and small-graph utilities.

Vertices are alt_n-orbits of noncommuting tuples, stored by their canonical
representatives in lexicographic order.  Two orbits are adjacent when their
entry sets coincide, or when they have the same value and share ``n - 1``
entries.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .complex import INPUT, OUTPUT, simplicize
from .qcore import OperationTable, canonical, nct

__all__ = [
    "Graph",
    "GraphReport",
    "RetractData",
    "EmbeddingError",
    "nc_graph",
    "johnson_embedding",
    "graph_report",
    "hypercube_dimension",
    "retract_embedding",
    "retract_point",
    "to_dot",
    "to_json",
]


class EmbeddingError(RuntimeError):
    """An embedding check failed; this contradicts the NC-graph construction."""


@dataclass(frozen=True)
class Graph:
    vertex_labels: tuple
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        n = len(self.vertex_labels)
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < v < n):
                raise ValueError(f"edge {(u, v)} must be an ordered pair of vertex indices below {n}")

    @classmethod
    def from_edges(cls, labels: Sequence, edges: Iterable[tuple[int, int]]) -> Graph:
        return cls(tuple(labels), frozenset((min(u, v), max(u, v)) for u, v in edges))

    def __len__(self):
        return len(self.vertex_labels)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.vertex_labels]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for row in adj:
            row.sort()
        return adj

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def subgraph(self, vertices: Sequence[int]) -> Graph:
        pos = {v: i for i, v in enumerate(vertices)}
        edges = [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos]
        return Graph.from_edges([self.vertex_labels[v] for v in vertices], edges)


def _orbit_reps(table: OperationTable) -> list[tuple[int, ...]]:
    return sorted({canonical(a) for a in nct(table)})


def nc_graph(table: OperationTable) -> Graph:
    """NC graph on canonical orbit representatives.

    Edges are found by bucketing: orbits with the same entry set, and orbits
    with the same value and a common ``(n-1)``-subset of entries.
    """
    reps = _orbit_reps(table)
    n = table.arity
    buckets: dict[tuple, list[int]] = {}
    for i, a in enumerate(reps):
        entries = frozenset(a)
        buckets.setdefault(("inputs", entries), []).append(i)
        y = table(*a)
        for sub in itertools.combinations(sorted(entries), n - 1):
            buckets.setdefault(("value", y, sub), []).append(i)
    edges = set()
    for members in buckets.values():
        for u, v in itertools.combinations(members, 2):
            edges.add((u, v))
    return Graph.from_edges(reps, edges)


def johnson_embedding(table: OperationTable) -> dict[tuple[int, ...], frozenset[int]]:
    """Map each NC vertex to its facet as an ``(n+1)``-subset of ``inp + out``.

    Inputs are numbered first, then outputs.  The induced-subgraph property
    (adjacent iff the subsets share exactly ``n`` points) is checked for every
    vertex pair against :func:`nc_graph`.
    """
    n = table.arity
    g = nc_graph(table)
    c = simplicize(table)
    index = {(v.tag, v.element): i for i, v in enumerate(c.vertices)}
    images = {}
    for a in g.vertex_labels:
        images[a] = frozenset([index[(INPUT, x)] for x in a] + [index[(OUTPUT, table(*a))]])
    reps = list(g.vertex_labels)
    if len(set(images.values())) != len(images):
        raise EmbeddingError("two NC vertices have the same facet")
    for i, j in itertools.combinations(range(len(reps)), 2):
        share = len(images[reps[i]] & images[reps[j]]) == n
        if share != g.has_edge(i, j):
            raise EmbeddingError(f"vertices {reps[i]} and {reps[j]}: adjacent={g.has_edge(i, j)}, share n points={share}")
    return images


def _components(adj: list[list[int]]) -> list[list[int]]:
    seen = [False] * len(adj)
    comps = []
    for s in range(len(adj)):
        if seen[s]:
            continue
        seen[s] = True
        comp, queue = [s], deque([s])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def _bipartite(adj: list[list[int]]) -> bool:
    color = [-1] * len(adj)
    for s in range(len(adj)):
        if color[s] >= 0:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if color[w] < 0:
                    color[w] = 1 - color[u]
                    queue.append(w)
                elif color[w] == color[u]:
                    return False
    return True


def _girth(adj: list[list[int]]) -> int | None:
    best = None
    for s in range(len(adj)):
        dist = {s: 0}
        parent = {s: -1}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if best is not None and 2 * dist[u] + 1 >= best:
                break
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    cycle = dist[u] + dist[w] + 1
                    if best is None or cycle < best:
                        best = cycle
    return best


def hypercube_dimension(adj: list[list[int]]) -> int | None:
    """Dimension d if the connected graph is the d-cube, else None.

    A vertex is labelled 0, its neighbours by unit vectors, and every further
    vertex by the union of the labels of its neighbours one step closer to the
    start.  The graph is a cube exactly when this labelling is a bijection onto
    ``{0,1}^d`` that turns adjacency into Hamming distance one.
    """
    count = len(adj)
    if count == 0:
        return None
    d = count.bit_length() - 1
    if 1 << d != count or any(len(row) != d for row in adj):
        return None
    dist = [-1] * count
    dist[0] = 0
    order = [0]
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                order.append(w)
                queue.append(w)
    if len(order) != count:
        return None
    label = [0] * count
    for k, w in enumerate(adj[0]):
        label[w] = 1 << k
    for u in order:
        if dist[u] < 2:
            continue
        for w in adj[u]:
            if dist[w] == dist[u] - 1:
                label[u] |= label[w]
    if len(set(label)) != count:
        return None
    for u in range(count):
        for w in adj[u]:
            x = label[u] ^ label[w]
            if x == 0 or x & (x - 1):
                return None
    return d


@dataclass(frozen=True)
class GraphReport:
    components: int
    component_sizes: tuple[int, ...]
    degrees: tuple[int, ...]
    regular: int | None
    bipartite: bool
    girth: int | None
    hypercube_dims: tuple[int | None, ...]

    @property
    def hypercube_dim(self) -> int | None:
        """Dimension when every component is a cube of one common dimension."""
        dims = set(self.hypercube_dims)
        if len(dims) == 1:
            return next(iter(dims))
        return None

    def to_json(self) -> dict:
        return {
            "components": self.components,
            "component_sizes": list(self.component_sizes),
            "degrees": list(self.degrees),
            "regular": self.regular,
            "bipartite": self.bipartite,
            "girth": self.girth,
            "hypercube_dims": list(self.hypercube_dims),
            "hypercube_dim": self.hypercube_dim,
        }


def graph_report(g: Graph) -> GraphReport:
    adj = g.adjacency()
    comps = _components(adj)
    degrees = tuple(len(row) for row in adj)
    dims = []
    for comp in comps:
        sub = g.subgraph(comp).adjacency()
        dims.append(hypercube_dimension(sub))
    return GraphReport(
        components=len(comps),
        component_sizes=tuple(len(c) for c in comps),
        degrees=degrees,
        regular=degrees[0] if degrees and len(set(degrees)) == 1 else None,
        bipartite=_bipartite(adj),
        girth=_girth(adj),
        hypercube_dims=tuple(dims),
    )


@dataclass(frozen=True)
class RetractData:
    """Barycentric coefficients of the NC graph inside the simplicization.

    Keys of each coefficient map are vertex indices of ``simplicize(table)``.
    """
    arity: int
    vertex_coefficients: dict[tuple[int, ...], dict[int, Fraction]]
    edge_coefficients: dict[tuple[tuple[int, ...], tuple[int, ...]], dict[int, Fraction]]


def retract_embedding(table: OperationTable) -> RetractData:
    n = table.arity
    g = nc_graph(table)
    images = johnson_embedding(table)
    reps = g.vertex_labels
    vertex_coeffs = {a: {v: Fraction(1, n + 1) for v in sorted(images[a])} for a in reps}
    edge_coeffs = {}
    for u, w in sorted(g.edges):
        shared = images[reps[u]] & images[reps[w]]
        if len(shared) != n:
            raise EmbeddingError(f"edge {reps[u]} - {reps[w]} shares {len(shared)} vertices, expected {n}")
        edge_coeffs[(reps[u], reps[w])] = {v: Fraction(1, n) for v in sorted(shared)}
    return RetractData(n, vertex_coeffs, edge_coeffs)


def retract_point(data: RetractData, edge: tuple[tuple[int, ...], tuple[int, ...]], gamma: Fraction) -> dict[int, Fraction]:
    """Image of ``gamma * a + (1 - gamma) * midpoint`` on the first half of ``edge``."""
    gamma = Fraction(gamma)
    if not 0 <= gamma <= 1:
        raise ValueError("gamma must lie in [0, 1]")
    a = edge[0]
    point: dict[int, Fraction] = {}
    for v, x in data.vertex_coefficients[a].items():
        point[v] = point.get(v, Fraction(0)) + gamma * x
    for v, x in data.edge_coefficients[edge].items():
        point[v] = point.get(v, Fraction(0)) + (1 - gamma) * x
    return {v: x for v, x in sorted(point.items()) if x}


def _vertex_name(table: OperationTable | None, a) -> str:
    if table is None or not isinstance(a, tuple):
        return str(a)
    return "(" + ",".join(table.label(x) for x in a) + ")"


def to_dot(g: Graph, table: OperationTable | None = None, name: str = "nc") -> str:
    lines = [f"graph {name} {{"]
    for i, a in enumerate(g.vertex_labels):
        text = _vertex_name(table, a).replace('"', '\\"')
        lines.append(f'  {i} [label="{text}"];')
    for u, v in sorted(g.edges):
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(g: Graph, table: OperationTable | None = None) -> dict:
    adj = g.adjacency()
    return {
        "vertices": [
            {"id": i, "label": _vertex_name(table, a), "tuple": list(a) if isinstance(a, tuple) else None}
            for i, a in enumerate(g.vertex_labels)
        ],
        "adjacency": adj,
        "edge_count": len(g.edges),
    }
