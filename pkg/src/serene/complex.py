"""Pure simplicial complexes stored by facets, and the simplicization of an
alternating quasigroup.

Facets are sorted tuples of vertex indices.  Lower faces are never stored;
they are generated from facets on demand.
"""
from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .qcore import (
    OperationTable,
    PreconditionError,
    StructureError,
    canonical,
    check_homomorphism,
    nct,
    permutation_parity,
)

__all__ = [
    "INPUT",
    "OUTPUT",
    "Vertex",
    "SimpComplex",
    "OrientedComplex",
    "NotOrientable",
    "PseudomanifoldCheck",
    "simplicize",
    "facet_table",
    "natural_orientation",
    "simplicize_map",
    "check_pseudomanifold",
    "orient",
    "propagate_orientation",
    "faces",
    "star",
    "link",
    "closure",
]

INPUT = "in"
OUTPUT = "out"


class Vertex(NamedTuple):
    tag: str
    element: int
    label: str

    def display(self) -> str:
        # underline / overline are rendered as _x and ^x in plain text
        return ("_" if self.tag == INPUT else "^") + self.label


@dataclass(frozen=True)
class SimpComplex:
    """A pure complex given by its facets over an ordered vertex list."""

    vertices: tuple[Vertex, ...]
    facets: tuple[tuple[int, ...], ...]
    dim: int

    def __post_init__(self):
        facets = tuple(tuple(sorted(f)) for f in self.facets)
        object.__setattr__(self, "facets", facets)
        object.__setattr__(self, "vertices", tuple(self.vertices))
        nv = len(self.vertices)
        if len(set(facets)) != len(facets):
            raise StructureError("duplicate facets")
        used = set()
        for i, f in enumerate(facets):
            if len(f) != self.dim + 1 or len(set(f)) != len(f):
                raise StructureError(f"facet {i} {f} does not have {self.dim + 1} distinct vertices")
            if f and (f[0] < 0 or f[-1] >= nv):
                raise StructureError(f"facet {i} refers to a missing vertex")
            used.update(f)
        if len(used) != nv:
            missing = sorted(set(range(nv)) - used)
            raise StructureError(f"vertices {missing} lie in no facet")

    @classmethod
    def from_facets(cls, facets: Iterable[Sequence], dim: int | None = None, tag: str = INPUT) -> SimpComplex:
        """Build a complex whose vertices are the labels appearing in ``facets``."""
        facets = [tuple(f) for f in facets]
        labels = sorted({v for f in facets for v in f}, key=lambda x: (str(type(x)), x))
        index = {v: i for i, v in enumerate(labels)}
        verts = tuple(Vertex(tag, i, str(v)) for i, v in enumerate(labels))
        if dim is None:
            dim = len(facets[0]) - 1 if facets else 0
        return cls(verts, tuple(tuple(index[v] for v in f) for f in facets), dim)

    def __len__(self):
        return len(self.facets)

    @cached_property
    def ridge_map(self) -> dict[tuple[int, ...], list[int]]:
        """(n-1)-face -> indices of facets containing it."""
        ridges: dict[tuple[int, ...], list[int]] = defaultdict(list)
        for i, f in enumerate(self.facets):
            for j in range(len(f)):
                ridges[f[:j] + f[j + 1 :]].append(i)
        return dict(ridges)

    def vertex_index(self, v: Vertex | str) -> int:
        for i, w in enumerate(self.vertices):
            if w == v or (isinstance(v, str) and (w.display() == v or w.label == v)):
                return i
        raise KeyError(f"vertex {v!r} not in complex")

    def facet_labels(self, i: int) -> tuple[str, ...]:
        return tuple(self.vertices[v].display() for v in self.facets[i])

    def subcomplex(self, facet_ids: Iterable[int]) -> SimpComplex:
        """Complex on the given facets, with unused vertices dropped."""
        chosen = [self.facets[i] for i in sorted(facet_ids)]
        used = sorted({v for f in chosen for v in f})
        remap = {v: i for i, v in enumerate(used)}
        return SimpComplex(
            tuple(self.vertices[v] for v in used),
            tuple(tuple(remap[v] for v in f) for f in chosen),
            self.dim,
        )


@dataclass(frozen=True)
class OrientedComplex:
    """A complex with one sign per facet, relative to sorted vertex order."""

    base: SimpComplex
    orientation: tuple[int, ...]

    def __post_init__(self):
        if len(self.orientation) != len(self.base.facets):
            raise StructureError("one orientation sign per facet is required")
        if any(s not in (1, -1) for s in self.orientation):
            raise StructureError("orientation signs must be +1 or -1")

    def oriented_facet(self, i: int) -> tuple[int, ...]:
        """A vertex ordering of facet ``i`` in its orientation class."""
        f = self.base.facets[i]
        if self.orientation[i] > 0 or len(f) < 2:
            return f
        return (f[1], f[0]) + f[2:]

    def incoherent_ridges(self) -> list[tuple[int, ...]]:
        bad = []
        for ridge, owners in self.base.ridge_map.items():
            if len(owners) != 2:
                continue
            a, b = owners
            if _induced_sign(self.base.facets[a], ridge, self.orientation[a]) == _induced_sign(
                self.base.facets[b], ridge, self.orientation[b]
            ):
                bad.append(ridge)
        return bad

    def is_coherent(self) -> bool:
        return not self.incoherent_ridges()


@dataclass(frozen=True)
class NotOrientable:
    """Orientation failed; ``cycle`` is a closed walk of facets, consecutive
    ones sharing a ridge, along which sign propagation is inconsistent."""

    cycle: tuple[int, ...]

    def __bool__(self):
        return False


@dataclass(frozen=True)
class PseudomanifoldCheck:
    ok: bool
    violations: tuple[tuple[int, ...], ...] = field(default=())

    def __bool__(self):
        return self.ok


def _induced_sign(facet: tuple[int, ...], ridge: tuple[int, ...], sign: int) -> int:
    (pos,) = [i for i, v in enumerate(facet) if v not in ridge]
    return sign * (-1 if pos % 2 else 1)


def _simplicize_rows(table: OperationTable):
    cert = table.cert
    if not (cert.latin and cert.alternating):
        raise PreconditionError(
            "simplicization needs an alternating quasigroup; otherwise more than two facets can meet at a face"
        )
    seen = set()
    rows = []
    for a in nct(table):
        rep = canonical(a)
        if rep in seen:
            continue
        seen.add(rep)
        rows.append((rep, table(*rep)))
    return rows


def _simplicize_vertices(table, rows):
    ins = sorted({x for rep, _ in rows for x in rep})
    outs = sorted({y for _, y in rows})
    verts = [Vertex(INPUT, x, table.label(x)) for x in ins] + [Vertex(OUTPUT, y, table.label(y)) for y in outs]
    index = {(v.tag, v.element): i for i, v in enumerate(verts)}
    return verts, index


def simplicize(table: OperationTable) -> SimpComplex:
    """One facet ``{_a1, ..., _an, ^f(a)}`` per alt_n-orbit of noncommuting tuples.

    Input vertices come first, then output vertices, each ordered by element.
    """
    rows = _simplicize_rows(table)
    verts, index = _simplicize_vertices(table, rows)
    facets = [
        tuple(sorted([index[(INPUT, x)] for x in rep] + [index[(OUTPUT, y)]])) for rep, y in rows
    ]
    return SimpComplex(tuple(verts), tuple(facets), table.arity)


def facet_table(table: OperationTable) -> list[tuple[tuple[int, ...], tuple[Vertex, ...]]]:
    """Rows ``(orbit representative, facet vertices in tuple order then output)``."""
    rows = _simplicize_rows(table)
    out = []
    for rep, y in rows:
        out.append(
            (rep, tuple(Vertex(INPUT, x, table.label(x)) for x in rep) + (Vertex(OUTPUT, y, table.label(y)),))
        )
    return out


def natural_orientation(table: OperationTable, c: SimpComplex | None = None) -> OrientedComplex:
    """Orient each facet by the ordering ``(_a1, ..., _an, ^f(a))``."""
    rows = _simplicize_rows(table)
    if c is None:
        c = simplicize(table)
    index = {(v.tag, v.element): i for i, v in enumerate(c.vertices)}
    where = {f: i for i, f in enumerate(c.facets)}
    signs = [0] * len(c.facets)
    for rep, y in rows:
        ordered = [index[(INPUT, x)] for x in rep] + [index[(OUTPUT, y)]]
        srt = tuple(sorted(ordered))
        perm = [srt.index(v) for v in ordered]
        signs[where[srt]] = permutation_parity(perm)
    return OrientedComplex(c, tuple(signs))


def simplicize_map(src: OperationTable, dst: OperationTable, mapping: Sequence[int]) -> dict[int, int]:
    """Vertex map induced by an NC homomorphism, verified facet by facet."""
    check = check_homomorphism(src, dst, mapping)
    if not check.nc_hom:
        raise PreconditionError(f"map is not an NC homomorphism (witness tuple {check.witness})")
    cs, cd = simplicize(src), simplicize(dst)
    index = {(v.tag, v.element): i for i, v in enumerate(cd.vertices)}
    vmap = {i: index[(v.tag, int(mapping[v.element]))] for i, v in enumerate(cs.vertices)}
    targets = set(cd.facets)
    for i, f in enumerate(cs.facets):
        img = tuple(sorted(vmap[v] for v in f))
        if img not in targets:
            raise StructureError(f"facet {cs.facet_labels(i)} is not sent to a facet")
    return vmap


def check_pseudomanifold(c: SimpComplex) -> PseudomanifoldCheck:
    """Every (n-1)-face must lie in exactly two facets."""
    bad = tuple(sorted(r for r, owners in c.ridge_map.items() if len(owners) != 2))
    return PseudomanifoldCheck(not bad and len(c.facets) > 0, bad)


def orient(c: SimpComplex) -> OrientedComplex | NotOrientable:
    """Propagate facet signs breadth-first across shared ridges."""
    if not check_pseudomanifold(c).ok:
        raise PreconditionError("orientation needs a pseudomanifold")
    return propagate_orientation(c)


def propagate_orientation(c: SimpComplex) -> OrientedComplex | NotOrientable:
    """Sign propagation across ridges lying in exactly two facets.

    Boundary ridges (one facet) are ignored and branching ridges (three or
    more) are treated as unorientable by the caller; this is the relaxed form
    used for complexes with boundary.
    """
    nbrs: dict[int, list[tuple[int, tuple[int, ...]]]] = defaultdict(list)
    for ridge, owners in c.ridge_map.items():
        if len(owners) == 2:
            a, b = owners
            nbrs[a].append((b, ridge))
            nbrs[b].append((a, ridge))
    signs = [0] * len(c.facets)
    parent = [-1] * len(c.facets)
    for root in range(len(c.facets)):
        if signs[root]:
            continue
        signs[root] = 1
        queue = deque([root])
        while queue:
            a = queue.popleft()
            for b, ridge in nbrs[a]:
                want = -_induced_sign(c.facets[a], ridge, signs[a]) * _induced_sign(c.facets[b], ridge, 1)
                if signs[b] == 0:
                    signs[b] = want
                    parent[b] = a
                    queue.append(b)
                elif signs[b] != want:
                    return NotOrientable(_odd_cycle(parent, a, b))
    return OrientedComplex(c, tuple(signs))


def _odd_cycle(parent: list[int], a: int, b: int) -> tuple[int, ...]:
    def path(x):
        p = [x]
        while parent[x] != -1:
            x = parent[x]
            p.append(x)
        return p[::-1]

    pa, pb = path(a), path(b)
    k = 0
    while k < min(len(pa), len(pb)) and pa[k] == pb[k]:
        k += 1
    # pa[k-1] is the lowest common ancestor
    return tuple(pa[k - 1 :] + pb[k:][::-1])


def faces(c: SimpComplex, k: int) -> list[tuple[int, ...]]:
    if not 0 <= k <= c.dim:
        raise ValueError(f"face dimension {k} outside 0..{c.dim}")
    out = set()
    for f in c.facets:
        out.update(itertools.combinations(f, k + 1))
    return sorted(out)


def closure(c: SimpComplex) -> list[list[tuple[int, ...]]]:
    """All nonempty faces grouped by dimension."""
    return [faces(c, k) for k in range(c.dim + 1)] if c.facets else []


def _face_key(c: SimpComplex, face) -> tuple[int, ...]:
    face = tuple(sorted(c.vertex_index(v) if not isinstance(v, int) else v for v in face))
    if not any(set(face) <= set(f) for f in c.facets):
        raise KeyError(f"face {face} is not in the complex")
    return face


def star(c: SimpComplex, face) -> SimpComplex:
    face = _face_key(c, face)
    return c.subcomplex(i for i, f in enumerate(c.facets) if set(face) <= set(f))


def link(c: SimpComplex, face) -> SimpComplex:
    """``{g - face : face <= g}``; a pure complex of dimension ``n - |face|``."""
    face = _face_key(c, face)
    parts = [tuple(v for v in f if v not in face) for f in c.facets if set(face) <= set(f)]
    used = sorted({v for p in parts for v in p})
    remap = {v: i for i, v in enumerate(used)}
    return SimpComplex(
        tuple(c.vertices[v] for v in used),
        tuple(tuple(remap[v] for v in p) for p in parts),
        c.dim - len(face),
    )
