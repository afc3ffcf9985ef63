"""Components, Euler characteristics, mod-2 homology and vertex-link tests.

The serenation of a simplicization is shadowed combinatorially: its
components are the classes of facets connected through shared ridges, each
component is closed under taking faces, and each vertex of a component is
tested by its link.  A vertex whose link has the mod-2 homology of a sphere
is reported ``sphere_like``; that is necessary for the point to be
Euclidean, not sufficient.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .complex import OrientedComplex, SimpComplex, check_pseudomanifold, closure, link, propagate_orientation

__all__ = [
    "SPHERE_LIKE",
    "NON_SPHERE_LIKE",
    "ClassificationError",
    "ComponentSummary",
    "ComponentReport",
    "components",
    "gf2_rank",
    "z2_homology",
    "face_counts",
    "euler_characteristic",
    "is_orientable",
    "sphere_betti",
    "vertex_link_flag",
    "serenation_report",
    "surface_genus",
]

SPHERE_LIKE = "sphere_like"
NON_SPHERE_LIKE = "non_sphere_like"


class ClassificationError(ValueError):
    pass


def components(c: SimpComplex) -> list[list[int]]:
    """Facet classes of the graph joining facets that share an (n-1)-face."""
    parent = list(range(len(c.facets)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for owners in c.ridge_map.values():
        r = find(owners[0])
        for o in owners[1:]:
            s = find(o)
            if s != r:
                parent[s] = r
    groups: dict[int, list[int]] = {}
    for i in range(len(c.facets)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def gf2_rank(rows: Sequence[int]) -> int:
    """Rank over GF(2) of rows given as integer bitmasks."""
    pivots: dict[int, int] = {}
    rank = 0
    for row in rows:
        while row:
            top = row.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = row
                rank += 1
                break
            row ^= p
    return rank


def face_counts(c: SimpComplex) -> list[int]:
    return [len(level) for level in closure(c)]


def euler_characteristic(c: SimpComplex) -> int:
    return sum((-1) ** k * n for k, n in enumerate(face_counts(c)))


def z2_homology(c: SimpComplex) -> list[int]:
    """Betti numbers of the closed complex with coefficients in GF(2)."""
    levels = closure(c)
    if not levels:
        return [0] * (c.dim + 1)
    index = [{f: i for i, f in enumerate(level)} for level in levels]
    ranks = [0] * (len(levels) + 1)  # ranks[k] = rank of the boundary map out of dimension k
    for k in range(1, len(levels)):
        rows = []
        below = index[k - 1]
        for f in levels[k]:
            mask = 0
            for j in range(len(f)):
                mask |= 1 << below[f[:j] + f[j + 1 :]]
            rows.append(mask)
        ranks[k] = gf2_rank(rows)
    return [len(levels[k]) - ranks[k] - ranks[k + 1] for k in range(len(levels))]


def is_orientable(c: SimpComplex) -> bool:
    if any(len(owners) > 2 for owners in c.ridge_map.values()):
        return False
    return isinstance(propagate_orientation(c), OrientedComplex)


def sphere_betti(d: int) -> list[int]:
    if d == 0:
        return [2]
    return [1] + [0] * (d - 1) + [1]


def vertex_link_flag(c: SimpComplex, v: int) -> str:
    lk = link(c, [v])
    d = c.dim - 1
    if d == 0:
        return SPHERE_LIKE if len(lk.vertices) == 2 else NON_SPHERE_LIKE
    if not check_pseudomanifold(lk).ok:
        return NON_SPHERE_LIKE
    return SPHERE_LIKE if z2_homology(lk) == sphere_betti(d) else NON_SPHERE_LIKE


@dataclass(frozen=True)
class ComponentSummary:
    facets: tuple[int, ...]
    dim: int
    face_counts: tuple[int, ...]
    euler_characteristic: int
    z2_betti: tuple[int, ...]
    orientable: bool
    pseudomanifold: bool
    link_flags: dict[int, str] = field(default_factory=dict)

    @property
    def all_sphere_like(self) -> bool:
        return all(flag == SPHERE_LIKE for flag in self.link_flags.values())

    def to_json(self, c: SimpComplex | None = None) -> dict:
        flags = self.link_flags
        if c is not None:
            flags = {c.vertices[v].display(): flag for v, flag in flags.items()}
        return {
            "facets": list(self.facets),
            "face_counts": list(self.face_counts),
            "euler_characteristic": self.euler_characteristic,
            "z2_betti": list(self.z2_betti),
            "orientable": self.orientable,
            "pseudomanifold": self.pseudomanifold,
            "link_flags": {str(k): v for k, v in flags.items()},
        }


@dataclass(frozen=True)
class ComponentReport:
    facet_partition: tuple[tuple[int, ...], ...]
    components: tuple[ComponentSummary, ...]

    def to_json(self, c: SimpComplex | None = None) -> dict:
        return {
            "component_count": len(self.components),
            "facet_partition": [list(p) for p in self.facet_partition],
            "components": [s.to_json(c) for s in self.components],
        }


def _summarize(c: SimpComplex, facet_ids: list[int]) -> ComponentSummary:
    sub = c.subcomplex(facet_ids)
    used = sorted({v for i in facet_ids for v in c.facets[i]})
    counts = face_counts(sub)
    betti = z2_homology(sub)
    chi = sum((-1) ** k * n for k, n in enumerate(counts))
    flags = {used[v]: vertex_link_flag(sub, v) for v in range(len(sub.vertices))}
    return ComponentSummary(
        facets=tuple(facet_ids),
        dim=c.dim,
        face_counts=tuple(counts),
        euler_characteristic=chi,
        z2_betti=tuple(betti),
        orientable=is_orientable(sub),
        pseudomanifold=check_pseudomanifold(sub).ok,
        link_flags=flags,
    )


def serenation_report(c: SimpComplex | OrientedComplex) -> ComponentReport:
    """Per-component invariants of the closed components and vertex-link flags."""
    if isinstance(c, OrientedComplex):
        c = c.base
    parts = components(c)
    return ComponentReport(tuple(tuple(p) for p in parts), tuple(_summarize(c, p) for p in parts))


def surface_genus(summary: ComponentSummary) -> int:
    """Genus ``(2 - chi) / 2`` of a closed orientable surface component."""
    if summary.dim != 2:
        raise ClassificationError(f"genus is defined here for surfaces only, not dimension {summary.dim}")
    if not summary.orientable:
        raise ClassificationError("component is not orientable")
    if not summary.all_sphere_like:
        raise ClassificationError("component has non-manifold vertices")
    chi = summary.euler_characteristic
    if chi % 2 or chi > 2:
        raise ClassificationError(f"Euler characteristic {chi} is not that of a closed orientable surface")
    return (2 - chi) // 2
