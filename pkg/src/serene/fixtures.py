"""Bundled triangulations used by the tests and the CLI.

Hand-made fixtures live in ``data/*.json`` with a ``provenance`` note;
simplex boundaries and disjoint unions are generated.
"""
from __future__ import annotations

import itertools
import json
from importlib import resources

from .complex import OrientedComplex, SimpComplex, Vertex, orient
from .serialize import complex_from_json

__all__ = ["fixture", "fixture_names", "boundary_simplex", "single_simplex", "disjoint_union", "oriented"]

_FILES = ("torus7", "torus9", "klein8", "genus2", "cone-torus9")


def boundary_simplex(k: int) -> SimpComplex:
    """The boundary of the k-simplex: all k-subsets of k+1 vertices."""
    return SimpComplex.from_facets(itertools.combinations(range(k + 1), k), dim=k - 1)


def single_simplex(n: int) -> SimpComplex:
    return SimpComplex.from_facets([tuple(range(n + 1))], dim=n)


def disjoint_union(*parts: SimpComplex) -> SimpComplex:
    verts: list[Vertex] = []
    facets = []
    for p in parts:
        off = len(verts)
        verts.extend(Vertex(v.tag, off + i, f"{v.label}.{len(facets)}") for i, v in enumerate(p.vertices))
        facets.extend(tuple(off + x for x in f) for f in p.facets)
    return SimpComplex(tuple(verts), tuple(facets), parts[0].dim)


def fixture_names() -> list[str]:
    return sorted(_FILES) + ["boundary-simplex-<k>", "simplex-<n>", "two-spheres"]


def fixture(name: str) -> SimpComplex | OrientedComplex:
    """Load a bundled complex; file fixtures keep their stored orientation."""
    if name in _FILES:
        text = resources.files("serene").joinpath(f"data/{name}.json").read_text(encoding="utf-8")
        return complex_from_json(json.loads(text))
    if name.startswith("boundary-simplex-"):
        return boundary_simplex(int(name.rsplit("-", 1)[1]))
    if name.startswith("simplex-"):
        return single_simplex(int(name.rsplit("-", 1)[1]))
    if name == "two-spheres":
        return disjoint_union(boundary_simplex(3), boundary_simplex(3))
    raise KeyError(f"unknown fixture {name!r}; available: {', '.join(fixture_names())}")


def oriented(c: SimpComplex | OrientedComplex) -> OrientedComplex:
    """Return ``c`` with a coherent orientation, computing one if needed."""
    if isinstance(c, OrientedComplex):
        return c
    result = orient(c)
    if not isinstance(result, OrientedComplex):
        raise ValueError(f"complex is not orientable (witness cycle {result.cycle})")
    return result
