"""JSON formats for tables, complexes and partial cubes."""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from .complex import INPUT, OUTPUT, OrientedComplex, SimpComplex, Vertex
from .qcore import OperationTable, StructureError

__all__ = [
    "table_to_json",
    "table_from_json",
    "complex_to_json",
    "complex_from_json",
    "load_json",
    "dump_json",
    "write_atomic",
]


def table_to_json(table: OperationTable) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "arity": table.arity,
        "order": table.order,
        "values": [int(x) for x in table.values],
    }
    if table.labels:
        doc["labels"] = list(table.labels)
    return doc


def table_from_json(doc: dict[str, Any]) -> OperationTable:
    try:
        arity, order, values = int(doc["arity"]), int(doc["order"]), doc["values"]
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"table JSON needs integer 'arity', 'order' and a 'values' list ({exc})") from None
    for i, v in enumerate(values):
        if not isinstance(v, int) or isinstance(v, bool):
            raise StructureError(f"entry at index {i} is not an integer: {v!r}")
    return OperationTable(arity, order, np.array(values, dtype=np.int64), doc.get("labels"))


def complex_to_json(c: SimpComplex | OrientedComplex) -> dict[str, Any]:
    base = c.base if isinstance(c, OrientedComplex) else c
    doc: dict[str, Any] = {
        "dim": base.dim,
        "vertices": [{"tag": v.tag, "element": v.element, "label": v.label} for v in base.vertices],
        "facets": [list(f) for f in base.facets],
    }
    if isinstance(c, OrientedComplex):
        doc["orientation"] = list(c.orientation)
    return doc


def complex_from_json(doc: dict[str, Any]) -> SimpComplex | OrientedComplex:
    """Parse the complex schema; an ``orientation`` array yields an oriented complex.

    Facets whose entries are not sorted keep their orientation: the listed
    order is taken as a representative of the orientation class and folded
    into the sign.
    """
    from .qcore import permutation_parity

    try:
        dim = int(doc["dim"])
        raw_facets = [list(map(int, f)) for f in doc["facets"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"complex JSON needs 'dim' and integer 'facets' ({exc})") from None
    raw_vertices = doc.get("vertices")
    if raw_vertices is None:
        count = 1 + max((v for f in raw_facets for v in f), default=-1)
        raw_vertices = [{"label": str(i)} for i in range(count)]
    vertices = []
    for i, v in enumerate(raw_vertices):
        if isinstance(v, dict):
            tag = v.get("tag", INPUT)
            label = str(v.get("label", i))
            element = v.get("element", i)
        else:
            tag, label, element = INPUT, str(v), i
        if tag not in (INPUT, OUTPUT):
            raise StructureError(f"vertex {i} has tag {tag!r}; expected 'in' or 'out'")
        if not isinstance(element, int) or isinstance(element, bool):
            raise StructureError(f"vertex {i} has non-integer element {element!r}")
        vertices.append(Vertex(tag, element, label))
    orientation = doc.get("orientation")
    signs = []
    facets = []
    for i, f in enumerate(raw_facets):
        srt = sorted(f)
        facets.append(tuple(srt))
        if len(set(f)) == len(f):
            parity = permutation_parity([srt.index(v) for v in f])
        else:
            parity = 1
        if orientation is not None:
            if i >= len(orientation):
                raise StructureError("orientation array is shorter than the facet list")
            signs.append(int(orientation[i]) * parity)
    base = SimpComplex(tuple(vertices), tuple(facets), dim)
    if orientation is None:
        return base
    if len(orientation) != len(raw_facets):
        raise StructureError("orientation array length differs from the facet count")
    return OrientedComplex(base, tuple(signs))


def load_json(path: str | os.PathLike) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
