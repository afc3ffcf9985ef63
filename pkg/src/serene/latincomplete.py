"""Partial alternating Latin cubes and a completion search.

Completion is posed as an exact cover problem.  A cell is an alt_n-orbit of
argument tuples (so only orbit representatives are assigned), and a line item
``(axis, other coordinates, symbol)`` demands that the symbol occur exactly
once on that line.  Choosing symbol ``v`` for a cell covers the cell and one
line item per tuple of the orbit and per axis.  The search is Knuth's
Algorithm X on dictionaries of sets, branching on the item with fewest
remaining options (ties by item number, cells first) and counting every
tried option as a decision node.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .complex import INPUT, OUTPUT, simplicize
from .freecomplete import level0_entries, seed as free_seed, subdivision
from .qcore import OperationTable, PreconditionError, StructureError, canonical
from .topology import serenation_report, surface_genus

__all__ = [
    "PartialCube",
    "PartialCheck",
    "CompletedCube",
    "NotFound",
    "ProbeResult",
    "check_partial",
    "complete",
    "complete_all",
    "quasifinite_probe",
    "partial_from_json",
    "partial_to_json",
]

DEFAULT_BUDGET = 200_000


@dataclass(frozen=True)
class PartialCube:
    arity: int
    order: int
    entries: frozenset[tuple[int, ...]]

    def __post_init__(self):
        entries = frozenset(tuple(int(x) for x in e) for e in self.entries)
        object.__setattr__(self, "entries", entries)
        if self.arity < 1 or self.order < 1:
            raise StructureError("arity and order must be positive")
        for e in entries:
            if len(e) != self.arity + 1:
                raise StructureError(f"entry {e} should have {self.arity + 1} coordinates")
            if not all(0 <= x < self.order for x in e):
                raise StructureError(f"entry {e} has a symbol outside 0..{self.order - 1}")

    @classmethod
    def from_table(cls, table: OperationTable) -> PartialCube:
        return cls(table.arity, table.order, frozenset(t + (table(*t),) for t in table.tuples()))


@dataclass(frozen=True)
class PartialCheck:
    ok: bool
    violations: tuple[tuple[str, tuple, tuple], ...] = ()

    def __bool__(self):
        return self.ok


def check_partial(p: PartialCube) -> PartialCheck:
    """Partial Latin in every coordinate (the value counts as coordinate n+1)
    and equal values on entries whose arguments are even permutations of each other."""
    n = p.arity
    bad = []
    lines: dict[tuple, tuple] = {}
    for e in sorted(p.entries):
        for i in range(n + 1):
            key = (i, e[:i] + e[i + 1 :])
            other = lines.setdefault(key, e)
            if other != e:
                bad.append(("latin", other, e))
    reps: dict[tuple, tuple] = {}
    for e in sorted(p.entries):
        rep = canonical(e[:n])
        other = reps.setdefault(rep, e)
        if other[n] != e[n]:
            bad.append(("alternating", other, e))
    return PartialCheck(not bad, tuple(bad))


@dataclass(frozen=True)
class CompletedCube:
    table: OperationTable
    order: int
    nodes: dict[int, int]

    def __bool__(self):
        return True


@dataclass(frozen=True)
class NotFound:
    """No completion within the budget.  ``exhausted[m]`` is True only when
    the search at order m ran to the end, which proves there is none."""

    nodes: dict[int, int]
    exhausted: dict[int, bool]
    reason: str = ""

    def __bool__(self):
        return False


class _Cover:
    """Exact cover instance for one carrier size."""

    def __init__(self, n: int, m: int, reduce: bool = True):
        self.n, self.m = n, m
        self.fixed: list[int] = []
        cells: dict[tuple, list[tuple]] = {}
        for t in itertools.product(range(m), repeat=n):
            rep = canonical(t) if reduce else t
            cells.setdefault(rep, []).append(t)
        self.reps = list(cells)
        self.cell_of = {t: ci for ci, rep in enumerate(self.reps) for t in cells[rep]}
        self.members = [cells[rep] for rep in self.reps]
        line_ids: dict[tuple, int] = {}
        base = len(self.reps)
        self.Y: dict[int, list[int]] = {}
        for ci, members in enumerate(self.members):
            for v in range(m):
                items = [ci]
                for t in members:
                    for axis in range(n):
                        key = (axis, t[:axis] + t[axis + 1 :], v)
                        if key not in line_ids:
                            line_ids[key] = base + len(line_ids)
                        items.append(line_ids[key])
                self.Y[ci * m + v] = items
        self.X: dict[int, set[int]] = {}
        for r, items in self.Y.items():
            for i in items:
                self.X.setdefault(i, set()).add(r)

    def select(self, r: int) -> list[set[int]]:
        X, Y = self.X, self.Y
        cols = []
        for j in Y[r]:
            for i in X[j]:
                for k in Y[i]:
                    if k != j:
                        X[k].discard(i)
            cols.append(X.pop(j))
        return cols

    def deselect(self, r: int, cols: list[set[int]]) -> None:
        X, Y = self.X, self.Y
        for j in reversed(Y[r]):
            X[j] = cols.pop()
            for i in X[j]:
                for k in Y[i]:
                    if k != j:
                        X[k].add(i)

    def pick(self) -> tuple[int, int]:
        best, size = -1, -1
        for c, opts in self.X.items():
            s = len(opts)
            if size < 0 or s < size or (s == size and c < best):
                best, size = c, s
        return best, size

    def search(self, budget: int, rng: random.Random | None, limit: int = 1):
        """Iterative Algorithm X; returns ``(solutions, nodes, exhausted)``."""
        solutions: list[list[int]] = []
        if not self.X:
            return [[]], 0, True
        nodes = 0
        solution: list[int] = []
        stack: list[list] = []

        def push() -> bool:
            c, size = self.pick()
            if size == 0:
                return False
            cands = sorted(self.X[c])
            if rng is not None:
                rng.shuffle(cands)
            stack.append([cands, 0, None, None])
            return True

        push()
        while stack:
            frame = stack[-1]
            if frame[2] is not None:
                self.deselect(frame[3], frame[2])
                solution.pop()
                frame[2] = None
            if frame[1] >= len(frame[0]):
                stack.pop()
                continue
            if nodes >= budget:
                self._unwind(stack, solution)
                return solutions, nodes, False
            r = frame[0][frame[1]]
            frame[1] += 1
            nodes += 1
            frame[2], frame[3] = self.select(r), r
            solution.append(r)
            if not self.X:
                solutions.append(list(solution))
                if len(solutions) >= limit:
                    self._unwind(stack, solution)
                    return solutions, nodes, False
                continue
            push()
        return solutions, nodes, True

    def _unwind(self, stack, solution):
        while stack:
            frame = stack.pop()
            if frame[2] is not None:
                self.deselect(frame[3], frame[2])
                solution.pop()

    def table(self, solution: Iterable[int]) -> np.ndarray:
        values = np.full(self.m**self.n, -1, dtype=np.int64)
        weights = [self.m ** (self.n - 1 - k) for k in range(self.n)]
        for r in itertools.chain(self.fixed, solution):
            ci, v = divmod(r, self.m)
            for t in self.members[ci]:
                values[sum(w * x for w, x in zip(weights, t))] = v
        return values


def _prefill(cover: _Cover, p: PartialCube) -> bool:
    chosen = set()
    for e in sorted(p.entries):
        r = cover.cell_of[e[: p.arity]] * cover.m + e[p.arity]
        if r in chosen:
            continue
        if any(r not in cover.X.get(i, ()) for i in cover.Y[r]):
            return False
        cover.select(r)
        cover.fixed.append(r)
        chosen.add(r)
    return True


def complete(
    p: PartialCube,
    max_order: int | None = None,
    budget: int = DEFAULT_BUDGET,
    seed: int | None = None,
) -> CompletedCube | NotFound:
    """Search for a complete alternating Latin cube containing ``p``.

    Carrier sizes ``p.order .. max_order`` are tried in turn, each with a
    fresh search and its own node budget.  Without a seed the candidate order
    is the sorted option order; a seed shuffles it reproducibly.
    """
    check = check_partial(p)
    if not check.ok:
        raise PreconditionError(f"partial cube is inconsistent: {check.violations[0]}")
    max_order = p.order if max_order is None else max_order
    if max_order < p.order:
        raise ValueError("max_order must be at least the order of the partial cube")
    nodes: dict[int, int] = {}
    exhausted: dict[int, bool] = {}
    for m in range(p.order, max_order + 1):
        cover = _Cover(p.arity, m)
        rng = random.Random(seed) if seed is not None else None
        if not _prefill(cover, p):
            nodes[m], exhausted[m] = 0, True
            continue
        sols, used, done = cover.search(budget, rng)
        nodes[m] = used
        if sols:
            table = OperationTable(p.arity, m, cover.table(sols[0]))
            cert = table.cert
            if not (cert.latin and cert.alternating):
                raise AssertionError("search produced a table that is not an alternating quasigroup")
            if any(table(*e[:-1]) != e[-1] for e in p.entries):
                raise AssertionError("search dropped a prescribed entry")
            return CompletedCube(table, m, nodes)
        exhausted[m] = done
    reason = "search space exhausted" if all(exhausted.values()) else "node budget reached"
    return NotFound(nodes, exhausted, reason)


def complete_all(p: PartialCube, reduce: bool = True, budget: int = 10**7, limit: int = 10**6) -> list[OperationTable]:
    """Every completion at order ``p.order``.

    With ``reduce=False`` cells are single tuples and the alternating
    condition is not imposed by the encoding; completions are then filtered
    by validation, which gives an independent route to the same set.
    """
    cover = _Cover(p.arity, p.order, reduce=reduce)
    if not _prefill(cover, p):
        return []
    sols, _, done = cover.search(budget, None, limit=limit)
    if not done and len(sols) < limit:
        raise RuntimeError("budget reached before enumeration finished")
    tables = [OperationTable(p.arity, p.order, cover.table(s)) for s in sols]
    if not reduce:
        tables = [t for t in tables if t.cert.alternating]
    return sorted(tables, key=lambda t: tuple(t.values))


@dataclass(frozen=True)
class ProbeResult:
    found: bool
    outcome: CompletedCube | NotFound
    partial: PartialCube
    matched_component: int | None = None
    component_invariants: dict = field(default_factory=dict)
    expected_invariants: dict = field(default_factory=dict)
    genus: int | None = None

    def to_json(self) -> dict:
        doc = {
            "found": self.found,
            "partial_order": self.partial.order,
            "partial_entries": len(self.partial.entries),
            "nodes": {str(k): v for k, v in self.outcome.nodes.items()},
        }
        if isinstance(self.outcome, CompletedCube):
            doc.update(
                order=self.outcome.order,
                matched_component=self.matched_component,
                component_invariants=self.component_invariants,
                expected_invariants=self.expected_invariants,
                genus=self.genus,
            )
        else:
            doc.update(exhausted={str(k): v for k, v in self.outcome.exhausted.items()}, reason=self.outcome.reason)
        return doc


def _summary_json(s) -> dict:
    return {
        "facets": len(s.facets),
        "euler_characteristic": s.euler_characteristic,
        "z2_betti": list(s.z2_betti),
        "orientable": s.orientable,
        "all_sphere_like": s.all_sphere_like,
    }


def quasifinite_probe(gamma, max_order: int | None = None, budget: int = DEFAULT_BUDGET, seed: int | None = None) -> ProbeResult:
    """Seed the free completion, then look for a finite quasigroup containing level 0.

    On success the simplicization of the found quasigroup is searched for the
    component carrying the level-0 facets, and its invariants are compared
    with those of the subdivided triangulation.
    """
    state = free_seed(gamma)
    order, rows = level0_entries(state)
    partial = PartialCube(state.arity, order, frozenset(rows))
    outcome = complete(partial, max_order=max_order or order, budget=budget, seed=seed)
    if not outcome:
        return ProbeResult(False, outcome, partial)
    table = outcome.table
    c = simplicize(table)
    index = {(v.tag, v.element): i for i, v in enumerate(c.vertices)}
    n = state.arity
    wanted = {tuple(sorted([index[(INPUT, x)] for x in e[:n]] + [index[(OUTPUT, e[n])]])) for e in rows}
    report = serenation_report(c)
    facet_pos = {f: i for i, f in enumerate(c.facets)}
    wanted_ids = {facet_pos[f] for f in wanted}
    matched = None
    for k, part in enumerate(report.facet_partition):
        if set(part) == wanted_ids:
            matched = k
    expected = serenation_report(subdivision(state.gamma)).components[0]
    if matched is None:
        return ProbeResult(True, outcome, partial, None, {}, _summary_json(expected))
    got = report.components[matched]
    genus = surface_genus(got) if n == 2 else None
    return ProbeResult(True, outcome, partial, matched, _summary_json(got), _summary_json(expected), genus)


def partial_from_json(doc: dict) -> PartialCube:
    try:
        return PartialCube(int(doc["arity"]), int(doc["order"]), frozenset(tuple(e) for e in doc["entries"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise StructureError(f"partial cube JSON needs 'arity', 'order' and 'entries' ({exc})") from None


def partial_to_json(p: PartialCube) -> dict:
    return {"arity": p.arity, "order": p.order, "entries": [list(e) for e in sorted(p.entries)]}
