"""Free completion of an oriented triangulation to an alternating quasigroup.

Level 0 holds the vertices and facets of the triangulation, with
``f(s_1..s_n) = facet`` whenever ``(s_1..s_n, s_{n+1})`` lies in the facet's
orientation class.  Each later level adjoins a formal product for every
undefined orbit of n-tuples and a formal quotient for every unsolved equation
``f(x, a_2..a_n) = t``.  For n = 2 the alternating group is trivial, so
quotients come in two kinds, one per unknown slot.

The operation on the infinite union is structural, so :func:`evaluate` and
:func:`solve` work on elements of any level without materializing it; the
materialized :class:`CompletionState` is bounded by an element cap.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from .complex import INPUT, OUTPUT, OrientedComplex, SimpComplex, Vertex, check_pseudomanifold, orient
from .qcore import PreconditionError, canonical, even_permutations
from .topology import components, serenation_report, surface_genus

__all__ = [
    "BASE",
    "FCT",
    "PROD",
    "DIV",
    "FreeElement",
    "CompletionState",
    "CapExceeded",
    "OrientationConflict",
    "InvariantViolation",
    "SereneReport",
    "seed",
    "step",
    "complete_levels",
    "evaluate",
    "solve",
    "level_size_estimate",
    "check_state",
    "check_equations",
    "sample_later_levels",
    "subdivision",
    "level0_complex",
    "verify_serene",
    "level0_entries",
]

BASE, FCT, PROD, DIV = "base", "fct", "prod", "div"
_RANK = {BASE: 0, FCT: 1, PROD: 2, DIV: 3}
# n = 2 quotient kinds: the unknown sits in the first or second slot
LEFT, RIGHT, FIRST = "left", "right", "first"

DEFAULT_CAP = 10**6


@dataclass(frozen=True, eq=False)
class FreeElement:
    """An element of the free completion.

    ``data`` is ``(vertex,)`` or ``(facet,)`` for level-0 elements, the
    canonical n-tuple for a product, and ``(kind, key, target)`` for a
    quotient, where ``key`` holds the known arguments.
    """

    kind: str
    data: tuple
    level: int
    sort_key: tuple = field(repr=False, compare=False, default=())

    def __post_init__(self):
        if self.kind in (BASE, FCT):
            key = (_RANK[self.kind], self.level, self.data)
        elif self.kind == PROD:
            key = (_RANK[PROD], self.level, tuple(x.sort_key for x in self.data))
        else:
            side, args, target = self.data
            key = (_RANK[DIV], self.level, side, tuple(x.sort_key for x in args), target.sort_key)
        object.__setattr__(self, "sort_key", key)
        object.__setattr__(self, "_hash", hash((self.kind, self.data)))

    def __eq__(self, other):
        return isinstance(other, FreeElement) and self.kind == other.kind and self.data == other.data

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    def name(self, vertex_labels: Sequence[str] | None = None) -> str:
        if self.kind == BASE:
            v = self.data[0]
            return vertex_labels[v] if vertex_labels else f"v{v}"
        if self.kind == FCT:
            return f"F{self.data[0]}"
        if self.kind == PROD:
            return "[" + ",".join(x.name(vertex_labels) for x in self.data) + "]"
        side, args, target = self.data
        inner = ",".join(x.name(vertex_labels) for x in args)
        return f"<{side}:{inner}->{target.name(vertex_labels)}>"


def _key(x: FreeElement):
    return x.sort_key


def base(v: int) -> FreeElement:
    return FreeElement(BASE, (v,), 0)


def fct(i: int) -> FreeElement:
    return FreeElement(FCT, (i,), 0)


def _canon(t: Sequence[FreeElement]) -> tuple[FreeElement, ...]:
    return canonical(tuple(t), key=_key)


def product(t: Sequence[FreeElement]) -> FreeElement:
    rep = _canon(t)
    return FreeElement(PROD, rep, max(x.level for x in rep) + 1)


def quotient(side: str, args: Sequence[FreeElement], target: FreeElement) -> FreeElement:
    args = tuple(args)
    if side == FIRST and len(args) > 1:
        args = canonical(args, key=_key)
    return FreeElement(DIV, (side, args, target), max([x.level for x in args] + [target.level]) + 1)


class CapExceeded(RuntimeError):
    def __init__(self, level: int, estimate: int, cap: int):
        super().__init__(f"level {level} would hold {estimate} elements, above the cap of {cap}")
        self.level, self.estimate, self.cap = level, estimate, cap


class OrientationConflict(PreconditionError):
    def __init__(self, ridge: tuple, facets: tuple[int, int]):
        super().__init__(f"ordered ridge {ridge} is claimed by facets {facets[0]} and {facets[1]}; orientation is incoherent")
        self.ridge, self.facets = ridge, facets


class InvariantViolation(AssertionError):
    pass


@dataclass
class CompletionState:
    """Levels ``A_0..A_i`` and the partial operation ``f_i`` by orbit representative."""

    arity: int
    gamma: OrientedComplex
    level0: dict[tuple[FreeElement, ...], FreeElement]
    levels: list[list[FreeElement]]
    op: dict[tuple[FreeElement, ...], FreeElement]
    birth: dict[tuple[FreeElement, ...], int]

    @property
    def level(self) -> int:
        return len(self.levels) - 1

    @property
    def elements(self) -> list[FreeElement]:
        return [x for lv in self.levels for x in lv]

    def counts(self) -> dict:
        by_kind: dict[str, int] = {}
        for x in self.elements:
            by_kind[x.kind] = by_kind.get(x.kind, 0) + 1
        return {
            "level": self.level,
            "elements": sum(len(lv) for lv in self.levels),
            "per_level": [len(lv) for lv in self.levels],
            "by_kind": by_kind,
            "defined_orbits": len(self.op),
        }


def _orientation_class(t: tuple[int, ...]) -> list[tuple[int, ...]]:
    return [tuple(t[i] for i in p) for p in even_permutations(len(t))]


def seed(gamma: SimpComplex | OrientedComplex) -> CompletionState:
    """Level 0: vertices and facets, with products read off the orientation."""
    if isinstance(gamma, SimpComplex):
        result = orient(gamma)
        if not isinstance(result, OrientedComplex):
            raise PreconditionError("triangulation is not orientable")
        gamma = result
    c = gamma.base
    n = c.dim
    if n < 2:
        raise PreconditionError("the completion needs dimension at least 2")
    if not check_pseudomanifold(c).ok:
        raise PreconditionError("the triangulation must be a closed pseudomanifold")
    if len(components(c)) != 1:
        raise PreconditionError("the triangulation must be connected")
    claims: dict[tuple[int, ...], int] = {}
    for i in range(len(c.facets)):
        for t in _orientation_class(gamma.oriented_facet(i)):
            head = t[:n]
            if head in claims and claims[head] != i:
                raise OrientationConflict(head, (claims[head], i))
            claims[head] = i
    level0 = {tuple(base(v) for v in head): fct(i) for head, i in claims.items()}
    elements = [base(v) for v in range(len(c.vertices))] + [fct(i) for i in range(len(c.facets))]
    op = {}
    for t, y in level0.items():
        op[_canon(t)] = y
    birth = {k: 0 for k in op}
    return CompletionState(n, gamma, level0, [sorted(elements, key=_key)], op, birth)


def _match_quotient(a: tuple[FreeElement, ...], pos: int) -> FreeElement | None:
    """Value of ``a`` if it is the defining pattern of the quotient at ``pos``."""
    d = a[pos]
    side, args, target = d.data
    n = len(a)
    if n == 2:
        other = a[1 - pos]
        if (side == LEFT and pos == 0 or side == RIGHT and pos == 1) and args == (other,):
            return target
        return None
    for p in even_permutations(n):
        if a[p[0]] is d or a[p[0]] == d:
            if p[0] != pos:
                continue
            rest = tuple(a[i] for i in p[1:])
            return target if canonical(rest, key=_key) == args else None
    return None


def evaluate(state: CompletionState, a: Sequence[FreeElement]) -> FreeElement:
    """``f(a)`` in the infinite completion, computed structurally."""
    a = tuple(a)
    if len(a) != state.arity:
        raise ValueError(f"expected {state.arity} arguments")
    top = max(x.level for x in a)
    if top == 0:
        y = state.level0.get(a)
        if y is not None:
            return y
    else:
        for pos, x in enumerate(a):
            if x.kind == DIV and x.level == top:
                y = _match_quotient(a, pos)
                if y is not None:
                    return y
    return product(a)


def _insert(args: Sequence[FreeElement], pos: int, x: FreeElement) -> tuple[FreeElement, ...]:
    args = tuple(args)
    return args[:pos] + (x,) + args[pos:]


def _quotient_for(args: tuple[FreeElement, ...], pos: int, target: FreeElement) -> FreeElement:
    n = len(args) + 1
    if n == 2:
        return quotient(LEFT if pos == 0 else RIGHT, args, target)
    # move the unknown to the front by an even permutation
    full = _insert(args, pos, None)  # type: ignore[arg-type]
    for p in even_permutations(n):
        if p[0] == pos:
            return quotient(FIRST, tuple(full[i] for i in p[1:]), target)
    raise AssertionError("unreachable")


def solve(state: CompletionState, pos: int, args: Sequence[FreeElement], target: FreeElement) -> FreeElement:
    """The unique ``x`` with ``f(args with x inserted at pos) = target``.

    Candidates are collected from every clause that could produce ``target``
    and each is confirmed by :func:`evaluate`; more than one confirmed
    candidate is reported as a violation of the Latin property.  With no
    candidate the answer is the formal quotient.
    """
    args = tuple(args)
    n = state.arity
    candidates: set[FreeElement] = set()
    if target.kind == FCT and all(x.kind == BASE for x in args):
        for v in range(len(state.gamma.base.vertices)):
            candidates.add(base(v))
    if target.kind == PROD:
        for p in even_permutations(n):
            arr = tuple(target.data[i] for i in p)
            if arr[:pos] + arr[pos + 1 :] == args:
                candidates.add(arr[pos])
    for x in args:
        if x.kind == DIV and x.data[2] == target:
            candidates.update(x.data[1])
    found = [x for x in candidates if evaluate(state, _insert(args, pos, x)) == target]
    if len(found) > 1:
        raise InvariantViolation(f"equation at slot {pos} with {len(found)} solutions: {found}")
    if found:
        return found[0]
    # unsolved below: the formal quotient is adjoined at the next level
    x = _quotient_for(args, pos, target)
    if evaluate(state, _insert(args, pos, x)) != target:
        raise InvariantViolation(f"quotient {x} does not solve its own equation")
    return x


def _orbit_count(m: int, n: int) -> int:
    """Number of alt_n-orbits on ``m**n`` tuples (Burnside)."""
    perms = even_permutations(n)
    total = 0
    for p in perms:
        seen, cycles = set(), 0
        for i in range(n):
            if i not in seen:
                cycles += 1
                j = i
                while j not in seen:
                    seen.add(j)
                    j = p[j]
        total += m**cycles
    return total // len(perms)


def _solved_patterns(op: dict, n: int) -> set:
    solved = set()
    for rep, y in op.items():
        if n == 2:
            solved.add((LEFT, (rep[1],), y))
            solved.add((RIGHT, (rep[0],), y))
        else:
            for p in even_permutations(n):
                arr = tuple(rep[i] for i in p)
                solved.add((FIRST, canonical(arr[1:], key=_key), y))
    return solved


def level_size_estimate(state: CompletionState) -> dict:
    """Sizes of the next level by counting, without building it."""
    m = len(state.elements)
    n = state.arity
    prods = _orbit_count(m, n) - len(state.op)
    solved = len(_solved_patterns(state.op, n))
    if n == 2:
        divs = 2 * m * m - solved
    else:
        divs = _orbit_count(m, n - 1) * m - solved
    return {"products": prods, "quotients": divs, "total": m + prods + divs}


def step(state: CompletionState, cap: int = DEFAULT_CAP, check: bool = True) -> CompletionState:
    """Adjoin level ``i + 1``; the input state is not modified."""
    n = state.arity
    est = level_size_estimate(state)
    if est["total"] > cap:
        raise CapExceeded(state.level + 1, est["total"], cap)
    elems = sorted(state.elements, key=_key)
    new_level = state.level + 1
    op = dict(state.op)
    birth = dict(state.birth)
    new: list[FreeElement] = []
    for t in itertools.product(elems, repeat=n):
        rep = _canon(t)
        if rep != t or rep in state.op:
            continue
        x = FreeElement(PROD, rep, new_level)
        new.append(x)
        op[rep] = x
        birth[rep] = new_level
    solved = _solved_patterns(state.op, n)
    sides = (LEFT, RIGHT) if n == 2 else (FIRST,)
    for side in sides:
        for args in itertools.product(elems, repeat=n - 1):
            if side == FIRST and canonical(args, key=_key) != args:
                continue
            for target in elems:
                if (side, args, target) in solved:
                    continue
                d = FreeElement(DIV, (side, args, target), new_level)
                new.append(d)
                if side == LEFT:
                    pattern = (d,) + args
                elif side == RIGHT:
                    pattern = args + (d,)
                else:
                    pattern = _canon((d,) + args)
                if pattern in op:
                    raise InvariantViolation(f"quotient pattern {pattern} already defined")
                op[pattern] = target
                birth[pattern] = new_level
    old = set(elems)
    if any(x in old for x in new) or len(set(new)) != len(new):
        raise InvariantViolation("a new element coincides with an existing one")
    out = CompletionState(n, state.gamma, state.level0, state.levels + [sorted(new, key=_key)], op, birth)
    if check:
        check_state(out, previous=state)
    return out


def complete_levels(gamma, levels: int, cap: int = DEFAULT_CAP) -> tuple[CompletionState, CapExceeded | None]:
    """Seed and step ``levels`` times, stopping early at the cap."""
    state = seed(gamma)
    for _ in range(levels):
        try:
            state = step(state, cap=cap)
        except CapExceeded as exc:
            return state, exc
    return state, None


def check_state(state: CompletionState, previous: CompletionState | None = None) -> dict:
    """Partial Latin and alternating checks by full scan of the defined orbits."""
    n = state.arity
    seen: dict[tuple, tuple] = {}
    for rep, y in state.op.items():
        if _canon(rep) != rep:
            raise InvariantViolation(f"key {rep} is not a canonical representative")
        for p in even_permutations(n):
            arr = tuple(rep[i] for i in p)
            for pos in range(n):
                pattern = (pos, arr[:pos] + arr[pos + 1 :], y)
                other = seen.setdefault(pattern, arr)
                if other != arr:
                    raise InvariantViolation(f"{arr} and {other} solve the same equation {pattern}")
    if previous is not None:
        for rep, y in previous.op.items():
            if state.op.get(rep) != y:
                raise InvariantViolation(f"entry {rep} changed between levels")
        for rep, lv in state.birth.items():
            if rep in previous.birth and previous.birth[rep] != lv:
                raise InvariantViolation(f"entry {rep} has two defining levels")
    for rep, y in state.op.items():
        if evaluate(state, rep) != y:
            raise InvariantViolation(f"structural evaluation disagrees at {rep}")
    return {"orbits": len(state.op), "patterns": len(seen)}


def check_equations(state: CompletionState, level: int) -> int:
    """Every equation over ``A_level`` is solved exactly once in ``A_{level+1}``.

    Requires ``level + 1 <= state.level``.  Returns the number of equations.
    """
    if level + 1 > state.level:
        raise ValueError("the next level must be materialized")
    n = state.arity
    pool = [x for lv in state.levels[: level + 1] for x in lv]
    solutions: dict[tuple, list] = {}
    for rep, y in state.op.items():
        for p in even_permutations(n):
            arr = tuple(rep[i] for i in p)
            for pos in range(n):
                key = (pos, arr[:pos] + arr[pos + 1 :], y)
                solutions.setdefault(key, []).append(arr[pos])
    count = 0
    for pos in range(n):
        for args in itertools.product(pool, repeat=n - 1):
            for t in pool:
                found = solutions.get((pos, args, t), [])
                if len(found) != 1:
                    raise InvariantViolation(f"equation slot {pos}, {args} -> {t} has {len(found)} solutions")
                if found[0].level > level + 1:
                    raise InvariantViolation("solution born too late")
                count += 1
    return count


def _random_element(state: CompletionState, level: int, rng: random.Random) -> FreeElement:
    """A random element born at ``level`` (possibly beyond the materialized ones)."""
    if level <= state.level:
        return rng.choice(state.levels[level])
    below = [x for lv in state.levels for x in lv]
    n = state.arity
    while True:
        args = [rng.choice(below) for _ in range(n)]
        if max(x.level for x in args) != level - 1:
            continue
        if rng.random() < 0.5:
            x = evaluate(state, args)
            if x.level == level:
                return x
        else:
            pos = rng.randrange(n)
            target, rest = args[0], tuple(args[1:])
            x = solve(state, pos, rest, target)
            if x.level == level:
                return x


def sample_later_levels(state: CompletionState, samples: int = 2000, seed_value: int = 0) -> dict:
    """Spot-check equations over ``A_0`` against elements one level beyond the state.

    Each sample draws an equation over the seed level and an element born
    after the last materialized level; that element must not solve it.
    """
    rng = random.Random(seed_value)
    n = state.arity
    pool = state.levels[0]
    checked = 0
    for _ in range(samples):
        x = _random_element(state, state.level + 1, rng)
        pos = rng.randrange(n)
        args = tuple(rng.choice(pool) for _ in range(n - 1))
        target = rng.choice(pool)
        if evaluate(state, _insert(args, pos, x)) == target:
            raise InvariantViolation(f"late element {x} solves an equation over level 0")
        if solve(state, pos, args, target).level > 1:
            raise InvariantViolation("equation over level 0 solved only after level 1")
        checked += 1
    return {"samples": checked, "level": state.level + 1}


def subdivision(gamma: SimpComplex | OrientedComplex) -> SimpComplex:
    """Facets ``(g - {s}) + {g}``: each facet coned to a new vertex through its ridges."""
    c = gamma.base if isinstance(gamma, OrientedComplex) else gamma
    verts = [Vertex(INPUT, i, v.label) for i, v in enumerate(c.vertices)]
    nv = len(verts)
    verts += [Vertex(OUTPUT, i, f"F{i}") for i in range(len(c.facets))]
    facets = []
    for i, f in enumerate(c.facets):
        for s in f:
            facets.append(tuple(v for v in f if v != s) + (nv + i,))
    return SimpComplex(tuple(verts), tuple(facets), c.dim)


def level0_complex(state: CompletionState) -> SimpComplex:
    """Simplicization facets of the level-0 products, as a complex on ``A_0``."""
    c = state.gamma.base
    nv = len(c.vertices)
    verts = [Vertex(INPUT, i, v.label) for i, v in enumerate(c.vertices)]
    verts += [Vertex(OUTPUT, i, f"F{i}") for i in range(len(c.facets))]
    facets = set()
    for t, y in state.level0.items():
        # a level-0 product never commutes: the transposed tuple lies in the neighbouring facet
        swapped = (t[1], t[0]) + t[2:]
        if evaluate(state, swapped) == y:
            raise InvariantViolation(f"level-0 tuple {t} commutes")
        facets.add(tuple(sorted([x.data[0] for x in t] + [nv + y.data[0]])))
    return SimpComplex(tuple(verts), tuple(sorted(facets)), state.arity)


@dataclass(frozen=True)
class SereneReport:
    ok: bool
    facets: int
    vertices: int
    components: int
    matches_subdivision: bool
    first_mismatch: tuple | None
    invariants_gamma: dict
    invariants_subdivision: dict
    genus: int | None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "facets": self.facets,
            "vertices": self.vertices,
            "components": self.components,
            "matches_subdivision": self.matches_subdivision,
            "first_mismatch": list(self.first_mismatch) if self.first_mismatch else None,
            "invariants_gamma": self.invariants_gamma,
            "invariants_subdivision": self.invariants_subdivision,
            "genus": self.genus,
        }


def _invariants(c: SimpComplex) -> dict:
    r = serenation_report(c)
    (s,) = r.components if len(r.components) == 1 else (r.components[0],)
    return {
        "components": len(r.components),
        "euler_characteristic": s.euler_characteristic,
        "z2_betti": list(s.z2_betti),
        "orientable": s.orientable,
        "all_sphere_like": s.all_sphere_like,
    }


def verify_serene(gamma: SimpComplex | OrientedComplex, state: CompletionState) -> SereneReport:
    """Check that the level-0 facets form the subdivision of ``gamma`` with its invariants."""
    built = level0_complex(state)
    expected = subdivision(gamma)
    got, want = set(built.facets), set(expected.facets)
    mismatch = None
    if got != want:
        diff = sorted(got ^ want)
        mismatch = diff[0]
    inv_b = _invariants(built)
    inv_g = _invariants(gamma.base if isinstance(gamma, OrientedComplex) else gamma)
    comps = inv_b["components"]
    same = all(inv_b[k] == inv_g[k] for k in ("euler_characteristic", "z2_betti", "orientable"))
    genus = None
    if built.dim == 2 and comps == 1:
        genus = surface_genus(serenation_report(built).components[0])
    ok = mismatch is None and comps == 1 and same and check_pseudomanifold(built).ok
    return SereneReport(ok, len(built.facets), len(built.vertices), comps, mismatch is None, mismatch, inv_g, inv_b, genus)


def level0_entries(state: CompletionState) -> tuple[int, list[tuple[int, ...]]]:
    """Level-0 products as ``(n+1)``-tuples over ``0..|A_0|-1``.

    Vertex ``v`` is symbol ``v`` and facet ``i`` is symbol ``|V| + i``.
    """
    nv = len(state.gamma.base.vertices)
    order = nv + len(state.gamma.base.facets)
    rows = []
    for t, y in sorted(state.level0.items(), key=lambda kv: tuple(x.data for x in kv[0])):
        rows.append(tuple(x.data[0] for x in t) + (nv + y.data[0],))
    return order, rows
