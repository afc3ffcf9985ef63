"""Finite n-magmas and n-quasigroups.

An operation table stores ``f: A^n -> A`` on ``A = {0, ..., m-1}`` as a flat
vector of length ``m**n``.  Tuples are encoded in mixed radix with ``x_1`` as
the most significant digit, so the flat order is the lexicographic order of
argument tuples.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "StructureError",
    "PreconditionError",
    "OperationTable",
    "QuasigroupCert",
    "PropertyCheck",
    "HomomorphismCheck",
    "validate",
    "divide",
    "nct",
    "inp",
    "out",
    "is_commutative",
    "is_nary_associative",
    "check_homomorphism",
    "canonical",
    "even_permutations",
    "permutation_parity",
    "alt_orbit",
]

EXACT_PERM_ARITY = 7
EXHAUSTIVE_ASSOC_LIMIT = 10**7


class StructureError(ValueError):
    """A table, complex or cube is malformed."""


class PreconditionError(ValueError):
    """An operation was called on an input outside its contract."""


def permutation_parity(perm: Sequence[int]) -> int:
    """Return +1 for even permutations of ``range(len(perm))``, -1 for odd."""
    seen = [False] * len(perm)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def even_permutations(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(p for p in itertools.permutations(range(n)) if permutation_parity(p) == 1)


def alt_orbit(t: Sequence) -> set[tuple]:
    """All images of ``t`` under even permutations of its positions."""
    return {tuple(t[i] for i in p) for p in even_permutations(len(t))}


def canonical(t: Sequence, key=None) -> tuple:
    """Lexicographically least member of the alt_n-orbit of ``t``."""
    t = tuple(t)
    images = (tuple(t[i] for i in p) for p in even_permutations(len(t)))
    if key is None:
        return min(images)
    return min(images, key=lambda img: tuple(key(x) for x in img))


@dataclass(frozen=True, eq=False)
class OperationTable:
    """A total n-ary operation on ``{0, ..., order-1}``."""

    arity: int
    order: int
    values: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.arity < 1 or self.order < 1:
            raise StructureError(f"arity and order must be positive, got {self.arity}, {self.order}")
        vals = np.asarray(self.values)
        expected = self.order**self.arity
        if vals.ndim != 1 or vals.shape[0] != expected:
            raise StructureError(
                f"values has length {vals.size}, expected order**arity = {expected}"
            )
        if vals.size and not np.issubdtype(vals.dtype, np.integer):
            raise StructureError("values must be integers")
        bad = np.flatnonzero((vals < 0) | (vals >= self.order))
        if bad.size:
            i = int(bad[0])
            raise StructureError(f"entry at index {i} is {int(vals[i])}, outside 0..{self.order - 1}")
        vals = vals.astype(np.int64, copy=True)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != self.order or len(set(labels)) != self.order:
                raise StructureError("labels must be order many distinct strings")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_function(cls, arity: int, order: int, func, labels=None) -> OperationTable:
        vals = [func(*t) for t in itertools.product(range(order), repeat=arity)]
        return cls(arity, order, np.array(vals, dtype=np.int64), labels)

    @property
    def cube(self) -> np.ndarray:
        return self.values.reshape((self.order,) * self.arity)

    def index(self, args: Sequence[int]) -> int:
        idx = 0
        for a in args:
            idx = idx * self.order + int(a)
        return idx

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise TypeError(f"expected {self.arity} arguments, got {len(args)}")
        return int(self.values[self.index(args)])

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    def element(self, label: str) -> int:
        if self.labels and label in self.labels:
            return self.labels.index(label)
        return int(label)

    def tuples(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(range(self.order), repeat=self.arity)

    @cached_property
    def cert(self) -> QuasigroupCert:
        return validate(self)

    def __eq__(self, other):
        if not isinstance(other, OperationTable):
            return NotImplemented
        return (
            self.arity == other.arity
            and self.order == other.order
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.arity, self.order, self.values.tobytes()))

    def __repr__(self):
        return f"OperationTable(arity={self.arity}, order={self.order})"


@dataclass(frozen=True)
class QuasigroupCert:
    table: OperationTable = field(repr=False)
    latin: bool
    alternating: bool
    permutomorphism_group_size: int
    group_size_exact: bool = True
    permutomorphisms: tuple[tuple[int, ...], ...] = ()

    @property
    def quasigroup(self) -> bool:
        return self.latin


@dataclass(frozen=True)
class PropertyCheck:
    holds: bool
    sampled: bool = False

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class HomomorphismCheck:
    hom: bool
    nc_hom: bool
    witness: tuple[int, ...] | None = None


def _is_latin(cube: np.ndarray, order: int) -> bool:
    target = np.arange(order)
    for axis in range(cube.ndim):
        srt = np.sort(cube, axis=axis)
        shape = [1] * cube.ndim
        shape[axis] = order
        if not np.array_equal(srt, np.broadcast_to(target.reshape(shape), cube.shape)):
            return False
    return True


def _invariant_under(cube: np.ndarray, perm: Sequence[int]) -> bool:
    # f(x_{p(1)},...,x_{p(n)}) == f(x) everywhere; transpose by p^-1 is the
    # same invariance condition, so either direction suffices.
    return bool(np.array_equal(cube, np.transpose(cube, perm)))


def _alt_generators(n: int) -> list[tuple[int, ...]]:
    gens = []
    for k in range(2, n):
        p = list(range(n))
        p[0], p[1], p[k] = 1, k, 0
        gens.append(tuple(p))
    return gens


def validate(table: OperationTable) -> QuasigroupCert:
    """Certify the Latin and alternating properties of ``table``.

    The permutomorphism group is computed exactly for arity at most 7;
    beyond that only the alt_n generators are tested and the reported size is
    a lower bound (``group_size_exact`` is False).
    """
    n, m = table.arity, table.order
    cube = table.cube
    latin = _is_latin(cube, m)
    alternating = all(_invariant_under(cube, g) for g in _alt_generators(n))
    if n <= EXACT_PERM_ARITY:
        perms = tuple(p for p in itertools.permutations(range(n)) if _invariant_under(cube, p))
        return QuasigroupCert(table, latin, alternating, len(perms), True, perms)
    size = math.factorial(n) // 2 if alternating else 1
    return QuasigroupCert(table, latin, alternating, size, False, ())


def _require_latin(table: OperationTable) -> None:
    if not table.cert.latin:
        raise PreconditionError("table is not a quasigroup (Latin property fails)")


def _require_alternating_quasigroup(table: OperationTable) -> None:
    cert = table.cert
    if not (cert.latin and cert.alternating):
        raise PreconditionError("table is not an alternating quasigroup")


def divide(table: OperationTable, i: int, args: Sequence[int], y: int) -> int:
    """Unique ``x_i`` with ``f(args[:i-1], x_i, args[i-1:]) == y``.

    ``i`` is a 1-based coordinate and ``args`` holds the other n-1 arguments
    in order.
    """
    _require_latin(table)
    n = table.arity
    if not 1 <= i <= n:
        raise ValueError(f"coordinate {i} outside 1..{n}")
    if len(args) != n - 1:
        raise ValueError(f"expected {n - 1} fixed arguments, got {len(args)}")
    index = tuple(args[: i - 1]) + (slice(None),) + tuple(args[i - 1 :])
    line = table.cube[index]
    hits = np.flatnonzero(line == y)
    return int(hits[0])


def noncommuting_mask(table: OperationTable) -> np.ndarray:
    """Boolean vector over flat tuple indices marking noncommuting tuples."""
    n = table.arity
    cube = table.cube
    if n == 1:
        return np.zeros(table.values.shape, dtype=bool)
    if table.cert.alternating:
        # f is constant on alt_n-orbits, so one transposition separates the two
        # cosets of S_n.
        swap = (1, 0) + tuple(range(2, n))
        mask = cube != np.transpose(cube, swap)
    else:
        mask = np.zeros(cube.shape, dtype=bool)
        for p in itertools.permutations(range(n)):
            inv = tuple(np.argsort(p))
            mask |= cube != np.transpose(cube, inv)
    return mask.reshape(-1)


def _unflatten(idx: np.ndarray, n: int, m: int) -> np.ndarray:
    digits = np.empty((idx.size, n), dtype=np.int64)
    rest = idx.astype(np.int64)
    for k in range(n - 1, -1, -1):
        digits[:, k] = rest % m
        rest = rest // m
    return digits


def nct(table: OperationTable) -> list[tuple[int, ...]]:
    """Noncommuting argument tuples in lexicographic order."""
    _require_alternating_quasigroup(table)
    idx = np.flatnonzero(noncommuting_mask(table))
    return [tuple(int(x) for x in row) for row in _unflatten(idx, table.arity, table.order)]


def inp(table: OperationTable) -> set[int]:
    _require_alternating_quasigroup(table)
    idx = np.flatnonzero(noncommuting_mask(table))
    return {int(x) for x in np.unique(_unflatten(idx, table.arity, table.order))}


def out(table: OperationTable) -> set[int]:
    _require_alternating_quasigroup(table)
    idx = np.flatnonzero(noncommuting_mask(table))
    return {int(x) for x in np.unique(table.values[idx])}


def is_commutative(table: OperationTable) -> bool:
    n = table.arity
    if n == 1:
        return True
    cube = table.cube
    swap = (1, 0) + tuple(range(2, n))
    cycle = tuple(range(1, n)) + (0,)
    return _invariant_under(cube, swap) and _invariant_under(cube, cycle)


def _apply_flat(values: np.ndarray, cols: list[np.ndarray], m: int) -> np.ndarray:
    idx = np.zeros(cols[0].shape, dtype=np.int64)
    for c in cols:
        idx = idx * m + c
    return values[idx]


def _assoc_block_ok(values, digits: list[np.ndarray], n: int, m: int) -> bool:
    ref = None
    for shift in range(n):
        inner = _apply_flat(values, digits[shift : shift + n], m)
        outer = digits[:shift] + [inner] + digits[shift + n :]
        res = _apply_flat(values, outer, m)
        if ref is None:
            ref = res
        elif not np.array_equal(ref, res):
            return False
    return True


def is_nary_associative(
    table: OperationTable,
    *,
    exhaustive_limit: int = EXHAUSTIVE_ASSOC_LIMIT,
    samples: int = 200_000,
    seed: int = 0,
) -> PropertyCheck:
    """Check that moving the inner block of ``f(f(..), ..)`` never changes the value.

    Exhaustive when ``m**(2n-1) <= exhaustive_limit``; otherwise random
    tuples are tested and the result carries ``sampled=True``.
    """
    n, m = table.arity, table.order
    width = 2 * n - 1
    total = m**width
    values = table.values
    if total <= exhaustive_limit:
        chunk = 1 << 20
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            d = _unflatten(idx, width, m)
            if not _assoc_block_ok(values, [d[:, k] for k in range(width)], n, m):
                return PropertyCheck(False, False)
        return PropertyCheck(True, False)
    rng = np.random.default_rng(seed)
    d = rng.integers(0, m, size=(samples, width))
    ok = _assoc_block_ok(values, [d[:, k] for k in range(width)], n, m)
    # a violation found by sampling is still a proof of non-associativity
    return PropertyCheck(ok, ok)


def check_homomorphism(
    src: OperationTable, dst: OperationTable, mapping: Sequence[int]
) -> HomomorphismCheck:
    """Test ``h(f(a)) == g(h(a))`` for all tuples, and NC preservation."""
    if src.arity != dst.arity:
        raise StructureError(f"arity mismatch: {src.arity} vs {dst.arity}")
    h = np.asarray(mapping, dtype=np.int64)
    if h.shape != (src.order,):
        raise StructureError(f"map has {h.size} entries, source order is {src.order}")
    if h.size and (h.min() < 0 or h.max() >= dst.order):
        raise StructureError("map sends an element outside the target")
    n = src.arity
    all_idx = np.arange(src.values.size, dtype=np.int64)
    digits = _unflatten(all_idx, n, src.order)
    mapped = h[digits]
    img_idx = np.zeros(all_idx.shape, dtype=np.int64)
    for k in range(n):
        img_idx = img_idx * dst.order + mapped[:, k]
    bad = np.flatnonzero(h[src.values] != dst.values[img_idx])
    if bad.size:
        witness = tuple(int(x) for x in digits[bad[0]])
        return HomomorphismCheck(False, False, witness)
    src_nc = noncommuting_mask(src)
    dst_nc = noncommuting_mask(dst)
    lost = np.flatnonzero(src_nc & ~dst_nc[img_idx])
    if lost.size:
        return HomomorphismCheck(True, False, tuple(int(x) for x in digits[lost[0]]))
    return HomomorphismCheck(True, True)
