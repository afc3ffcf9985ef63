"""Builders for the example quasigroups: the order-5 ternary table,
alternating products (including field quasigroups and the order-6 product),
and classical group tables.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .qcore import (
    OperationTable,
    PreconditionError,
    StructureError,
    _unflatten,
    alt_orbit,
    even_permutations,
    is_commutative,
)

__all__ = [
    "AltMapTable",
    "ORDER5_REPRESENTATIVES",
    "construct_order5",
    "alternating_product",
    "order6_inputs",
    "construct_order6",
    "field_tables",
    "field_quasigroup",
    "general_linear_order",
    "field_orbit_count_readings",
    "sum_quasigroup",
    "quaternion_group",
    "cyclic_group",
    "dihedral_group",
    "builtin",
    "builtin_names",
]

# Orbit representatives of the Z/5 x alt_3 action and their values.
ORDER5_REPRESENTATIVES: dict[tuple[int, int, int], int] = {
    (0, 0, 0): 0,
    (0, 1, 1): 0,
    (0, 2, 2): 0,
    (0, 1, 2): 3,
    (0, 2, 1): 4,
    (0, 1, 3): 4,
    (0, 3, 1): 2,
}

# F_9 is modelled as F_3[t]/(t^2 + 1); a + b t is stored as a + 3 b.
F9_MODULUS = "t^2 + 1"

MAX_TABLE_ENTRIES = 2 * 10**7


@dataclass(frozen=True, eq=False)
class AltMapTable:
    """An n-ary map ``U^n -> V`` stored in the same flat layout as a table."""

    arity: int
    domain_order: int
    codomain_order: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.int64)
        if vals.shape != (self.domain_order**self.arity,):
            raise StructureError(
                f"alternating map needs {self.domain_order**self.arity} values, got {vals.size}"
            )
        if vals.size and (vals.min() < 0 or vals.max() >= self.codomain_order):
            raise StructureError("alternating map value outside codomain")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, arity, domain_order, codomain_order, func) -> AltMapTable:
        vals = [func(t) for t in itertools.product(range(domain_order), repeat=arity)]
        return cls(arity, domain_order, codomain_order, np.array(vals, dtype=np.int64))

    def is_alternating(self) -> bool:
        cube = self.values.reshape((self.domain_order,) * self.arity)
        return all(np.array_equal(cube, np.transpose(cube, p)) for p in even_permutations(self.arity))


def _order5_orbit_key(t: tuple[int, ...]) -> tuple[int, ...]:
    return min(tuple((x + k) % 5 for x in img) for k in range(5) for img in alt_orbit(t))


def _close_order5(reps: dict[tuple[int, ...], int]) -> dict[tuple[int, ...], int]:
    values: dict[tuple[int, ...], int] = {}
    for rep, val in reps.items():
        for k in range(5):
            for img in alt_orbit(rep):
                t = tuple((x + k) % 5 for x in img)
                v = (val + k) % 5
                if values.setdefault(t, v) != v:
                    raise RuntimeError(f"orbit closure clash at {t}")
    return values


def construct_order5() -> OperationTable:
    """The ternary alternating quasigroup of order 5 generated from seven values.

    The table is closed under ``f(x_s(1)+k, x_s(2)+k, x_s(3)+k) = f(x) + k`` for
    even ``s``.  The seven listed representatives reach only 95 of the 125
    triples; the orbits of (0,3,3) and (0,4,4) are left open, and they are
    filled with the single assignment that keeps the table Latin.  A clash,
    or zero or several Latin fillings, raises.
    """
    values = _close_order5(ORDER5_REPRESENTATIVES)
    missing = sorted(
        {_order5_orbit_key(t) for t in itertools.product(range(5), repeat=3) if t not in values}
    )
    fillings = []
    for choice in itertools.product(range(5), repeat=len(missing)):
        reps = dict(ORDER5_REPRESENTATIVES)
        reps.update(zip(missing, choice))
        try:
            full = _close_order5(reps)
        except RuntimeError:
            continue
        if len(full) != 125:
            continue
        table = OperationTable.from_function(3, 5, lambda *t, full=full: full[t])
        if table.cert.latin:
            fillings.append(table)
    if len(fillings) != 1:
        raise RuntimeError(f"{len(fillings)} Latin fillings of the open orbits {missing}")
    table = fillings[0]
    for rep, val in ORDER5_REPRESENTATIVES.items():
        if table(*rep) != val:
            raise RuntimeError(f"representative {rep} lost its value")
    return table


def alternating_product(U: OperationTable, V: OperationTable, alpha: AltMapTable) -> OperationTable:
    """``U`` boxtimes_alpha ``V`` on pairs, encoded ``(u, v) -> u*|V| + v``.

    ``f((u_1,v_1),...,(u_n,v_n)) = (g(u), h(alpha(u), v_1, ..., v_n))``.
    """
    n = U.arity
    if V.arity != n + 1:
        raise PreconditionError(f"V must have arity {n + 1}, has {V.arity}")
    if alpha.arity != n or alpha.domain_order != U.order or alpha.codomain_order != V.order:
        raise PreconditionError("alternating map shape does not match U^n -> V")
    for name, q in (("U", U), ("V", V)):
        if not q.cert.latin:
            raise PreconditionError(f"{name} is not a quasigroup")
        if not is_commutative(q):
            raise PreconditionError(f"{name} is not commutative")
    if not alpha.is_alternating():
        raise PreconditionError("alpha is not an alternating map")
    p, r = U.order, V.order
    order = p * r
    if order**n > MAX_TABLE_ENTRIES:
        raise ValueError(f"product table would have {order**n} entries")
    digits = _unflatten(np.arange(order**n, dtype=np.int64), n, order)
    u, v = digits // r, digits % r
    u_idx = np.zeros(digits.shape[0], dtype=np.int64)
    for k in range(n):
        u_idx = u_idx * p + u[:, k]
    a = alpha.values[u_idx]
    h_idx = a.copy()
    for k in range(n):
        h_idx = h_idx * r + v[:, k]
    vals = U.values[u_idx] * r + V.values[h_idx]
    labels = [f"{U.label(x)}|{V.label(y)}" for x in range(p) for y in range(r)]
    return OperationTable(n, order, vals, labels)


def sum_quasigroup(m: int, arity: int) -> OperationTable:
    """The commutative quasigroup ``(x_1, ..., x_n) -> sum x_i mod m``."""
    digits = _unflatten(np.arange(m**arity, dtype=np.int64), arity, m)
    return OperationTable(arity, m, digits.sum(axis=1) % m)


def order6_inputs() -> tuple[OperationTable, OperationTable, AltMapTable]:
    """Z/3 (sum of three), Z/2 (sum of four), and the indicator of the
    alt_3-orbit of (0, 2, 1)."""
    U = sum_quasigroup(3, 3)
    V = sum_quasigroup(2, 4)
    marked = alt_orbit((0, 2, 1))
    alpha = AltMapTable.from_function(3, 3, 2, lambda t: int(t in marked))
    return U, V, alpha


def construct_order6() -> OperationTable:
    U, V, alpha = order6_inputs()
    return alternating_product(U, V, alpha)


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


def field_tables(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Addition and multiplication tables of F_q for odd q <= 9."""
    if q % 2 == 0 or q > 9 or q < 3:
        raise ValueError(f"q must be an odd prime power <= 9, got {q}")
    if _is_prime(q):
        x = np.arange(q)
        return (x[:, None] + x[None, :]) % q, (x[:, None] * x[None, :]) % q
    if q != 9:
        raise ValueError(f"q must be an odd prime power <= 9, got {q}")
    add = np.empty((9, 9), dtype=np.int64)
    mul = np.empty((9, 9), dtype=np.int64)
    for x in range(9):
        a, b = x % 3, x // 3
        for y in range(9):
            c, d = y % 3, y // 3
            add[x, y] = (a + c) % 3 + 3 * ((b + d) % 3)
            # (a + b t)(c + d t) with t^2 = -1
            mul[x, y] = (a * c - b * d) % 3 + 3 * ((a * d + b * c) % 3)
    return add, mul


def _field_det(cols: np.ndarray, add: np.ndarray, mul: np.ndarray, q: int) -> np.ndarray:
    """Leibniz determinant over F_q; ``cols`` has shape (N, n, n) with
    ``cols[:, j, i]`` the i-th coordinate of the j-th column."""
    from .qcore import permutation_parity

    N, n, _ = cols.shape
    neg = np.argmin(add, axis=1)  # additive inverse: the column where add[x, y] == 0
    total = np.zeros(N, dtype=np.int64)
    for perm in itertools.permutations(range(n)):
        term = np.ones(N, dtype=np.int64)
        for j in range(n):
            term = mul[term, cols[:, j, perm[j]]]
        if permutation_parity(perm) < 0:
            term = neg[term]
        total = add[total, term]
    return total


def field_quasigroup(q: int, n: int) -> OperationTable:
    """``F_q^(n)``: vector sum on ``F_q^n`` boxtimes_det scalar sum on ``F_q``.

    Vectors ``u in F_q^n`` are encoded in base q with the first coordinate
    most significant; pairs ``(u, v)`` as ``u*q + v``.
    """
    if n < 1 or n > 3:
        raise ValueError(f"arity must be 1..3, got {n}")
    add, mul = field_tables(q)
    p = q**n
    if (p * q) ** n > MAX_TABLE_ENTRIES:
        raise ValueError(f"F_{q}^({n}) has {(p * q) ** n} table entries; too large to materialize")
    vec = _unflatten(np.arange(p, dtype=np.int64), n, q)  # vec[u] = coordinates of u

    def vec_index(coords: np.ndarray) -> np.ndarray:
        idx = np.zeros(coords.shape[0], dtype=np.int64)
        for k in range(n):
            idx = idx * q + coords[:, k]
        return idx

    tuples = _unflatten(np.arange(p**n, dtype=np.int64), n, p)
    cols = vec[tuples]  # (N, n columns, n coords)
    acc = cols[:, 0, :].copy()
    for j in range(1, n):
        acc = add[acc, cols[:, j, :]]
    U = OperationTable(n, p, vec_index(acc))
    alpha = AltMapTable(n, p, q, _field_det(cols, add, mul, q))
    vt = _unflatten(np.arange(q ** (n + 1), dtype=np.int64), n + 1, q)
    s = vt[:, 0].copy()
    for j in range(1, n + 1):
        s = add[s, vt[:, j]]
    V = OperationTable(n + 1, q, s)
    return alternating_product(U, V, alpha)


def general_linear_order(q: int, n: int) -> int:
    """Number of invertible n x n matrices over F_q, by testing every matrix."""
    add, mul = field_tables(q)
    entries = _unflatten(np.arange(q ** (n * n), dtype=np.int64), n * n, q)
    dets = _field_det(entries.reshape(-1, n, n), add, mul, q)
    return int(np.count_nonzero(dets))


def field_orbit_count_readings(q: int, n: int) -> dict[str, Fraction]:
    """The closed form ``(2 q^n / n!) prod_k (q^n - q^k)`` for the NC-graph
    vertex count of ``F_q^(n)``, with the product starting at k = 1 and at k = 0.

    Only the k = 0 reading contains the full ``|GL_n(F_q)|``.
    """
    lead = Fraction(2 * q**n, math.factorial(n))
    return {
        "k_from_1": lead * math.prod(q**n - q**k for k in range(1, n)),
        "k_from_0": lead * math.prod(q**n - q**k for k in range(0, n)),
    }


_Q8_LABELS = ("1", "-1", "i", "-i", "j", "-j", "k", "-k")
# unit products: _UNIT[a][b] = (sign, unit) for units 1, i, j, k
_UNIT = [
    [(1, 0), (1, 1), (1, 2), (1, 3)],
    [(1, 1), (-1, 0), (1, 3), (-1, 2)],
    [(1, 2), (-1, 3), (-1, 0), (1, 1)],
    [(1, 3), (1, 2), (-1, 1), (-1, 0)],
]


def quaternion_group() -> OperationTable:
    """Q8 with elements ordered 1, -1, i, -i, j, -j, k, -k."""

    def mul(x, y):
        sx, ux = (-1 if x % 2 else 1), x // 2
        sy, uy = (-1 if y % 2 else 1), y // 2
        s, u = _UNIT[ux][uy]
        s *= sx * sy
        return 2 * u + (1 if s < 0 else 0)

    return OperationTable.from_function(2, 8, mul, _Q8_LABELS)


def cyclic_group(m: int) -> OperationTable:
    return OperationTable.from_function(2, m, lambda x, y: (x + y) % m)


def dihedral_group(m: int) -> OperationTable:
    """Dihedral group of order 2m; ``r^a s^b`` is stored as ``a + m*b``."""

    def mul(x, y):
        a, b = x % m, x // m
        c, d = y % m, y // m
        # r^a s^b r^c s^d = r^(a + (-1)^b c) s^(b+d)
        return (a + (c if b == 0 else -c)) % m + m * ((b + d) % 2)

    labels = [f"r{a}" if b == 0 else f"r{a}s" for b in range(2) for a in range(m)]
    return OperationTable.from_function(2, 2 * m, mul, labels)


def _trivial() -> OperationTable:
    return OperationTable(2, 1, np.zeros(1, dtype=np.int64))


_REGISTRY: dict[str, Callable[[], OperationTable]] = {
    "q8": quaternion_group,
    "a5": construct_order5,
    "a6": construct_order6,
    "trivial": _trivial,
}


def builtin_names() -> list[str]:
    return sorted(_REGISTRY) + ["field:q,n", "z<m>", "d<m>", "sum:m,n"]


def builtin(name: str) -> OperationTable:
    """Look up a bundled table by name.

    Besides the fixed names, ``field:q,n`` builds ``F_q^(n)``, ``z<m>`` the
    cyclic group, ``d<m>`` the dihedral group of order 2m and ``sum:m,n`` the
    commutative n-ary sum quasigroup mod m.
    """
    key = name.strip().lower()
    if key in _REGISTRY:
        return _REGISTRY[key]()
    try:
        if key.startswith("field:"):
            q, n = (int(s) for s in key[6:].split(","))
            return field_quasigroup(q, n)
        if key.startswith("sum:"):
            m, n = (int(s) for s in key[4:].split(","))
            return sum_quasigroup(m, n)
        if key.startswith("z") and key[1:].isdigit():
            return cyclic_group(int(key[1:]))
        if key.startswith("d") and key[1:].isdigit():
            return dihedral_group(int(key[1:]))
    except ValueError as exc:
        raise KeyError(f"bad parameters in {name!r}: {exc}") from None
    raise KeyError(f"unknown example {name!r}; available: {', '.join(builtin_names())}")
