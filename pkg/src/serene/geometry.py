"""Bipyramid charts on the open realization and the standard flat metric.

Coordinates ``u`` live in the open bipyramid spanned by the origin, the
point ``(2/n, ..., 2/n)`` and the unit vectors.  The half with ``sum(u) <= 1``
is mapped linearly onto one facet; the other half is first reflected across
the hyperplane ``sum(u) = 1`` and then mapped onto the neighbouring facet.

Every function accepts floats or exact rationals; passing ``Fraction`` (or
int) coordinates keeps the whole computation exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from .complex import INPUT, OUTPUT, Vertex
from .qcore import OperationTable, PreconditionError, divide

__all__ = [
    "DomainError",
    "RealizationPoint",
    "ReflectionCheck",
    "in_bipyramid",
    "mirror",
    "mirror_by_projection",
    "reflection_oracle",
    "swap_last_two",
    "output_partner",
    "chart_input",
    "chart_output",
    "metric_matrix",
    "exact_determinant",
    "exact_solve",
    "quadratic_form",
    "edge_length",
]


class DomainError(ValueError):
    """A chart was evaluated outside the open bipyramid."""


def _is_exact(u: Sequence) -> bool:
    return all(isinstance(x, Rational) for x in u)


def _coerce(u: Sequence, exact: bool | None):
    if exact is None:
        exact = _is_exact(u)
    return [Fraction(x) for x in u] if exact else [float(x) for x in u]


def mirror(u: Sequence) -> list:
    """Reflection across ``sum(u) = 1``, in closed form."""
    n = len(u)
    total = sum(u)
    if _is_exact(u):
        scale, half = Fraction(2, n), Fraction(n - 2, 2)
    else:
        scale, half = 2 / n, (n - 2) / 2
    return [scale * (1 + half * x - (total - x)) for x in u]


def exact_solve(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """Solve a square system by Gauss-Jordan elimination over the rationals."""
    n = len(matrix)
    rows = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular system")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        p = rows[col][col]
        rows[col] = [x / p for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[col])]
    return [rows[r][n] for r in range(n)]


def exact_determinant(matrix: Sequence[Sequence]) -> Fraction:
    rows = [[Fraction(x) for x in row] for row in matrix]
    n = len(rows)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        p = rows[col][col]
        det *= p
        for r in range(col + 1, n):
            factor = rows[r][col] / p
            if factor:
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[col])]
    return det


def _projection_system(u: Sequence):
    # w_i - w_n = u_i - u_n for i < n, and sum(w) = 1
    n = len(u)
    matrix = []
    rhs = []
    for i in range(n - 1):
        row = [0] * n
        row[i], row[n - 1] = 1, -1
        matrix.append(row)
        rhs.append(u[i] - u[n - 1])
    matrix.append([1] * n)
    rhs.append(1)
    return matrix, rhs


def mirror_by_projection(u: Sequence) -> list:
    """Reflection computed by projecting onto ``sum(w) = 1`` and taking ``2w - u``."""
    matrix, rhs = _projection_system(u)
    if _is_exact(u):
        w = exact_solve(matrix, rhs)
    else:
        w = np.linalg.solve(np.array(matrix, dtype=float), np.array(rhs, dtype=float)).tolist()
    return [2 * wi - ui for wi, ui in zip(w, u)]


@dataclass(frozen=True)
class ReflectionCheck:
    closed_form: tuple
    solved: tuple
    max_difference: float

    @property
    def agree(self) -> bool:
        return self.max_difference <= 1e-10


def reflection_oracle(u: Sequence) -> ReflectionCheck:
    """Mirror image of a point with ``sum(u) > 1``, computed two independent ways."""
    if not sum(u) > 1:
        raise DomainError(f"reflection is defined for sum(u) > 1, got {float(sum(u))}")
    a = mirror(u)
    b = mirror_by_projection(u)
    diff = max((abs(float(x - y)) for x, y in zip(a, b)), default=0.0)
    return ReflectionCheck(tuple(a), tuple(b), diff)


def in_bipyramid(u: Sequence) -> bool:
    """Membership in the open bipyramid."""
    if len(u) == 0:
        return False
    if sum(u) <= 1:
        return all(x > 0 for x in u)
    return all(x > 0 for x in mirror(u))


@dataclass(frozen=True)
class RealizationPoint:
    """Barycentric coefficients on the vertices of a face of the simplicization."""
    coefficients: dict[Vertex, float | Fraction]

    @property
    def support(self) -> frozenset[Vertex]:
        return frozenset(self.coefficients)

    @property
    def total(self):
        return sum(self.coefficients.values())

    def coefficient(self, tag: str, element: int):
        for v, x in self.coefficients.items():
            if v.tag == tag and v.element == element:
                return x
        return 0

    def to_json(self) -> dict:
        out = {}
        for v, x in self.coefficients.items():
            out[v.display()] = str(x) if isinstance(x, Fraction) else x
        return out


def _point(table: OperationTable, terms: list[tuple[str, int, object]]) -> RealizationPoint:
    coeffs: dict[Vertex, object] = {}
    for tag, element, x in terms:
        if x == 0:
            continue
        v = Vertex(tag, element, table.label(element))
        coeffs[v] = coeffs.get(v, 0) + x
    return RealizationPoint(coeffs)


def _check_chart_args(table: OperationTable, a: Sequence[int], u: Sequence):
    n = table.arity
    cert = table.cert
    if not (cert.latin and cert.alternating):
        raise PreconditionError("charts need an alternating quasigroup")
    if len(a) != n or len(u) != n:
        raise ValueError(f"tuple and coordinates must both have length {n}")
    a = tuple(int(x) for x in a)
    if n < 2 or table(*a) == table(*swap_last_two(a)):
        raise PreconditionError(f"tuple {a} commutes; charts are defined on noncommuting tuples")
    if not in_bipyramid(u):
        raise DomainError(f"point {[float(x) for x in u]} is outside the open bipyramid")
    return a


def swap_last_two(a: Sequence[int]) -> tuple[int, ...]:
    a = tuple(a)
    return a[:-2] + (a[-1], a[-2])


def output_partner(table: OperationTable, a: Sequence[int]) -> int:
    """The ``a_{n+1}`` with ``f(a_1..a_{n-2}, a_{n+1}, a_{n-1}) = f(a)``.

    For n = 2 this reads ``f(a_3, a_1) = f(a_1, a_2)``, a right division.
    """
    a = tuple(a)
    n = len(a)
    fixed = a[: n - 2] + (a[n - 2],)
    return divide(table, n - 1, fixed, table(*a))


def chart_input(table: OperationTable, a: Sequence[int], u: Sequence, exact: bool | None = None) -> RealizationPoint:
    u = _coerce(u, exact)
    a = _check_chart_args(table, a, u)
    s = sum(u)
    if s <= 1:
        terms = [(INPUT, x, ui) for x, ui in zip(a, u)] + [(OUTPUT, table(*a), 1 - s)]
    else:
        v = mirror(u)
        terms = [(INPUT, x, vi) for x, vi in zip(a, v)] + [(OUTPUT, table(*swap_last_two(a)), s - 1)]
    return _point(table, terms)


def chart_output(table: OperationTable, a: Sequence[int], u: Sequence, exact: bool | None = None) -> RealizationPoint:
    u = _coerce(u, exact)
    a = _check_chart_args(table, a, u)
    n = len(a)
    s = sum(u)
    y = table(*a)
    if s <= 1:
        terms = [(INPUT, a[i], u[i]) for i in range(n - 1)]
        terms += [(OUTPUT, y, u[n - 1]), (INPUT, a[n - 1], 1 - s)]
    else:
        v = mirror(u)
        terms = [(INPUT, a[i], v[i]) for i in range(n - 1)]
        terms += [(OUTPUT, y, v[n - 1]), (INPUT, output_partner(table, a), s - 1)]
    return _point(table, terms)


def metric_matrix(n: int) -> list[list[Fraction]]:
    """Gram matrix ``J_n + I_n`` of the edge vectors from the output vertex."""
    if n < 1:
        raise ValueError("n must be positive")
    return [[Fraction(1 + (i == j)) for j in range(n)] for i in range(n)]


def quadratic_form(matrix: Sequence[Sequence], x: Sequence):
    return sum(x[i] * matrix[i][j] * x[j] for i in range(len(x)) for j in range(len(x)))


def edge_length(n: int) -> float:
    """Common length of every edge of a facet under the standard metric."""
    g = metric_matrix(n)
    squares = set()
    for i in range(n):
        e = [0] * n
        e[i] = 1
        squares.add(quadratic_form(g, e))
        for j in range(i + 1, n):
            d = [0] * n
            d[i], d[j] = 1, -1
            squares.add(quadratic_form(g, d))
    (sq,) = squares
    return math.sqrt(sq)
