"""Exact coefficients (Z, Q, Q/Z) and sparse integer linear algebra.

Everything here is arbitrary precision.  The elimination loop behind
:func:`snf` is the hot path and comes from a compiled kernel when one was
built, otherwise from the pure-Python reference kernel.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, Sequence

from . import _snf_py

try:
    if os.environ.get("TRANSGRESS_PURE_PYTHON"):
        raise ImportError
    from . import _snf_ext as _kernel  # type: ignore[attr-defined]

    BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on build
    _kernel = _snf_py
    BACKEND = "python"


class DimensionMismatch(ValueError):
    pass


def frac_mod1(x) -> Fraction:
    """Reduce a rational into ``[0, 1)``."""
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True, order=True)
class CircleValue:
    """An element of Q/Z, stored by its representative in ``[0, 1)``."""

    value: Fraction

    def __init__(self, value=0):
        object.__setattr__(self, "value", frac_mod1(value))

    @classmethod
    def parse(cls, text: str) -> "CircleValue":
        return cls(Fraction(text))

    def __add__(self, other):
        return CircleValue(self.value + _as_frac(other))

    __radd__ = __add__

    def __sub__(self, other):
        return CircleValue(self.value - _as_frac(other))

    def __rsub__(self, other):
        return CircleValue(_as_frac(other) - self.value)

    def __neg__(self):
        return CircleValue(-self.value)

    def __mul__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        return CircleValue(self.value * n)

    __rmul__ = __mul__

    def __bool__(self):
        return self.value != 0

    def order(self) -> int:
        return self.value.denominator

    def __str__(self):
        v = self.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"

    __repr__ = lambda self: f"CircleValue({self})"


def _as_frac(x) -> Fraction:
    if isinstance(x, CircleValue):
        return x.value
    return Fraction(x)


def canonical_lift(c) -> Fraction:
    """The representative ``r`` of ``c`` with ``0 <= r < 1``."""
    return frac_mod1(_as_frac(c))


class IntMatrix:
    """Sparse integer matrix, one ``{col: value}`` dict per row.

    Treated as immutable once constructed.
    """

    __slots__ = ("nrows", "ncols", "_rows", "__dict__")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[dict] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = [{} for _ in range(nrows)]
        if len(rows) != nrows:
            raise DimensionMismatch("row count does not match")
        clean = []
        for row in rows:
            d = {}
            for c, v in row.items():
                if not 0 <= c < ncols:
                    raise DimensionMismatch(f"column {c} out of range")
                v = int(v)
                if v:
                    d[c] = v
            clean.append(d)
        self._rows = clean

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[int]], ncols: int | None = None) -> "IntMatrix":
        data = [list(r) for r in data]
        if ncols is None:
            ncols = len(data[0]) if data else 0
        for r in data:
            if len(r) != ncols:
                raise DimensionMismatch("ragged dense matrix")
        return cls(len(data), ncols, [{c: v for c, v in enumerate(r) if v} for r in data])

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, [{i: 1} for i in range(n)])

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def row(self, i: int) -> dict:
        return self._rows[i]

    def rows(self):
        return self._rows

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for i, row in enumerate(self._rows):
            for c, v in row.items():
                out[i][c] = v
        return out

    def transpose(self) -> "IntMatrix":
        cols = [{} for _ in range(self.ncols)]
        for i, row in enumerate(self._rows):
            for c, v in row.items():
                cols[c][i] = v
        return IntMatrix(self.ncols, self.nrows, cols)

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.ncols != other.nrows:
                raise DimensionMismatch("inner dimensions differ")
            out = []
            for row in self._rows:
                acc: dict = {}
                for k, v in row.items():
                    for c, w in other._rows[k].items():
                        acc[c] = acc.get(c, 0) + v * w
                out.append(acc)
            return IntMatrix(self.nrows, other.ncols, out)
        return self.apply(other)

    def apply(self, vec: Sequence) -> list:
        """Matrix-vector product; entries of ``vec`` may be any ring elements."""
        if len(vec) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(vec)} for {self.shape} matrix")
        return [sum((v * vec[c] for c, v in row.items()), 0) for row in self._rows]

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.shape == other.shape and self._rows == other._rows

    def __repr__(self):
        return f"IntMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"

    def determinant(self) -> int:
        """Bareiss fraction-free determinant (square matrices only)."""
        if self.nrows != self.ncols:
            raise DimensionMismatch("determinant of non-square matrix")
        n = self.nrows
        m = self.to_dense()
        sign, prev = 1, 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for r in range(k + 1, n):
                    if m[r][k]:
                        m[k], m[r] = m[r], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1] if n else 1


class SnfDecomposition:
    """``U @ A @ V == S`` with ``S`` diagonal and a divisibility chain.

    ``U`` and ``V`` are kept as elementary-operation logs and only
    materialized on request, since solving never needs them densely.
    """

    def __init__(self, matrix: IntMatrix, pivots, rowops, colops):
        self.matrix = matrix
        self.pivots = pivots
        self._rowops = rowops
        self._colops = colops
        pr = [i for i, _, _ in pivots]
        pc = [j for _, j, _ in pivots]
        seen_r, seen_c = set(pr), set(pc)
        self.row_order = pr + [i for i in range(matrix.nrows) if i not in seen_r]
        self.col_order = pc + [j for j in range(matrix.ncols) if j not in seen_c]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def diagonal(self) -> list[int]:
        return [d for _, _, d in self.pivots]

    def apply_left(self, vec: Sequence) -> list:
        """``U @ vec`` in the original row indexing (before permutation)."""
        v = list(vec)
        for k, i, q in self._rowops:
            if i is None:
                v[k] = -v[k]
            else:
                v[k] = v[k] + q * v[i]
        return v

    def apply_right(self, vec: Sequence) -> list:
        """``V @ vec`` where ``vec`` is indexed by original column."""
        v = list(vec)
        for l, j, q in reversed(self._colops):
            v[j] = v[j] + q * v[l]
        return v

    @cached_property
    def U(self) -> IntMatrix:
        n = self.matrix.nrows
        rows = [{i: 1} for i in range(n)]
        for k, i, q in self._rowops:
            if i is None:
                rows[k] = {c: -v for c, v in rows[k].items()}
            else:
                acc = dict(rows[k])
                for c, v in rows[i].items():
                    acc[c] = acc.get(c, 0) + q * v
                rows[k] = {c: v for c, v in acc.items() if v}
        return IntMatrix(n, n, [rows[i] for i in self.row_order])

    @cached_property
    def V(self) -> IntMatrix:
        n = self.matrix.ncols
        cols = [{j: 1} for j in range(n)]
        for l, j, q in self._colops:
            acc = dict(cols[l])
            for r, v in cols[j].items():
                acc[r] = acc.get(r, 0) + q * v
            cols[l] = {r: v for r, v in acc.items() if v}
        out = [{} for _ in range(n)]
        for newc, oldc in enumerate(self.col_order):
            for r, v in cols[oldc].items():
                out[r][newc] = v
        return IntMatrix(n, n, out)

    @cached_property
    def S(self) -> IntMatrix:
        rows = [{} for _ in range(self.matrix.nrows)]
        for t, d in enumerate(self.diagonal):
            rows[t][t] = d
        return IntMatrix(self.matrix.nrows, self.matrix.ncols, rows)


def snf(a: IntMatrix) -> SnfDecomposition:
    """Smith normal form with the smallest-entry pivot rule.

    Ties between equal absolute values go to the lowest ``(row, col)``.
    """
    rows = [dict(r) for r in a.rows()]
    pivots, rowops, colops = _kernel.eliminate(rows, a.ncols)
    return SnfDecomposition(a, pivots, rowops, colops)


def snf_python(a: IntMatrix) -> SnfDecomposition:
    rows = [dict(r) for r in a.rows()]
    return SnfDecomposition(a, *_snf_py.eliminate(rows, a.ncols))


def _as_decomp(a) -> SnfDecomposition:
    return a if isinstance(a, SnfDecomposition) else snf(a)


def solve_integer(a, b: Sequence[int]) -> list[int] | None:
    """Integer solution of ``A x = b``, or ``None`` when none exists.

    ``a`` may be an :class:`IntMatrix` or a precomputed decomposition.
    """
    dec = _as_decomp(a)
    A = dec.matrix
    if len(b) != A.nrows:
        raise DimensionMismatch(f"rhs of length {len(b)} for {A.shape} matrix")
    ub = dec.apply_left([int(x) for x in b])
    y = [0] * A.ncols
    pivot_rows = set()
    for i, j, d in dec.pivots:
        pivot_rows.add(i)
        qt, r = divmod(ub[i], d)
        if r:
            return None
        y[j] = qt
    for i in range(A.nrows):
        if i not in pivot_rows and ub[i]:
            return None
    x = dec.apply_right(y)
    assert A.apply(x) == list(b)
    return x


def solve_mod1(a, b: Sequence) -> list[Fraction] | None:
    """Solve ``A x = b`` in Q/Z; returns representatives in ``[0, 1)``.

    Q/Z is divisible, so pivot equations always solve; only the rows past
    the rank carry an obstruction.  The particular solution divides the
    transformed right-hand side by the elementary divisors, so it may have
    larger denominators than ``b`` (``2x = 1/2`` gives ``x = 1/4``).
    """
    dec = _as_decomp(a)
    A = dec.matrix
    if len(b) != A.nrows:
        raise DimensionMismatch(f"rhs of length {len(b)} for {A.shape} matrix")
    ub = [frac_mod1(x) for x in dec.apply_left([_as_frac(x) for x in b])]
    y = [Fraction(0)] * A.ncols
    pivot_rows = set()
    for i, j, d in dec.pivots:
        pivot_rows.add(i)
        y[j] = ub[i] / d
    for i in range(A.nrows):
        if i not in pivot_rows and ub[i]:
            return None
    x = [frac_mod1(v) for v in dec.apply_right(y)]
    assert all(frac_mod1(u - _as_frac(w)) == 0 for u, w in zip(A.apply(x), b))
    return x


def common_denominator(values: Iterable) -> int:
    n = 1
    for v in values:
        n = lcm(n, _as_frac(v).denominator)
    return n
