"""Exact rational row reduction over an indexed ambient basis.

Rows are sparse ``{column: value}`` dicts.  Elimination runs fraction-free on
integer rows (cross multiplication plus content division), and only the final
reduced row-echelon form is expressed with :class:`~fractions.Fraction`.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Mapping, Optional, Sequence, Union

from .errors import DimensionMismatch, NotInImage

SparseVec = Dict[int, Fraction]
VectorLike = Union[Mapping[int, object], Sequence[object]]


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def to_sparse(v: VectorLike, size: Optional[int] = None) -> SparseVec:
    """Normalize a dense sequence or sparse mapping into a sparse Fraction dict."""
    if isinstance(v, Mapping):
        out = {}
        for k, x in v.items():
            if size is not None and not 0 <= k < size:
                raise DimensionMismatch(f"index {k} outside ambient of size {size}")
            x = Fraction(x)
            if x:
                out[k] = x
        return out
    if size is not None and len(v) != size:
        raise DimensionMismatch(f"vector of length {len(v)} against ambient of size {size}")
    return {i: Fraction(x) for i, x in enumerate(v) if x}


def _integer_row(v: Mapping[int, Fraction]) -> Dict[int, int]:
    den = 1
    for x in v.values():
        den = _lcm(den, x.denominator)
    row = {k: int(x * den) for k, x in v.items()}
    return _primitive(row)


def _scaled_int(v: Mapping[int, Fraction]):
    den = 1
    for x in v.values():
        den = _lcm(den, x.denominator)
    return {k: int(x * den) for k, x in v.items()}, den


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    g = 0
    for x in row.values():
        g = gcd(g, x)
        if g == 1:
            return row
    if g > 1:
        for k in row:
            row[k] //= g
    return row


def _reduce_int(row: Dict[int, int], pivots: Dict[int, Dict[int, int]]) -> Dict[int, int]:
    """Eliminate every pivot column from ``row`` (in place, integer arithmetic)."""
    heap = [c for c in row if c in pivots]
    heapq.heapify(heap)
    while heap:
        c = heapq.heappop(heap)
        a = row.get(c)
        if a is None:
            continue
        prow = pivots[c]
        p = prow[c]
        g = gcd(a, p)
        ma, mp = p // g, a // g
        if ma != 1:
            for k in row:
                row[k] *= ma
        for k, x in prow.items():
            nv = row.get(k, 0) - mp * x
            if nv:
                if k not in row and k in pivots:
                    heapq.heappush(heap, k)
                row[k] = nv
            else:
                row.pop(k, None)
        _primitive(row)
    return row


@dataclass
class SpanBasis:
    """Reduced row-echelon basis of a span inside an indexed ambient list."""

    ambient: list
    rows: List[SparseVec] = field(default_factory=list)
    pivot_columns: List[int] = field(default_factory=list)

    def __post_init__(self):
        self._pivot_row = {c: i for i, c in enumerate(self.pivot_columns)}
        self._index = None

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def size(self) -> int:
        return len(self.ambient)

    def index(self):
        """Map ambient element -> column."""
        if self._index is None:
            self._index = {m: i for i, m in enumerate(self.ambient)}
        return self._index

    def reduce(self, v: VectorLike) -> SparseVec:
        """Remainder of ``v`` after clearing every pivot column."""
        v = to_sparse(v, self.size)
        out = dict(v)
        for c, x in v.items():
            i = self._pivot_row.get(c)
            if i is None:
                continue
            for k, y in self.rows[i].items():
                nv = out.get(k, 0) - x * y
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
        return out

    def nonpivot_columns(self) -> List[int]:
        piv = self._pivot_row
        return [c for c in range(self.size) if c not in piv]


def echelonize(vectors: Sequence[VectorLike], ambient: Union[list, int]) -> SpanBasis:
    """Reduced row-echelon basis of ``span(vectors)``.

    ``ambient`` is the list indexing the columns (or just its length).
    """
    if isinstance(ambient, int):
        ambient = list(range(ambient))
    size = len(ambient)
    pivots: Dict[int, Dict[int, int]] = {}
    for v in vectors:
        sv = to_sparse(v, size)
        if not sv:
            continue
        row = _reduce_int(_integer_row(sv), pivots)
        if row:
            pivots[min(row)] = row
    return _finish(pivots, ambient)


def _finish(pivots: Dict[int, Dict[int, int]], ambient: list) -> SpanBasis:
    order = sorted(pivots)
    done: Dict[int, Dict[int, int]] = {}
    # back substitution, last pivot first
    for c in reversed(order):
        row = dict(pivots[c])
        others = {k: done[k] for k in row if k != c and k in done}
        if others:
            row = _reduce_int(row, others)
        if row[c] < 0:
            row = {k: -x for k, x in row.items()}
        done[c] = row
    rows = []
    for c in order:
        row = done[c]
        p = row[c]
        rows.append({k: Fraction(x, p) for k, x in sorted(row.items())})
    return SpanBasis(list(ambient), rows, order)


def contains(b: SpanBasis, v: VectorLike) -> bool:
    return not b.reduce(v)


class PreimageSolver:
    """Solve ``sum c_i * columns[i] = target`` with free variables set to zero.

    A column becomes a pivot variable when it is independent of the columns
    before it; solutions are supported on pivot variables only.
    """

    def __init__(self, columns: Sequence[VectorLike], size: int):
        self.size = size
        self.ncols = len(columns)
        self._tag = size  # tag columns start here
        self._pivots: Dict[int, Dict[int, int]] = {}
        self.pivot_variables: List[int] = []
        for j, col in enumerate(columns):
            sv = to_sparse(col, size)
            if not sv:
                continue
            # invariant per stored row: main part + sum(tag_j * column_j) == 0
            row, den = _scaled_int(sv)
            row[self._tag + 1 + j] = -den
            red = _reduce_int(row, self._pivots)
            lead = min(red)
            if lead < self.size:
                self._pivots[lead] = red
                self.pivot_variables.append(j)

    @property
    def rank(self) -> int:
        return len(self.pivot_variables)

    def solve(self, target: VectorLike) -> List[Fraction]:
        st = to_sparse(target, self.size)
        out = [Fraction(0)] * self.ncols
        if not st:
            return out
        row, den = _scaled_int(st)
        row[self._tag] = -den
        red = _reduce_int(row, self._pivots)
        if not red or min(red) < self.size:
            raise NotInImage("target is not in the span of the columns")
        t = red[self._tag]
        for k, x in red.items():
            if k > self._tag:
                out[k - self._tag - 1] = Fraction(-x, t)
        return out


def solve_preimage(columns: Sequence[VectorLike], target: VectorLike, size: Optional[int] = None) -> List[Fraction]:
    """Canonical preimage coefficients; raises :class:`NotInImage` when inconsistent."""
    if size is None:
        if isinstance(target, Mapping):
            raise DimensionMismatch("size is required for sparse input")
        size = len(target)
    return PreimageSolver(columns, size).solve(target)
