"""Two-operation terms, their expansion into algebras with a derivation, and the checks built on it.

``a > b`` stands for ``d(a) b`` and ``a < b`` for ``a d(b)``; :func:`tau` expands a
``>``/``<`` term accordingly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, List, Tuple, Union

from .errors import PairMismatch
from .linalg import PreimageSolver, echelonize
from .terms import (
    PREC,
    PRODUCT,
    SUCC,
    Expr,
    Generator,
    Monomial,
    Node,
    as_expr,
    derive_monomial,
    enumerate_trees,
)
from .varieties import (
    VarietySpec,
    catalog,
    component,
    consequence_basis,
    dim_variety,
    instantiate,
)

DiMonomial = Monomial
DiExpr = Expr


def _tau_monomial(t: Monomial) -> Dict[Monomial, int]:
    if isinstance(t, Generator):
        return {t: 1}
    left = _tau_monomial(t.left)
    right = _tau_monomial(t.right)
    if t.op == SUCC:
        left = _derive_map(left)
    elif t.op == PREC:
        right = _derive_map(right)
    out: Dict[Monomial, int] = {}
    for u, cu in left.items():
        for v, cv in right.items():
            m = Node(u, v, PRODUCT)
            out[m] = out.get(m, 0) + cu * cv
    return out


def _derive_map(terms: Dict[Monomial, int]) -> Dict[Monomial, int]:
    out: Dict[Monomial, int] = {}
    for m, c in terms.items():
        for t, k in derive_monomial(m).items():
            out[t] = out.get(t, 0) + c * k
    return out


@lru_cache(maxsize=65536)
def tau_monomial(t: Monomial) -> Expr:
    return Expr(_tau_monomial(t))


def tau(t: Union[Expr, Monomial]) -> Expr:
    """Expand a ``>``/``<`` term into the free algebra with a derivation."""
    acc: Dict[Monomial, Fraction] = {}
    for m, c in as_expr(t)._terms.items():
        for u, k in tau_monomial(m)._terms.items():
            acc[u] = acc.get(u, 0) + c * k
    return Expr(acc)


def enumerate_di_monomials(n: int) -> List[Monomial]:
    """All multilinear ``>``/``<`` trees of arity ``n`` in canonical order."""
    return enumerate_trees(n, (SUCC, PREC))


@dataclass
class ExpansionMatrix:
    variety: str
    n: int
    columns: List[Monomial]
    vectors: List[Dict[int, Fraction]]
    size: int

    @property
    def rank(self) -> int:
        return echelonize(self.vectors, self.size).rank


@lru_cache(maxsize=None)
def expansion_matrix(name: str, n: int) -> ExpansionMatrix:
    """Column ``j`` holds the quotient coordinates of ``tau`` of the ``j``-th di-monomial."""
    v = catalog(name)
    if v.num_ops != 1:
        raise ValueError(f"{v.name} is already a two-operation variety")
    comp = component(v.name, n, -1)
    cols = enumerate_di_monomials(n)
    vecs = [comp.sparse_coordinates(tau_monomial(t)) for t in cols]
    return ExpansionMatrix(v.name, n, cols, vecs, comp.dim)


@lru_cache(maxsize=None)
def dim_dervar(name: str, n: int) -> int:
    return expansion_matrix(catalog(name).name, n).rank


@lru_cache(maxsize=None)
def expansion_solver(name: str, n: int) -> PreimageSolver:
    m = expansion_matrix(catalog(name).name, n)
    return PreimageSolver(m.vectors, m.size)


def criterion_data(name: str, n: int) -> Tuple[int, int]:
    """``(rank of the expansion matrix, dim of the weight -1 component)``."""
    name = catalog(name).name
    return dim_dervar(name, n), component(name, n, -1).dim


def check_weight_criterion(name: Union[str, VarietySpec], n: int) -> bool:
    rank, dim = criterion_data(catalog(name).name, n)
    return rank == dim


def hadamard_dim(name: str, n: int) -> int:
    """``dim Var(n) * dim Nov(n)``."""
    return dim_variety(name, n) * comb(2 * n - 2, n - 1)


@dataclass
class DiIdentityReport:
    derived: str
    base: str
    identity_coordinates: List[Tuple[str, Dict[int, Fraction]]] = field(default_factory=list)
    span_dim: int = 0
    expected_span_dim: int = 0
    span_in_kernel: bool = False

    @property
    def identities_vanish(self) -> bool:
        return all(not coords for _, coords in self.identity_coordinates)

    @property
    def kernel_matches(self) -> bool:
        return self.span_dim == self.expected_span_dim

    @property
    def ok(self) -> bool:
        return self.identities_vanish and self.kernel_matches and self.span_in_kernel


def check_di_identities(dv: Union[str, VarietySpec], base: Union[str, VarietySpec, None] = None) -> DiIdentityReport:
    """Expand every identity of a derived variety inside its base variety at arity 3."""
    dv = catalog(dv)
    if dv.num_ops != 2:
        raise PairMismatch(f"{dv.name} is not a two-operation variety")
    base = catalog(base if base is not None else dv.base)
    if dv.base != base.name:
        raise PairMismatch(f"{dv.name} is derived from {dv.base}, not {base.name}")
    comp = component(base.name, 3, -1)
    report = DiIdentityReport(dv.name, base.name)
    args = [Generator(1), Generator(2), Generator(3)]
    for ident in dv.identities:
        report.identity_coordinates.append((ident.label, comp.sparse_coordinates(tau(instantiate(ident, args)))))
    span = consequence_basis(dv.name, 3)
    report.span_dim = span.rank
    report.expected_span_dim = len(span.ambient) - dim_dervar(base.name, 3)
    report.span_in_kernel = all(
        not comp.sparse_coordinates(tau(Expr({span.ambient[k]: x for k, x in row.items()}))) for row in span.rows
    )
    return report


def permute_di(t: Monomial, perm: Dict[int, int]) -> Monomial:
    from .terms import relabel

    return relabel(t, perm)


def novikov_check() -> List[Tuple[str, bool]]:
    """Each Novikov identity with its product read as ``<`` must vanish in Com at arity 3."""
    from .terms import with_op

    comp = component("Com", 3, -1)
    args = [Generator(1), Generator(2), Generator(3)]
    out = []
    for ident in catalog("Nov").identities:
        rel = Expr((with_op(m, PREC), c) for m, c in instantiate(ident, args))
        out.append((ident.label, comp.is_zero(tau(rel))))
    return out


def all_permutations(n: int):
    return [dict(zip(range(1, n + 1), p)) for p in itertools.permutations(range(1, n + 1))]
