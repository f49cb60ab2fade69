"""Defining identities of the varieties in scope and their multilinear consequences.

The quotient of the weight-``w`` multilinear component by the consequences of a
variety's identities is computed block-wise: a decoration vector (derivation
order per variable) never changes under the identities, so the decorated
consequence space is one copy of the underived consequence space per vector.
"""
from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import ArityMismatch, MixedWeight, UnknownVariety, VariableClash
from .linalg import SpanBasis, echelonize
from .terms import (
    PREC,
    PRODUCT,
    SUCC,
    Expr,
    Generator,
    Monomial,
    Node,
    as_expr,
    compositions,
    decorate,
    enumerate_multilinear,
    enumerate_trees,
    format_monomial,
    map_leaves,
    monomial_weight,
    parse_monomial,
    parse_term,
    strip,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Identity:
    """A multilinear relation ``relation = 0`` in placeholders ``x1, x2, ...``."""

    relation: Expr
    num_ops: int
    label: str = ""

    @property
    def arity(self) -> int:
        return next(iter(self.relation.monomials())).arity


@dataclass(frozen=True)
class VarietySpec:
    name: str
    identities: Tuple[Identity, ...]
    normal_form_strategy: str = "generic_linear"
    base: Optional[str] = None

    @property
    def num_ops(self) -> int:
        return self.identities[0].num_ops

    @property
    def ops(self) -> Tuple[str, ...]:
        return (PRODUCT,) if self.num_ops == 1 else (SUCC, PREC)

    @property
    def min_arity(self) -> int:
        return min(i.arity for i in self.identities)


def _rel(text: str, num_ops: int, label: str) -> Identity:
    """Identity from text written in placeholders ``a b c``."""
    text = text.replace("a", "x1").replace("b", "x2").replace("c", "x3")
    lhs, _, rhs = text.partition("=")
    rel = parse_term(lhs) - (parse_term(rhs) if rhs.strip() else Expr())
    return Identity(rel, num_ops, label)


def _spec(name, rels, num_ops=1, strategy="generic_linear", base=None) -> VarietySpec:
    return VarietySpec(name, tuple(_rel(t, num_ops, lbl) for lbl, t in rels), strategy, base)


_CATALOG: Dict[str, VarietySpec] = {
    v.name: v
    for v in [
        _spec("Com", [("commutativity", "(a b) = (b a)"),
                      ("associativity", "((a b) c) = (a (b c))")]),
        _spec("As", [("associativity", "((a b) c) = (a (b c))")]),
        _spec("Alt", [("left alternative", "((a b) c) - (a (b c)) = -((b a) c) + (b (a c))"),
                      ("right alternative", "((a b) c) - (a (b c)) = -((a c) b) + (a (c b))")]),
        _spec("Assos", [("associator symmetric in 1,2", "((a b) c) - (a (b c)) = ((b a) c) - (b (a c))"),
                        ("associator symmetric in 2,3", "((a b) c) - (a (b c)) = ((a c) b) - (a (c b))")]),
        _spec("BiCom", [("left commutativity", "(a (b c)) = (b (a c))"),
                        ("right commutativity", "((a b) c) = ((a c) b)")],
              strategy="closed_form_bicom"),
        _spec("Nov", [("right commutativity", "((a b) c) = ((a c) b)"),
                      ("left symmetry", "((a b) c) - (a (b c)) = ((b a) c) - (b (a c))")]),
        _spec("Zinb", [("Zinbiel", "((a b) c) = (a (b c)) + (a (c b))")]),
        _spec("DerAlt", [
            ("first", "((a > b) < c) - (a > (b < c)) = -((c > b) < a) + (c > (b < a))"),
            ("second",
             "((a < b) > c) - (a > (b > c)) + ((a > c) < b) - (a > (c < b)) - (a < (b > c)) + ((a < b) < c)"
             " + ((b > a) < c) - (b > (a < c))"
             " = -((c < b) > a) + (c > (b > a)) - ((c > a) < b) + (c > (a < b))"
             " + (c < (b > a)) - ((c < b) < a) - ((b > c) < a) + (b > (c < a))"),
        ], num_ops=2, base="Alt"),
        _spec("DerAssos", [
            ("first", "((a > c) < b) - (a > (c < b)) = ((b > c) < a) - (b > (c < a))"),
            ("second",
             "((a < c) > b) - (a > (c > b)) - ((a > b) < c) + (a > (b < c)) - (a < (c > b)) + ((a < c) < b)"
             " - ((c > a) < b) + (c > (a < b))"
             " = ((b < c) > a) - (b > (c > a)) - ((b > a) < c) + (b > (a < c))"
             " - (b < (c > a)) + ((b < c) < a) - ((c > b) < a) + (c > (b < a))"),
        ], num_ops=2, base="Assos"),
        _spec("DerBiCom", [
            ("first", "((a < b) < c) = ((a < c) < b)"),
            ("second", "(a > (b > c)) = (b > (a > c))"),
            ("third", "((a > b) > c) - ((a > c) < b) = ((a > c) > b) - ((a > b) < c)"),
            ("fourth", "(a < (b < c)) - (b > (a < c)) = (b < (a < c)) - (a > (b < c))"),
        ], num_ops=2, base="BiCom"),
    ]
}

_ALIASES = {k.lower(): k for k in _CATALOG}
_ALIASES.update({"zinbiel": "Zinb", "assosymmetric": "Assos", "alternative": "Alt",
                 "bicommutative": "BiCom", "novikov": "Nov"})

PLAIN_VARIETIES = ("Com", "As", "Alt", "Assos", "BiCom", "Nov", "Zinb")
DERIVED_VARIETIES = ("DerAlt", "DerAssos", "DerBiCom")


def catalog(name: Union[str, VarietySpec]) -> VarietySpec:
    if isinstance(name, VarietySpec):
        return name
    key = _ALIASES.get(str(name).lower())
    if key is None:
        raise UnknownVariety(name)
    return _CATALOG[key]


# ----------------------------------------------------------- substitution

def _substitute(m: Monomial, args: Dict[int, Monomial]) -> Monomial:
    return map_leaves(m, lambda g: args.get(g.var, g))


def instantiate(identity: Identity, args: Sequence[Monomial]) -> Expr:
    """Replace placeholder ``x_i`` of ``identity`` by ``args[i-1]``."""
    if len(args) != identity.arity:
        raise ArityMismatch(f"identity takes {identity.arity} arguments, got {len(args)}")
    seen = set()
    for a in args:
        vs = set(a.vars)
        if vs & seen or len(vs) != len(a.vars):
            raise VariableClash("arguments must use pairwise disjoint variables")
        seen |= vs
    table = {i + 1: a for i, a in enumerate(args)}
    return Expr((_substitute(m, table), c) for m, c in identity.relation)


def _order_preserving(n: int, skip: int) -> Dict[int, int]:
    """Map 1..n-1 onto 1..n without ``skip``, keeping order."""
    return {i: (i if i < skip else i + 1) for i in range(1, n)}


def _relabel_plain(m: Monomial, mapping: Dict[int, int]) -> Monomial:
    return map_leaves(m, lambda g: Generator(mapping[g.var], g.der))


def _extensions(rel: Expr, n: int, ops: Sequence[str]) -> List[Expr]:
    """Arity-``n`` relations obtained from an arity-``n-1`` one.

    For each choice of the new variable ``x_k`` the old variables are relabelled
    order-preservingly, then every leaf is split into ``(x_i x_k)`` / ``(x_k x_i)``
    and the whole relation is multiplied by ``x_k`` on either side.
    """
    out = []
    items = rel.items()
    for k in range(1, n + 1):
        mp = _order_preserving(n, k)
        new = Generator(k)
        moved = [(_relabel_plain(m, mp), c) for m, c in items]
        for op in ops:
            out.append(Expr((Node(m, new, op), c) for m, c in moved))
            out.append(Expr((Node(new, m, op), c) for m, c in moved))
            for i in mp.values():
                leaf = Generator(i)
                for pair in (Node(leaf, new, op), Node(new, leaf, op)):
                    out.append(Expr((_substitute(m, {i: pair}), c) for m, c in moved))
    return out


def _identity_instances(v: VarietySpec, n: int) -> List[Expr]:
    import itertools

    out = []
    for ident in v.identities:
        if ident.arity != n:
            continue
        for perm in itertools.permutations(range(1, n + 1)):
            out.append(instantiate(ident, [Generator(p) for p in perm]))
    return out


def plain_ambient(v: VarietySpec, n: int) -> List[Monomial]:
    if v.num_ops == 1:
        return enumerate_multilinear(n, -n)
    return enumerate_trees(n, v.ops)


def to_vector(e: Expr, index: Dict[Monomial, int]) -> Dict[int, Fraction]:
    out = {}
    for m, c in e.items():
        try:
            out[index[m]] = c
        except KeyError:
            raise ArityMismatch(f"{format_monomial(m)} is not in the ambient basis") from None
    return out


# ------------------------------------------------------------------ cache

_cache_dir: Optional[Path] = Path(os.environ["OPCH_CACHE_DIR"]) if os.environ.get("OPCH_CACHE_DIR") else None


def set_cache_dir(path: Union[str, Path, None]) -> None:
    """Directory for JSON echelon-basis files (``None`` disables the disk cache)."""
    global _cache_dir
    _cache_dir = Path(path) if path is not None else None


def get_cache_dir() -> Optional[Path]:
    return _cache_dir


def _cache_path(name: str, n: int, w) -> Optional[Path]:
    if _cache_dir is None:
        return None
    return _cache_dir / f"{name}_{n}_{'none' if w is None else w}.json"


def _rat(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _write_cache(path: Path, basis: SpanBasis) -> None:
    from filelock import FileLock

    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "ambient": [format_monomial(m) for m in basis.ambient],
        "pivot_columns": basis.pivot_columns,
        "rows": [{str(k): _rat(x) for k, x in row.items()} for row in basis.rows],
    }
    with FileLock(str(path) + ".lock"):
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, sort_keys=True))
        tmp.replace(path)


def _read_cache(path: Path, ambient: List[Monomial]) -> Optional[SpanBasis]:
    try:
        doc = json.loads(path.read_text())
    except (OSError, ValueError):
        return None
    if doc.get("ambient") != [format_monomial(m) for m in ambient]:
        log.warning("ignoring stale cache file %s", path)
        return None
    rows = [{int(k): Fraction(x) for k, x in row.items()} for row in doc["rows"]]
    return SpanBasis(list(ambient), rows, list(doc["pivot_columns"]))


# ------------------------------------------------------------ consequences

@lru_cache(maxsize=None)
def consequence_basis(name: str, n: int) -> SpanBasis:
    """Echelon basis of the degree-``n`` multilinear consequences (no decorations)."""
    v = catalog(name)
    ambient = plain_ambient(v, n)
    path = _cache_path(v.name, n, None)
    if path is not None and path.exists():
        cached = _read_cache(path, ambient)
        if cached is not None:
            return cached
    index = {m: i for i, m in enumerate(ambient)}
    gens: List[Expr] = []
    if n > v.min_arity:
        prev = consequence_basis(v.name, n - 1)
        for row in prev.rows:
            rel = Expr({prev.ambient[k]: x for k, x in row.items()})
            gens.extend(_extensions(rel, n, v.ops))
    gens.extend(_identity_instances(v, n))
    basis = echelonize([to_vector(g, index) for g in gens], ambient)
    if path is not None:
        _write_cache(path, basis)
    return basis


def consequences(v: Union[str, VarietySpec], n: int, w: Optional[int] = None) -> List[Expr]:
    """Spanning set (echelonized) of the arity-``n`` consequences, optionally decorated to weight ``w``."""
    v = catalog(v)
    basis = consequence_basis(v.name, n)
    rows = [Expr({basis.ambient[k]: x for k, x in row.items()}) for row in basis.rows]
    if w is None or v.num_ops == 2:
        return rows
    out = []
    for dec in compositions(n + w, n):
        ders = {i + 1: d for i, d in enumerate(dec)}
        out.extend(Expr((decorate(m, ders), c) for m, c in r) for r in rows)
    return out


class Component:
    """Quotient of the weight-``w`` multilinear component of ``variety`` at arity ``n``."""

    def __init__(self, variety: Union[str, VarietySpec], n: int, w: Optional[int] = None):
        self.variety = catalog(variety)
        self.n = n
        self.w = -n if (w is None and self.variety.num_ops == 1) else w
        if self.variety.num_ops == 2:
            self.w = None
        self.plain = consequence_basis(self.variety.name, n)
        self._index = self.plain.index()
        free = self.plain.nonpivot_columns()
        self._free_pos = {c: i for i, c in enumerate(free)}
        self.plain_dim = len(free)
        if self.w is None:
            self.decorations = [(0,) * n]
        else:
            self.decorations = list(compositions(n + self.w, n))
        self._block = {d: i for i, d in enumerate(self.decorations)}
        self.dim = self.plain_dim * len(self.decorations)

    def __repr__(self):
        return f"Component({self.variety.name}, n={self.n}, w={self.w}, dim={self.dim})"

    def _check(self, m: Monomial):
        if m.arity != self.n or sorted(m.vars) != list(range(1, self.n + 1)):
            raise ArityMismatch(f"{format_monomial(m)} is not multilinear in x1..x{self.n}")
        if self.w is not None and monomial_weight(m) != self.w:
            raise MixedWeight(f"{format_monomial(m)} has weight {monomial_weight(m)}, expected {self.w}")

    def sparse_coordinates(self, e: Union[Expr, Monomial]) -> Dict[int, Fraction]:
        blocks: Dict[int, Dict[int, Fraction]] = {}
        for m, c in as_expr(e)._terms.items():
            self._check(m)
            plain, dec = strip(m)
            b = self._block[dec]
            vec = blocks.setdefault(b, {})
            j = self._index[plain]
            vec[j] = vec.get(j, 0) + c
        out = {}
        for b, vec in blocks.items():
            base = b * self.plain_dim
            for k, x in self.plain.reduce(vec).items():
                out[base + self._free_pos[k]] = x
        return out

    def coordinates(self, e: Union[Expr, Monomial]) -> Tuple[Fraction, ...]:
        sp = self.sparse_coordinates(e)
        return tuple(sp.get(i, Fraction(0)) for i in range(self.dim))

    def is_zero(self, e: Union[Expr, Monomial]) -> bool:
        return not self.sparse_coordinates(e)

    def basis_monomials(self) -> List[Monomial]:
        """One representative monomial per quotient coordinate (in coordinate order)."""
        free = self.plain.nonpivot_columns()
        out = []
        for dec in self.decorations:
            ders = {i + 1: d for i, d in enumerate(dec)}
            out.extend(decorate(self.plain.ambient[c], ders) for c in free)
        return out

    def span_basis(self) -> SpanBasis:
        """The decorated consequence span as one reduced echelon basis over the decorated ambient."""
        ambient = enumerate_multilinear(self.n, self.w) if self.w is not None else list(self.plain.ambient)
        index = {m: i for i, m in enumerate(ambient)}
        rows = []
        for dec in self.decorations:
            ders = {i + 1: d for i, d in enumerate(dec)}
            for row in self.plain.rows:
                rows.append({index[decorate(self.plain.ambient[k], ders)]: x for k, x in row.items()})
        rows.sort(key=min)
        return SpanBasis(ambient, rows, [min(r) for r in rows])


@lru_cache(maxsize=None)
def component(name: str, n: int, w: Optional[int] = None) -> Component:
    comp = Component(name, n, w)
    if comp.w is not None and comp.w != -n:
        path = _cache_path(comp.variety.name, n, comp.w)
        if path is not None and not path.exists():
            _write_cache(path, comp.span_basis())
    return comp


def dim_variety(v: Union[str, VarietySpec], n: int) -> int:
    return component(catalog(v).name, n).plain_dim


def quotient_normal_form(v: Union[str, VarietySpec], n: int, w: Optional[int], e: Union[Expr, Monomial]) -> Tuple[Fraction, ...]:
    """Coordinates of the class of ``e`` in the quotient component."""
    return component(catalog(v).name, n, w).coordinates(e)


# ------------------------------------------------------- bicommutative NF

def _sides(m: Node):
    left, right = set(), set()
    for child, is_left in ((m.left, True), (m.right, False)):
        if isinstance(child, Generator):
            (left if is_left else right).add(child)
        else:
            l2, r2 = _sides(child)
            left |= l2
            right |= r2
    return left, right


def bicom_sides(m: Monomial) -> Tuple[Tuple[Generator, ...], Tuple[Generator, ...]]:
    """Left-multiplier set (with the core) and right-multiplier set of a bicommutative monomial."""
    if isinstance(m, Generator):
        return (m,), ()
    left, right = _sides(m)
    key = lambda g: (g.var, g.der)
    return tuple(sorted(left, key=key)), tuple(sorted(right, key=key))


def bicom_from_sides(left: Sequence[Generator], right: Sequence[Generator], op: str = PRODUCT) -> Monomial:
    """Comb ``l_1(l_2(...((core r_1) r_2)...))`` with ``left`` sorted ascending, core = its last."""
    *outer, core = left
    t: Monomial = core
    for r in right:
        t = Node(t, r, op)
    for g in reversed(outer):
        t = Node(g, t, op)
    return t


def bicom_normal_form_monomial(m: Monomial) -> Monomial:
    if isinstance(m, Generator):
        return m
    left, right = bicom_sides(m)
    return bicom_from_sides(left, right)


def bicom_normal_form(e: Union[Expr, Monomial]) -> Expr:
    """Rewrite into the bicommutative comb basis; each side sorted by (var, der)."""
    acc: Dict[Monomial, Fraction] = {}
    for m, c in as_expr(e)._terms.items():
        nf = bicom_normal_form_monomial(m)
        acc[nf] = acc.get(nf, 0) + c
    return Expr(acc)
