"""Terms of free nonassociative algebras over a derivation-decorated alphabet.

A monomial is either a :class:`Generator` ``x_i^(j)`` or a binary :class:`Node`.
Nodes carry an operation label: ``"*"`` for the single product of a plain
variety, ``">"`` / ``"<"`` for the two operations of a derived variety.  Both
kinds share one total order, so linear combinations (:class:`Expr`) have a
unique canonical form.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union

from .errors import (
    DerivationOverflow,
    InvalidWeight,
    MixedWeight,
    TermSyntaxError,
    ZeroExpr,
)

MAX_DER = 16
PRODUCT = "*"
SUCC = ">"
PREC = "<"
OPS = (PRODUCT, SUCC, PREC)

Rational = Union[int, Fraction]


class Generator:
    """The leaf ``x_var`` with ``der`` applications of the derivation."""

    __slots__ = ("var", "der", "_key", "_hash")
    arity = 1

    def __init__(self, var: int, der: int = 0):
        if var < 1:
            raise ValueError(f"variable index must be >= 1, got {var}")
        if der < 0:
            raise ValueError(f"derivation order must be >= 0, got {der}")
        self.var = var
        self.der = der
        self._key = (1, (), (), (var,), (der,))
        self._hash = hash(self._key)

    shape = ()
    ops = ()

    @property
    def vars(self) -> Tuple[int, ...]:
        return (self.var,)

    @property
    def ders(self) -> Tuple[int, ...]:
        return (self.der,)

    @property
    def key(self):
        return self._key

    def __eq__(self, other):
        return isinstance(other, (Generator, Node)) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self._key < other._key

    def __repr__(self):
        return format_monomial(self)


class Node:
    """Binary product ``(left op right)``; immutable."""

    __slots__ = ("left", "right", "op", "arity", "shape", "ops", "vars", "ders", "_key", "_hash")

    def __init__(self, left: "Monomial", right: "Monomial", op: str = PRODUCT):
        if op not in OPS:
            raise ValueError(f"unknown operation {op!r}")
        self.left = left
        self.right = right
        self.op = op
        self.arity = left.arity + right.arity
        self.shape = (left.arity, left.shape, right.shape)
        self.ops = (op,) + left.ops + right.ops
        self.vars = left.vars + right.vars
        self.ders = left.ders + right.ders
        self._key = (self.arity, self.shape, self.ops, self.vars, self.ders)
        self._hash = hash(self._key)

    @property
    def key(self):
        return self._key

    def __eq__(self, other):
        return isinstance(other, (Generator, Node)) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self._key < other._key

    def __repr__(self):
        return format_monomial(self)


Monomial = Union[Generator, Node]


def is_leaf(m: Monomial) -> bool:
    return isinstance(m, Generator)


def leaves(m: Monomial) -> List[Generator]:
    return [Generator(v, d) for v, d in zip(m.vars, m.ders)]


def monomial_weight(m: Monomial) -> int:
    return sum(m.ders) - m.arity


def _as_fraction(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class Expr:
    """Finite rational linear combination of monomials in canonical form."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Union[Mapping[Monomial, Rational], Iterable[Tuple[Monomial, Rational]], None] = None):
        acc: Dict[Monomial, Fraction] = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for m, c in items:
                acc[m] = acc.get(m, 0) + _as_fraction(c)
        self._terms = {m: c for m, c in acc.items() if c != 0}

    @classmethod
    def monomial(cls, m: Monomial, coeff: Rational = 1) -> "Expr":
        return cls({m: coeff})

    @classmethod
    def _raw(cls, terms: Dict[Monomial, Fraction]) -> "Expr":
        e = cls.__new__(cls)
        e._terms = terms
        return e

    def items(self) -> List[Tuple[Monomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda kv: kv[0].key)

    def monomials(self) -> List[Monomial]:
        return sorted(self._terms, key=lambda m: m.key)

    def coefficient(self, m: Monomial) -> Fraction:
        return self._terms.get(m, Fraction(0))

    def as_dict(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(self.items())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __contains__(self, m):
        return m in self._terms

    def __add__(self, other: "Expr") -> "Expr":
        if isinstance(other, (Generator, Node)):
            other = Expr.monomial(other)
        if not isinstance(other, Expr):
            return NotImplemented
        acc = dict(self._terms)
        for m, c in other._terms.items():
            v = acc.get(m, 0) + c
            if v:
                acc[m] = v
            else:
                acc.pop(m, None)
        return Expr._raw(acc)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "Expr") -> "Expr":
        if isinstance(other, (Generator, Node)):
            other = Expr.monomial(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c) -> "Expr":
        if isinstance(c, (Expr, Generator, Node)):
            return NotImplemented
        c = _as_fraction(c)
        if c == 0:
            return Expr()
        return Expr._raw({m: v * c for m, v in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, c) -> "Expr":
        return self * (1 / _as_fraction(c))

    def __eq__(self, other):
        if isinstance(other, (Generator, Node)):
            other = Expr.monomial(other)
        if isinstance(other, int) and other == 0:
            return not self._terms
        if not isinstance(other, Expr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"Expr({format_term(self)!r})"

    def __str__(self):
        return format_term(self)


def as_expr(x: Union[Expr, Monomial]) -> Expr:
    return x if isinstance(x, Expr) else Expr.monomial(x)


def sum_exprs(exprs: Iterable[Expr]) -> Expr:
    acc: Dict[Monomial, Fraction] = {}
    for e in exprs:
        for m, c in e._terms.items():
            acc[m] = acc.get(m, 0) + c
    return Expr._raw({m: c for m, c in acc.items() if c})


# ---------------------------------------------------------------- weight

def weight(e: Union[Expr, Monomial]) -> int:
    """Common weight of the monomials of ``e``; a leaf ``x^(j)`` weighs ``j - 1``."""
    e = as_expr(e)
    if not e:
        raise ZeroExpr("weight of the zero element is undefined")
    weights = {monomial_weight(m) for m in e._terms}
    if len(weights) > 1:
        raise MixedWeight(f"element has monomials of weights {sorted(weights)}")
    return weights.pop()


# ------------------------------------------------------------ derivation

def derive_monomial(m: Monomial, max_der: int = MAX_DER) -> Dict[Monomial, int]:
    """Leibniz expansion of ``d(m)`` as a monomial -> multiplicity map."""
    if isinstance(m, Generator):
        if m.der + 1 > max_der:
            raise DerivationOverflow(f"derivation order {m.der + 1} exceeds cap {max_der}")
        return {Generator(m.var, m.der + 1): 1}
    out: Dict[Monomial, int] = {}
    for dl, c in derive_monomial(m.left, max_der).items():
        t = Node(dl, m.right, m.op)
        out[t] = out.get(t, 0) + c
    for dr, c in derive_monomial(m.right, max_der).items():
        t = Node(m.left, dr, m.op)
        out[t] = out.get(t, 0) + c
    return out


def derive(e: Union[Expr, Monomial], max_der: int = MAX_DER) -> Expr:
    acc: Dict[Monomial, Fraction] = {}
    for m, c in as_expr(e)._terms.items():
        for t, k in derive_monomial(m, max_der).items():
            acc[t] = acc.get(t, 0) + c * k
    return Expr._raw({m: c for m, c in acc.items() if c})


def product(a: Union[Expr, Monomial], b: Union[Expr, Monomial], op: str = PRODUCT) -> Expr:
    a, b = as_expr(a), as_expr(b)
    acc: Dict[Monomial, Fraction] = {}
    for u, cu in a._terms.items():
        for v, cv in b._terms.items():
            t = Node(u, v, op)
            acc[t] = acc.get(t, 0) + cu * cv
    return Expr._raw({m: c for m, c in acc.items() if c})


# ------------------------------------------------------- tree utilities

def map_leaves(m: Monomial, fn) -> Monomial:
    if isinstance(m, Generator):
        return fn(m)
    return Node(map_leaves(m.left, fn), map_leaves(m.right, fn), m.op)


def relabel(m: Monomial, mapping: Mapping[int, int]) -> Monomial:
    """Rename variables; derivation orders travel with their variable."""
    return map_leaves(m, lambda g: Generator(mapping.get(g.var, g.var), g.der))


def relabel_expr(e: Expr, mapping: Mapping[int, int]) -> Expr:
    return Expr((relabel(m, mapping), c) for m, c in e._terms.items())


def decorate(m: Monomial, ders: Mapping[int, int]) -> Monomial:
    """Set each leaf's derivation order from ``ders`` (keyed by variable)."""
    return map_leaves(m, lambda g: Generator(g.var, ders.get(g.var, 0)))


def strip(m: Monomial) -> Tuple[Monomial, Tuple[int, ...]]:
    """Split into the underived monomial and the order vector sorted by variable."""
    plain = map_leaves(m, lambda g: Generator(g.var))
    vec = tuple(d for _, d in sorted(zip(m.vars, m.ders)))
    return plain, vec


def mirror(m: Monomial) -> Monomial:
    """Opposite-algebra image: swap children, exchange ``>`` and ``<``."""
    if isinstance(m, Generator):
        return m
    op = {SUCC: PREC, PREC: SUCC}.get(m.op, m.op)
    return Node(mirror(m.right), mirror(m.left), op)


def mirror_expr(e: Expr) -> Expr:
    return Expr((mirror(m), c) for m, c in e._terms.items())


def with_op(m: Monomial, op: str) -> Monomial:
    if isinstance(m, Generator):
        return m
    return Node(with_op(m.left, op), with_op(m.right, op), op)


# ----------------------------------------------------------- enumeration

@lru_cache(maxsize=None)
def tree_shapes(n: int) -> Tuple[tuple, ...]:
    """All binary tree shapes with ``n`` leaves, as nested ``(left, right)`` / ``None``."""
    if n == 1:
        return (None,)
    out = []
    for k in range(1, n):
        for left in tree_shapes(k):
            for right in tree_shapes(n - k):
                out.append((left, right))
    return tuple(out)


def fill_shape(shape, gens: Sequence[Generator], ops: Sequence[str] = ()) -> Monomial:
    """Place ``gens`` into ``shape`` left to right; ``ops`` labels nodes in preorder."""
    gi = iter(gens)
    oi = iter(ops)

    def build(s):
        if s is None:
            return next(gi)
        op = next(oi, PRODUCT)
        left = build(s[0])
        return Node(left, build(s[1]), op)

    return build(shape)


@lru_cache(maxsize=None)
def compositions(total: int, parts: int) -> Tuple[Tuple[int, ...], ...]:
    """Weak compositions of ``total`` into ``parts`` ordered parts, lexicographic."""
    if parts == 0:
        return ((),) if total == 0 else ()
    if parts == 1:
        return ((total,),)
    out = []
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return tuple(out)


def catalan(n: int) -> int:
    from math import comb
    return comb(2 * n, n) // (n + 1)


@lru_cache(maxsize=None)
def _enumerate_multilinear(n: int, w: int) -> Tuple[Monomial, ...]:
    out = []
    decorations = compositions(n + w, n)
    for shape in tree_shapes(n):
        for perm in itertools.permutations(range(1, n + 1)):
            for dec in decorations:
                out.append(fill_shape(shape, [Generator(v, dec[v - 1]) for v in perm]))
    out.sort(key=lambda m: m.key)
    return tuple(out)


def enumerate_multilinear(n: int, w: int) -> List[Monomial]:
    """Every multilinear monomial in ``x_1..x_n`` of weight ``w``, sorted."""
    if n < 1:
        raise ValueError("arity must be >= 1")
    if n + w < 0:
        raise InvalidWeight(f"weight {w} is below the minimum {-n} at arity {n}")
    return list(_enumerate_multilinear(n, w))


def multilinear_count(n: int, w: int) -> int:
    from math import comb, factorial
    total = n + w
    return catalan(n - 1) * factorial(n) * comb(total + n - 1, n - 1)


# ------------------------------------------------------ parse and format

def format_generator(g: Generator) -> str:
    if g.der <= 2:
        return f"x{g.var}" + "'" * g.der
    return f"x{g.var}^({g.der})"


def format_monomial(m: Monomial) -> str:
    if isinstance(m, Generator):
        return format_generator(m)
    sep = " " if m.op == PRODUCT else f" {m.op} "
    return f"({format_monomial(m.left)}{sep}{format_monomial(m.right)})"


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_term(e: Union[Expr, Monomial]) -> str:
    e = as_expr(e)
    if not e:
        return "0"
    parts = []
    for i, (m, c) in enumerate(e.items()):
        sign = "-" if c < 0 else "+"
        a = -c if c < 0 else c
        body = format_monomial(m) if a == 1 else f"{_format_coeff(a)}*{format_monomial(m)}"
        if i == 0:
            parts.append(body if sign == "+" else "-" + body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


class _Parser:
    def __init__(self, text: str):
        self.s = text
        self.i = 0

    def error(self, msg):
        raise TermSyntaxError(msg, self.i)

    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self):
        self.ws()
        return self.s[self.i] if self.i < len(self.s) else ""

    def digits(self) -> int:
        start = self.i
        while self.i < len(self.s) and self.s[self.i].isdigit():
            self.i += 1
        if start == self.i:
            self.error("expected digits")
        return int(self.s[start:self.i])

    def var(self) -> Generator:
        if self.peek() != "x":
            self.error("expected variable 'x<digits>'")
        self.i += 1
        idx = self.digits()
        if idx < 1:
            self.error("variable index must be >= 1")
        der = 0
        if self.s.startswith("^(", self.i):
            self.i += 2
            der = self.digits()
            if self.i >= len(self.s) or self.s[self.i] != ")":
                self.error("expected ')' closing derivation order")
            self.i += 1
        else:
            while self.i < len(self.s) and self.s[self.i] == "'":
                der += 1
                self.i += 1
        return Generator(idx, der)

    def mono(self) -> Monomial:
        c = self.peek()
        if c == "(":
            self.i += 1
            left = self.mono()
            op = PRODUCT
            if self.peek() in (SUCC, PREC):
                op = self.s[self.i]
                self.i += 1
            right = self.mono()
            if self.peek() != ")":
                self.error("expected ')'")
            self.i += 1
            return Node(left, right, op)
        if c == "x":
            return self.var()
        self.error("expected '(' or variable")

    def coefficient(self):
        if not self.peek().isdigit():
            return Fraction(1)
        num = self.digits()
        den = 1
        if self.peek() == "/":
            self.i += 1
            self.ws()
            den = self.digits()
            if den == 0:
                self.error("zero denominator")
        self.ws()
        if self.peek() != "*":
            self.error("expected '*' after coefficient")
        self.i += 1
        return Fraction(num, den)

    def expr(self) -> Expr:
        if self.peek() == "0":
            save = self.i
            self.i += 1
            if self.peek() == "":
                return Expr()
            self.i = save
        acc: Dict[Monomial, Fraction] = {}
        sign = 1
        if self.peek() == "-":
            sign = -1
            self.i += 1
        elif self.peek() == "+":
            self.i += 1
        while True:
            c = self.coefficient()
            m = self.mono()
            acc[m] = acc.get(m, 0) + sign * c
            nxt = self.peek()
            if nxt == "":
                break
            if nxt not in "+-":
                self.error("expected '+', '-' or end of input")
            sign = 1 if nxt == "+" else -1
            self.i += 1
        return Expr(acc)


def parse_term(text: str) -> Expr:
    """Parse the textual term grammar (plain products or ``>``/``<`` operations)."""
    return _Parser(text).expr()


def parse_monomial(text: str) -> Monomial:
    p = _Parser(text)
    m = p.mono()
    if p.peek() != "":
        p.error("trailing input")
    return m


@lru_cache(maxsize=None)
def _enumerate_trees(n: int, ops: Tuple[str, ...]) -> Tuple[Monomial, ...]:
    out = []
    for shape in tree_shapes(n):
        for labels in itertools.product(ops, repeat=n - 1):
            for perm in itertools.permutations(range(1, n + 1)):
                out.append(fill_shape(shape, [Generator(v) for v in perm], labels))
    out.sort(key=lambda m: m.key)
    return tuple(out)


def enumerate_trees(n: int, ops: Sequence[str] = (PRODUCT,)) -> List[Monomial]:
    """Underived multilinear trees in ``x_1..x_n`` with every node labelling from ``ops``."""
    if n < 1:
        raise ValueError("arity must be >= 1")
    return list(_enumerate_trees(n, tuple(ops)))
