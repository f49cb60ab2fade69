"""Rewriting weight -1 elements into ``>``/``<`` expressions.

Two routes are provided.  :func:`express_solver` solves a linear system against
the expansion matrix.  The constructive routes (:func:`express_bicom`,
:func:`express_alt`, :func:`express_assos`) follow the induction on length:
small arities come from fixed tables, a generator carrying every derivation is
peeled through an operator word whose outer operators become ``<`` (left) and
``>`` (right) around it, and several derived generators are handled by exact
peels or by a leading-term subtraction whose remainders have strictly smaller
sum of squared derivation orders.  Any subterm the constructive route cannot
place is handed to the solver and recorded in ``trace``.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .derived import enumerate_di_monomials, expansion_solver, tau_monomial
from .errors import ArityTooLarge, MixedWeight, NoDerivation, NotInImage, WrongWeight
from .terms import (
    PREC,
    PRODUCT,
    SUCC,
    Expr,
    Generator,
    Monomial,
    Node,
    as_expr,
    mirror,
    mirror_expr,
    monomial_weight,
    parse_term,
    product,
    relabel_expr,
)
from .varieties import (
    bicom_from_sides,
    bicom_normal_form_monomial,
    bicom_sides,
    catalog,
    component,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_ARITY = 4

Terms = List[Tuple[Fraction, Monomial]]


# ----------------------------------------------------------- operator words

@dataclass(frozen=True)
class OperatorWord:
    """``O_1 O_2 ... O_k core`` with ``ops[0]`` outermost; side is ``"L"`` or ``"R"``."""

    core: Generator
    ops: Tuple[Tuple[str, Generator], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.ops) + 1

    def to_monomial(self) -> Monomial:
        t: Monomial = self.core
        for side, x in reversed(self.ops):
            t = Node(x, t) if side == "L" else Node(t, x)
        return t

    def push(self, side: str, x: Generator) -> "OperatorWord":
        return OperatorWord(self.core, ((side, x),) + self.ops)

    def tail(self) -> "OperatorWord":
        return OperatorWord(self.core, self.ops[1:])

    def __str__(self):
        from .terms import format_generator

        ops = " ".join(f"{s}_{{{format_generator(x)}}}" for s, x in self.ops)
        return f"{ops} {format_generator(self.core)}".strip()


def _sigma(variety) -> int:
    """Associator symmetry sign: ``(a,b,c) = sigma*(b,a,c) = sigma*(a,c,b)``."""
    name = catalog(variety).name
    if name == "Alt":
        return -1
    if name == "Assos":
        return 1
    raise ValueError(f"associator rewriting is defined for Alt and Assos, not {name}")


def _left_rule(a: Monomial, b: Monomial, c: Monomial, s: int) -> Terms:
    # a(bc) = (ab)c - s (ba)c + s b(ac)
    return [(Fraction(1), Node(Node(a, b), c)), (Fraction(-s), Node(Node(b, a), c)), (Fraction(s), Node(b, Node(a, c)))]


def _right_rule(a: Monomial, b: Monomial, c: Monomial, s: int) -> Terms:
    # (ab)c = a(bc) + s (ac)b - s a(cb)
    return [(Fraction(1), Node(a, Node(b, c))), (Fraction(s), Node(Node(a, c), b)), (Fraction(-s), Node(a, Node(c, b)))]


def _inner_right_rule(a: Monomial, b: Monomial, c: Monomial, s: int) -> Terms:
    # a(bc) = (ab)c - s (ac)b + s a(cb)
    return [(Fraction(1), Node(Node(a, b), c)), (Fraction(-s), Node(Node(a, c), b)), (Fraction(s), Node(a, Node(c, b)))]


def _has_der(m: Monomial) -> bool:
    return any(m.ders)


def _collect(pairs) -> Dict:
    acc: Dict = {}
    for c, x in pairs:  # (coefficient, item) pairs
        acc[x] = acc.get(x, 0) + c
    return {x: c for x, c in acc.items() if c}


def distribute_derivations(m: Monomial, variety="Alt") -> Expr:
    """Rewrite ``m`` so that both top-level factors of every monomial carry a derivation."""
    if not _has_der(m):
        raise NoDerivation("monomial has no derived generator")
    s = _sigma(variety)
    if sum(1 for d in m.ders if d) < 2:
        return Expr.monomial(m)

    def dist(t: Monomial) -> Terms:
        u, v = t.left, t.right
        if _has_der(u) and _has_der(v):
            return [(Fraction(1), t)]
        out: Terms = []
        if not _has_der(u):
            for c, w in dist(v):
                out.extend((c * k, r) for k, r in _left_rule(u, w.left, w.right, s))
        else:
            for c, w in dist(u):
                out.extend((c * k, r) for k, r in _right_rule(w.left, w.right, v, s))
        return out

    return Expr(_collect(dist(m)))


def distribute_derivations_alt(m: Monomial) -> Expr:
    return distribute_derivations(m, "Alt")


def operator_form(m: Monomial, variety="Alt") -> List[Tuple[Fraction, OperatorWord]]:
    """Write ``m`` as a combination of operator words ``O_x1 ... O_x(n-1) x_n``."""
    s = _sigma(variety)

    def form(t: Monomial, side: str = "L") -> List[Tuple[Fraction, OperatorWord]]:
        # a product of two leaves continues the chain in the direction it was entered
        if isinstance(t, Generator):
            return [(Fraction(1), OperatorWord(t))]
        u, v = t.left, t.right
        if isinstance(u, Generator) and (side == "L" or not isinstance(v, Generator)):
            return [(c, w.push("L", u)) for c, w in form(v, "L")]
        if isinstance(v, Generator):
            return [(c, w.push("R", v)) for c, w in form(u, "R")]
        out = []
        for c, w in form(v):
            side, x = w.ops[0]
            rest = w.tail().to_monomial()
            if side == "R":
                terms = _inner_right_rule(u, rest, x, s)
            else:
                terms = _left_rule(u, x, rest, s)
            for k, r in terms:
                out.extend((c * k * c2, w2) for c2, w2 in form(r))
        return out

    words = _collect(form(m))
    return sorted(((c, w) for w, c in words.items()), key=lambda cw: cw[1].to_monomial().key)


def operator_form_alt(m: Monomial) -> List[Tuple[Fraction, OperatorWord]]:
    return operator_form(m, "Alt")


def _refocus_monomial(m: Monomial, target: int, s: int) -> List[Tuple[Fraction, OperatorWord]]:
    if isinstance(m, Generator):
        if m.var != target:
            raise ValueError(f"x{target} is not a leaf of the word")
        return [(Fraction(1), OperatorWord(m))]
    u, v = m.left, m.right
    if target in u.vars:
        if isinstance(v, Generator):
            return [(c, w.push("R", v)) for c, w in _refocus_monomial(u, target, s)]
        terms = _left_rule(u, v.left, v.right, s)
    else:
        if isinstance(u, Generator):
            return [(c, w.push("L", u)) for c, w in _refocus_monomial(v, target, s)]
        terms = _right_rule(u.left, u.right, v, s)
    out = []
    for k, r in terms:
        out.extend((k * c, w) for c, w in _refocus_monomial(r, target, s))
    return out


def refocus(word: Union[OperatorWord, Monomial], target: Union[int, Generator], variety="Alt") -> List[Tuple[Fraction, OperatorWord]]:
    """Rewrite as operator words whose core is the leaf ``target``."""
    m = word.to_monomial() if isinstance(word, OperatorWord) else word
    t = target.var if isinstance(target, Generator) else target
    words = _collect((c, w) for c, w in _refocus_monomial(m, t, _sigma(variety)))
    return sorted(((c, w) for w, c in words.items()), key=lambda cw: cw[1].to_monomial().key)


def refocus_alt(word: Union[OperatorWord, Monomial], target: Union[int, Generator]) -> List[Tuple[Fraction, OperatorWord]]:
    return refocus(word, target, "Alt")


def word_comb(word: OperatorWord) -> Monomial:
    """``R_x -> (. > x)``, ``L_x -> (x < .)`` applied from the core outward."""
    t: Monomial = Generator(word.core.var)
    for side, x in reversed(word.ops):
        g = Generator(x.var)
        t = Node(g, t, PREC) if side == "L" else Node(t, g, SUCC)
    return t


# ------------------------------------------------------------ base tables

def _table(entries: Dict[Tuple[int, int, int], str]) -> Dict[Tuple[int, int, int], Expr]:
    return {k: parse_term(v) for k, v in entries.items()}


# derivation pattern of a(bc) -> expression in x1=a, x2=b, x3=c
BICOM_TABLE = _table({
    (0, 1, 1): "(x2 > (x1 < x3))",
    (1, 0, 1): "(x1 > (x2 < x3))",
    (1, 1, 0): "(x2 > (x1 > x3))",
    (2, 0, 0): "(x2 < (x1 > x3)) - (x1 > (x2 < x3))",
    (0, 2, 0): "(x1 < (x2 > x3)) - (x2 > (x1 < x3))",
    (0, 0, 2): "(x1 < (x2 < x3)) - (x2 > (x1 < x3))",
})

ALT_TABLE = _table({
    (0, 1, 1): "((x1 < x2) < x3) + ((x2 > x1) < x3) - (x2 > (x1 < x3))",
    (1, 0, 1): "(x1 > (x2 < x3))",
    (1, 1, 0): "(x1 > (x2 > x3))",
    (2, 0, 0): "((x1 > x2) > x3) - (x1 > (x2 > x3)) + ((x1 > x3) < x2) - (x1 > (x3 < x2))"
               " + ((x2 < x1) > x3) - (x2 > (x1 > x3)) + ((x2 > x3) < x1) - (x2 > (x3 < x1))"
               " - (x2 < (x1 > x3)) + ((x2 < x1) < x3) + ((x1 > x2) < x3) - (x1 > (x2 < x3))",
    (0, 2, 0): "(x1 < (x2 > x3)) - ((x1 < x2) < x3) - ((x2 > x1) < x3) + (x2 > (x1 < x3))",
    (0, 0, 2): "(x1 < (x2 < x3)) - ((x1 < x2) < x3) - ((x2 > x1) < x3) + (x2 > (x1 < x3))",
})


def _table_lookup(m: Monomial, table) -> Optional[Expr]:
    """Arity-3 monomial of weight -1 via the table, mirroring ``(ab)c`` shapes."""
    flipped = isinstance(m.right, Generator)
    t = mirror(m) if flipped else m
    a, (b, c) = t.left, (t.right.left, t.right.right)
    entry = table.get((a.der, b.der, c.der))
    if entry is None:
        return None
    out = relabel_expr(entry, {1: a.var, 2: b.var, 3: c.var})
    return mirror_expr(out) if flipped else out


def _arity2(m: Monomial) -> Expr:
    u, v = Generator(m.left.var), Generator(m.right.var)
    return Expr.monomial(Node(u, v, SUCC if m.left.der else PREC))


def _measure(m: Monomial) -> int:
    return sum(d * d for d in m.ders)


# -------------------------------------------------------------- solver

def _validate(f: Expr, max_arity: int) -> int:
    if not f:
        return 0
    arities = {m.arity for m in f.monomials()}
    weights = {monomial_weight(m) for m in f.monomials()}
    if len(weights) > 1:
        raise MixedWeight(f"element has monomials of weights {sorted(weights)}")
    if weights != {-1}:
        raise WrongWeight(f"only weight -1 elements are expressible, got weight {weights.pop()}")
    if len(arities) > 1:
        raise MixedWeight("element mixes arities")
    n = arities.pop()
    if n > max_arity:
        raise ArityTooLarge(f"arity {n} exceeds the bound {max_arity}")
    return n


def express_solver(variety, f: Union[Expr, Monomial], max_arity: int = DEFAULT_MAX_ARITY) -> Expr:
    """Canonical ``>``/``<`` preimage of ``f`` modulo the variety's consequences."""
    v = catalog(variety)
    f = as_expr(f)
    n = _validate(f, max_arity)
    if n == 0:
        return Expr()
    comp = component(v.name, n, -1)
    solver = expansion_solver(v.name, n)
    coeffs = solver.solve(comp.sparse_coordinates(f))
    cols = enumerate_di_monomials(n)
    return Expr((cols[j], c) for j, c in enumerate(coeffs) if c)


# ------------------------------------------------------ constructive core

class _Constructive:
    def __init__(self, variety: str, trace: Optional[list], use_table: bool = True):
        self.variety = catalog(variety).name
        self.trace = trace
        self.use_table = use_table
        self.memo: Dict[Monomial, Expr] = {}
        self.stack: set = set()

    def fallback(self, m: Monomial, reason: str) -> Expr:
        log.info("solver fallback for %s in %s: %s", m, self.variety, reason)
        if self.trace is not None:
            self.trace.append({"monomial": str(m), "variety": self.variety, "reason": reason})
        return express_solver(self.variety, m, max_arity=m.arity)

    def key(self, m: Monomial) -> Monomial:
        return m

    def express(self, m: Monomial) -> Expr:
        m = self.key(m)
        hit = self.memo.get(m)
        if hit is not None:
            return hit
        if m in self.stack:
            return self.fallback(m, "cycle")
        self.stack.add(m)
        try:
            out = self.construct(m)
        finally:
            self.stack.discard(m)
        if out is None:
            out = self.fallback(m, "no constructive step applies")
        self.memo[m] = out
        return out

    def construct(self, m: Monomial) -> Optional[Expr]:
        raise NotImplementedError

    @staticmethod
    def _peelable(u: Monomial) -> bool:
        return False

    def leading_term(self, m: Monomial, candidates, normalize) -> Optional[Expr]:
        """Pick a candidate ``T`` with ``m`` in ``tau(T)`` and every other term strictly lighter."""
        target = _measure(m)
        for t in candidates:
            terms = _collect((c, normalize(u)) for u, c in tau_monomial(t)._terms.items())
            c = terms.pop(m, 0)
            if not c:
                continue
            if any(u in self.stack or not (_measure(u) < target or self._peelable(u)) for u in terms):
                continue
            out = Expr.monomial(t)
            for u, k in sorted(terms.items(), key=lambda kv: kv[0].key):
                out = out - self.express(u) * k
            return out / c
        return None


class _BiComConstructive(_Constructive):
    def __init__(self, trace=None, use_table=True):
        super().__init__("BiCom", trace, use_table)

    def key(self, m):
        return bicom_normal_form_monomial(m)

    def construct(self, m):
        n = m.arity
        if n == 1:
            return Expr.monomial(m)
        if n == 2:
            return _arity2(m)
        if n == 3 and self.use_table:
            return _table_lookup(m, BICOM_TABLE)
        left, right = bicom_sides(m)
        # a generator with exactly one derivation on the outside: a' g = a > g, g r' = g < r
        for g in sorted(left + right, key=lambda x: x.var):
            if g.der != 1:
                continue
            if g in left and len(left) > 1:
                rest = bicom_from_sides([x for x in left if x != g], right)
                return product(Generator(g.var), self.express(rest), SUCC)
            if g in right and len(right) > 1:
                rest = bicom_from_sides(left, [x for x in right if x != g])
                return product(self.express(rest), Generator(g.var), PREC)
        hit = self._block(m, left, right)
        if hit is not None:
            return hit
        return self.leading_term(m, self._combs(left, right), bicom_normal_form_monomial)

    @staticmethod
    def _peelable(u: Monomial) -> bool:
        left, right = bicom_sides(u)
        return any(g.der == 1 for g in left) and len(left) > 1 or any(g.der == 1 for g in right) and len(right) > 1

    def _block(self, m, left, right) -> Optional[Expr]:
        """``a < E(m_a)`` or ``E(m_a) > a`` for an underived outer leaf ``a``.

        ``m_a`` drops ``a`` and one derivation of ``g``; ``a d(m_a)`` contains ``m``
        once and the other terms must be lighter or peelable.
        """
        target = _measure(m)
        for a in sorted(left + right, key=lambda x: x.var):
            on_left = a in left
            if a.der or len(left if on_left else right) < 2:
                continue
            for g in left + right:
                if g == a or not g.der:
                    continue
                lower = lambda xs: [Generator(x.var, x.der - (x == g)) for x in xs if x != a]
                la, ra = lower(left), lower(right)
                others = []
                for h in la + ra:
                    if h.var == g.var:
                        continue
                    bump = lambda xs: [Generator(x.var, x.der + (x == h)) for x in xs]
                    bl, br = bump(la), bump(ra)
                    others.append(bicom_from_sides(sorted(bl + [a] * on_left, key=lambda x: (x.var, x.der)),
                                                   sorted(br + [a] * (not on_left), key=lambda x: (x.var, x.der))))
                if any(u in self.stack or not (_measure(u) < target or self._peelable(u)) for u in others):
                    continue
                inner = self.express(bicom_from_sides(la, ra))
                x = Generator(a.var)
                out = product(x, inner, PREC) if on_left else product(inner, x, SUCC)
                for u in others:
                    out = out - self.express(u)
                return out
        return None

    @staticmethod
    def _combs(left, right):
        """Combs around a core from ``left``; later leaves join as block (d on the inside) or self (d on the leaf)."""
        leaves = left + right
        lset = set(left)
        cores = sorted(left, key=lambda g: (-g.der, g.var))
        for core in cores:
            others = [g for g in leaves if g != core]
            others.sort(key=lambda g: (g.der, g.var))
            for order in itertools.permutations(others):
                for modes in itertools.product((True, False), repeat=len(order)):
                    t: Monomial = Generator(core.var)
                    for g, block in zip(order, modes):
                        x = Generator(g.var)
                        if g in lset:
                            t = Node(x, t, PREC if block else SUCC)
                        else:
                            t = Node(t, x, SUCC if block else PREC)
                    yield t


class _AssociatorConstructive(_Constructive):
    """Alternative and assosymmetric algebras share the recursion; only the sign differs."""

    def __init__(self, variety, trace=None, use_table=True):
        super().__init__(variety, trace, use_table)
        self.sigma = _sigma(variety)

    def construct(self, m):
        n = m.arity
        if n == 1:
            return Expr.monomial(m)
        if n == 2:
            return _arity2(m)
        if n == 3 and self.use_table and self.variety == "Alt":
            return _table_lookup(m, ALT_TABLE)
        u, v = m.left, m.right
        if isinstance(u, Generator) and u.der == 1:
            return product(Generator(u.var), self.express(v), SUCC)
        if isinstance(v, Generator) and v.der == 1:
            return product(self.express(u), Generator(v.var), PREC)
        derived = [g for g in zip(m.vars, m.ders) if g[1]]
        if len(derived) == 1:
            return self._single(m, derived[0][0])
        return self._several(m)

    @staticmethod
    def _peelable(u: Monomial) -> bool:
        return isinstance(u, Node) and any(isinstance(x, Generator) and x.der == 1 for x in (u.left, u.right))

    def _single(self, m, var) -> Expr:
        # all derivations sit on one generator: operator words cored there, then combs
        out = Expr()
        for c, w in refocus(m, var, self.variety):
            comb = word_comb(w)
            word_m = w.to_monomial()
            expansion = tau_monomial(comb)
            rest = expansion - Expr.monomial(word_m)
            part = Expr.monomial(comb)
            for r, k in rest.items():
                part = part - self.express(r) * k
            out = out + part * c
        return out

    def _labelings(self, m):
        for labels in itertools.product((SUCC, PREC), repeat=m.arity - 1):
            yield _relabel_ops(m, labels)

    def _several(self, m) -> Optional[Expr]:
        hit = self.leading_term(m, self._labelings(m), lambda x: x)
        if hit is not None:
            return hit
        u, v = m.left, m.right
        if not (_has_der(u) and _has_der(v)):
            dist = distribute_derivations(m, self.variety)
            out = Expr()
            for r, k in dist.items():
                out = out + self.express(r) * k
            return out
        # refocus onto the heaviest generator and treat each word on its own
        var = max(zip(m.vars, m.ders), key=lambda g: (g[1], -g[0]))[0]
        words = refocus(m, var, self.variety)
        if len(words) == 1 and words[0][1].to_monomial() == m:
            return None
        out = Expr()
        for c, w in words:
            out = out + self.express(w.to_monomial()) * c
        return out


def _relabel_ops(m: Monomial, labels: Sequence[str]) -> Monomial:
    it = iter(labels)

    def build(t):
        if isinstance(t, Generator):
            return Generator(t.var)
        op = next(it)
        left = build(t.left)
        return Node(left, build(t.right), op)

    return build(m)


def _run(engine: _Constructive, f, max_arity: int) -> Expr:
    f = as_expr(f)
    _validate(f, max_arity)
    out = Expr()
    for m, c in f.items():
        out = out + engine.express(m) * c
    return out


def express_bicom(f, trace: Optional[list] = None, max_arity: int = DEFAULT_MAX_ARITY, use_table: bool = True) -> Expr:
    """Constructive ``>``/``<`` expression of a weight -1 bicommutative element."""
    return _run(_BiComConstructive(trace, use_table), f, max_arity)


def express_alt(f, trace: Optional[list] = None, max_arity: int = DEFAULT_MAX_ARITY, use_table: bool = True) -> Expr:
    """Constructive ``>``/``<`` expression of a weight -1 alternative element."""
    return _run(_AssociatorConstructive("Alt", trace, use_table), f, max_arity)


def express_assos(f, trace: Optional[list] = None, max_arity: int = DEFAULT_MAX_ARITY) -> Expr:
    """Same recursion as :func:`express_alt` with the assosymmetric associator rules."""
    return _run(_AssociatorConstructive("Assos", trace, use_table=False), f, max_arity)


def express(variety, f, method: str = "solver", trace: Optional[list] = None, max_arity: int = DEFAULT_MAX_ARITY) -> Expr:
    name = catalog(variety).name
    if method == "solver":
        return express_solver(name, f, max_arity)
    if method != "recursive":
        raise ValueError(f"unknown method {method!r}")
    if name == "BiCom":
        return express_bicom(f, trace, max_arity)
    if name == "Alt":
        return express_alt(f, trace, max_arity)
    if name == "Assos":
        return express_assos(f, trace, max_arity)
    raise ValueError(f"no constructive method for {name}; use the solver")


def roundtrip_ok(variety, f, t) -> bool:
    """``tau(t) - f`` vanishes in the weight -1 quotient."""
    from .derived import tau

    f = as_expr(f)
    if not f:
        return not t
    n = f.monomials()[0].arity
    return component(catalog(variety).name, n, -1).is_zero(tau(t) - f)
