from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opch.errors import DerivationOverflow, InvalidWeight, MixedWeight, TermSyntaxError, ZeroExpr
from opch.terms import (
    PREC,
    SUCC,
    Expr,
    Generator,
    Node,
    catalan,
    compositions,
    derive,
    enumerate_multilinear,
    enumerate_trees,
    fill_shape,
    format_term,
    mirror,
    multilinear_count,
    parse_monomial,
    parse_term,
    product,
    relabel,
    strip,
    tree_shapes,
    weight,
)

P = parse_term
x1, x2, x3 = Generator(1), Generator(2), Generator(3)


@pytest.mark.parametrize("text, w", [
    ("x1'", 0),
    ("(x1 (x2 x3))", -3),
    ("(x1 (x2' x3''))", 0),
    ("(x1 (x2' x3'))", -1),
    ("x2^(3)", 2),
])
def test_weight(text, w):
    assert weight(P(text)) == w


def test_weight_errors():
    with pytest.raises(MixedWeight):
        weight(P("(x1 x2) + x1'"))
    with pytest.raises(ZeroExpr):
        weight(Expr())


def test_derive_examples():
    assert derive(x1) == P("x1'")
    assert derive(P("(x1 x2)")) == P("(x1' x2) + (x1 x2')")
    assert derive(P("(x1 x2')")) == P("(x1' x2') + (x1 x2'')")


def test_derive_collects_multiplicities():
    assert derive(P("(x1 x2) + (x2 x1)")) == P("(x1' x2) + (x1 x2') + (x2' x1) + (x2 x1')")
    assert derive(derive(P("(x1 x2)"))) == P("(x1'' x2) + 2*(x1' x2') + (x1 x2'')")


def test_derivation_cap():
    with pytest.raises(DerivationOverflow):
        derive(Generator(1, 16))
    assert derive(Generator(1, 15)) == Expr.monomial(Generator(1, 16))


def test_product_bilinear():
    assert product(x1, x2) == Expr.monomial(Node(x1, x2))
    assert product(P("x1 + x2"), x3) == P("(x1 x3) + (x2 x3)")
    assert product(Expr(), x1) == 0


def test_enumerate_n2():
    got = enumerate_multilinear(2, -1)
    assert set(got) == {parse_monomial(s) for s in ("(x1' x2)", "(x1 x2')", "(x2' x1)", "(x2 x1')")}
    assert got == sorted(got)


def test_enumerate_counts():
    assert len(enumerate_multilinear(3, -1)) == 72
    for n in range(1, 5):
        for w in (-n, -1, 0):
            ours = len(enumerate_multilinear(n, w))
            oracle = catalan(n - 1) * factorial(n) * comb(n + w + n - 1, n - 1)
            assert ours == oracle == multilinear_count(n, w)


def test_enumerate_invalid_weight():
    with pytest.raises(InvalidWeight):
        enumerate_multilinear(2, -3)


def test_catalan_and_shapes():
    assert [catalan(k) for k in range(6)] == [1, 1, 2, 5, 14, 42]
    assert [len(tree_shapes(n)) for n in range(1, 6)] == [1, 1, 2, 5, 14]
    assert len(enumerate_trees(4, (SUCC, PREC))) == 5 * 8 * 24


def test_compositions():
    assert compositions(2, 2) == ((0, 2), (1, 1), (2, 0))
    assert len(compositions(3, 4)) == comb(6, 3)


def test_parse_and_format():
    m = P("(x1 (x2' x3'))")
    assert m == Node(x1, Node(Generator(2, 1), Generator(3, 1)))
    assert P("x2^(3)") == Generator(2, 3)
    assert format_term(P("x2^(3)")) == "x2^(3)"
    assert P("(x1'(x2 x3'))") == P("(x1' (x2 x3'))")
    assert P("3/2*(x1 > x2) - (x2 < x1)").coefficient(Node(x1, x2, SUCC)) == Fraction(3, 2)
    assert format_term(Expr()) == "0"
    assert P("0") == 0


@pytest.mark.parametrize("bad", ["(x1", "x", "(x1 x2))", "(x0 x1)", "x1 +", "(x1 ? x2)"])
def test_parse_errors(bad):
    with pytest.raises(TermSyntaxError):
        P(bad)


def test_syntax_error_position():
    with pytest.raises(TermSyntaxError) as err:
        P("(x1")
    assert err.value.pos == 3


def test_order_is_total_and_by_arity_first():
    ms = enumerate_multilinear(3, -1) + enumerate_multilinear(2, -1)
    ms.sort(key=lambda m: m.key)
    assert [m.arity for m in ms] == [2] * 4 + [3] * 72
    assert len({m.key for m in ms}) == len(ms)


def test_mirror_and_strip():
    t = P("((x1 > x2) < x3)").monomials()[0]
    assert mirror(t) == parse_monomial("(x3 > (x2 < x1))")
    assert mirror(mirror(t)) == t
    plain, vec = strip(parse_monomial("(x2'' (x1 x3'))"))
    assert plain == parse_monomial("(x2 (x1 x3))")
    assert vec == (0, 2, 1)


gens = st.builds(Generator, st.integers(1, 4), st.integers(0, 3))
monos = st.recursive(gens, lambda inner: st.builds(Node, inner, inner), max_leaves=5)


@settings(max_examples=200, deadline=None)
@given(monos)
def test_format_parse_roundtrip(m):
    assert parse_monomial(format_term(m)) == m


@settings(max_examples=200, deadline=None)
@given(monos, monos)
def test_weight_additive(u, v):
    assert weight(Node(u, v)) == weight(u) + weight(v)


@settings(max_examples=100, deadline=None)
@given(monos)
def test_relabel_inverse(m):
    perm = {1: 3, 2: 4, 3: 1, 4: 2}
    back = {b: a for a, b in perm.items()}
    assert relabel(relabel(m, perm), back) == m


def test_fill_shape_preorder_ops():
    shape = tree_shapes(3)[0]
    t = fill_shape(shape, [x1, x2, x3], [SUCC, PREC])
    assert t.op == SUCC
