import itertools
from math import comb

import pytest

from opch import varieties
from opch.errors import ArityMismatch, MixedWeight, UnknownVariety, VariableClash
from opch.linalg import echelonize
from opch.terms import (
    Expr,
    Generator,
    Node,
    compositions,
    enumerate_multilinear,
    parse_monomial,
    parse_term,
)
from opch.varieties import (
    bicom_normal_form,
    bicom_sides,
    catalog,
    component,
    consequence_basis,
    consequences,
    dim_variety,
    instantiate,
    quotient_normal_form,
)

P = parse_term
M = parse_monomial
X = [Generator(i) for i in range(1, 6)]


def test_catalog():
    assert len(catalog("BiCom").identities) == 2
    assert catalog("bicom").num_ops == 1
    d = catalog("DerBiCom")
    assert len(d.identities) == 4 and d.num_ops == 2 and d.base == "BiCom"
    with pytest.raises(UnknownVariety):
        catalog("Foo")


def test_instantiate():
    lc = catalog("BiCom").identities[0]
    assert instantiate(lc, X[:3]) == P("(x1 (x2 x3)) - (x2 (x1 x3))")
    rc = catalog("BiCom").identities[1]
    got = instantiate(rc, [X[0], M("(x2 x3)"), X[3]])
    assert got == P("((x1 (x2 x3)) x4) - ((x1 x4) (x2 x3))")
    with pytest.raises(VariableClash):
        instantiate(lc, [X[0], X[0], X[1]])
    with pytest.raises(ArityMismatch):
        instantiate(lc, X[:2])


@pytest.mark.parametrize("name, n, span", [("BiCom", 3, 6), ("Alt", 3, 5), ("As", 3, 6), ("Com", 3, 11)])
def test_consequence_span_dims(name, n, span):
    assert consequence_basis(name, n).rank == span
    assert echelonize([varieties.to_vector(e, consequence_basis(name, n).index()) for e in consequences(name, n)],
                      consequence_basis(name, n).ambient).rank == span


def test_plain_dims():
    assert [dim_variety("BiCom", n) for n in range(2, 6)] == [2, 6, 14, 30]
    assert [dim_variety("As", n) for n in range(1, 5)] == [1, 2, 6, 24]
    assert [dim_variety("Com", n) for n in range(1, 5)] == [1, 1, 1, 1]
    assert dim_variety("Alt", 3) == 7
    assert dim_variety("Assos", 3) == 7
    # dim Nov(n) = binomial(2n-2, n-1)
    assert dim_variety("Nov", 3) == comb(4, 2)


def test_bicom_normal_form_examples():
    assert bicom_normal_form(M("(x2 (x1 x3))")) == M("(x1 (x2 x3))")
    assert bicom_normal_form(M("((x1 x3) x2)")) == M("((x1 x2) x3)")
    assert bicom_normal_form(P("(x1 (x2 x3)) - (x2 (x1 x3))")) == 0


def test_bicom_normal_form_matches_quotient():
    # closed form agrees with the generic quotient: equal normal forms iff equal coordinates
    for n in (3, 4):
        comp = component("BiCom", n, -1)
        classes = {}
        for m in enumerate_multilinear(n, -1):
            classes.setdefault(bicom_normal_form(m).monomials()[0], []).append(comp.coordinates(m))
        assert len(classes) == comp.dim
        assert all(len(set(v)) == 1 for v in classes.values())


def test_bicom_sides():
    assert bicom_sides(M("(x1 (x2 x3))")) == ((X[0], X[1]), (X[2],))


def test_quotient_normal_form_examples():
    lc = instantiate(catalog("BiCom").identities[0], [Generator(1, 1), X[1], Generator(3, 1)])
    assert not any(quotient_normal_form("BiCom", 3, -1, lc))
    alt = P("((x1 x2) x3) + ((x2 x1) x3) - (x1 (x2 x3)) - (x2 (x1 x3))")
    assert not any(quotient_normal_form("Alt", 3, -3, alt))
    assert not any(quotient_normal_form("Com", 2, -1, P("(x1 x2') - (x2' x1)")))
    assert any(quotient_normal_form("Alt", 3, -3, M("((x1 x2) x3)")))


def test_component_errors():
    comp = component("Alt", 3, -1)
    with pytest.raises(ArityMismatch):
        comp.coordinates(M("(x1' x2)"))
    with pytest.raises(MixedWeight):
        comp.coordinates(M("(x1 (x2 x3))"))


def _direct_relations(name, n, w):
    """Consequences written out directly in the decorated ambient: identities of arity 3
    applied to decorated leaves and, at n = 4, to one decorated pair or with an outer factor."""
    v = catalog(name)
    out = []
    for dec in compositions(n + w, n):
        leaves = [Generator(i + 1, d) for i, d in enumerate(dec)]
        for ident in v.identities:
            if n == 3:
                for p in itertools.permutations(leaves):
                    out.append(instantiate(ident, list(p)))
                continue
            for p in itertools.permutations(leaves):
                a, b, c, d = p
                for pair in (Node(a, b), Node(b, a)):
                    for args in itertools.permutations([pair, c, d]):
                        out.append(instantiate(ident, list(args)))
                inner = instantiate(ident, [a, b, c])
                out.append(Expr((Node(d, m), k) for m, k in inner))
                out.append(Expr((Node(m, d), k) for m, k in inner))
    return out


@pytest.mark.parametrize("name, n", [("Alt", 3), ("BiCom", 3), ("Assos", 3), ("Alt", 4), ("BiCom", 4)])
def test_decorated_component_matches_direct_generation(name, n):
    comp = component(name, n, -1)
    ambient = enumerate_multilinear(n, -1)
    idx = {m: i for i, m in enumerate(ambient)}
    rels = _direct_relations(name, n, -1)
    rank = echelonize([varieties.to_vector(r, idx) for r in rels], ambient).rank
    assert len(ambient) - rank == comp.dim
    assert all(comp.is_zero(r) for r in rels)
    assert comp.span_basis().rank == rank


def test_disk_cache_roundtrip(tmp_path):
    old = varieties.get_cache_dir()
    varieties.set_cache_dir(tmp_path)
    try:
        varieties.consequence_basis.cache_clear()
        first = consequence_basis("Assos", 3)
        assert (tmp_path / "Assos_3_none.json").exists()
        varieties.consequence_basis.cache_clear()
        again = consequence_basis("Assos", 3)
        assert (again.rows, again.pivot_columns) == (first.rows, first.pivot_columns)
    finally:
        varieties.set_cache_dir(old)
        varieties.consequence_basis.cache_clear()
