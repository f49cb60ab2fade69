import itertools
from math import comb, factorial

import pytest

from opch.derived import (
    check_di_identities,
    check_weight_criterion,
    criterion_data,
    dim_dervar,
    enumerate_di_monomials,
    expansion_matrix,
    hadamard_dim,
    novikov_check,
    tau,
)
from opch.errors import PairMismatch
from opch.terms import Generator, parse_term, relabel, relabel_expr, weight

P = parse_term


def test_tau_examples():
    assert tau(P("(x1 < x2)")) == P("(x1 x2')")
    assert tau(P("(x1 > (x2 < x3))")) == P("(x1' (x2 x3'))")
    assert tau(P("((x1 > x2) > x3)")) == P("((x1'' x2) x3) + ((x1' x2') x3)")
    assert tau(P("x1")) == P("x1")


def test_tau_linear():
    a, b = P("(x1 > x2)"), P("(x2 < x1)")
    assert tau(a * 3 - b) == tau(a) * 3 - tau(b)


def test_di_monomial_counts():
    assert [len(enumerate_di_monomials(n)) for n in (2, 3, 4)] == [4, 48, 960]


def test_tau_image_has_weight_minus_one():
    for n in (1, 2, 3, 4):
        for t in enumerate_di_monomials(n):
            assert weight(tau(t)) == -1


def test_tau_equivariant():
    for t in enumerate_di_monomials(3):
        for p in itertools.permutations((1, 2, 3)):
            perm = dict(zip((1, 2, 3), p))
            assert tau(relabel(t, perm)) == relabel_expr(tau(t), perm)


@pytest.mark.parametrize("name, n, expected", [
    ("BiCom", 2, 4), ("BiCom", 3, 36), ("BiCom", 4, 280),
    ("As", 2, 4), ("As", 3, factorial(3) * comb(4, 2)),
    ("Assos", 3, 42), ("Alt", 3, 42),
    ("Com", 4, 20),
])
def test_dim_dervar(name, n, expected):
    assert dim_dervar(name, n) == expected


def test_expansion_matrix_shape():
    em = expansion_matrix("BiCom", 3)
    assert len(em.columns) == 48 and len(em.vectors) == 48
    assert em.size == 6 * 6


def test_hadamard():
    assert hadamard_dim("BiCom", 4) == 14 * 20
    assert hadamard_dim("Alt", 3) == 42


@pytest.mark.parametrize("name, n", [("BiCom", 3), ("Alt", 3), ("Com", 3), ("Assos", 3), ("BiCom", 4)])
def test_weight_criterion_holds(name, n):
    assert check_weight_criterion(name, n)


def test_zinbiel_fails_somewhere():
    data = {n: criterion_data("Zinb", n) for n in (2, 3, 4)}
    assert any(r < d for r, d in data.values())
    assert all(r <= d for r, d in data.values())


@pytest.mark.parametrize("dv, span", [("DerBiCom", 12), ("DerAlt", 6), ("DerAssos", 6)])
def test_di_identities(dv, span):
    rep = check_di_identities(dv)
    assert rep.identities_vanish
    assert rep.span_dim == rep.expected_span_dim == span
    assert rep.span_in_kernel and rep.ok


def test_di_identities_pair_mismatch():
    with pytest.raises(PairMismatch):
        check_di_identities("DerAlt", "BiCom")
    with pytest.raises(PairMismatch):
        check_di_identities("Alt")


def test_novikov_convention():
    assert all(ok for _, ok in novikov_check())


def test_novikov_with_succ_is_not_novikov():
    # reading the product as > instead gives the opposite algebra; right commutativity then fails
    from opch.varieties import component

    rel = P("((x1 > x2) > x3) - ((x1 > x3) > x2)")
    assert not component("Com", 3, -1).is_zero(tau(rel))
