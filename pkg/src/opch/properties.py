"""Randomized and exhaustive property checks over small arities.

Each suite returns the number of violations; zero means the property held on
every case.  Exhaustive domains cover arity <= 3, the random part draws
``cases`` arity-4 samples from ``random.Random(seed)``.
"""
from __future__ import annotations

import itertools
import random
from typing import Callable, Dict, Iterator, List, Tuple

from .derived import enumerate_di_monomials, tau, tau_monomial
from .linalg import echelonize
from .terms import (
    PREC,
    SUCC,
    Generator,
    Monomial,
    Node,
    derive,
    fill_shape,
    monomial_weight,
    product,
    relabel,
    relabel_expr,
    strip,
    tree_shapes,
    weight,
)
from .varieties import bicom_normal_form, component

SEED = 20240601
RANDOM_CASES = 1000
RANDOM_ARITY = 4
MAX_DER = 3


def exhaustive_monomials(max_arity: int = 3, max_der: int = 2) -> Iterator[Monomial]:
    """Every multilinear monomial up to ``max_arity`` with leaf orders ``<= max_der``."""
    for n in range(1, max_arity + 1):
        for shape in tree_shapes(n):
            for perm in itertools.permutations(range(1, n + 1)):
                for ders in itertools.product(range(max_der + 1), repeat=n):
                    yield fill_shape(shape, [Generator(v, d) for v, d in zip(perm, ders)])


def random_monomial(rng: random.Random, n: int = RANDOM_ARITY, max_der: int = MAX_DER) -> Monomial:
    shape = rng.choice(tree_shapes(n))
    perm = rng.sample(range(1, n + 1), n)
    return fill_shape(shape, [Generator(v, rng.randint(0, max_der)) for v in perm])


def random_di_monomial(rng: random.Random, n: int = RANDOM_ARITY) -> Monomial:
    shape = rng.choice(tree_shapes(n))
    perm = rng.sample(range(1, n + 1), n)
    ops = [rng.choice((SUCC, PREC)) for _ in range(n - 1)]
    return fill_shape(shape, [Generator(v) for v in perm], ops)


def _cases(exhaustive, make, seed: int, cases: int):
    yield from exhaustive
    rng = random.Random(seed)
    for _ in range(cases):
        yield make(rng)


def _di_exhaustive(max_arity=3):
    for n in range(1, max_arity + 1):
        yield from enumerate_di_monomials(n)


def weight_additivity(seed: int = SEED, cases: int = RANDOM_CASES) -> int:
    bad = 0
    for m in _cases(exhaustive_monomials(), random_monomial, seed, cases):
        if monomial_weight(m) != sum(d - 1 for d in m.ders):
            bad += 1
        elif isinstance(m, Node) and weight(m) != weight(m.left) + weight(m.right):
            bad += 1
    return bad


def leibniz(seed: int = SEED, cases: int = RANDOM_CASES) -> int:
    bad = 0
    for m in _cases(exhaustive_monomials(), random_monomial, seed, cases):
        d = derive(m)
        if isinstance(m, Node):
            rhs = product(derive(m.left), m.right) + product(m.left, derive(m.right))
            bad += d != rhs
        if any(monomial_weight(u) != monomial_weight(m) + 1 for u in d.monomials()):
            bad += 1
    return bad


def tau_weight(seed: int = SEED, cases: int = RANDOM_CASES) -> int:
    bad = 0
    for t in _cases(_di_exhaustive(), random_di_monomial, seed, cases):
        e = tau_monomial(t)
        if not e or any(monomial_weight(u) != -1 for u in e.monomials()):
            bad += 1
    return bad


def tau_equivariance(seed: int = SEED, cases: int = RANDOM_CASES) -> int:
    bad = 0
    rng = random.Random(seed + 1)
    for t in _cases(_di_exhaustive(), random_di_monomial, seed, cases):
        n = t.arity
        perm = dict(zip(range(1, n + 1), rng.sample(range(1, n + 1), n)))
        bad += tau(relabel(t, perm)) != relabel_expr(tau(t), perm)
    return bad


def normal_form_idempotence(seed: int = SEED, cases: int = RANDOM_CASES) -> int:
    """BiCom closed form and the generic quotient reduction are both idempotent."""
    bad = 0
    comps: Dict[int, object] = {}
    for m in _cases(exhaustive_monomials(), random_monomial, seed, cases):
        nf = bicom_normal_form(m)
        bad += bicom_normal_form(nf) != nf
        # decorated components are block diagonal over the plain one
        plain, _ = strip(m)
        if m.arity not in comps:
            comps[m.arity] = component("Alt", m.arity).plain
        basis = comps[m.arity]
        r = basis.reduce({basis.index()[plain]: 1})
        bad += basis.reduce(r) != r
    return bad


def rank_invariance(seed: int = SEED, cases: int = RANDOM_CASES, sample: int = 24) -> int:
    """Shuffling the input rows leaves the reduced echelon form unchanged."""
    from .derived import expansion_matrix

    bad = 0
    rng = random.Random(seed)
    for name, n in (("BiCom", 2), ("BiCom", 3), ("Alt", 3), ("Assos", 3)):
        em = expansion_matrix(name, n)
        ref = echelonize(em.vectors, em.size)
        vecs = list(em.vectors)
        rng.shuffle(vecs)
        got = echelonize(vecs, em.size)
        bad += (got.rows, got.pivot_columns) != (ref.rows, ref.pivot_columns)
    em = expansion_matrix("BiCom", RANDOM_ARITY)
    for _ in range(cases):
        rows = rng.sample(em.vectors, sample)
        ref = echelonize(rows, em.size)
        rng.shuffle(rows)
        got = echelonize(rows, em.size)
        bad += (got.rows, got.pivot_columns) != (ref.rows, ref.pivot_columns)
    return bad


SUITES: List[Tuple[str, Callable[..., int]]] = [
    ("weight-additivity", weight_additivity),
    ("leibniz", leibniz),
    ("tau-weight", tau_weight),
    ("tau-equivariance", tau_equivariance),
    ("nf-idempotence", normal_form_idempotence),
    ("rank-invariance", rank_invariance),
]
