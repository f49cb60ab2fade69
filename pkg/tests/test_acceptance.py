"""Acceptance criteria 1-12, one printed PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -v`` (the lines are printed even without ``-s``)
or ``python3 tests/test_acceptance.py`` for the bare summary.
"""
import sys
from math import comb, factorial

import pytest

from opch.derived import check_di_identities, criterion_data, dim_dervar, novikov_check
from opch.express import express_alt, express_bicom, express_solver
from opch.properties import RANDOM_CASES, SUITES
from opch.report import REFERENCE_TABLES, reference_entry_holds, roundtrip_failures
from opch.varieties import component, dim_variety


def _emit(capsys, n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


def criterion_1():
    got = [component("Com", n, -1).dim for n in range(1, 5)]
    want = [comb(2 * n - 2, n - 1) for n in range(1, 5)]
    return got == want == [1, 2, 6, 20], f"Com weight -1 dims {got}, expected {want}"


def criterion_2():
    bicom = [dim_variety("BiCom", n) for n in range(2, 6)]
    rest = (dim_variety("Alt", 3), dim_variety("Assos", 3), dim_variety("As", 3))
    ok = bicom == [2 ** n - 2 for n in range(2, 6)] == [2, 6, 14, 30] and rest == (7, 7, 6)
    return ok, f"BiCom(2..5) {bicom}; Alt(3), Assos(3), As(3) = {rest}"


def criterion_3():
    got = [dim_dervar("BiCom", n) for n in (2, 3, 4)]
    want = [(2 ** n - 2) * comb(2 * n - 2, n - 1) for n in (2, 3, 4)]
    return got == want == [4, 36, 280], f"DerBiCom(2..4) {got}, expected {want}"


def criterion_4():
    got = [dim_dervar("As", n) for n in (2, 3)]
    want = [factorial(n) * comb(2 * n - 2, n - 1) for n in (2, 3)]
    return got == want == [4, 36], f"DerAs(2,3) {got}, expected {want}"


def criterion_5():
    got = dim_dervar("Assos", 3)
    want = (factorial(3) + 2 ** 3 - 6 - 1) * comb(4, 2)
    return got == want == 42, f"DerAssos(3) {got}, expected {want}"


def criterion_6():
    got = dim_dervar("Alt", 3)
    alt_nov = dim_variety("Alt", 3) * comb(4, 2)
    bicom_nov = dim_variety("BiCom", 3) * comb(4, 2)
    ok = got == alt_nov == 42 and got != bicom_nov == 36
    return ok, f"DerAlt(3) {got}: Alt(3)*Nov(3) = {alt_nov}, BiCom(3)*Nov(3) = {bicom_nov}; supports Alt (x) Nov"


def criterion_7():
    cases = [("Com", n) for n in range(1, 5)] + [("As", n) for n in range(1, 4)] + \
            [("BiCom", n) for n in range(1, 5)] + [("Alt", n) for n in range(1, 4)] + [("Assos", n) for n in range(1, 4)]
    bad = [(v, n, criterion_data(v, n)) for v, n in cases if criterion_data(v, n)[0] != criterion_data(v, n)[1]]
    zinb = {n: criterion_data("Zinb", n) for n in range(1, 5)}
    # negative control is recorded, not asserted at a particular arity
    first = next((n for n, (r, d) in zinb.items() if r < d), None)
    return not bad, f"{len(cases)} criterion cases hold, failures {bad}; Zinbiel (rank, dim) {zinb}, first failure n={first}"


def criterion_8():
    parts, ok = [], True
    for dv, span in (("DerBiCom", 12), ("DerAlt", 6), ("DerAssos", 6)):
        rep = check_di_identities(dv)
        good = rep.identities_vanish and rep.span_in_kernel and rep.span_dim == rep.expected_span_dim == span
        ok &= good
        parts.append(f"{dv}: vanish={rep.identities_vanish} span={rep.span_dim}/{48 - dim_dervar(rep.base, 3)}")
    return ok, "; ".join(parts)


def criterion_9():
    counts = {}
    for name, top in (("BiCom", 4), ("Alt", 3), ("Assos", 3)):
        for n in range(1, top + 1):
            counts[f"solver {name} {n}"] = roundtrip_failures(name, n, lambda m, name=name: express_solver(name, m))
    for name, fn, top in (("BiCom", express_bicom, 4), ("Alt", express_alt, 3)):
        for n in range(1, top + 1):
            counts[f"recursive {name} {n}"] = roundtrip_failures(name, n, fn, against_solver=True)
    bad = {k: v for k, v in counts.items() if v}
    return not bad, f"{len(counts)} roundtrip sweeps, failing sweeps {bad}"


def criterion_10():
    misses = [(v, mono, expr) for v, table in REFERENCE_TABLES.items() for mono, expr in table.items()
              if not reference_entry_holds(v, mono, expr)]
    total = sum(len(t) for t in REFERENCE_TABLES.values())
    detail = f"{total - len(misses)}/{total} reference entries reproduced"
    if misses:
        detail += "; not reproduced: " + ", ".join(f"{v} {m} = {e}" for v, m, e in misses)
    return not misses and total == 12, detail


def criterion_11():
    res = novikov_check()
    return len(res) == 2 and all(ok for _, ok in res), f"Nov identities with a<b: {res}"


def criterion_12():
    res = {name: fn() for name, fn in SUITES}
    return all(v == 0 for v in res.values()), f"violations per suite (exhaustive n<=3 + {RANDOM_CASES} seeded n=4): {res}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]


@pytest.mark.parametrize("n", range(1, 13), ids=[f"criterion_{i:02d}" for i in range(1, 13)])
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    assert _emit(capsys, n, ok, detail), detail


if __name__ == "__main__":
    results = [_emit(None, i, *fn()) for i, fn in enumerate(CRITERIA, 1)]
    sys.exit(0 if all(results) else 1)
