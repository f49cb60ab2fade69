import io
import json

import pytest

from opch.cli import main
from opch.derived import tau
from opch.report import run_report
from opch.terms import parse_term
from opch.varieties import component


def run(*argv, cache=None):
    out = io.StringIO()
    args = ["--no-cache"] if cache is None else ["--cache-dir", str(cache)]
    code = main(args + list(argv), out=out)
    return code, out.getvalue().strip()


def test_wt():
    assert run("wt", "(x1 (x2' x3'))") == (0, "-1")


def test_tau():
    assert run("tau", "(x1 > (x2 < x3))") == (0, "(x1' (x2 x3'))")


def test_nf():
    assert run("nf", "--variety", "bicom", "((x1 x3) x2)") == (0, "((x1 x2) x3)")
    assert run("nf", "--variety", "alt", "((x1 x2) x3) + ((x2 x1) x3) - (x1 (x2 x3)) - (x2 (x1 x3))") == (0, "0")


def test_dims():
    assert run("dim", "--variety", "bicom", "--arity", "4") == (0, "14")
    assert run("dim-der", "--variety", "bicom", "--arity", "3") == (0, "36")


def test_criterion_exit_codes():
    code, text = run("criterion", "--variety", "alt", "--arity", "3")
    assert code == 0 and "holds" in text
    code, text = run("criterion", "--variety", "zinbiel", "--arity", "3")
    assert code == 1 and "fails" in text


def test_check_identities():
    code, text = run("check-identities", "--derived", "derbicom")
    assert code == 0
    assert "span dim 12 (expected 12)" in text


@pytest.mark.parametrize("method", ["solver", "recursive"])
def test_express(method):
    code, text = run("express", "--variety", "alt", "--method", method, "(x1'(x2 x3'))")
    assert code == 0
    t = parse_term(text)
    assert component("Alt", 3, -1).is_zero(tau(t) - parse_term("(x1' (x2 x3'))"))


def test_usage_and_parse_errors(capsys):
    assert run("wt", "(x1")[0] == 2
    assert run("dim", "--variety", "nope", "--arity", "3")[0] == 2
    assert run("express", "--variety", "alt", "(x1 x2)")[0] == 2
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


def test_cache_dir_flag(tmp_path):
    from opch import varieties

    old = varieties.get_cache_dir()
    try:
        code, _ = run("dim", "--variety", "assos", "--arity", "3", cache=tmp_path)
        assert code == 0
        assert varieties.get_cache_dir() == tmp_path
    finally:
        varieties.set_cache_dir(old)


def test_report_unwritable(tmp_path):
    code, _ = run("report", "--max-arity", "2", "--out", str(tmp_path / "missing" / "r.json"))
    assert code == 2


def test_report_small(tmp_path):
    out = tmp_path / "r.json"
    code, text = run("report", "--max-arity", "2", "--out", str(out))
    assert code == 0, text
    data = json.loads(out.read_text())
    assert data["schema"] == 1
    recs = {r["check_id"]: r for r in data["records"]}
    assert recs["C03-derbicom-dim-n2"]["computed"] == 4
    assert data["summary"]["total"] == len(data["records"])
    assert data["summary"]["failed"] == sum(not r["pass"] for r in data["records"])
    assert [r["check_id"] for r in data["records"]] == sorted(recs)


def test_report_deterministic_apart_from_timings():
    def strip(rep):
        d = rep.to_json()
        for r in d["records"]:
            r.pop("millis")
        return d

    assert strip(run_report(3)) == strip(run_report(3))


def test_report_records_reading_and_zinbiel():
    rep = run_report(3)
    recs = {r.check_id: r for r in rep.records}
    assert recs["C06-deralt-reading"].computed == "Alt (x) Nov"
    zinb = [r for r in rep.records if r.variety == "Zinb"]
    assert zinb and all(r.kind == "record" for r in zinb)
    assert "arity 3" in rep.notes["zinb_first_failure"]
