import io
import json
import subprocess
import sys

import pytest

from shuffled_orders.backforth import spec_corpus
from shuffled_orders.cli import main, run
from shuffled_orders.realize import ColoredOrderSpec, DenseShuffle, Point


def call(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    text = out.getvalue()
    return code, [json.loads(line) for line in text.splitlines()] if "--pretty" not in argv else text


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        p = tmp_path / name
        p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(p)
    return write


def test_count_t0(files):
    code, recs = call("count", "--summary", files("t0.summary", {"classes": [{"n": 1, "kind": "definable-right"}]}))
    assert code == 0 and recs[0]["count"] == 3 and recs[0]["classes"][0]["kappa"] == 3


def test_count_continuum(files):
    code, recs = call("count", "--summary", files("t.summary", {"c2": True, "classes": "infinitely-many"}))
    assert code == 0 and recs == [{"command": "count", "count": "continuum", "classes": "infinitely-many"}]


def test_shuffle_verify_passes():
    code, recs = call("shuffle-verify", "--k", "3", "--depth", "50")
    assert code == 0
    assert recs[-1]["check"] == "canonical-family" and recs[-1]["result"] == "pass" and recs[-1]["depth"] == 50
    assert all(set(r) >= {"check", "depth", "result", "counterexample"} for r in recs)


def test_iso_distinct_specs_exit_1(files):
    a = files("a.order", ColoredOrderSpec((DenseShuffle({0, 1}, 0, None),)).dumps())
    b = files("b.order", ColoredOrderSpec((DenseShuffle({0, 1}),)).dumps())
    code, recs = call("iso", "--spec-a", a, "--spec-b", b)
    assert code == 1 and recs[0]["verdict"] == "not-iso" and "min" in recs[0]["reason"]
    assert recs[0]["witness-map"] is None and recs[0]["depth"] == 64


def test_iso_equal_specs(files):
    s = spec_corpus()[12].dumps()
    code, recs = call("iso", "--spec-a", files("a.order", s), "--spec-b", files("b.order", s), "--depth", "16")
    assert code == 0 and recs[0]["verdict"] == "iso" and len(recs[0]["witness-map"]) == 16


def test_iso_reports_file_line_and_field(files):
    bad = files("bad.order", '{\n  "blocks": [\n    {"dense": {"colors": [0], "min": 3, "max": null}}\n  ]\n}')
    good = files("good.order", ColoredOrderSpec((Point(0),)).dumps())
    code, recs = call("iso", "--spec-a", good, "--spec-b", bad)
    assert code == 2
    assert recs[0]["file"] == bad and recs[0]["line"] == 3 and recs[0]["field"] == "blocks[0].dense.min"


def test_build_and_invariants(files):
    m = files("m.json", {"theory": "T91", "truncation": 3, "tuple": {"q": "eta", "p0": "eta", "p1": "1+eta", "p2": "eta"}})
    code, recs = call("build", "--tuple", m, "--depth", "12")
    assert code == 0 and recs[0]["result"] == "pass" and recs[0]["depth"] == 12
    code, recs = call("invariants", "--tuple", m)
    assert code == 0 and recs[0]["tuple"] == {"q": "eta", "p0": "eta", "p1": "1+eta", "p2": "eta"}


def test_build_rejects_illegal_tuple_with_clause(files):
    m = files("m.json", {"theory": "T91", "truncation": 2, "tuple": {"q": "0", "p0": "1", "p1": "eta"}})
    code, recs = call("build", "--tuple", m)
    assert code == 1 and recs[0]["result"] == "rejected" and recs[0]["clause"] == "singleton-forces-omission"


def test_iso_models(files):
    a = files("a.json", {"theory": "T1", "truncation": 6, "tuple": {"p": "1+eta"}, "min-colors": {"p": 3}})
    b = files("b.json", {"theory": "T1", "truncation": 6, "tuple": {"p": "1+eta"}, "min-colors": {"p": 5}})
    code, recs = call("iso-models", "--spec-a", a, "--spec-b", b)
    assert code == 1 and recs[0]["verdict"] == "not-iso" and "minimum color" in recs[0]["reason"]
    code, recs = call("iso-models", "--spec-a", a, "--spec-b", a, "--depth", "20")
    assert code == 0 and recs[0]["verdict"] == "iso" and len(recs[0]["witness-map"]) == 20


def test_iso_models_theory_mismatch_is_input_error(files):
    a = files("a.json", {"theory": "T0", "tuple": {"p": "eta"}})
    b = files("b.json", {"theory": "TSHUF", "truncation": 2, "tuple": {"p": "eta"}})
    assert call("iso-models", "--spec-a", a, "--spec-b", b)[0] == 2


def test_list_models():
    code, recs = call("list-models", "--theory", "T1", "--truncation", "10")
    assert code == 0 and len(recs) == 12 and recs[5]["name"] == "M_3" and recs[5]["min-colors"] == {"p": 3}
    assert all(r["unbounded"] for r in recs)
    assert len(call("list-models", "--theory", "T0")[1]) == 3


def test_enumerate_tuples(files):
    s = files("s.summary", {"classes": [{"n": 2, "kind": "non-definable"}, {"n": "inf", "kind": "definable-left"}]})
    code, recs = call("enumerate-tuples", "--summary", s, "--truncation", "4")
    assert code == 0
    assert recs[0]["count"] == recs[0]["kappa"] == 12
    assert recs[1]["kappa"] == "aleph0" and recs[1]["count"] == 6 and recs[1]["truncation"] == 4


def test_limit_build():
    code, recs = call("limit-build", "--k", "2", "--depth", "5")
    assert code == 0 and len(recs[0]["elements"]) == 5 and recs[0]["depth"] == 5
    assert recs[0]["elements"][0] == {"origin": 0, "anchor": "0", "color": 0}


@pytest.mark.parametrize("argv", [
    [], ["frobnicate"], ["count"], ["count", "--summary", "x", "--bogus"],
    ["shuffle-verify", "--k", "3", "--depth", "0"], ["list-models", "--theory", "T7"],
])
def test_usage_errors_exit_2(argv):
    assert run(argv) == 2


def test_missing_file_exit_2():
    code, recs = call("count", "--summary", "/nonexistent/t.summary")
    assert code == 2 and recs[0]["file"] == "/nonexistent/t.summary"


def test_pretty_output_is_not_json():
    code, text = call("shuffle-verify", "--k", "2", "--depth", "5", "--pretty")
    assert code == 0 and "result: pass" in text and not text.lstrip().startswith("{")


def test_jobs_preserve_order_and_bytes():
    a = io.StringIO()
    b = io.StringIO()
    main(["shuffle-verify", "--k", "3", "--k", "2", "--depth", "10"], out=a)
    main(["shuffle-verify", "--k", "3", "--k", "2", "--depth", "10", "--jobs", "2"], out=b)
    assert a.getvalue() == b.getvalue()


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "shuffled_orders.cli", "shuffle-verify", "--k", "2", "--depth", "8"],
                          capture_output=True, text=True)
    again = subprocess.run([sys.executable, "-m", "shuffled_orders.cli", "shuffle-verify", "--k", "2", "--depth", "8"],
                           capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == again.stdout
