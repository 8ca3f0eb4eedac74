import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from shuffled_orders import counting
from shuffled_orders.backforth import PartialIso
from shuffled_orders.ordertype import CANONICAL_SIX, EMPTY, ETA, ETA_ONE, ONE, ONE_ETA, to_name
from shuffled_orders.shuffle import ShiftedRelation
from shuffled_orders.workbench import (
    THEORIES, IllegalTuple, InvariantTuple, ModelSpecError, build_model, check_axioms, check_legal,
    decide_iso_models, extract_invariant_tuple, family_legal, indices, legality_violations,
    list_canonical_models, load_model_spec, probe_type, realizable, tuple_from_json,
)


def t91(q, ps, B=None):
    B = B or len(ps)
    return InvariantTuple.of({"q": q, **{f"p{i}": v for i, v in enumerate(ps)}}, B)


def test_indices_per_theory():
    assert indices("T0", None) == ["p"]
    assert indices("TDENSE", 4) == ["q"]
    assert indices("T91", 3) == ["q", "p0", "p1", "p2"]
    with pytest.raises(ValueError):
        indices("T91", None)
    with pytest.raises(ValueError):
        indices("T7", 3)


@pytest.mark.parametrize("p, name", [(EMPTY, "M_empty"), (ETA, "M_inf"), (ONE_ETA, "M_bullet")])
def test_t0_models(p, name):
    M = build_model("T0", InvariantTuple.of({"p": p}))
    assert extract_invariant_tuple(M)["p"] == p
    assert {m.name: m.tuple["p"] for m in list_canonical_models("T0")}[name] == p


def test_t0_bullet_minimum_is_the_origin_point():
    M = build_model("T0", InvariantTuple.of({"p": ONE_ETA}))
    assert M.parts["p"].minimum() == 0


def test_t0_models_pairwise_not_iso():
    ms = [build_model("T0", m.tuple) for m in list_canonical_models("T0")]
    assert len(ms) == 3
    for a, b in itertools.combinations(ms, 2):
        d = decide_iso_models(a, b)
        assert d.verdict == "NOT_ISO" and d.reason.startswith("p differs")


def test_t1_listing_and_minimum_colors():
    ms = list_canonical_models("T1", 10)
    assert [m.name for m in ms] == ["M_empty", "M_inf"] + [f"M_{i}" for i in range(10)]
    M3 = build_model("T1", ms[5].tuple)
    M5 = build_model("T1", ms[7].tuple)
    assert extract_invariant_tuple(M3).min_color("p") == 3
    d = decide_iso_models(M3, M5)
    assert d.verdict == "NOT_ISO" and "minimum color" in d.reason


@pytest.mark.parametrize("theory", THEORIES)
def test_equal_tuples_iso_with_witness(theory):
    for m in list_canonical_models(theory, 2):
        M, N = build_model(theory, m.tuple), build_model(theory, m.tuple)
        d = decide_iso_models(M, N, evidence_depth=64)
        assert d.iso and isinstance(d.witness, PartialIso) and d.witness.verify(M, N)
        assert len(d.witness) == 64 or M.size() is not None


def test_mismatched_models_rejected():
    a = build_model("T0", InvariantTuple.of({"p": ETA}))
    b = build_model("T1", InvariantTuple.of({"p": ETA}, 2))
    with pytest.raises(ValueError):
        decide_iso_models(a, b)
    with pytest.raises(ValueError):
        decide_iso_models(build_model("T1", InvariantTuple.of({"p": ETA}, 2)),
                          build_model("T1", InvariantTuple.of({"p": ETA}, 3)))


@pytest.mark.parametrize("theory", THEORIES)
@pytest.mark.parametrize("B", [1, 2, 5, 8])
def test_round_trip_every_listed_model(theory, B):
    for m in list_canonical_models(theory, B):
        assert extract_invariant_tuple(build_model(theory, m.tuple)) == m.tuple


def test_listing_sizes():
    assert len(list_canonical_models("T0")) == 3
    assert [len(list_canonical_models("T1", B)) for B in (1, 4, 10)] == [3, 6, 12]
    assert len(list_canonical_models("TDENSE", 3)) == 6
    assert len(list_canonical_models("TSHUF", 4)) == 3
    sizes = [len(list_canonical_models("T91", B)) for B in (1, 2, 4, 8)]
    assert sizes == [3 * (B + 2) for B in (1, 2, 4, 8)] and sizes == sorted(set(sizes))


def test_saturated_t91_extracts_all_eta():
    M = build_model("T91", t91(ETA, [ETA] * 4))
    assert all(v == ETA for _, v in extract_invariant_tuple(M).entries)


@pytest.mark.parametrize("q", [EMPTY, ETA, ONE_ETA])
def test_t91_builds_pass_axioms(q):
    M = build_model("T91", t91(q, [ETA, ONE_ETA, ETA]))
    vs = check_axioms(M, 20)
    assert all(vs), [v for v in vs if not v]


@pytest.mark.parametrize("theory, B", [("T0", None), ("T1", 3), ("TSHUF", 3), ("TDENSE", 2)])
def test_other_theories_pass_axioms(theory, B):
    for m in list_canonical_models(theory, B):
        vs = check_axioms(build_model(theory, m.tuple), 20)
        assert all(vs), [v for v in vs if not v]


def test_axiom_check_catches_incoherent_blocks():
    M = build_model("T91", t91(EMPTY, [ETA] * 3))
    F = M.family
    F.relations[(0, 2)] = ShiftedRelation(F.orders[0], F.orders[2], shift=-3)
    failed = [v.check for v in check_axioms(M, 15) if not v]
    assert "blocks: coherence" in failed


def test_singleton_forces_omission():
    with pytest.raises(IllegalTuple) as info:
        build_model("T91", t91(EMPTY, [ONE, ETA, EMPTY]))
    assert info.value.clause == "singleton-forces-omission"


def test_two_minima_rejected():
    with pytest.raises(IllegalTuple) as info:
        check_legal("T91", t91(EMPTY, [ONE_ETA, ONE_ETA, ETA]))
    assert info.value.clause == "at-most-one-min"
    assert family_legal([ETA_ONE, ETA_ONE], counting.NON_DEFINABLE)[0][0] == "at-most-one-max"


def test_orientation_and_min_color_clauses():
    assert legality_violations("T0", InvariantTuple.of({"p": ETA_ONE}))[0][0] == "orientation"
    assert legality_violations("T1", InvariantTuple.of({"p": ONE_ETA}, 3))[0][0] == "min-color"
    assert legality_violations("T1", InvariantTuple.of({"p": ONE_ETA}, 3, {"p": 5}))[0][0] == "min-color"
    assert legality_violations("T0", InvariantTuple.of({"p": ONE_ETA}, None, {"p": 0}))[0][0] == "min-color"
    assert legality_violations("T1", InvariantTuple.of({"p": ONE_ETA}, 3, {"p": 2})) == []


def test_realizability_is_data():
    q = realizable("T91", "q")
    assert q == {"0": True, "1": False, "eta": True, "1+eta": True, "eta+1": False, "1+eta+1": False}
    assert all(realizable("TDENSE", "q").values())
    with pytest.raises(KeyError):
        realizable("T0", "q")


@settings(max_examples=60)
@given(st.lists(st.sampled_from(CANONICAL_SIX), min_size=1, max_size=5), st.sampled_from(CANONICAL_SIX))
def test_accepted_t91_tuples_round_trip(ps, q):
    t = t91(q, ps)
    if legality_violations("T91", t):
        with pytest.raises(IllegalTuple):
            build_model("T91", t)
        return
    assert sum(p.min_exists for p in ps) <= 1 and sum(p.max_exists for p in ps) <= 1
    assert extract_invariant_tuple(build_model("T91", t)) == t


def test_probe_agrees_with_exact_types():
    for name, t in (("0", EMPTY), ("eta", ETA), ("1+eta", ONE_ETA)):
        M = build_model("T0", InvariantTuple.of({"p": t}))
        assert probe_type(M.parts["p"]) == t


def test_model_spec_round_trip(tmp_path):
    for m in list_canonical_models("T1", 3) + list_canonical_models("T91", 2):
        theory = "T1" if "p" in m.tuple.indices else "T91"
        p = tmp_path / "m.json"
        p.write_text(json.dumps(m.tuple.to_json(theory)))
        assert load_model_spec(str(p)) == (theory, m.tuple)


@pytest.mark.parametrize("doc, field", [
    ([], "<document>"),
    ({"theory": "T9"}, "theory"),
    ({"theory": "T91", "tuple": {}}, "truncation"),
    ({"theory": "T91", "truncation": 1, "tuple": {"q": "eta"}}, "tuple"),
    ({"theory": "T0", "tuple": {"p": "eta+eta"}}, "tuple.p"),
    ({"theory": "T0", "tuple": {"p": "eta"}, "extra": 1}, "extra"),
    ({"theory": "T1", "truncation": 2, "tuple": {"p": "1+eta"}, "min-colors": {"p": -1}}, "min-colors.p"),
])
def test_model_spec_errors_name_the_field(doc, field):
    with pytest.raises(ModelSpecError) as info:
        tuple_from_json(doc)
    assert info.value.field == field


def test_describe_and_names():
    t = InvariantTuple.of({"p": ONE_ETA}, 4, {"p": 2})
    assert t.describe() == "{p: 1+eta; min colors p: D2}"
    assert to_name(t["p"]) == "1+eta"
