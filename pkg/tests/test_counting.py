import itertools
import json

import pytest
from hypothesis import given, strategies as st

from shuffled_orders import counting
from shuffled_orders.counting import (
    ALEPH0, CONTINUUM, DEFINABLE_LEFT, DEFINABLE_RIGHT, INFINITE, INFINITELY_MANY, NON_DEFINABLE,
    ClassSummary, SummaryFileError, TheorySummary, count_models, enumerate_invariant_tuples, kappa,
    legal_dense_tuples, load_summary, summary_from_json, summary_to_json,
)
from shuffled_orders.ordertype import CANONICAL_SIX, EMPTY, ETA, ETA_ONE, ONE, ONE_ETA, ONE_ETA_ONE


def brute_force(n, kind):
    """Filter all 6^n tuples through the legality rules, stated directly."""
    out = []
    for t in itertools.product(CANONICAL_SIX, repeat=n):
        if kind == NON_DEFINABLE:
            if all(x == EMPTY for x in t):
                ok = True
            elif all(x in (EMPTY, ONE) for x in t):
                ok = sum(x == ONE for x in t) == 1
            else:
                ok = (all(x.is_dense for x in t)
                      and sum(x.has_min for x in t) <= 1 and sum(x.has_max for x in t) <= 1)
        else:
            end = ETA_ONE if kind == DEFINABLE_LEFT else ONE_ETA
            ok = all(x == EMPTY for x in t) or (set(t) <= {ETA, end} and sum(x == end for x in t) <= 1)
        if ok:
            out.append(t)
    return out


@pytest.mark.parametrize("kind", [DEFINABLE_LEFT, DEFINABLE_RIGHT, NON_DEFINABLE])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_enumeration_matches_brute_force(kind, n):
    assert sorted(map(repr, enumerate_invariant_tuples(ClassSummary(n, kind)))) == sorted(map(repr, brute_force(n, kind)))


def test_kappa_examples():
    assert kappa(ClassSummary(1, DEFINABLE_RIGHT)) == 3
    assert kappa(ClassSummary(1, NON_DEFINABLE)) == 6
    assert kappa(ClassSummary(2, NON_DEFINABLE)) == 12
    assert kappa(ClassSummary(INFINITE, NON_DEFINABLE)) == ALEPH0


def test_per_class_examples():
    assert enumerate_invariant_tuples(ClassSummary(1, DEFINABLE_LEFT)) == [(EMPTY,), (ETA,), (ETA_ONE,)]
    assert enumerate_invariant_tuples(ClassSummary(1, DEFINABLE_RIGHT)) == [(EMPTY,), (ETA,), (ONE_ETA,)]
    got = {t[0] for t in enumerate_invariant_tuples(ClassSummary(1, NON_DEFINABLE))}
    assert got == {EMPTY, ONE, ETA, ONE_ETA, ETA_ONE, ONE_ETA_ONE}
    assert len(legal_dense_tuples(1)) == 4 and len(legal_dense_tuples(2)) == 9


@pytest.mark.parametrize("n", range(1, 21))
def test_counts_match_closed_forms(n):
    assert len(legal_dense_tuples(n)) == (n + 1) ** 2
    for kind in (DEFINABLE_LEFT, DEFINABLE_RIGHT, NON_DEFINABLE):
        ts = enumerate_invariant_tuples(ClassSummary(n, kind))
        assert len(ts) == len(set(ts)) == kappa(ClassSummary(n, kind))


@pytest.mark.parametrize("n", range(1, 9))
def test_dense_tuples_have_at_most_one_endpoint_each(n):
    for t in legal_dense_tuples(n):
        assert sum(x.has_min for x in t) <= 1
        assert sum(x.has_max for x in t) <= 1


def test_infinite_class_uses_truncation():
    ts = enumerate_invariant_tuples(ClassSummary(INFINITE, DEFINABLE_RIGHT), truncation=5)
    assert len(ts) == 7 and all(len(t) == 5 for t in ts)
    with pytest.raises(ValueError):
        enumerate_invariant_tuples(ClassSummary(INFINITE, DEFINABLE_RIGHT), truncation=0)


def test_count_examples():
    assert count_models(counting.T0_SUMMARY) == 3
    assert count_models(counting.T91_SUMMARY) == ALEPH0
    assert count_models(TheorySummary(classes=INFINITELY_MANY)) == CONTINUUM
    mixed = (ClassSummary(1, DEFINABLE_RIGHT),) * 2 + (ClassSummary(1, NON_DEFINABLE),) * 3
    assert count_models(TheorySummary(classes=mixed)) == 3 ** 2 * 6 ** 3
    assert count_models(TheorySummary()) == 1


summaries = st.builds(
    TheorySummary,
    st.booleans(), st.booleans(), st.booleans(), st.booleans(),
    st.one_of(st.just(INFINITELY_MANY), st.lists(st.builds(
        ClassSummary, st.one_of(st.integers(1, 30), st.just(INFINITE)), st.sampled_from(counting.KINDS)), max_size=6)),
)


@given(summaries, st.integers(0, 3))
def test_any_flag_forces_continuum(t, i):
    flags = list(t.flags)
    flags[i] = True
    assert count_models(TheorySummary(*flags, classes=t.classes)) == CONTINUUM


@given(summaries)
def test_summary_json_round_trip(t):
    assert summary_from_json(json.loads(json.dumps(summary_to_json(t)))) == t


@pytest.mark.parametrize("doc", [
    [], {"c1": 1}, {"classes": 3}, {"classes": [{"n": 0, "kind": "non-definable"}]},
    {"classes": [{"n": 1, "kind": "sideways"}]}, {"classes": [{"n": 1}]}, {"bogus": True},
    {"classes": [{"n": True, "kind": "non-definable"}]},
])
def test_malformed_summaries_rejected(doc):
    with pytest.raises(SummaryFileError):
        summary_from_json(doc)


def test_load_summary_reports_bad_json(tmp_path):
    p = tmp_path / "t.summary"
    p.write_text('{"classes": [\n')
    with pytest.raises(SummaryFileError, match="t.summary:2"):
        load_summary(str(p))
