"""Acceptance criteria 1-7, each at its stated tolerance and time budget.

Every criterion prints one ``PASS``/``FAIL`` line; the lines are repeated in the
pytest terminal summary.  Run directly with ``python tests/test_acceptance.py``.
"""
import functools
import itertools
import random
import sys
import time
from fractions import Fraction

import pytest

from shuffled_orders import counting
from shuffled_orders.backforth import PartialIso, build_iso, decide_iso_spec, spec_corpus
from shuffled_orders.counting import (
    ALEPH0, CONTINUUM, DEFINABLE_RIGHT, INFINITELY_MANY, KINDS, NON_DEFINABLE,
    ClassSummary, TheorySummary, count_models, enumerate_invariant_tuples, kappa, legal_dense_tuples,
)
from shuffled_orders.ordertype import CANONICAL_SIX, EMPTY, ONE
from shuffled_orders.realize import lattice_order, realize_spec
from shuffled_orders.shuffle import (
    GT, LT, Cut, PredicateRelation, canonical_family, check_family, check_shuffling, cut_compare,
    cut_threshold, restrict_ambient,
)
from shuffled_orders.workbench import (
    IllegalTuple, InvariantTuple, build_model, check_axioms, decide_iso_models, extract_invariant_tuple,
    family_legal, list_canonical_models,
)

RESULTS = []

# second realization used by the back-and-forth criterion
ALT_ORIGIN, ALT_STRIDE = Fraction(-7, 3), Fraction(5, 2)


def _report(number, title, budget, fn):
    t0 = time.perf_counter()
    failures = fn()
    elapsed = time.perf_counter() - t0
    if elapsed >= budget:
        failures.append(f"took {elapsed:.2f}s, budget {budget}s")
    line = f"criterion {number} {'PASS' if not failures else 'FAIL'} [{elapsed:.2f}s < {budget}s] {title}"
    if failures:
        line += ": " + "; ".join(map(str, failures[:3]))
    RESULTS.append(line)
    print(line)
    return failures


# -- 1 ------------------------------------------------------------------------------


def counting_fidelity():
    bad = []
    if count_models(counting.T0_SUMMARY) != 3:
        bad.append("T0 summary")
    for k in range(7):
        for m in range(7 - k):
            classes = [ClassSummary(1, DEFINABLE_RIGHT)] * k + [ClassSummary(1, NON_DEFINABLE)] * m
            got = count_models(TheorySummary(classes=tuple(classes)))
            if got != 3 ** k * 6 ** m:
                bad.append(f"k={k} m={m}: {got}")
    if count_models(counting.T91_SUMMARY) != ALEPH0:
        bad.append("shuffled-sequence summary")
    if count_models(TheorySummary(classes=INFINITELY_MANY)) != CONTINUUM:
        bad.append("infinitely many classes")
    return bad


def test_criterion_1_counting():
    assert not _report(1, "model counts: 3, 3^k*6^m (k+m<=6), aleph0, continuum", 1.0, counting_fidelity)


# -- 2 ------------------------------------------------------------------------------


def kappa_cross_check():
    bad = []
    for n in range(1, 21):
        for kind in KINDS:
            c = ClassSummary(n, kind)
            want = n + 2 if kind != NON_DEFINABLE else n * n + 3 * n + 2
            got = enumerate_invariant_tuples(c)
            if not len(got) == len(set(got)) == kappa(c) == want:
                bad.append(f"{kind} n={n}: {len(got)} vs {want}")
        if len(legal_dense_tuples(n)) != (n + 1) ** 2:
            bad.append(f"dense n={n}")
    return bad


def test_criterion_2_kappa():
    assert not _report(2, "enumeration sizes equal n+2, n^2+3n+2, (n+1)^2 for n<=20", 1.0, kappa_cross_check)


# -- 3 ------------------------------------------------------------------------------


def shuffle_axioms():
    bad = []
    for k in (2, 3, 5, 8):
        for v in check_family(canonical_family(k), 50, exhaustive=True):
            if not v:
                bad.append(f"k={k} {v.check}: {v.detail}")
    F2 = canonical_family(2)
    A, B = F2.orders
    reversed_rel = check_shuffling(PredicateRelation(A, B, lambda a, b: a > b), 50)
    if reversed_rel or not reversed_rel.counterexample:
        bad.append("reversed relation was not refuted with a counterexample")
    supremum = check_shuffling(restrict_ambient(lattice_order(0, 1), lattice_order(Fraction(1, 2), 1, color=1)), 50)
    if supremum or not supremum.counterexample:
        bad.append("supremum-bearing fiber was not refuted with a counterexample")
    return bad


def test_criterion_3_shuffle_axioms():
    assert not _report(3, "canonical families k in {2,3,5,8} at depth 50; both negative fixtures fail", 10.0,
                       shuffle_axioms)


# -- 4 ------------------------------------------------------------------------------


def _sample_cuts(F, n, rng):
    pools = [A.elements(4000) for A in F.orders]
    out = set()
    while len(out) < n:
        i = rng.randrange(len(F))
        out.add(Cut(i, rng.choice(pools[i])))
    return sorted(out, key=lambda c: (c.origin, c.anchor))


def cut_calculus():
    bad = []
    F = canonical_family(4)
    rng = random.Random(2024)
    cuts = _sample_cuts(F, 1000, rng)
    # a strict total order on the sample: after sorting, every earlier cut is below every later one
    ranked = sorted(cuts, key=functools.cmp_to_key(lambda a, b: -1 if cut_compare(F, a, b) == LT else 1))
    for i, a in enumerate(ranked):
        for b in ranked[i + 1:]:
            if cut_compare(F, a, b) != LT or cut_compare(F, b, a) != GT:
                bad.append(f"order violated at {a}, {b}")
                break
        try:
            cut_compare(F, a, a)
            bad.append(f"{a} compared with itself")
        except ValueError:
            pass
    # inclusion of the cuts as subsets of order 0 versus membership in S_ij
    A0 = F.orders[0]

    def in_cut(x, c):
        return x < c.anchor if c.origin == 0 else F.rel(0, c.origin).member(x, c.anchor)

    pairs = 0
    while pairs < 1000:
        a, b = rng.sample(cuts, 2)
        if a.origin == b.origin:
            continue
        pairs += 1
        i, j = sorted((a.origin, b.origin))
        ci, cj = (a, b) if a.origin == i else (b, a)
        member = F.rel(i, j).member(ci.anchor, cj.anchor)
        ti, tj = cut_threshold(F, ci), cut_threshold(F, cj)
        small, large = (ci, cj) if ti < tj else (cj, ci)
        # an explicit element of order 0 lying in the larger cut and not the smaller
        x = A0.find_witness(min(ti, tj), max(ti, tj), None)
        if x is None or not in_cut(x, large) or in_cut(x, small):
            bad.append(f"no separating element for {ci}, {cj}")
        if member != (small is ci):
            bad.append(f"inclusion and membership disagree at {ci}, {cj}")
    return bad


def test_criterion_4_cut_calculus():
    assert not _report(4, "10^3 cuts strictly totally ordered; 10^3 cross pairs match inclusion", 5.0, cut_calculus)


# -- 5 ------------------------------------------------------------------------------


def back_and_forth():
    bad = []
    corpus = spec_corpus()
    reals_a = [realize_spec(s) for s in corpus]
    reals_b = [realize_spec(s, ALT_ORIGIN, ALT_STRIDE) for s in corpus]
    pairs = 0
    for i, j in itertools.combinations_with_replacement(range(len(corpus)), 2):
        pairs += 1
        M, N = reals_a[i], reals_b[j]
        got = build_iso(M, N, 64)
        reached = isinstance(got, PartialIso) and got.verify(M, N) and (
            len(got) == 64 or (M.size() is not None and M.size() == N.size() == len(got)))
        if i == j and not reached:
            bad.append(f"spec {i} stopped: {got}")
        if bool(decide_iso_spec(corpus[i], corpus[j])) != reached:
            bad.append(f"specs {i}, {j}: decision and engine disagree")
    if pairs < 1250:
        bad.append(f"only {pairs} pairs")
    return bad


def test_criterion_5_back_and_forth():
    assert not _report(5, "50 specs: size-64 isomorphisms, decision agrees with engine on 1275 pairs", 60.0,
                       back_and_forth)


# -- 6 ------------------------------------------------------------------------------


def workbench_classification():
    bad = []
    for theory, B, want in (("T0", None, 3), ("T1", 10, 12)):
        models = [build_model(theory, m.tuple) for m in list_canonical_models(theory, B)]
        if len(models) != want:
            bad.append(f"{theory}: {len(models)} models")
        for M, N in itertools.combinations(models, 2):
            if decide_iso_models(M, N).iso:
                bad.append(f"{theory}: {M.requested.describe()} ~ {N.requested.describe()}")
        if theory == "T1":
            reasons = {decide_iso_models(models[2 + a], models[2 + b]).reason for a, b in ((3, 5), (0, 9))}
            if not all("minimum color" in r for r in reasons):
                bad.append(f"T1 reasons {reasons}")
    t91 = list_canonical_models("T91", 8)
    for m in t91:
        M = build_model("T91", m.tuple)
        failed = [v.check for v in check_axioms(M, 30) if not v]
        if failed:
            bad.append(f"{m.tuple.describe()}: {failed}")
        if extract_invariant_tuple(M) != m.tuple:
            bad.append(f"{m.tuple.describe()} does not round-trip")
    if len(t91) != 30:
        bad.append(f"{len(t91)} shuffled-sequence models at truncation 8")
    return bad


def test_criterion_6_workbench():
    assert not _report(6, "3 and 12 pairwise non-isomorphic models; 30 builds pass axioms and round-trip", 60.0,
                       workbench_classification)


# -- 7 ------------------------------------------------------------------------------


def invariant_constraints():
    bad = []
    for n in range(1, 9):
        for kind in KINDS:
            for t in enumerate_invariant_tuples(ClassSummary(n, kind)):
                if sum(x.min_exists for x in t) > 1 or sum(x.max_exists for x in t) > 1:
                    bad.append(f"emitted {kind} n={n}: two endpoints")
                if family_legal(t, kind):
                    bad.append(f"emitted {kind} n={n} rejected: {family_legal(t, kind)}")
    # every tuple the legality rules accept, over all 6^n candidates
    for n in range(1, 6):
        for t in itertools.product(CANONICAL_SIX, repeat=n):
            for kind in KINDS:
                if not family_legal(t, kind) and (
                        sum(x.min_exists for x in t) > 1 or sum(x.max_exists for x in t) > 1):
                    bad.append(f"accepted {kind} {t}")
    # a one-point entry with any other realized entry is refused at build time
    for B in range(2, 9):
        for i, j in itertools.permutations(range(B), 2):
            for other in CANONICAL_SIX:
                if other == EMPTY:
                    continue
                ps = [EMPTY] * B
                ps[i], ps[j] = ONE, other
                t = InvariantTuple.of({"q": EMPTY, **{f"p{k}": v for k, v in enumerate(ps)}}, B)
                try:
                    build_model("T91", t)
                    bad.append(f"built {t.describe()}")
                except IllegalTuple as exc:
                    if exc.clause != "singleton-forces-omission":
                        bad.append(f"{t.describe()} rejected by {exc.clause}")
    return bad


def test_criterion_7_invariant_constraints():
    assert not _report(7, "no tuple with two minima or maxima; singleton-forces-omission enforced, n<=8", 60.0,
                       invariant_constraints)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
