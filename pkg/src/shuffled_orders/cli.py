"""Command-line entry point.  Every command prints JSON records, one per line.

Exit status: 0 for pass / ISO / success, 1 for fail / NOT_ISO / rejected
requests, 2 for usage and input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, List, Optional, Sequence

from . import counting, workbench
from .backforth import Obstruction, PartialIso, build_iso, decide_iso_spec
from .ordertype import Unsupported, to_name
from .realize import OracleInconsistency, SpecFileError, load_spec, realize_spec
from .shuffle import _jsonable, canonical_family, check_family, limit_structure

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

# ``iso`` realizes the second spec at this origin and stride, independent of the first
ALT_ORIGIN, ALT_STRIDE = Fraction(-7, 3), Fraction(5, 2)


class InputError(Exception):
    def __init__(self, record: dict):
        super().__init__(record.get("error", ""))
        self.record = record


def _emit(out, record: dict, pretty: bool):
    if pretty:
        out.write(_pretty(record) + "\n")
    else:
        out.write(json.dumps(record) + "\n")


def _pretty(record: dict) -> str:
    head = record.get("command", "")
    lines = [head] if head else []
    for k, v in record.items():
        if k == "command":
            continue
        if isinstance(v, list) and len(v) > 8:
            v = f"[{len(v)} items]"
        lines.append(f"  {k}: {v if not isinstance(v, (dict, list)) else json.dumps(v)}")
    return "\n".join(lines)


# -- commands --------------------------------------------------------------------------


def _verify_k(k: int, depth: int) -> List[dict]:
    verdicts = check_family(canonical_family(k), depth)
    out = [{**v.record(), "k": k} for v in verdicts]
    bad = [v for v in verdicts if not v.passed]
    out.append({"check": "canonical-family", "depth": depth, "result": "fail" if bad else "pass",
                "counterexample": bad[0].record()["counterexample"] if bad else None, "k": k,
                "checks": len(verdicts), "failed": [v.check for v in bad]})
    return out


def _map(fn: Callable, args: Sequence[tuple], jobs: int) -> List:
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, *zip(*args)))
    return [fn(*a) for a in args]


def cmd_shuffle_verify(ns) -> List[dict]:
    for k in ns.k:
        if k < 2:
            raise InputError({"error": f"--k must be at least 2, got {k}", "field": "--k"})
    runs = _map(_verify_k, [(k, ns.depth) for k in ns.k], ns.jobs)
    return [rec for run in runs for rec in run]


def cmd_limit_build(ns) -> List[dict]:
    if ns.k < 2:
        raise InputError({"error": f"--k must be at least 2, got {ns.k}", "field": "--k"})
    L = limit_structure(canonical_family(ns.k), ns.depth)
    elems = L.enumerate(ns.depth)
    return [{"command": "limit-build", "k": ns.k, "depth": ns.depth,
             "elements": [{"origin": x.origin, "anchor": str(x.anchor), "color": c} for x, c in elems],
             "min": _jsonable(L.minimum()), "max": _jsonable(L.maximum())}]


def _load_spec(path: str):
    try:
        return load_spec(path)
    except SpecFileError as exc:
        raise InputError({"error": str(exc), "file": exc.path, "line": exc.line, "field": exc.field}) from None
    except OSError as exc:
        raise InputError({"error": str(exc), "file": path}) from None


def _witness_map(f: PartialIso) -> list:
    return [[_jsonable(a), _jsonable(b)] for a, b in f.pairs]


def cmd_iso(ns) -> List[dict]:
    a, b = _load_spec(ns.spec_a), _load_spec(ns.spec_b)
    M, N = realize_spec(a), realize_spec(b, ALT_ORIGIN, ALT_STRIDE)
    got = build_iso(M, N, ns.depth)
    if isinstance(got, PartialIso) and not got.verify(M, N):
        raise OracleInconsistency("back-and-forth produced a map that fails re-verification")
    reached = isinstance(got, PartialIso) and (
        len(got) >= ns.depth or (M.size() is not None and N.size() is not None))
    try:
        decision = decide_iso_spec(a, b)
    except Unsupported:
        decision = None
    if decision is None:
        verdict, reason = ("no-obstruction-at-depth", None) if reached else ("not-iso", got.reason)
    else:
        if decision.iso != reached:
            raise OracleInconsistency(f"canonical forms say iso={decision.iso}, back-and-forth disagrees")
        verdict, reason = ("iso" if decision.iso else "not-iso"), decision.reason
    rec = {"command": "iso", "verdict": verdict, "depth": ns.depth,
           "witness-map": _witness_map(got) if isinstance(got, PartialIso) else None, "reason": reason}
    if isinstance(got, Obstruction):
        rec["obstruction"] = {"element": _jsonable(got.element), "side": got.side, "step": got.depth,
                              "reason": got.reason}
    return [rec]


def _load_model(path: str):
    try:
        return workbench.load_model_spec(path)
    except workbench.ModelSpecError as exc:
        raise InputError({"error": str(exc), "file": path, "field": exc.field}) from None
    except OSError as exc:
        raise InputError({"error": str(exc), "file": path}) from None


def _build_one(theory, t, depth):
    try:
        M = workbench.build_model(theory, t)
    except workbench.IllegalTuple as exc:
        return {"command": "build", "theory": theory, "result": "rejected", "clause": exc.clause,
                "reason": str(exc), "depth": depth, **_tuple_fields(t)}
    verdicts = workbench.check_axioms(M, depth)
    failures = [v.record() for v in verdicts if not v.passed]
    return {"command": "build", "theory": theory, "result": "fail" if failures else "pass", "depth": depth,
            **_tuple_fields(t), "checks": len(verdicts), "failures": failures}


def _tuple_fields(t: workbench.InvariantTuple) -> dict:
    out = {"truncation": t.truncation, "tuple": {k: to_name(v) for k, v in t.entries}}
    if t.min_colors:
        out["min-colors"] = dict(t.min_colors)
    return out


def cmd_build(ns) -> List[dict]:
    specs = [_load_model(p) for p in ns.tuple]
    return _map(_build_one, [(th, t, ns.depth) for th, t in specs], ns.jobs)


def cmd_invariants(ns) -> List[dict]:
    out = []
    for path in ns.tuple:
        theory, t = _load_model(path)
        try:
            M = workbench.build_model(theory, t)
        except workbench.IllegalTuple as exc:
            out.append({"command": "invariants", "theory": theory, "result": "rejected", "clause": exc.clause,
                        "reason": str(exc)})
            continue
        got = workbench.extract_invariant_tuple(M)
        out.append({"command": "invariants", "theory": theory, **_tuple_fields(got)})
    return out


def cmd_iso_models(ns) -> List[dict]:
    (ta, a), (tb, b) = _load_model(ns.spec_a), _load_model(ns.spec_b)
    if ta != tb:
        raise InputError({"error": f"theories differ: {ta} vs {tb}", "field": "theory"})
    try:
        M, N = workbench.build_model(ta, a), workbench.build_model(tb, b)
    except workbench.IllegalTuple as exc:
        raise InputError({"error": str(exc), "field": "tuple", "clause": exc.clause}) from None
    try:
        d = workbench.decide_iso_models(M, N, evidence_depth=ns.depth)
    except ValueError as exc:
        raise InputError({"error": str(exc), "field": "truncation"}) from None
    return [{"command": "iso-models", "verdict": _VERDICTS[d.verdict], "depth": ns.depth,
             "witness-map": _witness_map(d.witness) if d.witness is not None else None, "reason": d.reason}]


_VERDICTS = {"ISO": "iso", "NOT_ISO": "not-iso", "UNSUPPORTED": "unsupported"}
# theories whose model count is aleph0; a truncated listing is then only a prefix
_UNBOUNDED = {"T1", "T91"}


def cmd_list_models(ns) -> List[dict]:
    try:
        models = workbench.list_canonical_models(ns.theory, ns.truncation)
    except ValueError as exc:
        raise InputError({"error": str(exc), "field": "--truncation"}) from None
    return [{"command": "list-models", "theory": ns.theory, "name": m.name, **_tuple_fields(m.tuple),
             "unbounded": ns.theory in _UNBOUNDED}
            for m in models]


def _load_summary(path: str) -> counting.TheorySummary:
    try:
        return counting.load_summary(path)
    except counting.SummaryFileError as exc:
        raise InputError({"error": str(exc), "file": path}) from None
    except OSError as exc:
        raise InputError({"error": str(exc), "file": path}) from None


def cmd_count(ns) -> List[dict]:
    return [{"command": "count", **counting.breakdown(_load_summary(ns.summary))}]


def cmd_enumerate_tuples(ns) -> List[dict]:
    t = _load_summary(ns.summary)
    if t.classes == counting.INFINITELY_MANY:
        raise InputError({"error": "cannot enumerate infinitely many classes", "field": "classes"})
    out = []
    for i, c in enumerate(t.classes):
        tuples = counting.enumerate_invariant_tuples(c, ns.truncation)
        out.append({"command": "enumerate-tuples", "class": i, "n": c.n, "kind": c.kind,
                    "truncation": ns.truncation if c.infinite else None, "kappa": counting.kappa(c),
                    "count": len(tuples), "tuples": [[to_name(x) for x in tup] for tup in tuples]})
    return out


# -- parser ----------------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="human-readable output")
    common.add_argument("--jobs", type=_positive, default=1, help="parallel workers for independent runs")

    p = argparse.ArgumentParser(prog="shuffled-orders", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("shuffle-verify", parents=[common], help="check a canonical shuffled family")
    s.add_argument("--k", type=int, action="append", required=True, help="number of orders (repeatable)")
    s.add_argument("--depth", type=_positive, default=50)
    s.set_defaults(run=cmd_shuffle_verify)

    s = sub.add_parser("limit-build", parents=[common], help="enumerate the limit of a canonical family")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--depth", type=_positive, default=50)
    s.set_defaults(run=cmd_limit_build)

    s = sub.add_parser("iso", parents=[common], help="decide isomorphism of two colored order specs")
    s.add_argument("--spec-a", required=True)
    s.add_argument("--spec-b", required=True)
    s.add_argument("--depth", type=_positive, default=64)
    s.set_defaults(run=cmd_iso)

    s = sub.add_parser("build", parents=[common], help="build models and check their axioms")
    s.add_argument("--tuple", action="append", required=True, help="model spec file (repeatable)")
    s.add_argument("--depth", type=_positive, default=30)
    s.set_defaults(run=cmd_build)

    s = sub.add_parser("invariants", parents=[common], help="build models and extract their invariants")
    s.add_argument("--tuple", action="append", required=True)
    s.set_defaults(run=cmd_invariants)

    s = sub.add_parser("iso-models", parents=[common], help="decide isomorphism of two built models")
    s.add_argument("--spec-a", required=True)
    s.add_argument("--spec-b", required=True)
    s.add_argument("--depth", type=_positive, default=64)
    s.set_defaults(run=cmd_iso_models)

    s = sub.add_parser("list-models", parents=[common], help="list the canonical models of a theory")
    s.add_argument("--theory", required=True, choices=workbench.THEORIES)
    s.add_argument("--truncation", type=_positive, default=None)
    s.set_defaults(run=cmd_list_models)

    s = sub.add_parser("count", parents=[common], help="count countable models from a theory summary")
    s.add_argument("--summary", required=True)
    s.set_defaults(run=cmd_count)

    s = sub.add_parser("enumerate-tuples", parents=[common], help="list legal invariant tuples per class")
    s.add_argument("--summary", required=True)
    s.add_argument("--truncation", type=_positive, default=8)
    s.set_defaults(run=cmd_enumerate_tuples)
    return p


_FAILING = {"fail", "rejected", "not-iso"}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    ns = build_parser().parse_args(argv)
    pretty = getattr(ns, "pretty", False)
    try:
        records = ns.run(ns)
    except InputError as exc:
        _emit(out, {"command": ns.command, **exc.record}, pretty)
        return EXIT_INPUT
    failed = False
    for rec in records:
        _emit(out, rec, pretty)
        failed |= rec.get("result") in _FAILING or rec.get("verdict") in _FAILING
    return EXIT_FAIL if failed else EXIT_OK


def run(argv: Sequence[str]) -> int:
    """Like :func:`main` but returns the usage-error status instead of exiting."""
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
