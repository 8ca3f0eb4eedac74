"""Counting countable models from classification data.

Each weak non-orthogonality class contributes a factor ``kappa``; the model
count is their product, unless a failure flag is set or the classes are
infinitely many (continuum), or some class is infinite (aleph0).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import List, Tuple, Union

from .ordertype import EMPTY, ETA, ETA_ONE, ONE, ONE_ETA, ONE_ETA_ONE, OrderType

INFINITE = "inf"
INFINITELY_MANY = "infinitely-many"
ALEPH0 = "aleph0"
CONTINUUM = "continuum"

DEFINABLE_LEFT = "definable-left"
DEFINABLE_RIGHT = "definable-right"
NON_DEFINABLE = "non-definable"
KINDS = (DEFINABLE_LEFT, DEFINABLE_RIGHT, NON_DEFINABLE)

Count = Union[int, str]


@dataclass(frozen=True)
class ClassSummary:
    n: Union[int, str]
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.n != INFINITE and (isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1):
            raise ValueError(f"class size must be a positive integer or {INFINITE!r}, got {self.n!r}")

    @property
    def definable(self) -> bool:
        return self.kind != NON_DEFINABLE

    @property
    def infinite(self) -> bool:
        return self.n == INFINITE


@dataclass(frozen=True)
class TheorySummary:
    c1: bool = False
    c2: bool = False
    c3: bool = False
    c4: bool = False
    classes: Union[Tuple[ClassSummary, ...], str] = ()

    def __post_init__(self):
        if self.classes != INFINITELY_MANY:
            object.__setattr__(self, "classes", tuple(self.classes))

    @property
    def flags(self) -> Tuple[bool, bool, bool, bool]:
        return (self.c1, self.c2, self.c3, self.c4)


def kappa(c: ClassSummary) -> Count:
    if c.infinite:
        return ALEPH0
    n = c.n
    return n + 2 if c.definable else n * n + 3 * n + 2


def legal_dense_tuples(n: int) -> List[Tuple[OrderType, ...]]:
    """Dense invariant tuples of length ``n``: at most one entry has a minimum and at most one a maximum."""
    if n < 1:
        raise ValueError("n must be positive")
    base = [ETA] * n

    def put(*changes):
        t = list(base)
        for i, v in changes:
            t[i] = v
        return tuple(t)

    out = [tuple(base)]
    out += [put((i, ONE_ETA)) for i in range(n)]
    out += [put((i, ETA_ONE)) for i in range(n)]
    out += [put((i, ONE_ETA_ONE)) for i in range(n)]
    out += [put((i, ONE_ETA), (j, ETA_ONE)) for i in range(n) for j in range(n) if i != j]
    return out


def _size(c: ClassSummary, truncation: int) -> int:
    if not c.infinite:
        return c.n
    if truncation < 1:
        raise ValueError("an infinite class needs a positive truncation")
    return truncation


def enumerate_invariant_tuples(c: ClassSummary, truncation: int = 8) -> List[Tuple[OrderType, ...]]:
    """All legal per-class invariant tuples; infinite classes are cut to ``truncation`` entries."""
    n = _size(c, truncation)
    if c.definable:
        end = ETA_ONE if c.kind == DEFINABLE_LEFT else ONE_ETA
        out = [(EMPTY,) * n, (ETA,) * n]
        for i in range(n):
            t = [ETA] * n
            t[i] = end
            out.append(tuple(t))
        return out
    out = [(EMPTY,) * n]
    for i in range(n):
        t = [EMPTY] * n
        t[i] = ONE
        out.append(tuple(t))
    return out + legal_dense_tuples(n)


def count_models(t: TheorySummary) -> Count:
    if any(t.flags) or t.classes == INFINITELY_MANY:
        return CONTINUUM
    ks = [kappa(c) for c in t.classes]
    if ALEPH0 in ks:
        return ALEPH0
    return math.prod(ks)


def breakdown(t: TheorySummary) -> dict:
    """The record printed by the ``count`` command."""
    rec: dict = {"count": count_models(t)}
    if t.classes == INFINITELY_MANY:
        rec["classes"] = INFINITELY_MANY
    else:
        rec["classes"] = [{"n": c.n, "kind": c.kind, "kappa": kappa(c)} for c in t.classes]
    return rec


# -- summary files ------------------------------------------------------------------


class SummaryFileError(ValueError):
    pass


def summary_from_json(data) -> TheorySummary:
    if not isinstance(data, dict):
        raise SummaryFileError("summary must be a JSON object")
    unknown = set(data) - {"c1", "c2", "c3", "c4", "classes"}
    if unknown:
        raise SummaryFileError(f"unknown keys {sorted(unknown)}")
    flags = {}
    for key in ("c1", "c2", "c3", "c4"):
        v = data.get(key, False)
        if not isinstance(v, bool):
            raise SummaryFileError(f"{key} must be a boolean, got {v!r}")
        flags[key] = v
    raw = data.get("classes", [])
    if raw == INFINITELY_MANY:
        return TheorySummary(**flags, classes=INFINITELY_MANY)
    if not isinstance(raw, list):
        raise SummaryFileError(f"classes must be a list or {INFINITELY_MANY!r}")
    classes = []
    for i, c in enumerate(raw):
        if not isinstance(c, dict) or set(c) != {"n", "kind"}:
            raise SummaryFileError(f"classes[{i}] must have exactly the keys 'n' and 'kind'")
        try:
            classes.append(ClassSummary(c["n"], c["kind"]))
        except ValueError as exc:
            raise SummaryFileError(f"classes[{i}]: {exc}") from None
    return TheorySummary(**flags, classes=tuple(classes))


def summary_to_json(t: TheorySummary) -> dict:
    out: dict = {f"c{i + 1}": f for i, f in enumerate(t.flags)}
    out["classes"] = t.classes if t.classes == INFINITELY_MANY else [{"n": c.n, "kind": c.kind} for c in t.classes]
    return out


def load_summary(path: str) -> TheorySummary:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SummaryFileError(f"{path}:{exc.lineno}: {exc.msg}") from None
    return summary_from_json(data)


#: Named summaries of the example theories.
T0_SUMMARY = TheorySummary(classes=(ClassSummary(1, DEFINABLE_RIGHT),))
T91_SUMMARY = TheorySummary(classes=(ClassSummary(1, DEFINABLE_RIGHT), ClassSummary(INFINITE, DEFINABLE_RIGHT)))
