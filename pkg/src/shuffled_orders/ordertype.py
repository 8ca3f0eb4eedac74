"""Closed grammar of countable order-types: 0, finite n, and eta with optional endpoints.

Only the shapes that occur as invariants of the supported theories are
representable. Sums that leave the grammar (``2 + eta`` for instance) raise
:class:`Unsupported` instead of being approximated.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

EMPTY_KIND = "empty"
FINITE_KIND = "finite"
DENSE_KIND = "dense"

ALEPH0 = "aleph0"


class Unsupported(ValueError):
    """Raised when a value falls outside the supported order-type grammar."""


@dataclass(frozen=True)
class OrderType:
    kind: str
    n: int = 0
    has_min: bool = False
    has_max: bool = False

    def __post_init__(self):
        if self.kind == EMPTY_KIND:
            if self.n or self.has_min or self.has_max:
                raise ValueError("the empty order type carries no data")
        elif self.kind == FINITE_KIND:
            if self.n < 1:
                raise ValueError(f"finite order type needs n >= 1, got {self.n}")
            if self.has_min or self.has_max:
                raise ValueError("finite order types do not take endpoint flags")
        elif self.kind == DENSE_KIND:
            if self.n:
                raise ValueError("dense order types do not take a size")
        else:
            raise ValueError(f"unknown order type kind {self.kind!r}")

    @property
    def is_empty(self) -> bool:
        return self.kind == EMPTY_KIND

    @property
    def is_dense(self) -> bool:
        return self.kind == DENSE_KIND

    @property
    def is_finite(self) -> bool:
        return self.kind == FINITE_KIND

    @property
    def min_exists(self) -> bool:
        return self.kind == FINITE_KIND or self.has_min

    @property
    def max_exists(self) -> bool:
        return self.kind == FINITE_KIND or self.has_max

    @property
    def name(self) -> str:
        return to_name(self)

    def __str__(self) -> str:
        return to_name(self)

    def __repr__(self) -> str:
        return f"OrderType({to_name(self)})"


def finite(n: int) -> OrderType:
    return OrderType(FINITE_KIND, n=n)


def dense(has_min: bool = False, has_max: bool = False) -> OrderType:
    return OrderType(DENSE_KIND, has_min=has_min, has_max=has_max)


EMPTY = OrderType(EMPTY_KIND)
ONE = finite(1)
ETA = dense(False, False)
ONE_ETA = dense(True, False)
ETA_ONE = dense(False, True)
ONE_ETA_ONE = dense(True, True)

#: The six shapes invariants of the supported theories are drawn from.
CANONICAL_SIX = (EMPTY, ONE, ETA, ONE_ETA, ETA_ONE, ONE_ETA_ONE)
DENSE_FOUR = (ETA, ONE_ETA, ETA_ONE, ONE_ETA_ONE)

_DENSE_NAMES = {
    (False, False): "eta",
    (True, False): "1+eta",
    (False, True): "eta+1",
    (True, True): "1+eta+1",
}
_NAME_TO_DENSE = {v: k for k, v in _DENSE_NAMES.items()}


def to_name(t: OrderType) -> str:
    if t.kind == EMPTY_KIND:
        return "0"
    if t.kind == FINITE_KIND:
        return str(t.n)
    return _DENSE_NAMES[(t.has_min, t.has_max)]


def from_name(name: str) -> OrderType:
    """Parse one of ``"0"``, a positive decimal, ``"eta"``, ``"1+eta"``, ``"eta+1"``, ``"1+eta+1"``."""
    if not isinstance(name, str):
        raise ValueError(f"order type name must be a string, got {name!r}")
    if name in _NAME_TO_DENSE:
        return dense(*_NAME_TO_DENSE[name])
    if name == "0":
        return EMPTY
    if name.isdigit() and not name.startswith("0"):
        return finite(int(name))
    raise ValueError(f"unknown order type name {name!r}")


# -- expressions ---------------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    value: OrderType


@dataclass(frozen=True)
class Sum:
    terms: tuple

    def __post_init__(self):
        if not self.terms:
            raise ValueError("a sum needs at least one term")
        object.__setattr__(self, "terms", tuple(self.terms))


Expr = Union[Leaf, Sum, OrderType]


def _tokens(expr: Expr) -> list[str]:
    # "p" for an isolated point, "d" for a dense piece without endpoints
    if isinstance(expr, OrderType):
        expr = Leaf(expr)
    if isinstance(expr, Leaf):
        t = expr.value
        if t.is_empty:
            return []
        if t.is_finite:
            return ["p"] * t.n
        return (["p"] if t.has_min else []) + ["d"] + (["p"] if t.has_max else [])
    if isinstance(expr, Sum):
        out: list[str] = []
        for term in expr.terms:
            out.extend(_tokens(term))
        return out
    raise TypeError(f"not an order type expression: {expr!r}")


def normalize(expr: Expr) -> OrderType:
    """Collapse an ordered sum into the grammar or raise :class:`Unsupported`."""
    toks = _tokens(expr)
    changed = True
    while changed:
        changed = False
        for i in range(len(toks) - 1):
            if toks[i] == "d" and toks[i + 1] == "d":
                del toks[i + 1]
                changed = True
                break
            if toks[i : i + 3] == ["d", "p", "d"]:
                del toks[i + 1 : i + 3]
                changed = True
                break
    if "d" not in toks:
        return finite(len(toks)) if toks else EMPTY
    body = "".join(toks)
    shapes = {"d": ETA, "pd": ONE_ETA, "dp": ETA_ONE, "pdp": ONE_ETA_ONE}
    if body not in shapes:
        raise Unsupported(f"sum {body!r} is outside the supported grammar")
    return shapes[body]


def reverse(t: OrderType) -> OrderType:
    if t.is_dense:
        return replace(t, has_min=t.has_max, has_max=t.has_min)
    return t


@dataclass(frozen=True)
class Features:
    is_empty: bool
    has_min: bool
    has_max: bool
    is_dense: bool
    cardinality: Union[int, str]


def features(t: OrderType) -> Features:
    if t.is_empty:
        card: Union[int, str] = 0
    elif t.is_finite:
        card = t.n
    else:
        card = ALEPH0
    return Features(
        is_empty=t.is_empty,
        has_min=t.min_exists,
        has_max=t.max_exists,
        is_dense=t.is_dense,
        cardinality=card,
    )
