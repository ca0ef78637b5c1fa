"""The six-attribute event-driven requirement pattern.

Attribute tables, tristate combinations, and instantiation of the pattern's
temporal-logic semantics.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from . import ltl
from . import propexpr as pe
from .errors import EdtlcError


class Attribute(enum.Enum):
    TRIGGER = ("trigger", "trig")
    INVARIANT = ("invariant", "inv")
    FINAL = ("final", "fin")
    DELAY = ("delay", "del")
    REACTION = ("reaction", "rea")
    RELEASE = ("release", "rel")

    @property
    def full_name(self) -> str:
        return self.value[0]

    @property
    def abbreviation(self) -> str:
        return self.value[1]


# canonical attribute order for enumeration, JSON, and combination keys
ATTRIBUTES: tuple[Attribute, ...] = (
    Attribute.TRIGGER,
    Attribute.INVARIANT,
    Attribute.FINAL,
    Attribute.DELAY,
    Attribute.REACTION,
    Attribute.RELEASE,
)

BY_FULL_NAME = {a.full_name: a for a in Attribute}
BY_ABBREVIATION = {a.abbreviation: a for a in Attribute}


class Tristate(enum.Enum):
    VAR = "var"
    TRUE = "true"
    FALSE = "false"

    @property
    def key_letter(self) -> str:
        return {"var": "v", "true": "t", "false": "f"}[self.value]


# value order for enumeration: Var < True < False
TRISTATE_ORDER: tuple[Tristate, ...] = (Tristate.VAR, Tristate.TRUE, Tristate.FALSE)
_TRISTATE_RANK = {t: i for i, t in enumerate(TRISTATE_ORDER)}
_LETTER_TO_TRISTATE = {"v": Tristate.VAR, "t": Tristate.TRUE, "f": Tristate.FALSE}


@dataclass(frozen=True)
class AttributeCombination:
    """A total assignment of each attribute to var, true, or false."""

    trigger: Tristate
    invariant: Tristate
    final: Tristate
    delay: Tristate
    reaction: Tristate
    release: Tristate

    def value_of(self, attr: Attribute) -> Tristate:
        return getattr(self, attr.full_name)

    def as_tuple(self) -> tuple[Tristate, ...]:
        return tuple(self.value_of(a) for a in ATTRIBUTES)

    @property
    def key(self) -> str:
        """Six letters from {v, t, f} in attribute order, e.g. ``vtttvf``."""
        return "".join(v.key_letter for v in self.as_tuple())

    @staticmethod
    def from_key(key: str) -> "AttributeCombination":
        if len(key) != 6 or any(c not in _LETTER_TO_TRISTATE for c in key):
            raise EdtlcError(f"bad combination key {key!r}: want six letters from vtf")
        return AttributeCombination(*(_LETTER_TO_TRISTATE[c] for c in key))

    @staticmethod
    def of(**kwargs: Tristate) -> "AttributeCombination":
        """Build from full attribute names, unnamed attributes default to var."""
        values = {a.full_name: Tristate.VAR for a in ATTRIBUTES}
        for name, v in kwargs.items():
            if name not in values:
                raise EdtlcError(f"unknown attribute {name!r}")
            values[name] = v
        return AttributeCombination(**values)

    def var_attributes(self) -> list[Attribute]:
        return [a for a in ATTRIBUTES if self.value_of(a) is Tristate.VAR]

    def constant_attributes(self) -> list[Attribute]:
        return [a for a in ATTRIBUTES if self.value_of(a) is not Tristate.VAR]

    def enumeration_rank(self) -> int:
        rank = 0
        for v in self.as_tuple():
            rank = rank * 3 + _TRISTATE_RANK[v]
        return rank

    def to_json_dict(self) -> dict[str, str]:
        return {a.full_name: self.value_of(a).value for a in ATTRIBUTES}

    @staticmethod
    def from_json_dict(data: dict) -> "AttributeCombination":
        values = {}
        for a in ATTRIBUTES:
            if a.full_name not in data:
                raise EdtlcError(f"combination is missing attribute {a.full_name!r}")
            values[a.full_name] = Tristate(data[a.full_name])
        return AttributeCombination(**values)


@dataclass(frozen=True)
class Requirement:
    """A total assignment of each attribute to a concrete expression.

    An expression that folds to a constant is stored as the constant.
    """

    trigger: pe.PropExpr
    invariant: pe.PropExpr
    final: pe.PropExpr
    delay: pe.PropExpr
    reaction: pe.PropExpr
    release: pe.PropExpr

    def __post_init__(self):
        for a in ATTRIBUTES:
            expr = self.value_of(a)
            folded = pe.fold_constants(expr)
            if isinstance(folded, pe.Const) and not isinstance(expr, pe.Const):
                object.__setattr__(self, a.full_name, folded)

    def value_of(self, attr: Attribute) -> pe.PropExpr:
        return getattr(self, attr.full_name)

    @staticmethod
    def of(**kwargs: pe.PropExpr | bool | str) -> "Requirement":
        """Build from full attribute names; bools and expression strings
        are accepted alongside PropExpr values."""
        values: dict[str, pe.PropExpr] = {}
        for name, v in kwargs.items():
            if name not in BY_FULL_NAME:
                raise EdtlcError(f"unknown attribute {name!r}")
            if isinstance(v, bool):
                values[name] = pe.Const(v)
            elif isinstance(v, str):
                values[name] = pe.parse_prop(v)
            else:
                values[name] = v
        missing = [a.full_name for a in ATTRIBUTES if a.full_name not in values]
        if missing:
            raise EdtlcError(f"requirement is missing attribute {missing[0]!r}")
        return Requirement(**values)

    def to_json_dict(self) -> dict[str, bool | str]:
        out: dict[str, bool | str] = {}
        for a in ATTRIBUTES:
            expr = self.value_of(a)
            if isinstance(expr, pe.Const):
                out[a.full_name] = expr.value
            else:
                out[a.full_name] = pe.render_prop(expr)
        return out

    @staticmethod
    def from_json_dict(data: dict) -> "Requirement":
        if not isinstance(data, dict):
            raise EdtlcError("requirement JSON must be an object")
        unknown = [k for k in data if k not in BY_FULL_NAME]
        if unknown:
            raise EdtlcError(f"unknown attribute {unknown[0]!r}")
        values: dict[str, pe.PropExpr | bool | str] = {}
        for a in ATTRIBUTES:
            if a.full_name not in data:
                raise EdtlcError(f"requirement is missing attribute {a.full_name!r}")
            v = data[a.full_name]
            if not isinstance(v, (bool, str)):
                raise EdtlcError(
                    f"attribute {a.full_name!r} must be true, false, or an "
                    f"expression string"
                )
            values[a.full_name] = v
        return Requirement.of(**values)

    @staticmethod
    def from_json(text: str) -> "Requirement":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise EdtlcError(f"malformed requirement JSON: {exc}") from exc
        return Requirement.from_json_dict(data)


@lru_cache(maxsize=1)
def base_semantics() -> ltl.Formula:
    """The pattern's temporal semantics with the six abbreviation atoms:

    G (trig -> ((inv & !fin) W (rel | (fin & ((inv & !del) W (rel | (inv & rea)))))))
    """
    trig, inv, fin = ltl.atom("trig"), ltl.atom("inv"), ltl.atom("fin")
    del_, rea, rel = ltl.atom("del"), ltl.atom("rea"), ltl.atom("rel")
    inner = ltl.WeakUntil(
        ltl.And(inv, ltl.Not(del_)),
        ltl.Or(rel, ltl.And(inv, rea)),
    )
    outer = ltl.WeakUntil(
        ltl.And(inv, ltl.Not(fin)),
        ltl.Or(rel, ltl.And(fin, inner)),
    )
    return ltl.Always(ltl.Implies(trig, outer))


def instantiate(req: Requirement, do_simplify: bool = True) -> ltl.Formula:
    """Substitute the requirement's attribute expressions into the base
    semantics, optionally simplifying the result."""
    binding = {a.abbreviation: req.value_of(a) for a in ATTRIBUTES}
    f = ltl.substitute(base_semantics(), binding)
    return ltl.simplify(f) if do_simplify else f


def combination_of(req: Requirement) -> AttributeCombination:
    values = {}
    for a in ATTRIBUTES:
        expr = req.value_of(a)
        if isinstance(expr, pe.Const):
            values[a.full_name] = Tristate.TRUE if expr.value else Tristate.FALSE
        else:
            values[a.full_name] = Tristate.VAR
    return AttributeCombination(**values)


def requirement_for_combination(comb: AttributeCombination) -> Requirement:
    """Fresh-atom convention: each var attribute gets its own abbreviation
    name as the atom, so instantiated formulas read like the pattern's."""
    values: dict[str, pe.PropExpr] = {}
    for a in ATTRIBUTES:
        v = comb.value_of(a)
        if v is Tristate.VAR:
            values[a.full_name] = pe.Var(a.abbreviation)
        else:
            values[a.full_name] = pe.Const(v is Tristate.TRUE)
    return Requirement(**values)


def enumerate_combinations() -> list[AttributeCombination]:
    """All 729 combinations in lexicographic order: attribute order
    trigger, invariant, final, delay, reaction, release; value order
    var < true < false."""
    out = []
    total = 3 ** len(ATTRIBUTES)
    for rank in range(total):
        digits = []
        n = rank
        for _ in ATTRIBUTES:
            digits.append(n % 3)
            n //= 3
        digits.reverse()
        out.append(AttributeCombination(*(TRISTATE_ORDER[d] for d in digits)))
    return out
