"""LTL syntax trees: parsing, rendering, substitution, simplification.

Atoms hold leaf propositional expressions only (a variable or a single
comparison).  Compound propositional structure is lifted into the formula
connectives when substituted in, so rendering and reparsing are mutually
inverse on every tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import propexpr as pe
from .errors import CanonicalRenameError, ExprSyntaxError


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Bool(Formula):
    value: bool


@dataclass(frozen=True)
class Atom(Formula):
    expr: pe.PropExpr  # Var or Compare only

    def __post_init__(self):
        if not isinstance(self.expr, (pe.Var, pe.Compare)):
            raise ValueError("Atom must hold a Var or Compare leaf")

    @property
    def key(self) -> str:
        """Identity of the atom inside the oracle: its rendered text."""
        return pe.render_prop(self.expr)


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Always(Formula):  # G
    operand: Formula


@dataclass(frozen=True)
class Eventually(Formula):  # F
    operand: Formula


@dataclass(frozen=True)
class Next(Formula):  # X
    operand: Formula


@dataclass(frozen=True)
class Until(Formula):  # U
    left: Formula
    right: Formula


@dataclass(frozen=True)
class WeakUntil(Formula):  # W
    left: Formula
    right: Formula


TRUE = Bool(True)
FALSE = Bool(False)

_UNARY_TEMPORAL = {"G": Always, "F": Eventually, "X": Next}
_RESERVED = frozenset({"G", "F", "X", "U", "W", "true", "false"})


def atom(name: str) -> Atom:
    return Atom(pe.Var(name))


def embed(expr: pe.PropExpr) -> Formula:
    """Lift a propositional expression into formula structure."""
    if isinstance(expr, pe.Const):
        return Bool(expr.value)
    if isinstance(expr, (pe.Var, pe.Compare)):
        return Atom(expr)
    if isinstance(expr, pe.Not):
        return Not(embed(expr.operand))
    if isinstance(expr, pe.And):
        return And(embed(expr.left), embed(expr.right))
    if isinstance(expr, pe.Or):
        return Or(embed(expr.left), embed(expr.right))
    raise TypeError(f"not a PropExpr: {expr!r}")


# ---------------------------------------------------------------------------
# Parsing
#
# Precedence (tightest first): ! > G/F/X > & > | > U/W > ->
# U, W and -> associate to the right.

_LTL_TOKEN_RE = re.compile(
    r"\s*(?:(?P<lpar>\()|(?P<rpar>\))"
    r"|(?P<arrow>->|→)"
    r"|(?P<cmp><=|>=|!=|==|<|>|=)"
    r"|(?P<int>-?[0-9]+)"
    r"|(?P<sym>[&|!∧∨¬])"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)

_LTL_SYM = {"&": "&", "∧": "&", "|": "|", "∨": "|", "!": "!", "¬": "!"}


def _ltl_tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _LTL_TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ExprSyntaxError(f"unknown token {stripped[0]!r}", at)
        kind = m.lastgroup
        value = m.group(kind)
        at = m.start(kind)
        if kind == "sym":
            tokens.append(("op", _LTL_SYM[value], at))
        elif kind == "arrow":
            tokens.append(("op", "->", at))
        elif kind == "ident" and value in _RESERVED:
            tokens.append(("op", value, at))
        else:
            tokens.append((kind, value, at))
        pos = m.end()
    return tokens


class _LtlParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _ltl_tokenize(text)
        self.idx = 0

    def peek(self):
        return self.tokens[self.idx] if self.idx < len(self.tokens) else None

    def advance(self):
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def error(self, message: str) -> ExprSyntaxError:
        tok = self.peek()
        at = tok[2] if tok else len(self.text)
        return ExprSyntaxError(message, at)

    def _at_op(self, *ops: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] == "op" and tok[1] in ops

    def parse(self) -> Formula:
        f = self.implies()
        if self.peek() is not None:
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return f

    def implies(self) -> Formula:
        left = self.until()
        if self._at_op("->"):
            self.advance()
            return Implies(left, self.implies())
        return left

    def until(self) -> Formula:
        left = self.disjunction()
        if self._at_op("U", "W"):
            op = self.advance()[1]
            right = self.until()
            return Until(left, right) if op == "U" else WeakUntil(left, right)
        return left

    def disjunction(self) -> Formula:
        node = self.conjunction()
        while self._at_op("|"):
            self.advance()
            node = Or(node, self.conjunction())
        return node

    def conjunction(self) -> Formula:
        node = self.unary()
        while self._at_op("&"):
            self.advance()
            node = And(node, self.unary())
        return node

    def unary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of formula")
        if tok[0] == "op" and tok[1] == "!":
            self.advance()
            return Not(self.unary())
        if tok[0] == "op" and tok[1] in _UNARY_TEMPORAL:
            self.advance()
            return _UNARY_TEMPORAL[tok[1]](self.unary())
        return self.primary()

    def primary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of formula")
        kind, value, at = tok
        if kind == "lpar":
            self.advance()
            f = self.implies()
            if not (self.peek() and self.peek()[0] == "rpar"):
                raise self.error("expected ')'")
            self.advance()
            return f
        if kind == "op" and value == "true":
            self.advance()
            return TRUE
        if kind == "op" and value == "false":
            self.advance()
            return FALSE
        if kind == "ident":
            self.advance()
            nxt = self.peek()
            if nxt and nxt[0] == "cmp":
                op = self.advance()[1]
                if op == "==":
                    op = "="
                lit = self.peek()
                if lit is None or lit[0] != "int":
                    raise self.error("expected integer literal after comparison")
                self.advance()
                return Atom(pe.Compare(value, op, int(lit[1])))
            return Atom(pe.Var(value))
        raise ExprSyntaxError(f"unexpected token {value!r}", at)


def parse_ltl(text: str) -> Formula:
    if not text or not text.strip():
        raise ExprSyntaxError("empty formula", 0)
    return _LtlParser(text).parse()


# ---------------------------------------------------------------------------
# Rendering
#
# Operands of a binary connective are parenthesized whenever they are
# themselves binary applications.  This is slightly more than the strict
# precedence minimum but matches the usual way these formulas are written,
# and reparses to the identical tree.


def _is_binary(f: Formula) -> bool:
    return isinstance(f, (And, Or, Implies, Until, WeakUntil))


def _wrap(f: Formula) -> str:
    text = render_ltl(f)
    return f"({text})" if _is_binary(f) else text


def render_ltl(f: Formula) -> str:
    if isinstance(f, Bool):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return pe.render_prop(f.expr)
    if isinstance(f, Not):
        return f"!{_wrap(f.operand)}"
    if isinstance(f, Always):
        return f"G {_wrap(f.operand)}"
    if isinstance(f, Eventually):
        return f"F {_wrap(f.operand)}"
    if isinstance(f, Next):
        return f"X {_wrap(f.operand)}"
    if isinstance(f, And):
        return f"{_wrap(f.left)} & {_wrap(f.right)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left)} | {_wrap(f.right)}"
    if isinstance(f, Implies):
        return f"{_wrap(f.left)} -> {_wrap(f.right)}"
    if isinstance(f, Until):
        return f"{_wrap(f.left)} U {_wrap(f.right)}"
    if isinstance(f, WeakUntil):
        return f"{_wrap(f.left)} W {_wrap(f.right)}"
    raise TypeError(f"not a Formula: {f!r}")


# ---------------------------------------------------------------------------
# Substitution


def substitute(f: Formula, binding: Mapping[str, pe.PropExpr]) -> Formula:
    """Replace named atoms by expressions; no simplification is performed.

    Binding values are propositional expressions; ``pe.Const`` becomes the
    corresponding Boolean formula node, compound expressions are lifted
    into formula connectives.  Unbound atoms and comparison atoms are left
    unchanged; extra binding keys are ignored.
    """
    if isinstance(f, Atom):
        if isinstance(f.expr, pe.Var) and f.expr.name in binding:
            return embed(binding[f.expr.name])
        return f
    if isinstance(f, (Bool,)):
        return f
    if isinstance(f, Not):
        return Not(substitute(f.operand, binding))
    if isinstance(f, Always):
        return Always(substitute(f.operand, binding))
    if isinstance(f, Eventually):
        return Eventually(substitute(f.operand, binding))
    if isinstance(f, Next):
        return Next(substitute(f.operand, binding))
    if isinstance(f, (And, Or, Implies, Until, WeakUntil)):
        return type(f)(substitute(f.left, binding), substitute(f.right, binding))
    raise TypeError(f"not a Formula: {f!r}")


def rename_atoms(f: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rename variable atoms; names not in the mapping stay as they are."""
    return substitute(f, {old: pe.Var(new) for old, new in mapping.items()})


# ---------------------------------------------------------------------------
# Atom collection


def atoms_of(f: Formula) -> list[str]:
    """Distinct atom keys in order of first occurrence (pre-order)."""
    seen: list[str] = []

    def walk(g: Formula):
        if isinstance(g, Atom):
            if g.key not in seen:
                seen.append(g.key)
        elif isinstance(g, (Not, Always, Eventually, Next)):
            walk(g.operand)
        elif isinstance(g, (And, Or, Implies, Until, WeakUntil)):
            walk(g.left)
            walk(g.right)

    walk(f)
    return seen


def canonical_rename(f: Formula) -> tuple[Formula, dict[str, str]]:
    """Rename atoms to a1, a2, ... in order of first pre-order occurrence.

    Only simple variable atoms are supported; a comparison atom has no
    simple name to rename and raises CanonicalRenameError.
    """
    order: list[str] = []

    def collect(g: Formula):
        if isinstance(g, Atom):
            if isinstance(g.expr, pe.Compare):
                raise CanonicalRenameError(
                    f"cannot canonically rename comparison atom {g.key!r}"
                )
            if g.expr.name not in order:
                order.append(g.expr.name)
        elif isinstance(g, (Not, Always, Eventually, Next)):
            collect(g.operand)
        elif isinstance(g, (And, Or, Implies, Until, WeakUntil)):
            collect(g.left)
            collect(g.right)

    collect(f)
    mapping = {name: f"a{i + 1}" for i, name in enumerate(order)}
    return rename_atoms(f, mapping), mapping


# ---------------------------------------------------------------------------
# Simplification
#
# A bottom-up rewrite system applied to a fixpoint.  Every rule strictly
# decreases tree size, so termination is immediate.  The result is
# semantically equivalent over all lasso traces and contains no true/false
# subterm except as the whole formula.


def _flatten(cls, f: Formula) -> list[Formula]:
    if isinstance(f, cls):
        return _flatten(cls, f.left) + _flatten(cls, f.right)
    return [f]


def _ac_key(f: Formula):
    """Structural key insensitive to ∧/∨ argument order and nesting."""
    if isinstance(f, (And, Or)):
        parts = sorted(_ac_key(p) for p in _flatten(type(f), f))
        return (type(f).__name__, tuple(parts))
    if isinstance(f, Atom):
        return ("Atom", f.key)
    if isinstance(f, Bool):
        return ("Bool", f.value)
    if isinstance(f, (Not, Always, Eventually, Next)):
        return (type(f).__name__, _ac_key(f.operand))
    return (type(f).__name__, _ac_key(f.left), _ac_key(f.right))


def _rebuild(cls, parts: list[Formula]) -> Formula:
    node = parts[0]
    for p in parts[1:]:
        node = cls(node, p)
    return node


def implies_syn(p: Formula, q: Formula) -> bool:
    """Conservative syntactic implication test: True means p => q holds
    at every position of every trace.  Used by the ∧/∨ cleanup and the
    weak-until rules; sound but deliberately incomplete."""
    if _ac_key(p) == _ac_key(q):
        return True
    if isinstance(p, Bool):
        return not p.value
    if isinstance(q, Bool):
        return q.value
    if isinstance(q, Or):
        if any(implies_syn(p, d) for d in _flatten(Or, q)):
            return True
    if isinstance(p, And):
        if any(implies_syn(c, q) for c in _flatten(And, p)):
            return True
    if isinstance(q, And):
        if all(implies_syn(p, d) for d in _flatten(And, q)):
            return True
    if isinstance(p, Or):
        if all(implies_syn(c, q) for c in _flatten(Or, p)):
            return True
    return False


def _negate_syn(f: Formula) -> Formula:
    return f.operand if isinstance(f, Not) else Not(f)


def _cleanup_parts(cls, parts: list[Formula]) -> list[Formula] | None:
    """∧/∨ argument cleanup over the flattened argument list.

    Conjunction: a part implied by another part is redundant; two
    complementary parts collapse the whole thing to false.  Disjunction is
    dual, and a part that implies the right side of a weak-until sibling
    is subsumed by it (it would escape the weak-until at position 0).
    Returns None when nothing fires, the empty list for a constant result.
    """
    redundant = [False] * len(parts)
    for i, p in enumerate(parts):
        for j, q in enumerate(parts):
            if i == j or redundant[j]:
                continue
            if cls is And and _ac_key(q) == _ac_key(_negate_syn(p)):
                return []
            if cls is Or and _ac_key(q) == _ac_key(_negate_syn(p)):
                return []
            if cls is And:
                implied = implies_syn(q, p)
                back = implies_syn(p, q)
            else:
                implied = implies_syn(p, q)
                back = implies_syn(q, p)
            if implied and (not back or j < i):
                redundant[i] = True
                break
            if cls is Or and isinstance(q, WeakUntil) and implies_syn(p, q.right):
                redundant[i] = True
                break
    if not any(redundant):
        return None
    return [p for i, p in enumerate(parts) if not redundant[i]]


def _apply_root(f: Formula) -> Formula:
    """One rewrite step at the root; children are assumed simplified."""
    if isinstance(f, Not):
        g = f.operand
        if isinstance(g, Bool):
            return Bool(not g.value)
        if isinstance(g, Not):
            return g.operand
        return f
    if isinstance(f, And):
        left, right = f.left, f.right
        if isinstance(left, Bool):
            return right if left.value else FALSE
        if isinstance(right, Bool):
            return left if right.value else FALSE
        kept = _cleanup_parts(And, _flatten(And, f))
        if kept is not None:
            return _rebuild(And, kept) if kept else FALSE
        return f
    if isinstance(f, Or):
        left, right = f.left, f.right
        if isinstance(left, Bool):
            return TRUE if left.value else right
        if isinstance(right, Bool):
            return TRUE if right.value else left
        kept = _cleanup_parts(Or, _flatten(Or, f))
        if kept is not None:
            return _rebuild(Or, kept) if kept else TRUE
        return f
    if isinstance(f, Implies):
        left, right = f.left, f.right
        if isinstance(left, Bool):
            return right if left.value else TRUE
        if isinstance(right, Bool):
            return TRUE if right.value else Not(left)
        return f
    if isinstance(f, Always):
        g = f.operand
        if isinstance(g, Bool):
            return g
        if isinstance(g, Always):
            return g
        # G (f W g) with g => f never escapes healthily: it is just G f
        if isinstance(g, WeakUntil) and implies_syn(g.right, g.left):
            return Always(g.left)
        return f
    if isinstance(f, Eventually):
        g = f.operand
        if isinstance(g, Bool):
            return g
        if isinstance(g, Eventually):
            return g
        return f
    if isinstance(f, Next):
        if isinstance(f.operand, Bool):
            return f.operand
        return f
    if isinstance(f, Until):
        left, right = f.left, f.right
        if isinstance(right, Bool):
            return TRUE if right.value else FALSE
        if isinstance(left, Bool):
            return Eventually(right) if left.value else right
        # with left => right, the escape must fire immediately or never
        if implies_syn(left, right):
            return right
        return f
    if isinstance(f, WeakUntil):
        left, right = f.left, f.right
        if isinstance(right, Bool):
            return TRUE if right.value else Always(left)
        if isinstance(left, Bool):
            return TRUE if left.value else right
        if implies_syn(left, right):
            return right
        # if the hold side can only fail into the escape, this is a tautology
        if implies_syn(_negate_syn(left), right):
            return TRUE
        return f
    return f


def _simplify_pass(f: Formula) -> Formula:
    if isinstance(f, (Atom, Bool)):
        return f
    if isinstance(f, (Not, Always, Eventually, Next)):
        node = type(f)(_simplify_pass(f.operand))
    else:
        node = type(f)(_simplify_pass(f.left), _simplify_pass(f.right))
    while True:
        rewritten = _apply_root(node)
        if rewritten == node:
            return node
        node = rewritten


def simplify(f: Formula) -> Formula:
    """Rewrite to a fixpoint; equivalent to ``f`` over all lasso traces."""
    current = f
    while True:
        nxt = _simplify_pass(current)
        if nxt == current:
            return current
        current = nxt
