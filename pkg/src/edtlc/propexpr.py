"""Propositional expressions over system variables.

This is the small expression language used for attribute values, CNL slot
contents, and trace atoms.  Keyword connectives (``and``, ``or``, ``not``)
are canonical; the symbols ``&``, ``|``, ``!`` and their Unicode forms are
accepted on input.  Comparisons are restricted to ``identifier op
integer-literal``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import ExprSyntaxError, UnboundIdentifierError

Value = Union[bool, int]
Valuation = Mapping[str, Value]

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
KEYWORDS = frozenset({"and", "or", "not", "true", "false"})
CMP_OPS = ("<=", ">=", "!=", "==", "<", ">", "=")

# machine-width bound for comparison literals
INT_MIN = -(2**63)
INT_MAX = 2**63 - 1


@dataclass(frozen=True)
class PropExpr:
    pass


@dataclass(frozen=True)
class Const(PropExpr):
    value: bool


@dataclass(frozen=True)
class Var(PropExpr):
    name: str


@dataclass(frozen=True)
class Compare(PropExpr):
    name: str
    op: str  # one of < <= = != >= >
    literal: int


@dataclass(frozen=True)
class Not(PropExpr):
    operand: PropExpr


@dataclass(frozen=True)
class And(PropExpr):
    left: PropExpr
    right: PropExpr


@dataclass(frozen=True)
class Or(PropExpr):
    left: PropExpr
    right: PropExpr


# ---------------------------------------------------------------------------
# Parsing


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<lpar>\()|(?P<rpar>\))"
    r"|(?P<cmp><=|>=|!=|==|<|>|=)"
    r"|(?P<int>-?[0-9]+)"
    r"|(?P<sym>&&|\|\||[&|!∧∨¬])"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)

_SYM_MAP = {
    "&": "and",
    "&&": "and",
    "∧": "and",
    "|": "or",
    "||": "or",
    "∨": "or",
    "!": "not",
    "¬": "not",
}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Return (kind, value, position) triples.

    Kinds: lpar, rpar, cmp, int, kw (and/or/not/true/false), ident.
    """
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
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
            tokens.append(("kw", _SYM_MAP[value], at))
        elif kind == "ident" and value in KEYWORDS:
            tokens.append(("kw", value, at))
        else:
            tokens.append((kind, value, at))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.idx = 0

    def peek(self) -> tuple[str, str, int] | None:
        if self.idx < len(self.tokens):
            return self.tokens[self.idx]
        return None

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def error(self, message: str) -> ExprSyntaxError:
        tok = self.peek()
        at = tok[2] if tok else len(self.text)
        return ExprSyntaxError(message, at)

    def parse(self) -> PropExpr:
        expr = self.expr()
        if self.peek() is not None:
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return expr

    def expr(self) -> PropExpr:
        node = self.term()
        while self._at_kw("or"):
            self.advance()
            node = Or(node, self.term())
        return node

    def term(self) -> PropExpr:
        node = self.factor()
        while self._at_kw("and"):
            self.advance()
            node = And(node, self.factor())
        return node

    def factor(self) -> PropExpr:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of expression")
        kind, value, _ = tok
        if kind == "kw" and value == "not":
            self.advance()
            return Not(self.factor())
        if kind == "lpar":
            self.advance()
            node = self.expr()
            if not (self.peek() and self.peek()[0] == "rpar"):
                raise self.error("expected ')'")
            self.advance()
            return node
        if kind == "kw" and value in ("true", "false"):
            self.advance()
            return Const(value == "true")
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
                n = int(lit[1])
                if not (INT_MIN <= n <= INT_MAX):
                    raise ExprSyntaxError("integer literal out of range", lit[2])
                return Compare(value, op, n)
            return Var(value)
        raise self.error(f"unexpected token {value!r}")

    def _at_kw(self, kw: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] == "kw" and tok[1] == kw


def parse_prop(text: str) -> PropExpr:
    """Parse expression text into a PropExpr tree.

    Grammar: ``expr := term ('or' term)*; term := factor ('and' factor)*;
    factor := 'not' factor | '(' expr ')' | 'true' | 'false' |
    ident cmp int | ident`` with precedence not > and > or.
    """
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Evaluation


def eval_prop(expr: PropExpr, valuation: Valuation) -> bool:
    """Evaluate ``expr`` under ``valuation``.

    A missing identifier is an error, never a default.  Boolean variables
    may be bound to 0/1 integers (trace CSV convention); comparison
    variables must be bound to integers.
    """
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        if expr.name not in valuation:
            raise UnboundIdentifierError(f"unbound identifier {expr.name!r}")
        v = valuation[expr.name]
        if isinstance(v, bool):
            return v
        if isinstance(v, int) and v in (0, 1):
            return bool(v)
        raise UnboundIdentifierError(
            f"identifier {expr.name!r} is bound to {v!r}, not a Boolean"
        )
    if isinstance(expr, Compare):
        if expr.name not in valuation:
            raise UnboundIdentifierError(f"unbound identifier {expr.name!r}")
        v = valuation[expr.name]
        if not isinstance(v, int):
            raise UnboundIdentifierError(
                f"identifier {expr.name!r} is bound to {v!r}, not an integer"
            )
        n = int(v)
        if expr.op == "<":
            return n < expr.literal
        if expr.op == "<=":
            return n <= expr.literal
        if expr.op == "=":
            return n == expr.literal
        if expr.op == "!=":
            return n != expr.literal
        if expr.op == ">=":
            return n >= expr.literal
        return n > expr.literal
    if isinstance(expr, Not):
        return not eval_prop(expr.operand, valuation)
    if isinstance(expr, And):
        return eval_prop(expr.left, valuation) and eval_prop(expr.right, valuation)
    if isinstance(expr, Or):
        return eval_prop(expr.left, valuation) or eval_prop(expr.right, valuation)
    raise TypeError(f"not a PropExpr: {expr!r}")


# ---------------------------------------------------------------------------
# Rendering

# precedence: or < and < not < atoms
_PREC_OR = 1
_PREC_AND = 2
_PREC_NOT = 3
_PREC_ATOM = 4


def _prec(expr: PropExpr) -> int:
    if isinstance(expr, Or):
        return _PREC_OR
    if isinstance(expr, And):
        return _PREC_AND
    if isinstance(expr, Not):
        return _PREC_NOT
    return _PREC_ATOM


def render_prop(expr: PropExpr) -> str:
    """Render with minimal parentheses; round-trips through parse_prop."""
    if isinstance(expr, Const):
        return "true" if expr.value else "false"
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Compare):
        return f"{expr.name} {expr.op} {expr.literal}"
    if isinstance(expr, Not):
        inner = render_prop(expr.operand)
        if _prec(expr.operand) < _PREC_NOT:
            inner = f"({inner})"
        return f"not {inner}"
    if isinstance(expr, (And, Or)):
        prec = _prec(expr)
        word = "and" if isinstance(expr, And) else "or"
        left = render_prop(expr.left)
        # left-associative: parenthesize a right child at the same level so
        # the reparse rebuilds the identical tree
        if _prec(expr.left) < prec:
            left = f"({left})"
        right = render_prop(expr.right)
        if _prec(expr.right) <= prec:
            right = f"({right})"
        return f"{left} {word} {right}"
    raise TypeError(f"not a PropExpr: {expr!r}")


def fold_constants(expr: PropExpr) -> PropExpr:
    """Fold Boolean constants out of an expression where possible."""
    if isinstance(expr, Not):
        inner = fold_constants(expr.operand)
        if isinstance(inner, Const):
            return Const(not inner.value)
        return Not(inner)
    if isinstance(expr, And):
        left = fold_constants(expr.left)
        right = fold_constants(expr.right)
        if isinstance(left, Const):
            return right if left.value else Const(False)
        if isinstance(right, Const):
            return left if right.value else Const(False)
        return And(left, right)
    if isinstance(expr, Or):
        left = fold_constants(expr.left)
        right = fold_constants(expr.right)
        if isinstance(left, Const):
            return Const(True) if left.value else right
        if isinstance(right, Const):
            return Const(True) if right.value else left
        return Or(left, right)
    return expr


def variables_of(expr: PropExpr) -> set[str]:
    """All identifiers referenced by the expression."""
    if isinstance(expr, (Var, Compare)):
        return {expr.name}
    if isinstance(expr, Not):
        return variables_of(expr.operand)
    if isinstance(expr, (And, Or)):
        return variables_of(expr.left) | variables_of(expr.right)
    return set()
