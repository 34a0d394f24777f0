"""Boolean expression trees, their text syntax and evaluation.

Grammar (precedence low to high)::

    expr  := iff
    iff   := imp ('<->' imp)*
    imp   := or ('->' imp)?
    or    := and ('|' and)*
    and   := unary ('&' unary)*
    unary := '!' unary | '(' expr ')' | ident | '0' | '1'

``->`` and ``<->`` are sugar and are rewritten into the Not/And/Or core.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Union

from .errors import ParseError, UnboundVariable

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
RESERVED_PREFIX = "__"


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class And:
    args: tuple

    def __post_init__(self):
        if len(self.args) < 2:
            raise ValueError("And needs at least two operands")


@dataclass(frozen=True)
class Or:
    args: tuple

    def __post_init__(self):
        if len(self.args) < 2:
            raise ValueError("Or needs at least two operands")


@dataclass(frozen=True)
class Iff:
    """Biconditional; only produced by the encoder, never by model equations."""
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Var, Not, And, Or, Iff]

TRUE = Const(True)
FALSE = Const(False)


def is_identifier(name: str) -> bool:
    return bool(IDENT_RE.match(name))


def conj(args: Iterable[Expr]) -> Expr:
    """n-ary conjunction that tolerates zero or one operand and flattens nested Ands."""
    flat = []
    for a in args:
        if isinstance(a, And):
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(args: Iterable[Expr]) -> Expr:
    flat = []
    for a in args:
        if isinstance(a, Or):
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def neg(e: Expr) -> Expr:
    """Negation that cancels double negations and folds constants."""
    if isinstance(e, Not):
        return e.arg
    if isinstance(e, Const):
        return Const(not e.value)
    return Not(e)


def literal(name: str, value: bool) -> Expr:
    """Positive literal for value 1, negative literal for value 0."""
    return Var(name) if value else Not(Var(name))


def variables(e: Expr) -> list:
    """Variables of ``e`` in first-occurrence order."""
    seen = {}
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            seen.setdefault(node.name, None)
        elif isinstance(node, Not):
            stack.append(node.arg)
        elif isinstance(node, (And, Or)):
            stack.extend(reversed(node.args))
        elif isinstance(node, Iff):
            stack.append(node.right)
            stack.append(node.left)
    return list(seen)


def eval_expr(e: Expr, valuation: Mapping[str, bool]) -> bool:
    if isinstance(e, Var):
        try:
            return bool(valuation[e.name])
        except KeyError:
            raise UnboundVariable(e.name) from None
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Not):
        return not eval_expr(e.arg, valuation)
    if isinstance(e, And):
        return all(eval_expr(a, valuation) for a in e.args)
    if isinstance(e, Or):
        return any(eval_expr(a, valuation) for a in e.args)
    if isinstance(e, Iff):
        return eval_expr(e.left, valuation) == eval_expr(e.right, valuation)
    raise TypeError(f"not an expression: {e!r}")


def _py_source(e: Expr) -> str:
    if isinstance(e, Var):
        return f"v[{e.name!r}]"
    if isinstance(e, Const):
        return "True" if e.value else "False"
    if isinstance(e, Not):
        return f"(not {_py_source(e.arg)})"
    if isinstance(e, And):
        return "(" + " and ".join(_py_source(a) for a in e.args) + ")"
    if isinstance(e, Or):
        return "(" + " or ".join(_py_source(a) for a in e.args) + ")"
    if isinstance(e, Iff):
        return f"({_py_source(e.left)} == {_py_source(e.right)})"
    raise TypeError(f"not an expression: {e!r}")


def compile_expr(e: Expr) -> Callable[[Mapping[str, bool]], bool]:
    """Compile to a Python function of a valuation dict (used on hot evaluation paths)."""
    return eval(f"lambda v: bool({_py_source(e)})", {"__builtins__": {"bool": bool}})


# --- text syntax -----------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(<->|->|[!&|()]|[A-Za-z_][A-Za-z0-9_]*|[0-9]+)")


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r} in {text!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of expression in {self.text!r}")
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, got {tok!r} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> Expr:
        e = self.iff()
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()!r} in {self.text!r}")
        return e

    def iff(self):
        e = self.imp()
        while self.peek() == "<->":
            self.take()
            rhs = self.imp()
            e = disj([conj([e, rhs]), conj([neg(e), neg(rhs)])])
        return e

    def imp(self):
        e = self.or_()
        if self.peek() == "->":
            self.take()
            e = disj([neg(e), self.imp()])
        return e

    def or_(self):
        args = [self.and_()]
        while self.peek() == "|":
            self.take()
            args.append(self.and_())
        return disj(args) if len(args) > 1 else args[0]

    def and_(self):
        args = [self.unary()]
        while self.peek() == "&":
            self.take()
            args.append(self.unary())
        return conj(args) if len(args) > 1 else args[0]

    def unary(self):
        tok = self.take()
        if tok == "!":
            return Not(self.unary())
        if tok == "(":
            e = self.iff()
            self.take(")")
            return e
        if tok == "0":
            return FALSE
        if tok == "1":
            return TRUE
        if tok[0].isdigit():
            raise ParseError(f"bad token {tok!r} in {self.text!r}")
        if tok in ("&", "|", ")", "->", "<->"):
            raise ParseError(f"unexpected {tok!r} in {self.text!r}")
        return Var(tok)


def parse_expr(text: str) -> Expr:
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty expression")
    return _Parser(text).parse()


_PREC = {Iff: 0, Or: 1, And: 2, Not: 3, Var: 4, Const: 4}


def format_expr(e: Expr, parent: int = 0) -> str:
    """Inverse of :func:`parse_expr` up to desugaring; Iff prints as ``<->``."""
    p = _PREC[type(e)]
    if isinstance(e, Var):
        s = e.name
    elif isinstance(e, Const):
        s = "1" if e.value else "0"
    elif isinstance(e, Not):
        s = "!" + format_expr(e.arg, p)
    elif isinstance(e, And):
        s = " & ".join(format_expr(a, p + 1) for a in e.args)
    elif isinstance(e, Or):
        s = " | ".join(format_expr(a, p + 1) for a in e.args)
    else:
        s = f"{format_expr(e.left, p + 1)} <-> {format_expr(e.right, p + 1)}"
    return f"({s})" if p < parent else s
