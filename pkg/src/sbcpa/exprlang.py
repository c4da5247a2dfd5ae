"""Guards and code snippets: parsing, printing, evaluation.

Values are plain Python objects: ``int`` (64-bit signed), ``float``, ``str``
and ``bool``.  An environment is a mapping from variable names to values and
is never mutated in place; :func:`exec_snippet` returns a fresh ``dict``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .lexer import SbcError, SbcSyntaxError, TokenStream, describe, quote_string, tokenize

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1

COMPARISON_OPS = (">", "<", ">=", "<=", "==", "!=")


class EvalError(SbcError):
    """Runtime failure while evaluating a guard or executing a snippet."""


class UnboundVariable(EvalError):
    def __init__(self, name):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


# -- expression AST ---------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    value: Union[int, float, str, bool]

    def __str__(self):
        return format_value(self.value)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg:
    operand: "Expr"

    def __str__(self):
        # "-5" would reparse as a literal, so only bare variables go unwrapped
        if isinstance(self.operand, Var):
            return f"-{self.operand}"
        return f"-({self.operand})"


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"

    def __str__(self):
        prec = _PRECEDENCE[self.op]
        left, right = str(self.left), str(self.right)
        if isinstance(self.left, BinOp) and _PRECEDENCE[self.left.op] < prec:
            left = f"({left})"
        # operators are left-associative: parenthesize equal precedence on the right
        if isinstance(self.right, BinOp) and _PRECEDENCE[self.right.op] <= prec:
            right = f"({right})"
        return f"{left} {self.op} {right}"


Expr = Union[Lit, Var, Neg, BinOp]


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr

    def __str__(self):
        return f"{self.var} = {self.expr};"


@dataclass(frozen=True)
class CodeSnippet:
    """Straight-line list of assignments; the empty snippet prints as ``nil``."""

    statements: tuple[Assign, ...] = ()

    def __bool__(self):
        return bool(self.statements)

    def __add__(self, other):
        if not isinstance(other, CodeSnippet):
            return NotImplemented
        return CodeSnippet(self.statements + other.statements)

    def __str__(self):
        return format_snippet(self)

    def writes(self) -> set[str]:
        return {s.var for s in self.statements}

    def reads(self) -> set[str]:
        out = set()
        for s in self.statements:
            out |= expr_vars(s.expr)
        return out


NIL = CodeSnippet()


@dataclass(frozen=True)
class TrueGuard:
    def __str__(self):
        return "nil"


TRUE = TrueGuard()


@dataclass(frozen=True)
class Comparison:
    lhs: Union[Var, Lit]
    op: str
    rhs: Union[Var, Lit]

    def __str__(self):
        return f"{self.lhs} {self.op} {self.rhs}"

    def reads(self) -> set[str]:
        return expr_vars(self.lhs) | expr_vars(self.rhs)


Guard = Union[TrueGuard, Comparison]


def expr_vars(expr) -> set[str]:
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, Neg):
        return expr_vars(expr.operand)
    if isinstance(expr, BinOp):
        return expr_vars(expr.left) | expr_vars(expr.right)
    return set()


def guard_reads(guard) -> set[str]:
    return guard.reads() if isinstance(guard, Comparison) else set()


# -- printing ---------------------------------------------------------------

def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return quote_string(value)
    if isinstance(value, float):
        text = repr(value)
        if "e" in text or "inf" in text or "nan" in text:
            # keep the literal re-parseable (no exponent syntax in the grammar)
            text = f"{value:.17f}".rstrip("0")
            if text.endswith("."):
                text += "0"
        return text
    return str(value)


def format_snippet(snippet: CodeSnippet | None) -> str:
    if not snippet:
        return "nil"
    return " ".join(str(s) for s in snippet.statements)


def format_guard(guard: Guard | None) -> str:
    return "nil" if guard is None else str(guard)


# -- parsing ----------------------------------------------------------------

def _is_nil(stream: TokenStream) -> bool:
    return stream.at("nil") and stream.peek(1).kind == "eof"


def parse_guard(text: str | None) -> Guard:
    """Parse a guard such as ``A > 200``; empty text or ``nil`` gives TRUE."""
    if text is None:
        return TRUE
    stream = TokenStream(tokenize(text))
    if stream.at_kind("eof") or _is_nil(stream) or (stream.at("TRUE") and stream.peek(1).kind == "eof"):
        return TRUE
    guard = read_guard(stream)
    stream.expect_eof()
    return guard


def parse_snippet(text: str | None) -> CodeSnippet:
    """Parse ``"x = 1; y = x + 2;"``; empty text or ``nil`` gives the empty snippet."""
    if text is None:
        return NIL
    stream = TokenStream(tokenize(text))
    if stream.at_kind("eof") or _is_nil(stream):
        return NIL
    snippet = read_snippet(stream)
    stream.expect_eof()
    return snippet


def parse_expr(text: str) -> Expr:
    stream = TokenStream(tokenize(text))
    expr = read_expr(stream)
    stream.expect_eof()
    return expr


def at_comparison(stream: TokenStream, offset=0) -> bool:
    return stream.at(*COMPARISON_OPS, "=", offset=offset)


def read_guard(stream: TokenStream) -> Guard:
    if stream.at("nil"):
        stream.next()
        return TRUE
    lhs = read_operand(stream)
    tok = stream.peek()
    if not at_comparison(stream):
        raise SbcSyntaxError(f"expected comparison operator, found {describe(tok)}", tok.loc)
    op = stream.next().text
    if op == "=":
        op = "=="
    rhs = read_operand(stream)
    return Comparison(lhs, op, rhs)


def read_operand(stream: TokenStream) -> Union[Var, Lit]:
    tok = stream.peek()
    if tok.kind == "op" and tok.text == "-" and stream.peek(1).kind in ("int", "real"):
        stream.next()
        num = stream.next()
        return Lit(_check_int(-num.value, num) if num.kind == "int" else -num.value)
    if tok.kind in ("int", "real", "string"):
        stream.next()
        return Lit(_check_int(tok.value, tok) if tok.kind == "int" else tok.value)
    if tok.kind == "ident":
        stream.next()
        if tok.text in ("true", "false"):
            return Lit(tok.text == "true")
        return Var(tok.text)
    raise SbcSyntaxError(f"expected variable or literal, found {describe(tok)}", tok.loc)


def _check_int(value, tok):
    if not INT_MIN <= value <= INT_MAX:
        raise SbcSyntaxError("integer literal out of 64-bit range", tok.loc)
    return value


def starts_statement(stream: TokenStream) -> bool:
    return stream.at_kind("ident") and stream.at("=", offset=1) and not stream.at("==", offset=1)


def read_snippet(stream: TokenStream) -> CodeSnippet:
    """Read one or more ``var = expr;`` statements."""
    if stream.accept("nil"):
        return NIL
    statements = []
    while True:
        name = stream.expect_ident("assignment target")
        stream.expect("=")
        expr = read_expr(stream)
        stream.expect(";", "';' after statement")
        statements.append(Assign(name.text, expr))
        if not starts_statement(stream):
            return CodeSnippet(tuple(statements))


def read_expr(stream: TokenStream) -> Expr:
    left = _read_term(stream)
    while stream.at("+", "-"):
        op = stream.next().text
        left = BinOp(op, left, _read_term(stream))
    return left


def _read_term(stream):
    left = _read_unary(stream)
    while stream.at("*", "/"):
        op = stream.next().text
        left = BinOp(op, left, _read_unary(stream))
    return left


def _read_unary(stream):
    if stream.at("-"):
        stream.next()
        if stream.at_kind("int", "real"):
            tok = stream.next()
            return Lit(_check_int(-tok.value, tok) if tok.kind == "int" else -tok.value)
        return Neg(_read_unary(stream))
    if stream.accept("("):
        inner = read_expr(stream)
        stream.expect(")")
        return inner
    return read_operand(stream)


# -- evaluation -------------------------------------------------------------

def value_type(value) -> str:
    if isinstance(value, bool):
        return "Boolean"
    if isinstance(value, int):
        return "Integer"
    if isinstance(value, float):
        return "Real"
    if isinstance(value, str):
        return "String"
    raise EvalError(f"not a model value: {value!r}")


def _numeric(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def eval_expr(expr: Expr, env: Mapping):
    if isinstance(expr, Lit):
        return expr.value
    if isinstance(expr, Var):
        try:
            return env[expr.name]
        except KeyError:
            raise UnboundVariable(expr.name) from None
    if isinstance(expr, Neg):
        value = eval_expr(expr.operand, env)
        if not _numeric(value):
            raise EvalError(f"cannot negate {value_type(value)}")
        return _int_range(-value)
    if isinstance(expr, BinOp):
        return arith(expr.op, eval_expr(expr.left, env), eval_expr(expr.right, env))
    raise TypeError(f"not an expression: {expr!r}")


def _int_range(value):
    if isinstance(value, int) and not INT_MIN <= value <= INT_MAX:
        raise EvalError("Integer overflow")
    return value


def arith(op, a, b):
    if not (_numeric(a) and _numeric(b)):
        raise EvalError(f"operator {op!r} not defined on {value_type(a)} and {value_type(b)}")
    if op == "+":
        return _int_range(a + b)
    if op == "-":
        return _int_range(a - b)
    if op == "*":
        return _int_range(a * b)
    if op == "/":
        if b == 0:
            raise EvalError("division by zero")
        if isinstance(a, int) and isinstance(b, int):
            q = abs(a) // abs(b)  # truncate toward zero
            return _int_range(q if (a < 0) == (b < 0) else -q)
        return a / b
    raise EvalError(f"unknown operator {op!r}")


def compare(op, a, b) -> bool:
    if _numeric(a) and _numeric(b):
        pass
    elif value_type(a) != value_type(b):
        raise EvalError(f"cannot compare {value_type(a)} with {value_type(b)}")
    elif op not in ("==", "!="):
        raise EvalError(f"ordering {op!r} not defined on {value_type(a)}")
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    if op == ">":
        return a > b
    if op == "<":
        return a < b
    if op == ">=":
        return a >= b
    if op == "<=":
        return a <= b
    raise EvalError(f"unknown comparison {op!r}")


def eval_guard(guard: Guard | None, env: Mapping) -> bool:
    if guard is None or isinstance(guard, TrueGuard):
        return True
    return compare(guard.op, eval_expr(guard.lhs, env), eval_expr(guard.rhs, env))


def exec_snippet(snippet: CodeSnippet | None, env: Mapping) -> dict:
    """Run the statements left to right on a copy of ``env``."""
    out = dict(env)
    for stmt in (snippet.statements if snippet else ()):
        out[stmt.var] = eval_expr(stmt.expr, out)
    return out


def concat_snippets(a: CodeSnippet | None, b: CodeSnippet | None) -> CodeSnippet:
    return (a or NIL) + (b or NIL)


def coerce_value(value, type_name: str):
    """Convert ``value`` to the declared parameter type, or raise EvalError."""
    actual = value_type(value)
    if actual == type_name:
        return value
    if type_name == "Real" and actual == "Integer":
        return float(value)
    raise EvalError(f"expected {type_name}, got {actual} {format_value(value)}")


def default_value(type_name: str):
    return {"Real": 0.0, "Integer": 0, "String": "", "Boolean": False}[type_name]


def format_env(env: Mapping) -> str:
    return " ".join(f"{k}={format_value(env[k])}" for k in sorted(env))
