"""Tokenizer shared by the model language and the guard/snippet language."""

from __future__ import annotations

import re
from dataclasses import dataclass


class SbcError(Exception):
    """Base class for all errors raised by this package."""


@dataclass(frozen=True)
class Loc:
    line: int
    col: int
    file: str | None = None

    def __str__(self):
        return f"{self.file or '<input>'}:{self.line}:{self.col}"


class SbcSyntaxError(SbcError):
    def __init__(self, message, loc=None):
        super().__init__(f"{loc}: {message}" if loc else message)
        self.message = message
        self.loc = loc


@dataclass(frozen=True)
class Token:
    kind: str  # ident, int, real, string, op, eof
    text: str
    loc: Loc

    @property
    def value(self):
        if self.kind == "int":
            return int(self.text)
        if self.kind == "real":
            return float(self.text)
        if self.kind == "string":
            return _unescape(self.text)
        return self.text


# longest operators first
_OPS = [
    "-[", "]->", "->", "==", "!=", ">=", "<=", "≤", "≥", "≠",
    ";", ":", ",", ".", "(", ")", "{", "}", "[", "]",
    "?", "/", "=", "<", ">", "+", "-", "*", "•",
]

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<real>\d+\.\d+)
  | (?P<int>\d+)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>{ops})
    """.format(ops="|".join(re.escape(o) for o in _OPS)),
    re.VERBOSE,
)

_UNICODE_OPS = {"≤": "<=", "≥": ">=", "≠": "!="}


def _unescape(text):
    body = text[1:-1]
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), body)


def quote_string(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t") + '"'


def normalize_source(text: str) -> str:
    if text.startswith("\ufeff"):
        text = text[1:]
    return text.replace("\r\n", "\n").replace("\r", "\n")


def tokenize(text: str, file: str | None = None, errors: list | None = None) -> list[Token]:
    """Split ``text`` into tokens, ending with an ``eof`` token.

    Unrecognised characters raise :class:`SbcSyntaxError` unless an ``errors``
    list is given, in which case they are recorded there and skipped.
    """
    text = normalize_source(text)
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        loc = Loc(line, pos - line_start + 1, file)
        if m is None:
            err = SbcSyntaxError(f"unexpected character {text[pos]!r}", loc)
            if errors is None:
                raise err
            errors.append(err)
            pos += 1
            continue
        kind = m.lastgroup
        lexeme = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, _UNICODE_OPS.get(lexeme, lexeme), loc))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            line_start = pos + lexeme.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", Loc(line, pos - line_start + 1, file)))
    return tokens


class TokenStream:
    """Cursor over a token list with the usual peek/expect helpers."""

    def __init__(self, tokens: list[Token], pos: int = 0):
        self.tokens = tokens
        self.pos = pos

    def peek(self, offset=0) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def at(self, *texts, offset=0) -> bool:
        tok = self.peek(offset)
        return tok.kind in ("op", "ident") and tok.text in texts

    def at_kind(self, *kinds, offset=0) -> bool:
        return self.peek(offset).kind in kinds

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def accept(self, *texts) -> Token | None:
        if self.at(*texts):
            return self.next()
        return None

    def expect(self, text, what=None) -> Token:
        tok = self.peek()
        if not self.at(text):
            raise SbcSyntaxError(f"expected {what or repr(text)}, found {describe(tok)}", tok.loc)
        return self.next()

    def expect_ident(self, what="identifier") -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise SbcSyntaxError(f"expected {what}, found {describe(tok)}", tok.loc)
        return self.next()

    def expect_eof(self):
        tok = self.peek()
        if tok.kind != "eof":
            raise SbcSyntaxError(f"unexpected {describe(tok)}", tok.loc)


def describe(tok: Token) -> str:
    if tok.kind == "eof":
        return "end of input"
    return repr(tok.text)


IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


def is_identifier(name: str) -> bool:
    return bool(IDENT_RE.match(name))
