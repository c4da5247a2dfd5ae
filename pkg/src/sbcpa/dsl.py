"""The ``.sbc`` modeling language: parser and canonical printer.

Example::

    actor Customer;
    component ATM;
    channel withdrawCash(in amount: Real);
    interaction a3 = Customer -> :ATM . withdrawCash;

    itg ITG_101 {
      init [amount = 0;] -> s101;
      s101 -[ a3 ]-> s102;
      s102 -[ amount > 0 ? a3 / amount = amount - 1; ]-> STOP;
    }

    def s_ATM = (ref s101 par ref s201);
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .exprlang import (
    NIL, TRUE, at_comparison, format_guard, format_snippet, read_guard, read_snippet,
)
from .lexer import Loc, SbcSyntaxError, TokenStream, describe, is_identifier, quote_string, tokenize
from .model import (
    ACTOR, COMPONENT, DIRECTIONS, INACTIVE, ITG, STOP, VALUE_TYPES, Agent, Alt, ChannelSignature,
    Definition, Inactive, Interaction, Loop, Model, Par, Parameter, Prefix, Prefixed, Ref, Transition,
)
from .validate import Diagnostic, ModelError, errors, validate_model

HEADER = "// SBC-PA model\n"

KEYWORDS = {"actor", "component", "channel", "interaction", "itg", "def"}
_STATE_KEYWORDS = {"STOP", "init", "states", "nil"}


# -- raw parse results ----------------------------------------------------------

@dataclass
class _RawPrefix:
    guard: object
    interaction: str
    snippet: object
    loc: Loc


@dataclass
class _RawExpr:
    """Placeholder for a Prefixed node whose interaction id is still unresolved."""

    prefix: _RawPrefix
    then: object


# -- signatures ------------------------------------------------------------------

def parse_channel_signature(text: str) -> ChannelSignature:
    """Parse ``name(in x: String; out y: Real)``; an optional trailing ``;`` is allowed."""
    stream = TokenStream(tokenize(text))
    sig = _read_signature(stream)
    stream.accept(";")
    stream.expect_eof()
    return sig


def _read_signature(stream: TokenStream) -> ChannelSignature:
    name = stream.expect_ident("channel name")
    params = []
    seen = set()
    if stream.accept("("):
        while not stream.at(")"):
            direction = stream.expect_ident("parameter direction")
            if direction.text not in DIRECTIONS:
                raise SbcSyntaxError(f"unknown parameter direction {direction.text!r}", direction.loc)
            pname = stream.expect_ident("parameter name")
            if not stream.at(":"):
                raise SbcSyntaxError(f"missing type for parameter {pname.text!r}", stream.peek().loc)
            stream.next()
            ptype = stream.expect_ident("parameter type")
            if ptype.text not in VALUE_TYPES:
                raise SbcSyntaxError(f"unknown parameter type {ptype.text!r}", ptype.loc)
            if pname.text in seen:
                raise SbcSyntaxError(f"duplicate parameter {pname.text!r}", pname.loc)
            seen.add(pname.text)
            params.append(Parameter(direction.text, pname.text, ptype.text))
            if not stream.accept(";", ","):
                break
        stream.expect(")")
    return ChannelSignature(name.text, tuple(params), name.loc)


# -- model parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, text, file):
        self.lex_errors = []
        self.stream = TokenStream(tokenize(text, file, self.lex_errors))
        self.diagnostics = [Diagnostic("syntax", e.message, e.loc) for e in self.lex_errors]
        self.actors, self.components = [], []
        self.channels, self.interactions = [], []
        self.itgs, self.defs = [], []  # raw forms, resolved later

    def error(self, exc: SbcSyntaxError):
        self.diagnostics.append(Diagnostic("syntax", exc.message, exc.loc))

    def parse(self):
        s = self.stream
        while not s.at_kind("eof"):
            start = s.pos
            try:
                self.declaration()
            except SbcSyntaxError as exc:
                self.error(exc)
                self.recover_top(start)

    def recover_top(self, start):
        s = self.stream
        if s.pos == start:
            s.next()
        depth = 0
        while not s.at_kind("eof"):
            if depth == 0 and s.at(*KEYWORDS) and s.peek().kind == "ident" and _starts_line(s):
                return
            tok = s.next()
            if tok.text == "{" and tok.kind == "op":
                depth += 1
            elif tok.text == "}" and tok.kind == "op":
                depth -= 1
                if depth <= 0:
                    return
            elif tok.text == ";" and tok.kind == "op" and depth == 0:
                return

    def declaration(self):
        s = self.stream
        tok = s.peek()
        if tok.kind != "ident" or tok.text not in KEYWORDS:
            raise SbcSyntaxError(f"expected declaration, found {describe(tok)}", tok.loc)
        s.next()
        getattr(self, "decl_" + tok.text)(tok)

    def decl_actor(self, kw):
        self.actors.extend(self._name_list(kw))

    def decl_component(self, kw):
        self.components.extend(self._name_list(kw))

    def _name_list(self, kw):
        s = self.stream
        names = [s.expect_ident(f"{kw.text} name").text]
        while s.accept(","):
            names.append(s.expect_ident(f"{kw.text} name").text)
        s.expect(";")
        return names

    def decl_channel(self, kw):
        sig = _read_signature(self.stream)
        self.stream.expect(";")
        self.channels.append(sig)

    def decl_interaction(self, kw):
        s = self.stream
        ident = s.expect_ident("interaction id")
        s.expect("=")
        caller = self._agent()
        s.expect("->")
        s.expect(":", "':' before callee component")
        callee = Agent(COMPONENT, s.expect_ident("component name").text)
        s.expect(".")
        channel = s.expect_ident("channel name").text
        s.expect(";")
        self.interactions.append(Interaction(ident.text, caller, channel, callee, ident.loc))

    def _agent(self):
        s = self.stream
        if s.accept(":"):
            return Agent(COMPONENT, s.expect_ident("component name").text)
        return Agent(ACTOR, s.expect_ident("actor or :component").text)

    def decl_itg(self, kw):
        s = self.stream
        name = s.expect_ident("ITG name")
        s.expect("{")
        raw = {"name": name.text, "loc": name.loc, "inits": [], "states": [], "transitions": []}
        while not s.at("}"):
            if s.at_kind("eof"):
                raise SbcSyntaxError(f"unterminated ITG {name.text!r}", s.peek().loc)
            try:
                self.itg_item(raw)
            except SbcSyntaxError as exc:
                self.error(exc)
                while not s.at_kind("eof") and not s.at("}"):
                    if s.next().text == ";":
                        break
        s.expect("}")
        self.itgs.append(raw)

    def itg_item(self, raw):
        s = self.stream
        if s.at("init") and s.peek().kind == "ident":
            tok = s.next()
            snippet = NIL
            if s.accept("["):
                snippet = NIL if s.at("]") else read_snippet(s)
                if s.accept("]->") is None:
                    s.expect("]")
                    s.expect("->")
            else:
                s.expect("->")
            state = self._state()
            s.expect(";")
            raw["inits"].append((snippet, state, tok.loc))
        elif s.at("states") and s.peek().kind == "ident" and not s.at("-[", offset=1):
            s.next()
            raw["states"].append(self._state())
            while s.accept(","):
                raw["states"].append(self._state())
            s.expect(";")
        else:
            src_tok = s.peek()
            src = self._state()
            if src is STOP:
                raise SbcSyntaxError("the inactive state has no outgoing transitions", src_tok.loc)
            s.expect("-[")
            prefix = self._prefix()
            s.expect("]->")
            dst = self._state()
            s.expect(";")
            raw["transitions"].append((src, prefix, dst, src_tok.loc))

    def _state(self):
        s = self.stream
        tok = s.peek()
        if tok.kind == "string":
            s.next()
            return tok.value
        if s.accept("STOP", "•"):
            return STOP
        return s.expect_ident("state name").text

    def _prefix(self) -> _RawPrefix:
        s = self.stream
        loc = s.peek().loc
        guard = TRUE
        # "a ?" with nothing after the '?' reads as interaction a
        if s.at_kind("ident") and s.at("?", offset=1) and s.at("/", "]->", ".", offset=2):
            ident = s.next()
            s.next()
        else:
            if at_comparison(s, offset=1) or s.at("nil"):
                guard = read_guard(s)
                s.expect("?", "'?' after guard")
            ident = s.expect_ident("interaction id")
        snippet = NIL
        if s.accept("/"):
            snippet = read_snippet(s)
        return _RawPrefix(guard, ident.text, snippet, ident.loc or loc)

    def decl_def(self, kw):
        s = self.stream
        name = s.expect_ident("constant name")
        s.expect("=")
        expr = self.state_expr()
        s.expect(";")
        self.defs.append((name.text, expr, name.loc))

    def state_expr(self):
        s = self.stream
        if s.accept("STOP", "•"):
            return INACTIVE
        if s.at("loop") and s.at_kind("ident", offset=1) and not s.at("?", "/", ".", offset=1):
            s.next()
            return Loop(s.expect_ident("ITG name").text)
        if s.at("ref") and s.at_kind("ident", offset=1) and not s.at("?", "/", ".", offset=1):
            s.next()
            return Ref(s.expect_ident("state constant").text)
        if s.accept("("):
            expr = self.state_expr()
            while s.at("alt", "par"):
                op = s.next().text
                rhs = self.state_expr()
                expr = Alt(expr, rhs) if op == "alt" else Par(expr, rhs)
            s.expect(")")
            return expr
        prefix = self._prefix()
        s.expect(".", "'.' after prefix")
        return _RawExpr(prefix, self.state_expr())

    # -- resolution -----------------------------------------------------------

    def build(self, file) -> Model:
        imap = {}
        for ia in self.interactions:
            imap.setdefault(ia.id, ia)

        def prefix(raw: _RawPrefix):
            ia = imap.get(raw.interaction)
            if ia is None:
                self.diagnostics.append(Diagnostic(
                    "unknown-interaction", f"interaction {raw.interaction!r} is not declared", raw.loc))
                ia = Interaction(raw.interaction, Agent(ACTOR, "?"), "?", Agent(COMPONENT, "?"))
            return Prefix(raw.guard, ia, raw.snippet)

        def expr(e):
            if isinstance(e, _RawExpr):
                return Prefixed(prefix(e.prefix), expr(e.then))
            if isinstance(e, Alt):
                return Alt(expr(e.left), expr(e.right))
            if isinstance(e, Par):
                return Par(expr(e.left), expr(e.right))
            return e

        itgs = []
        for raw in self.itgs:
            inits = raw["inits"]
            for extra in inits[1:]:
                self.diagnostics.append(Diagnostic(
                    "duplicate-initial", f"ITG {raw['name']!r} has more than one initial transition",
                    extra[2], f"itg {raw['name']}"))
            snippet, init_state = (inits[0][0], inits[0][1]) if inits else (NIL, None)
            if init_state is STOP:
                self.diagnostics.append(Diagnostic(
                    "syntax", "the initial transition must enter a named state", inits[0][2]))
                init_state = None
            transitions = [Transition(src, prefix(p), dst, loc) for src, p, dst, loc in raw["transitions"]]
            itgs.append(ITG.build(raw["name"], init_state, transitions, snippet, raw["states"], raw["loc"]))

        defs = [Definition(name, expr(e), loc) for name, e, loc in self.defs]
        return Model(tuple(self.actors), tuple(self.components), tuple(self.channels),
                     tuple(self.interactions), tuple(itgs), tuple(defs), source=file)


def _starts_line(stream):
    prev = stream.tokens[stream.pos - 1] if stream.pos else None
    return prev is None or prev.loc.line < stream.peek().loc.line


def parse_model(text: str, file: str | None = None) -> Model:
    """Parse ``.sbc`` source into a resolved, validated Model.

    Raises :class:`ModelError` carrying every syntax, reference and
    validation error found; warnings do not cause failure.
    """
    p = _Parser(text, file)
    p.parse()
    if p.diagnostics:
        # syntax errors: report them alone, resolution would only add noise
        raise ModelError(p.diagnostics)
    model = p.build(file)
    found = p.diagnostics + errors(validate_model(model))
    if found:
        raise ModelError(_dedupe(found))
    return model


def _dedupe(diags):
    # build-time diagnostics come first and carry the more precise location
    seen, out = set(), []
    for d in diags:
        key = (d.rule, d.message, d.loc and (d.loc.file, d.loc.line))
        if key not in seen:
            seen.add(key)
            out.append(d)
    return out


def load_model(path) -> Model:
    path = Path(path)
    return parse_model(path.read_text(encoding="utf-8"), str(path))


# -- printer ------------------------------------------------------------------

def format_state(state) -> str:
    if state is STOP:
        return "STOP"
    if is_identifier(state) and state not in _STATE_KEYWORDS:
        return state
    return quote_string(state)


def format_prefix(prefix: Prefix) -> str:
    parts = []
    if prefix.guard != TRUE:
        parts.append(f"{format_guard(prefix.guard)} ?")
    parts.append(prefix.interaction.id)
    if prefix.snippet:
        parts.append(f"/ {format_snippet(prefix.snippet)}")
    return " ".join(parts)


def format_expr(expr) -> str:
    if isinstance(expr, Inactive):
        return "STOP"
    if isinstance(expr, Ref):
        return f"ref {expr.name}"
    if isinstance(expr, Loop):
        return f"loop {expr.itg}"
    if isinstance(expr, Prefixed):
        return f"{format_prefix(expr.prefix)} . {format_expr(expr.then)}"
    if isinstance(expr, Alt):
        return f"({format_expr(expr.left)} alt {format_expr(expr.right)})"
    if isinstance(expr, Par):
        return f"({format_expr(expr.left)} par {format_expr(expr.right)})"
    raise TypeError(f"not a state expression: {expr!r}")


def format_itg(g: ITG) -> str:
    lines = [f"itg {g.name} {{"]
    if g.initial_state is not None:
        snip = f" [{format_snippet(g.initial_snippet)}]" if g.initial_snippet else ""
        lines.append(f"  init{snip} -> {format_state(g.initial_state)};")
    mentioned = {g.initial_state}
    for t in g.transitions:
        mentioned |= {t.source, t.target}
    loose = [s for s in g.states if s not in mentioned]
    if loose:
        lines.append(f"  states {', '.join(format_state(s) for s in loose)};")
    for t in g.transitions:
        lines.append(f"  {format_state(t.source)} -[ {format_prefix(t.prefix)} ]-> {format_state(t.target)};")
    lines.append("}")
    return "\n".join(lines)


def print_model(model: Model) -> str:
    """Canonical text: declarations grouped by kind, sorted by name."""
    sections = [
        [f"actor {a};" for a in model.actors],
        [f"component {c};" for c in model.components],
        [f"channel {c};" for c in model.channels],
        [f"interaction {i.id} = {i.caller} -> {i.callee} . {i.channel};" for i in model.interactions],
        [format_itg(g) + "\n" for g in model.itgs],
        [f"def {d.name} = {format_expr(d.expr)};" for d in model.definitions],
    ]
    body = "\n\n".join("\n".join(sec).rstrip("\n") for sec in sections if sec)
    return HEADER + ("\n" + body + "\n" if body else "")
