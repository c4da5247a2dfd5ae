"""Structural checks over a :class:`~sbcpa.model.Model`."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .exprlang import guard_reads
from .lexer import Loc, SbcError, is_identifier
from .model import (
    ACTOR, COMPONENT, DIRECTIONS, ITG, STOP, VALUE_TYPES, Alt, Loop, Model, Par, Prefixed,
    Ref, SbcReferenceError,
)
from .semantics import DefinitionCycleError, is_loop, resolve_refs

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    rule: str
    message: str
    loc: Optional[Loc] = None
    where: str = ""
    severity: str = ERROR

    def __str__(self):
        place = str(self.loc) if self.loc else (self.where or "<model>")
        return f"{place}: {self.severity}[{self.rule}]: {self.message}"


class ModelError(SbcError):
    """Raised when a model fails to parse or resolve; carries every diagnostic."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))

    @property
    def syntax_only(self):
        return all(d.rule == "syntax" for d in self.diagnostics)


def errors(diagnostics):
    return [d for d in diagnostics if d.severity == ERROR]


def validate_model(model: Model) -> list[Diagnostic]:
    """Every invariant violation in ``model``; empty when the model is sound.

    Warnings (severity ``"warning"``) flag suspicious but legal constructs,
    such as ``loop`` over an ITG whose initial state is on no cycle.
    """
    out: list[Diagnostic] = []

    def diag(rule, message, loc=None, where="", severity=ERROR):
        out.append(Diagnostic(rule, message, loc, where, severity))

    _check_names(model, diag)

    actors, components = set(model.actors), set(model.components)
    for name in sorted(actors & components):
        diag("agent-overlap", f"{name!r} is declared both as actor and component", where=f"agent {name}")

    for ch in model.channels:
        seen = set()
        for p in ch.params:
            if p.direction not in DIRECTIONS:
                diag("bad-parameter", f"unknown direction {p.direction!r} in {ch.name}", ch.loc)
            if p.type not in VALUE_TYPES:
                diag("bad-parameter", f"unknown type {p.type!r} in {ch.name}", ch.loc)
            if p.name in seen:
                diag("duplicate-parameter", f"parameter {p.name!r} repeated in {ch.name}", ch.loc)
            seen.add(p.name)

    for ia in model.interactions:
        where = f"interaction {ia.id}"
        if ia.channel not in model.channel_map:
            diag("dangling-channel", f"interaction {ia.id!r} uses undeclared channel {ia.channel!r}", ia.loc, where)
        declared = actors if ia.caller.kind == ACTOR else components
        if ia.caller.name not in declared:
            diag("undeclared-agent", f"caller {ia.caller} of {ia.id!r} is not a declared {ia.caller.kind}",
                 ia.loc, where)
        if ia.callee.kind != COMPONENT:
            diag("callee-not-component", f"callee {ia.callee} of {ia.id!r} must be a component", ia.loc, where)
        elif ia.callee.name not in components:
            diag("undeclared-agent", f"callee {ia.callee} of {ia.id!r} is not a declared component",
                 ia.loc, where)

    for g in model.itgs:
        _check_itg(model, g, diag)

    for d in model.definitions:
        _check_definition(model, d, diag)

    _check_variables(model, diag)
    return out


def _check_names(model, diag):
    spaces = [
        ("actor", [(a, None) for a in model.actors]),
        ("component", [(c, None) for c in model.components]),
        ("channel", [(c.name, c.loc) for c in model.channels]),
        ("interaction", [(i.id, i.loc) for i in model.interactions]),
        # ITGs and definitions share the namespace that ``ref`` looks up
        ("state constant", [(g.name, g.loc) for g in model.itgs] + [(d.name, d.loc) for d in model.definitions]),
    ]
    for kind, entries in spaces:
        seen = set()
        for name, loc in entries:
            if not is_identifier(name):
                diag("bad-name", f"{kind} name {name!r} is not an identifier", loc)
            if name in seen:
                diag("duplicate-name", f"duplicate {kind} {name!r}", loc, f"{kind} {name}")
            seen.add(name)


def _check_itg(model, g: ITG, diag):
    where = f"itg {g.name}"
    if g.initial_state is None:
        diag("missing-initial", f"ITG {g.name!r} has no initial transition", g.loc, where)
    elif g.initial_state not in g.states:
        diag("undeclared-state", f"initial state {g.initial_state!r} is not a state of {g.name!r}", g.loc, where)
    for s in g.states:
        if s is STOP or s in ("STOP", "•"):
            diag("reserved-state-name", f"{s!r} is reserved for the inactive state", g.loc, where)
    declared = set(g.states)
    for t in g.transitions:
        if t.source not in declared:
            diag("undeclared-state", f"transition source {t.source!r} is not a state of {g.name!r}",
                 t.loc or g.loc, where)
        if t.target is not STOP and t.target not in declared:
            diag("undeclared-state", f"transition target {t.target!r} is not a state of {g.name!r}",
                 t.loc or g.loc, where)
        ia = model.interaction_map.get(t.prefix.interaction.id)
        if ia is None:
            diag("unknown-interaction", f"interaction {t.prefix.interaction.id!r} is not declared",
                 t.loc or g.loc, where)
        elif ia != t.prefix.interaction:
            diag("unknown-interaction", f"interaction {ia.id!r} differs from its declaration",
                 t.loc or g.loc, where)


def _expr_refs(expr):
    if isinstance(expr, (Ref, Loop)):
        yield expr
    elif isinstance(expr, Prefixed):
        yield from _expr_refs(expr.then)
    elif isinstance(expr, (Alt, Par)):
        yield from _expr_refs(expr.left)
        yield from _expr_refs(expr.right)


def _expr_prefixes(expr):
    if isinstance(expr, Prefixed):
        yield expr.prefix
        yield from _expr_prefixes(expr.then)
    elif isinstance(expr, (Alt, Par)):
        yield from _expr_prefixes(expr.left)
        yield from _expr_prefixes(expr.right)


def _check_definition(model, d, diag):
    where = f"def {d.name}"
    ok = True
    for r in _expr_refs(d.expr):
        name = r.name if isinstance(r, Ref) else r.itg
        if isinstance(r, Loop):
            found = model.itgs_for_state(name)
            if len(found) != 1:
                diag("unresolved-ref", f"loop over unknown ITG {name!r}", d.loc, where)
                ok = False
            elif not is_loop(found[0]):
                diag("loop-not-loop", f"ITG {found[0].name!r} is not a loop definition", d.loc, where, WARNING)
            continue
        try:
            model.lookup(name)
        except SbcReferenceError as exc:
            diag("unresolved-ref", str(exc), d.loc, where)
            ok = False
    for p in _expr_prefixes(d.expr):
        if model.interaction_map.get(p.interaction.id) != p.interaction:
            diag("unknown-interaction", f"interaction {p.interaction.id!r} is not declared", d.loc, where)
    if ok:
        try:
            resolve_refs(model, d.name)
        except DefinitionCycleError as exc:
            diag("definition-cycle", str(exc), d.loc, where)
        except SbcReferenceError:
            pass  # reported against the definition that owns the bad reference


def bindable_variables(model: Model) -> set[str]:
    """Variables some snippet assigns or some used channel binds as a parameter."""
    names = set()
    for g in model.itgs:
        names |= g.initial_snippet.writes()
        for t in g.transitions:
            names |= t.prefix.snippet.writes()
    for d in model.definitions:
        for p in _expr_prefixes(d.expr):
            names |= p.snippet.writes()
    used = {ia.channel for ia in model.interactions}
    for ch in model.channels:
        if ch.name in used:
            names |= {p.name for p in ch.params}
    return names


def _check_variables(model, diag):
    bindable = bindable_variables(model)

    def check(reads, loc, where, what):
        for var in sorted(reads - bindable):
            diag("unbound-variable", f"{what} reads {var!r}, which nothing ever binds", loc, where)

    for g in model.itgs:
        where = f"itg {g.name}"
        check(g.initial_snippet.reads(), g.loc, where, "initial snippet")
        for t in g.transitions:
            check(guard_reads(t.prefix.guard), t.loc or g.loc, where, f"guard of {t.prefix.interaction.id}")
            check(t.prefix.snippet.reads(), t.loc or g.loc, where, f"snippet of {t.prefix.interaction.id}")
    for d in model.definitions:
        for p in _expr_prefixes(d.expr):
            check(guard_reads(p.guard) | p.snippet.reads(), d.loc, f"def {d.name}", f"prefix {p.interaction.id}")
