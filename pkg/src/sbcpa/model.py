"""Domain types: channels, agents, interactions, prefixes, state expressions, ITGs.

Every type here is a frozen dataclass.  Collections are stored as tuples
sorted into a canonical order on construction, so two values built from the
same declarations in a different order compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Union

from .exprlang import NIL, TRUE, CodeSnippet, Comparison, Guard, TrueGuard, format_guard, format_snippet
from .lexer import Loc, SbcError

DIRECTIONS = ("in", "out", "inout")
VALUE_TYPES = ("Real", "Integer", "String", "Boolean")

ACTOR = "actor"
COMPONENT = "component"


class SbcReferenceError(SbcError):
    """A name does not resolve to a declaration."""


class _Inactive:
    """The inactive state; drawn as a bullet, spelled ``STOP`` in source."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "•"

    __str__ = __repr__

    def __reduce__(self):
        return (_Inactive, ())


STOP = _Inactive()

State = Union[str, _Inactive]


def state_key(state) -> tuple:
    """Sort key placing STOP after every named state."""
    return (1, "") if state is STOP else (0, state)


# -- structure --------------------------------------------------------------

@dataclass(frozen=True)
class Parameter:
    direction: str
    name: str
    type: str

    def __str__(self):
        return f"{self.direction} {self.name}: {self.type}"

    @property
    def is_input(self):
        return self.direction in ("in", "inout")

    @property
    def is_output(self):
        return self.direction in ("out", "inout")


@dataclass(frozen=True)
class ChannelSignature:
    name: str
    params: tuple[Parameter, ...] = ()
    loc: Optional[Loc] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))

    def __str__(self):
        return f"{self.name}({'; '.join(str(p) for p in self.params)})"

    def param(self, name) -> Parameter | None:
        for p in self.params:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class Agent:
    kind: str
    name: str

    def __str__(self):
        return self.name if self.kind == ACTOR else f":{self.name}"

    @classmethod
    def actor(cls, name):
        return cls(ACTOR, name)

    @classmethod
    def component(cls, name):
        return cls(COMPONENT, name)

    @classmethod
    def parse(cls, text: str) -> "Agent":
        """``":ATM"`` is a component, a bare name is an actor."""
        if text.startswith(":"):
            return cls(COMPONENT, text[1:])
        return cls(ACTOR, text)


@dataclass(frozen=True)
class Interaction:
    """A handshake from ``caller`` to the component ``callee`` over ``channel``."""

    id: str
    caller: Agent
    channel: str
    callee: Agent
    loc: Optional[Loc] = field(default=None, compare=False, repr=False)

    @property
    def type(self) -> int:
        # actor callers are type 1, component callers type 2
        return 1 if self.caller.kind == ACTOR else 2

    def __str__(self):
        return f"{self.caller} -> {self.callee} . {self.channel}"


# -- behaviour --------------------------------------------------------------

@dataclass(frozen=True)
class Prefix:
    guard: Guard
    interaction: Interaction
    snippet: CodeSnippet = NIL

    def __post_init__(self):
        if self.guard is None:
            object.__setattr__(self, "guard", TRUE)
        if self.snippet is None:
            object.__setattr__(self, "snippet", NIL)

    @property
    def label(self) -> tuple[str, str, str]:
        return (format_guard(self.guard), self.interaction.id, format_snippet(self.snippet))

    def __str__(self):
        return f"({format_guard(self.guard)}, {self.interaction.id}, {format_snippet(self.snippet)})"

    def with_snippet(self, snippet) -> "Prefix":
        return Prefix(self.guard, self.interaction, snippet)


def make_prefix(guard, interaction, snippet=None, model: "Model | None" = None) -> Prefix:
    """Build a prefix, normalizing a missing guard to TRUE and a missing snippet to nil.

    ``interaction`` may be an :class:`Interaction` or an id to look up in ``model``.
    """
    if isinstance(interaction, str):
        if model is None or interaction not in model.interaction_map:
            raise SbcReferenceError(f"unknown interaction {interaction!r}")
        interaction = model.interaction_map[interaction]
    elif model is not None and model.interaction_map.get(interaction.id) != interaction:
        raise SbcReferenceError(f"interaction {interaction.id!r} is not declared in the model")
    if isinstance(guard, str):
        from .exprlang import parse_guard
        guard = parse_guard(guard)
    if isinstance(snippet, str):
        from .exprlang import parse_snippet
        snippet = parse_snippet(snippet)
    return Prefix(guard or TRUE, interaction, snippet or NIL)


# -- state expressions ------------------------------------------------------

@dataclass(frozen=True)
class Inactive:
    def __str__(self):
        return "STOP"


INACTIVE = Inactive()


@dataclass(frozen=True)
class Prefixed:
    prefix: Prefix
    then: "StateExpr"


@dataclass(frozen=True)
class Alt:
    left: "StateExpr"
    right: "StateExpr"


@dataclass(frozen=True)
class Par:
    left: "StateExpr"
    right: "StateExpr"


@dataclass(frozen=True)
class Loop:
    itg: str


@dataclass(frozen=True)
class Ref:
    name: str


StateExpr = Union[Inactive, Prefixed, Alt, Par, Loop, Ref]


@dataclass(frozen=True)
class Definition:
    name: str
    expr: StateExpr
    loc: Optional[Loc] = field(default=None, compare=False, repr=False)


# -- interaction transition graphs ------------------------------------------

@dataclass(frozen=True)
class Transition:
    source: str
    prefix: Prefix
    target: State
    loc: Optional[Loc] = field(default=None, compare=False, repr=False)

    def sort_key(self):
        return (state_key(self.source), self.prefix.interaction.id, state_key(self.target), self.prefix.label,
                str(self.prefix.interaction))

    def __str__(self):
        return f"({self.source}, {self.prefix}, {self.target})"


@dataclass(frozen=True)
class ITG:
    """Interaction transition graph.

    ``states`` holds the named states only; the inactive state STOP may appear
    as a transition target but is never a member.  ``initial_state`` is the
    target of the single source-less initial transition, which carries
    ``initial_snippet``.
    """

    name: str
    states: tuple[str, ...]
    initial_state: Optional[str]
    transitions: tuple[Transition, ...] = ()
    initial_snippet: CodeSnippet = NIL
    loc: Optional[Loc] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(sorted(set(self.states), key=state_key)))
        unique = {t.sort_key(): t for t in self.transitions}
        object.__setattr__(self, "transitions", tuple(unique[k] for k in sorted(unique)))
        if self.initial_snippet is None:
            object.__setattr__(self, "initial_snippet", NIL)

    @classmethod
    def build(cls, name, initial_state, transitions: Iterable[Transition], initial_snippet=NIL,
              states: Iterable[str] = (), loc=None) -> "ITG":
        """Construct an ITG whose state set is inferred from its transitions."""
        transitions = tuple(transitions)
        names = set(states)
        if initial_state is not None:
            names.add(initial_state)
        for t in transitions:
            names.add(t.source)
            if t.target is not STOP:
                names.add(t.target)
        return cls(name, tuple(names), initial_state, transitions, initial_snippet, loc)

    def outgoing(self, state) -> tuple[Transition, ...]:
        return self._out.get(state, ())

    @cached_property
    def _out(self):
        out = {}
        for t in self.transitions:
            out.setdefault(t.source, []).append(t)
        return {k: tuple(v) for k, v in out.items()}

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash((self.name, self.states, self.initial_state, self.transitions, self.initial_snippet))

    def renamed(self, mapping, name=None) -> "ITG":
        """Copy with states renamed through ``mapping`` (missing keys unchanged)."""
        def m(s):
            return s if s is STOP else mapping.get(s, s)
        return ITG(
            name or self.name,
            tuple(m(s) for s in self.states),
            m(self.initial_state) if self.initial_state is not None else None,
            tuple(Transition(m(t.source), t.prefix, m(t.target), t.loc) for t in self.transitions),
            self.initial_snippet,
            self.loc,
        )


# -- whole model -------------------------------------------------------------

def _by_name(items, attr="name"):
    return tuple(sorted(items, key=lambda x: getattr(x, attr)))


@dataclass(frozen=True)
class Model:
    actors: tuple[str, ...] = ()
    components: tuple[str, ...] = ()
    channels: tuple[ChannelSignature, ...] = ()
    interactions: tuple[Interaction, ...] = ()
    itgs: tuple[ITG, ...] = ()
    definitions: tuple[Definition, ...] = ()
    source: Optional[str] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "actors", tuple(sorted(self.actors)))
        object.__setattr__(self, "components", tuple(sorted(self.components)))
        object.__setattr__(self, "channels", _by_name(self.channels))
        object.__setattr__(self, "interactions", _by_name(self.interactions, "id"))
        object.__setattr__(self, "itgs", _by_name(self.itgs))
        object.__setattr__(self, "definitions", _by_name(self.definitions))

    @cached_property
    def channel_map(self) -> dict[str, ChannelSignature]:
        return {c.name: c for c in self.channels}

    @cached_property
    def interaction_map(self) -> dict[str, Interaction]:
        return {i.id: i for i in self.interactions}

    @cached_property
    def itg_map(self) -> dict[str, ITG]:
        return {g.name: g for g in self.itgs}

    @cached_property
    def definition_map(self) -> dict[str, Definition]:
        return {d.name: d for d in self.definitions}

    def itg(self, name) -> ITG:
        try:
            return self.itg_map[name]
        except KeyError:
            raise SbcReferenceError(f"unknown ITG {name!r}") from None

    def itgs_for_state(self, name) -> list[ITG]:
        """ITGs represented by ``name``: named so, or having it as initial state."""
        if name in self.itg_map:
            return [self.itg_map[name]]
        return [g for g in self.itgs if g.initial_state == name]

    def lookup(self, name) -> Definition | ITG:
        """Resolve the target of ``ref name``: a definition first, then an ITG."""
        if name in self.definition_map:
            return self.definition_map[name]
        found = self.itgs_for_state(name)
        if len(found) == 1:
            return found[0]
        if not found:
            raise SbcReferenceError(f"undefined state constant {name!r}")
        raise SbcReferenceError(f"state constant {name!r} is ambiguous between "
                                + ", ".join(g.name for g in found))


__all__ = [
    "ACTOR", "COMPONENT", "DIRECTIONS", "VALUE_TYPES", "STOP", "INACTIVE",
    "Agent", "Alt", "ChannelSignature", "CodeSnippet", "Comparison", "Definition", "Guard",
    "Inactive", "Interaction", "ITG", "Loop", "Model", "Par", "Parameter", "Prefix", "Prefixed",
    "Ref", "SbcReferenceError", "StateExpr", "Transition", "TrueGuard", "make_prefix", "state_key",
]
