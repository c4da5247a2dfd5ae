"""Transition rules: reference resolution, composition into ITGs, and
on-the-fly successor computation over composite states.

A runtime *node* is a state expression whose leaves are positions inside
ITGs (:class:`AtState`) or the inactive node.  Prefixed, Alt and Par nodes
reuse the expression classes from :mod:`sbcpa.model`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .exprlang import NIL, CodeSnippet, concat_snippets
from .lexer import SbcError
from .model import (
    INACTIVE, ITG, STOP, Alt, Inactive, Loop, Model, Par, Prefix, Prefixed, Ref,
    SbcReferenceError, StateExpr, Transition,
)


class CompositionError(SbcError):
    """A composition rule cannot be applied (e.g. a state name collision)."""


class DefinitionCycleError(SbcReferenceError):
    pass


# -- reference resolution ----------------------------------------------------

def resolve_refs(model: Model, name: str) -> StateExpr:
    """Inline every definition reachable from constant ``name``.

    References to ITGs survive as ``Ref(<itg name>)``; loops keep the ITG name.
    Cycles through definitions are rejected.
    """
    target = model.lookup(name)
    if isinstance(target, ITG):
        return Ref(target.name)
    return _resolve(model, target.expr, (name,))


def _resolve(model, expr, stack):
    if isinstance(expr, Inactive):
        return expr
    if isinstance(expr, Ref):
        target = model.lookup(expr.name)
        if isinstance(target, ITG):
            return Ref(target.name)
        if target.name in stack:
            cycle = " -> ".join(stack[stack.index(target.name):] + (target.name,))
            raise DefinitionCycleError(f"definition cycle: {cycle}")
        return _resolve(model, target.expr, stack + (target.name,))
    if isinstance(expr, Loop):
        return Loop(_loop_itg(model, expr.itg).name)
    if isinstance(expr, Prefixed):
        return Prefixed(expr.prefix, _resolve(model, expr.then, stack))
    if isinstance(expr, Alt):
        return Alt(_resolve(model, expr.left, stack), _resolve(model, expr.right, stack))
    if isinstance(expr, Par):
        return Par(_resolve(model, expr.left, stack), _resolve(model, expr.right, stack))
    raise TypeError(f"not a state expression: {expr!r}")


def _loop_itg(model, name) -> ITG:
    found = model.itgs_for_state(name)
    if len(found) != 1:
        raise SbcReferenceError(f"loop over unknown ITG {name!r}")
    return found[0]


# -- runtime nodes -------------------------------------------------------------

@dataclass(frozen=True)
class AtState:
    """Control sits at ``state`` of ``itg``."""

    itg: ITG
    state: str

    def __str__(self):
        return self.state


def at(itg: ITG, state) -> "Node":
    return INACTIVE if state is STOP else AtState(itg, state)


Node = object  # Inactive | AtState | Prefixed | Alt | Par over nodes


@dataclass(frozen=True)
class Process:
    """A start node together with the snippet on its initial transition."""

    node: Node
    initial_snippet: CodeSnippet = NIL


@dataclass(frozen=True)
class Config:
    node: Node
    env: Mapping = field(default_factory=dict)
    cursor: int = 0  # index of the next scenario step in scripted runs


def process_for_itg(itg: ITG) -> Process:
    if itg.initial_state is None:
        raise CompositionError(f"ITG {itg.name!r} has no initial transition")
    return Process(AtState(itg, itg.initial_state), itg.initial_snippet)


def start(model: Model, name: str) -> Process:
    """Initial node and merged initial snippet for constant ``name``."""
    return initial_process(model, resolve_refs(model, name))


def initial_process(model: Model, expr: StateExpr) -> Process:
    """Apply the snippet-rewriting part of the composition rules to ``expr``.

    Sequence folds the continuation's initial snippet into the prefix;
    alternative and parallel concatenate both operands' initial snippets.
    ``expr`` must already be resolved.
    """
    if isinstance(expr, Inactive):
        return Process(INACTIVE)
    if isinstance(expr, (Ref, Loop)):
        name = expr.name if isinstance(expr, Ref) else expr.itg
        return process_for_itg(model.itg(name))
    if isinstance(expr, Prefixed):
        then = initial_process(model, expr.then)
        prefix = expr.prefix.with_snippet(concat_snippets(expr.prefix.snippet, then.initial_snippet))
        return Process(Prefixed(prefix, then.node))
    if isinstance(expr, (Alt, Par)):
        left = initial_process(model, expr.left)
        right = initial_process(model, expr.right)
        return Process(type(expr)(left.node, right.node),
                       concat_snippets(left.initial_snippet, right.initial_snippet))
    raise TypeError(f"not a state expression: {expr!r}")


def successors(node: Node, model: Model | None = None) -> list[tuple[Prefix, Node]]:
    """One-step structural successors of ``node``; guards are not evaluated.

    ``model`` is accepted for symmetry with the other operations; nodes
    already carry their ITGs.
    """
    if isinstance(node, Inactive):
        return []
    if isinstance(node, AtState):
        return [(t.prefix, at(node.itg, t.target)) for t in node.itg.outgoing(node.state)]
    if isinstance(node, Prefixed):
        return [(node.prefix, node.then)]
    if isinstance(node, Alt):
        # the first step commits to one branch
        return successors(node.left) + successors(node.right)
    if isinstance(node, Par):
        out = [(p, Par(n, node.right)) for p, n in successors(node.left)]
        out += [(p, Par(node.left, n)) for p, n in successors(node.right)]
        return out
    raise TypeError(f"not a runtime node: {node!r}")


def is_inactive(node: Node) -> bool:
    """True when every leaf of ``node`` is the inactive state."""
    if isinstance(node, Inactive):
        return True
    if isinstance(node, (Par, Alt)):
        return is_inactive(node.left) and is_inactive(node.right)
    return False


def node_name(node: Node) -> str:
    if isinstance(node, Inactive):
        return "•"
    if isinstance(node, AtState):
        return node.state
    if isinstance(node, Prefixed):
        return f"{node.prefix} . {node_name(node.then)}"
    if isinstance(node, Par):
        return f"({node_name(node.left)} par {node_name(node.right)})"
    if isinstance(node, Alt):
        return f"({node_name(node.left)} alt {node_name(node.right)})"
    raise TypeError(f"not a runtime node: {node!r}")


# -- derivatives and loops ----------------------------------------------------

@dataclass(frozen=True)
class Derivative:
    trace: tuple[Prefix, ...]
    end: object  # state name or STOP


def derivatives(itg: ITG, from_state, max_depth: int) -> set[Derivative]:
    """All (trace, end) pairs for paths of length 1..max_depth from ``from_state``."""
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    out = set()
    if from_state is STOP:
        return out
    stack = [((), from_state)]
    while stack:
        trace, state = stack.pop()
        if len(trace) == max_depth or state is STOP:
            continue
        for t in itg.outgoing(state):
            step = (trace + (t.prefix,), t.target)
            out.add(Derivative(*step))
            stack.append(step)
    return out


def is_loop(itg: ITG) -> bool:
    """Whether the initial state lies on a directed cycle."""
    s0 = itg.initial_state
    if s0 is None:
        return False
    seen = set()
    todo = [t.target for t in itg.outgoing(s0)]
    while todo:
        s = todo.pop()
        if s == s0:
            return True
        if s is STOP or s in seen:
            continue
        seen.add(s)
        todo.extend(t.target for t in itg.outgoing(s))
    return False


def reachable_states(itg: ITG, start_state=None) -> set:
    start_state = itg.initial_state if start_state is None else start_state
    seen = {start_state}
    todo = [start_state]
    while todo:
        s = todo.pop()
        if s is STOP:
            continue
        for t in itg.outgoing(s):
            if t.target not in seen:
                seen.add(t.target)
                todo.append(t.target)
    return seen


# -- composition into ITGs ----------------------------------------------------

def _fresh(name, taken):
    k = 1
    while f"{name}#{k}" in taken:
        k += 1
    return f"{name}#{k}"


def make_disjoint(left: ITG, right: ITG) -> ITG:
    """Rename states of ``right`` that clash with ``left`` using a ``#k`` suffix."""
    taken = set(left.states) | set(right.states)
    mapping = {}
    for s in right.states:
        if s in left.states:
            new = _fresh(s, taken)
            taken.add(new)
            mapping[s] = new
    return right.renamed(mapping) if mapping else right


def compose_sequence(prefix: Prefix, target: ITG, new_state: str, name: str | None = None) -> ITG:
    """ITG for ``prefix . target``.

    The prefix takes over the target's initial snippet, and the target's
    initial transition is replaced by the new one entering ``new_state``.
    """
    if target.initial_state is None:
        raise CompositionError(f"ITG {target.name!r} has no initial state")
    if new_state in target.states:
        raise CompositionError(f"state {new_state!r} already exists in {target.name!r}")
    first = Transition(new_state, prefix.with_snippet(concat_snippets(prefix.snippet, target.initial_snippet)),
                       target.initial_state)
    return ITG(name or new_state, target.states + (new_state,), new_state,
               (first,) + target.transitions, NIL)


def compose_alternative(left: ITG, right: ITG, new_state: str, name: str | None = None) -> ITG:
    """ITG for ``left alt right``; the choice commits on the first transition.

    Initial states of the operands that are no longer reachable from
    ``new_state`` are dropped together with their transitions.
    """
    if left.initial_state is None or right.initial_state is None:
        raise CompositionError("both operands need an initial state")
    right = make_disjoint(left, right)
    if new_state in left.states or new_state in right.states:
        raise CompositionError(f"state {new_state!r} already exists")
    entry = [Transition(new_state, t.prefix, t.target)
             for g in (left, right) for t in g.outgoing(g.initial_state)]
    merged = ITG.build(name or new_state, new_state, entry + list(left.transitions) + list(right.transitions),
                       concat_snippets(left.initial_snippet, right.initial_snippet))
    return restrict_to_reachable(merged)


def restrict_to_reachable(itg: ITG) -> ITG:
    keep = reachable_states(itg)
    return ITG(itg.name, tuple(s for s in itg.states if s in keep), itg.initial_state,
               tuple(t for t in itg.transitions if t.source in keep), itg.initial_snippet, itg.loc)


def _component(state):
    if state is STOP:
        return "•"
    return f"({state})" if " par " in state else state


def pair_name(u, v) -> str:
    return f"{_component(u)} par {_component(v)}"


def compose_parallel_expand(left: ITG, right: ITG,
                            namer: Callable[[object, object], object] | None = None,
                            name: str | None = None) -> ITG:
    """Interleaving product of two ITGs over their reachable state pairs.

    ``namer(u, v)`` names the product state for components ``u`` and ``v``
    (either may be STOP); returning STOP makes that pair the inactive state.
    """
    if left.initial_state is None or right.initial_state is None:
        raise CompositionError("both operands need an initial state")
    right = make_disjoint(left, right)
    namer = namer or pair_name
    init = (left.initial_state, right.initial_state)
    seen = {init}
    todo = deque([init])
    transitions = []
    names = {}

    def nm(pair):
        if pair not in names:
            names[pair] = namer(*pair)
        return names[pair]

    while todo:
        pair = todo.popleft()
        u, v = pair
        moves = []
        if u is not STOP:
            moves += [(t.prefix, (t.target, v)) for t in left.outgoing(u)]
        if v is not STOP:
            moves += [(t.prefix, (u, t.target)) for t in right.outgoing(v)]
        for prefix, nxt in moves:
            transitions.append(Transition(nm(pair), prefix, nm(nxt)))
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    initial = nm(init)
    if initial is STOP:
        raise CompositionError("namer mapped the initial pair to the inactive state")
    states = tuple(n for n in (nm(p) for p in seen) if n is not STOP)
    if len(set(states)) != len(states):
        raise CompositionError("namer is not injective on reachable pairs")
    return ITG(name or initial, states, initial, tuple(transitions),
               concat_snippets(left.initial_snippet, right.initial_snippet))


def expand(model: Model, name: str) -> ITG:
    """Compose constant ``name`` into a single ITG by applying every rule."""
    target = model.lookup(name)
    if isinstance(target, ITG):
        return target
    expr = resolve_refs(model, name)
    return _Expander(model, target.name).run(expr, target.name)


class _Expander:
    def __init__(self, model, root):
        self.model = model
        self.root = root
        self.count = 0

    def fresh(self):
        self.count += 1
        return f"{self.root}#{self.count}"

    def run(self, expr, state_name):
        if isinstance(expr, (Ref, Loop)):
            return self.model.itg(expr.name if isinstance(expr, Ref) else expr.itg)
        if isinstance(expr, Inactive):
            return ITG(state_name, (state_name,), state_name)
        if isinstance(expr, Prefixed):
            if isinstance(expr.then, Inactive):
                return ITG.build(state_name, state_name, [Transition(state_name, expr.prefix, STOP)])
            inner = self.run(expr.then, self.fresh())
            if state_name in inner.states:
                state_name = _fresh(state_name, set(inner.states))
            return compose_sequence(expr.prefix, inner, state_name, self.root)
        if isinstance(expr, (Alt, Par)):
            # an inactive operand contributes no behaviour to either operator
            if isinstance(expr.left, Inactive):
                return self.run(expr.right, state_name)
            if isinstance(expr.right, Inactive):
                return self.run(expr.left, state_name)
            left = self.run(expr.left, self.fresh())
            right = self.run(expr.right, self.fresh())
            if isinstance(expr, Alt):
                taken = set(left.states) | set(make_disjoint(left, right).states)
                if state_name in taken:
                    state_name = _fresh(state_name, taken)
                return compose_alternative(left, right, state_name, self.root)
            init = (left.initial_state, make_disjoint(left, right).initial_state)

            def namer(u, v, _init=init, _name=state_name):
                return _name if (u, v) == _init else pair_name(u, v)
            return compose_parallel_expand(left, right, namer, self.root)
        raise TypeError(f"not a state expression: {expr!r}")


__all__ = [
    "AtState", "CompositionError", "Config", "DefinitionCycleError", "Derivative", "Process",
    "compose_alternative", "compose_parallel_expand", "compose_sequence", "derivatives", "expand",
    "initial_process", "is_inactive", "is_loop", "make_disjoint", "node_name", "pair_name",
    "process_for_itg", "reachable_states", "resolve_refs", "restrict_to_reachable", "start",
    "successors",
]
