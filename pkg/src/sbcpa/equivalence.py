"""Strong bisimulation between two processes (expanded ITGs or composite nodes)."""

from __future__ import annotations

from dataclasses import dataclass

from .exprlang import format_snippet
from .lexer import SbcError
from .model import ITG
from .semantics import Process, process_for_itg, successors

DEFAULT_MAX_STATES = 100_000

Label = tuple  # (guard text, interaction id, snippet text)


class StateSpaceLimit(SbcError):
    pass


@dataclass(frozen=True)
class Witness:
    """Labels along which ``side`` can move where the other process cannot follow.

    An empty trace means the initial snippets already differ.
    """

    trace: tuple[Label, ...]
    side: str
    reason: str

    def __str__(self):
        steps = " ; ".join(f"({g}, {i}, {s})" for g, i, s in self.trace) or "<initial>"
        return f"{self.reason} [{self.side}]: {steps}"


@dataclass
class LTS:
    states: list
    moves: list[list[tuple[Label, int]]]

    def index(self):
        return {s: i for i, s in enumerate(self.states)}


def explore(*roots, max_states=DEFAULT_MAX_STATES) -> tuple[LTS, list[int]]:
    """Reachable labelled graph from ``roots``; returns the graph and root indices.

    Each root is a ``(tag, node)`` pair; successors inherit the tag so that
    identical nodes reached from different roots remain distinct states.
    """
    index = {}
    states, moves = [], []
    todo = []

    def add(state):
        if state not in index:
            if len(states) >= max_states:
                raise StateSpaceLimit(f"state space exceeds {max_states} states")
            index[state] = len(states)
            states.append(state)
            moves.append(None)
            todo.append(state)
        return index[state]

    root_ids = [add(r) for r in roots]
    while todo:
        tag, node = state = todo.pop()
        moves[index[state]] = [(p.label, add((tag, n))) for p, n in successors(node)]
    return LTS(states, moves), root_ids


def _as_process(x) -> Process:
    return process_for_itg(x) if isinstance(x, ITG) else x


def refine(lts: LTS) -> list[list[int]]:
    """Partition refinement; returns the block assignment after every round.

    Round 0 puts every state in one block; the last entry is the coarsest
    strong bisimulation.
    """
    n = len(lts.states)
    history = [[0] * n]
    while True:
        prev = history[-1]
        sigs = {}
        current = []
        for i in range(n):
            sig = (prev[i], frozenset((a, prev[j]) for a, j in lts.moves[i]))
            current.append(sigs.setdefault(sig, len(sigs)))
        if len(sigs) == len(set(prev)):
            return history
        history.append(current)


def bisimilar(left, right, max_states=DEFAULT_MAX_STATES) -> tuple[bool, Witness | None]:
    """Decide strong bisimilarity of two processes or ITGs.

    Labels are the normalized (guard, interaction id, snippet) triples.  The
    initial snippets must agree as well.  On failure a :class:`Witness` is
    returned.
    """
    left, right = _as_process(left), _as_process(right)
    # tag the two sides so shared sub-nodes stay distinct states
    lts, (p, q) = explore(("L", left.node), ("R", right.node), max_states=max_states)
    history = refine(lts)
    final = history[-1]
    if final[p] != final[q]:
        # a behavioural difference makes a more useful witness than the snippets
        return False, _witness(lts, history, p, q)
    if format_snippet(left.initial_snippet) != format_snippet(right.initial_snippet):
        return False, Witness((), "left", "initial snippets differ: "
                              f"{format_snippet(left.initial_snippet)!r} vs "
                              f"{format_snippet(right.initial_snippet)!r}")
    return True, None


def _moves_by_label(lts, i, label):
    return [j for a, j in lts.moves[i] if a == label]


def _witness(lts, history, p, q):
    # p always descends from the left root, q from the right one
    def level(a, b):
        return next(k for k, blocks in enumerate(history) if blocks[a] != blocks[b])

    trace = []
    while True:
        prev = history[level(p, q) - 1]
        for mover, (x, y) in (("left", (p, q)), ("right", (q, p))):
            step = next(((a, x2, ys) for a, x2 in lts.moves[x]
                         for ys in [_moves_by_label(lts, y, a)]
                         if all(prev[y2] != prev[x2] for y2 in ys)), None)
            if step:
                break
        a, x2, ys = step
        trace.append(a)
        if not ys:
            return Witness(tuple(trace), mover, "unmatched step")
        p, q = (x2, ys[0]) if mover == "left" else (ys[0], x2)
