"""JSON and Graphviz DOT renderings of ITGs."""

from __future__ import annotations

import json

from .exprlang import TRUE, format_guard, format_snippet, parse_guard, parse_snippet
from .lexer import quote_string
from .model import ITG, STOP, Agent, Interaction, Prefix, Transition

STOP_JSON = "STOP"


def itg_to_dict(itg: ITG) -> dict:
    def opt_guard(g):
        return None if g == TRUE else format_guard(g)

    def opt_snippet(s):
        return format_snippet(s) if s else None

    return {
        "name": itg.name,
        "states": list(itg.states),
        "initial": {"snippet": opt_snippet(itg.initial_snippet), "state": itg.initial_state},
        "transitions": [
            {
                "src": t.source,
                "guard": opt_guard(t.prefix.guard),
                "interactionId": t.prefix.interaction.id,
                "caller": str(t.prefix.interaction.caller),
                "channel": t.prefix.interaction.channel,
                "callee": str(t.prefix.interaction.callee),
                "snippet": opt_snippet(t.prefix.snippet),
                "dst": STOP_JSON if t.target is STOP else t.target,
            }
            for t in itg.transitions
        ],
    }


def export_json(itg: ITG) -> str:
    """Byte-stable JSON: sorted keys, states and transitions in canonical order."""
    return json.dumps(itg_to_dict(itg), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def itg_from_dict(data: dict) -> ITG:
    transitions = []
    for t in data["transitions"]:
        ia = Interaction(t["interactionId"], Agent.parse(t["caller"]), t["channel"], Agent.parse(t["callee"]))
        prefix = Prefix(parse_guard(t.get("guard")), ia, parse_snippet(t.get("snippet")))
        dst = STOP if t["dst"] == STOP_JSON else t["dst"]
        transitions.append(Transition(t["src"], prefix, dst))
    init = data["initial"]
    return ITG(data.get("name", init["state"]), tuple(data["states"]), init["state"],
               tuple(transitions), parse_snippet(init.get("snippet")))


def import_json(text: str) -> ITG:
    return itg_from_dict(json.loads(text))


def _edge_label(prefix: Prefix) -> str:
    label = f"[{format_guard(prefix.guard)}] {prefix.interaction.id}"
    if prefix.snippet:
        label += f" / {format_snippet(prefix.snippet)}"
    return label


def export_dot(itg: ITG) -> str:
    """Directed graph: rounded boxes for states, a point for the inactive state,
    and an unlabeled entry marker feeding the initial transition."""
    ids = {s: f"n{i}" for i, s in enumerate(itg.states)}
    lines = [f"digraph {quote_string(itg.name)} {{",
             "  rankdir=LR;",
             '  node [shape=box, style=rounded, fontname="Helvetica"];',
             '  edge [fontname="Helvetica"];',
             '  __entry [shape=point, width=0.08, label=""];']
    for s in itg.states:
        lines.append(f"  {ids[s]} [label={quote_string(s)}];")
    if any(t.target is STOP for t in itg.transitions):
        lines.append('  __stop [shape=point, width=0.15, label=""];')
    if itg.initial_state is not None:
        init_label = format_snippet(itg.initial_snippet) if itg.initial_snippet else ""
        lines.append(f"  __entry -> {ids[itg.initial_state]} [label={quote_string(init_label)}];")
    for t in itg.transitions:
        dst = "__stop" if t.target is STOP else ids[t.target]
        lines.append(f"  {ids[t.source]} -> {dst} [label={quote_string(_edge_label(t.prefix))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
