"""Structure-behavior coalescence process algebra: models, composition rules,
bisimulation and simulation of interaction transition graphs."""

from importlib import resources

from .dsl import load_model, parse_channel_signature, parse_model, print_model
from .equivalence import bisimilar
from .exprlang import (
    concat_snippets, eval_guard, exec_snippet, parse_guard, parse_snippet,
)
from .export import export_dot, export_json, import_json
from .lexer import SbcError, SbcSyntaxError
from .model import (
    INACTIVE, ITG, STOP, Agent, Alt, ChannelSignature, Definition, Interaction, Loop, Model, Par,
    Parameter, Prefix, Prefixed, Ref, Transition, make_prefix,
)
from .semantics import (
    compose_alternative, compose_parallel_expand, compose_sequence, derivatives, expand, is_loop,
    resolve_refs, start, successors,
)
from .sim import load_scenario, parse_scenario, simulate, step_interactive
from .validate import Diagnostic, ModelError, validate_model

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "Alt",
    "ChannelSignature",
    "Definition",
    "Diagnostic",
    "INACTIVE",
    "ITG",
    "Interaction",
    "Loop",
    "Model",
    "ModelError",
    "Par",
    "Parameter",
    "Prefix",
    "Prefixed",
    "Ref",
    "STOP",
    "SbcError",
    "SbcSyntaxError",
    "Transition",
    "bisimilar",
    "bundled_path",
    "compose_alternative",
    "compose_parallel_expand",
    "compose_sequence",
    "concat_snippets",
    "derivatives",
    "eval_guard",
    "exec_snippet",
    "expand",
    "export_dot",
    "export_json",
    "import_json",
    "is_loop",
    "load_bundled",
    "load_model",
    "load_scenario",
    "make_prefix",
    "parse_channel_signature",
    "parse_guard",
    "parse_model",
    "parse_scenario",
    "parse_snippet",
    "print_model",
    "resolve_refs",
    "simulate",
    "start",
    "step_interactive",
    "successors",
    "validate_model",
]


def bundled_path(name: str):
    """Path of a bundled example file such as ``"atm.sbc"``."""
    return resources.files(__name__).joinpath("models", name)


def load_bundled(name: str):
    """Load a bundled ``.sbc`` model or ``.scn`` scenario by file name."""
    text = bundled_path(name).read_text(encoding="utf-8")
    if name.endswith(".scn"):
        return parse_scenario(text, name)
    return parse_model(text, name)
