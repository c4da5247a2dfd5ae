"""Executing state expressions: guards, snippets, parameter passing, scenarios."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .exprlang import (
    EvalError, coerce_value, default_value, eval_guard, exec_snippet, format_env, format_guard,
    format_snippet, format_value, read_operand, Lit,
)
from .lexer import SbcError, SbcSyntaxError, TokenStream, tokenize
from .model import ACTOR, ITG, Model, Prefix
from .semantics import Config, Process, node_name, process_for_itg, start, successors

INACTIVE_STATUS = "inactive"
DEADLOCK = "deadlock"
STEP_LIMIT = "step-limit"
COMPLETE = "complete"


class SimulationError(SbcError):
    pass


class ScenarioError(SbcError):
    pass


# -- scenarios -----------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    actor: str
    channel: str
    bindings: tuple[tuple[str, object], ...] = ()


@dataclass(frozen=True)
class Scenario:
    """Actor requests to replay in order, plus canned out-values per (component, channel)."""

    steps: tuple[Step, ...] = ()
    stubs: Mapping = field(default_factory=dict)

    def stub(self, component, channel) -> dict:
        return dict(self.stubs.get((component, channel), ()))


def parse_scenario(text: str, file: str | None = None) -> Scenario:
    """Parse the line-oriented scenario format::

        step Customer withdrawCash amount=100
        stub Bank retrieveBalance balance=500
    """
    steps, stubs = [], {}
    for lineno, line in enumerate(text.splitlines(), 1):
        try:
            stream = TokenStream(tokenize(line, file))
            if stream.at_kind("eof"):
                continue
            kw = stream.expect_ident("'step' or 'stub'")
            if kw.text not in ("step", "stub"):
                raise SbcSyntaxError(f"expected 'step' or 'stub', found {kw.text!r}", kw.loc)
            agent = stream.expect_ident("agent name").text
            channel = stream.expect_ident("channel name").text
            bindings = []
            while not stream.at_kind("eof"):
                name = stream.expect_ident("parameter name").text
                stream.expect("=")
                tok = stream.peek()
                value = read_operand(stream)
                if not isinstance(value, Lit):
                    raise SbcSyntaxError(f"expected a literal value for {name!r}", tok.loc)
                bindings.append((name, value.value))
        except SbcSyntaxError as exc:
            raise ScenarioError(f"{file or '<scenario>'}:{lineno}: {exc.message}") from None
        if kw.text == "step":
            steps.append(Step(agent, channel, tuple(bindings)))
        else:
            stubs.setdefault((agent, channel), {}).update(bindings)
    return Scenario(tuple(steps), {k: tuple(v.items()) for k, v in stubs.items()})


def load_scenario(path) -> Scenario:
    path = Path(path)
    return parse_scenario(path.read_text(encoding="utf-8"), str(path))


def check_scenario(scenario: Scenario, model: Model) -> list[str]:
    """Problems with ``scenario`` against the declared channels; empty when consistent."""
    problems = []

    def check(bindings, channel_name, want, what):
        ch = model.channel_map.get(channel_name)
        if ch is None:
            problems.append(f"{what}: unknown channel {channel_name!r}")
            return
        for name, value in bindings:
            p = ch.param(name)
            if p is None:
                problems.append(f"{what}: {channel_name} has no parameter {name!r}")
            elif not getattr(p, want):
                problems.append(f"{what}: parameter {name!r} of {channel_name} is {p.direction}")
            else:
                try:
                    coerce_value(value, p.type)
                except EvalError as exc:
                    problems.append(f"{what}: {name}: {exc}")

    for k, step in enumerate(scenario.steps, 1):
        if step.actor not in model.actors:
            problems.append(f"step {k}: unknown actor {step.actor!r}")
        check(step.bindings, step.channel, "is_input", f"step {k}")
    for (comp, channel), bindings in scenario.stubs.items():
        if comp not in model.components:
            problems.append(f"stub {comp}.{channel}: unknown component {comp!r}")
        check(bindings, channel, "is_output", f"stub {comp}.{channel}")
    return problems


# -- firing --------------------------------------------------------------------

@dataclass(frozen=True)
class Candidate:
    prefix: Prefix
    target: object  # runtime node
    inputs: tuple[tuple[str, object], ...]
    scripted: bool = False  # consumes the next scenario step


@dataclass(frozen=True)
class TraceStep:
    index: int
    before: object
    prefix: Prefix
    bindings: tuple[tuple[str, object], ...]
    env: Mapping
    choice: int = 0
    options: int = 1

    def format(self) -> str:
        ia = self.prefix.interaction
        args = ", ".join(f"{k}={format_value(v)}" for k, v in self.bindings)
        return (f"{self.index} {ia.caller} -> {ia.callee} . {ia.channel}({args}) "
                f"[{format_guard(self.prefix.guard)}] {{{format_snippet(self.prefix.snippet)}}} "
                f"| env: {format_env(self.env)}")


@dataclass(frozen=True)
class Trace:
    initial_env: Mapping
    steps: tuple[TraceStep, ...]
    status: str
    final: Config
    initial_snippet: object = None

    def format(self) -> str:
        lines = [f"0 init {{{format_snippet(self.initial_snippet)}}} | env: {format_env(self.initial_env)}".rstrip()]
        lines += [s.format() for s in self.steps]
        lines.append(f"status: {self.status} after {len(self.steps)} steps at {node_name(self.final.node)}")
        return "\n".join(lines) + "\n"

    @property
    def labels(self):
        return [s.prefix.label for s in self.steps]


def _channel(model, prefix):
    try:
        return model.channel_map[prefix.interaction.channel]
    except KeyError:
        raise SimulationError(f"interaction {prefix.interaction.id!r} uses undeclared channel "
                              f"{prefix.interaction.channel!r}") from None


def _next_step(config, scenario):
    if scenario is None or config.cursor >= len(scenario.steps):
        return None
    return scenario.steps[config.cursor]


def enabled(config: Config, model: Model, scenario: Scenario | None = None,
            lenient: bool = False) -> list[Candidate]:
    """Successors of ``config.node`` that can fire now.

    A guard is evaluated against the environment extended with the
    candidate's in-parameters.  Candidates come back sorted by label.  With a scenario, an actor-initiated
    interaction is ready only when it matches the next scripted step;
    component-initiated ones are always ready.
    """
    out = []
    step = _next_step(config, scenario)
    for prefix, target in successors(config.node, model):
        ia = prefix.interaction
        channel = _channel(model, prefix)
        given = {}
        scripted = False
        if scenario is not None and ia.caller.kind == ACTOR:
            if step is None or step.actor != ia.caller.name or step.channel != ia.channel:
                continue
            given = dict(step.bindings)
            scripted = True
        inputs = []
        for p in channel.params:
            if not p.is_input:
                continue
            if p.name in given:
                value = given[p.name]
            elif p.name in config.env:
                value = config.env[p.name]
            elif lenient:
                value = default_value(p.type)
            else:
                continue  # left unbound; fire() reports it
            inputs.append((p.name, _coerce(value, p, ia)))
        env = {**config.env, **dict(inputs)}
        try:
            ok = eval_guard(prefix.guard, env)
        except EvalError as exc:
            raise SimulationError(f"guard [{format_guard(prefix.guard)}] of {ia.id} at "
                                  f"{node_name(config.node)}: {exc}") from None
        if ok:
            out.append(Candidate(prefix, target, tuple(inputs), scripted))
    # canonical order, so seeded choices do not depend on how the node is represented
    out.sort(key=lambda c: c.prefix.label)
    return out


def _coerce(value, param, ia):
    try:
        return coerce_value(value, param.type)
    except EvalError as exc:
        raise SimulationError(f"{ia.id}: parameter {param.name}: {exc}") from None


def fire(config: Config, candidate: Candidate, model: Model, scenario: Scenario | None = None,
         lenient: bool = False) -> tuple[Config, TraceStep]:
    """Bind parameters, run the snippet and advance; returns the new config and its trace step.

    Out-values come from the scenario stub for (callee, channel), then from
    the environment; without either, strict mode fails and lenient mode uses
    the type's default.
    """
    prefix = candidate.prefix
    ia = prefix.interaction
    channel = _channel(model, prefix)
    bindings = dict(candidate.inputs)
    for p in channel.params:
        if p.is_input and p.name not in bindings:
            raise SimulationError(f"{ia.id}: no value for in-parameter {p.name!r} of {channel.name}")
    stub = scenario.stub(ia.callee.name, channel.name) if scenario is not None else {}
    for p in channel.params:
        if not p.is_output:
            continue
        if p.name in stub:
            value = stub[p.name]
        elif p.direction == "inout":
            value = bindings[p.name]
        elif p.name in config.env:
            value = config.env[p.name]
        elif lenient:
            value = default_value(p.type)
        else:
            raise SimulationError(f"{ia.id}: no stub value for out-parameter {p.name!r} "
                                  f"of {ia.callee.name}.{channel.name}")
        bindings[p.name] = _coerce(value, p, ia)
    env = {**config.env, **bindings}
    try:
        env = exec_snippet(prefix.snippet, env)
    except EvalError as exc:
        raise SimulationError(f"snippet {{{format_snippet(prefix.snippet)}}} of {ia.id}: {exc}") from None
    ordered = tuple((p.name, bindings[p.name]) for p in channel.params if p.name in bindings)
    cursor = config.cursor + (1 if candidate.scripted else 0)
    new = Config(candidate.target, env, cursor)
    return new, TraceStep(0, config.node, prefix, ordered, env)


def step_interactive(config: Config, chosen_index: int, model: Model, scenario: Scenario | None = None,
                     lenient: bool = False) -> Config:
    cands = enabled(config, model, scenario, lenient)
    if not cands:
        raise SimulationError("no enabled transitions")
    if not 0 <= chosen_index < len(cands):
        raise SimulationError(f"choice {chosen_index} out of range 0..{len(cands) - 1}")
    return fire(config, cands[chosen_index], model, scenario, lenient)[0]


def initial_config(process: Process) -> Config:
    try:
        env = exec_snippet(process.initial_snippet, {})
    except EvalError as exc:
        raise SimulationError(f"initial snippet: {exc}") from None
    return Config(process.node, env, 0)


def run(process: Process, model: Model, scenario: Scenario | None = None, seed: int = 0,
        max_steps: int = 1000, lenient: bool = False) -> Trace:
    """Fire uniformly random (seeded) enabled candidates until none remain or ``max_steps``."""
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    rng = random.Random(seed)
    config = initial_config(process)
    initial_env = config.env
    steps = []
    status = STEP_LIMIT
    while len(steps) < max_steps:
        cands = enabled(config, model, scenario, lenient)
        if not cands:
            if not successors(config.node):
                status = INACTIVE_STATUS
            elif scenario is not None and config.cursor >= len(scenario.steps) and scenario.steps:
                status = COMPLETE
            else:
                status = DEADLOCK
            break
        choice = rng.randrange(len(cands))
        config, step = fire(config, cands[choice], model, scenario, lenient)
        steps.append(TraceStep(len(steps) + 1, step.before, step.prefix, step.bindings, step.env,
                               choice, len(cands)))
    return Trace(initial_env, tuple(steps), status, config, process.initial_snippet)


def simulate(model: Model, name, scenario: Scenario | None = None, seed: int = 0,
             max_steps: int = 1000, lenient: bool = False) -> Trace:
    """Run constant ``name`` (a definition or ITG), or an :class:`ITG` object directly."""
    process = process_for_itg(name) if isinstance(name, ITG) else start(model, name)
    return run(process, model, scenario, seed, max_steps, lenient)


def replay(process: Process, model: Model, choices, scenario: Scenario | None = None,
           lenient: bool = False) -> Config:
    config = initial_config(process)
    for c in choices:
        config = step_interactive(config, c, model, scenario, lenient)
    return config
