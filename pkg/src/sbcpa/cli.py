"""Command-line interface: ``sbcpa check|expand|equiv|simulate|step|export``.

Exit status is 0 on success, 1 when a model fails validation, two processes
are not bisimilar or a simulation errors out, and 2 on usage or syntax errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from . import dsl, export
from .exprlang import format_env
from .equivalence import StateSpaceLimit, bisimilar
from .lexer import SbcError
from .model import ITG, SbcReferenceError
from .semantics import expand, node_name, process_for_itg, start
from .sim import (
    ScenarioError, SimulationError, check_scenario, enabled, fire, initial_config, load_scenario, run,
)
from .validate import ERROR, ModelError, validate_model

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Fail(Exception):
    def __init__(self, code, lines):
        self.code = code
        self.lines = lines


def _use_color(stream):
    flag = os.environ.get("SBC_COLOR")
    if flag is not None:
        return flag == "1"
    return hasattr(stream, "isatty") and stream.isatty()


def _emit_diag(text, severity, err):
    if _use_color(err):
        color = "\033[31m" if severity == ERROR else "\033[33m"
        text = f"{color}{text}\033[0m"
    print(text, file=err)


def _load(path):
    try:
        return dsl.load_model(path)
    except OSError as exc:
        raise _Fail(EXIT_USAGE, [f"{path}: {exc.strerror or exc}"]) from None
    except ModelError as exc:
        code = EXIT_USAGE if exc.syntax_only else EXIT_FAIL
        raise _Fail(code, [str(d) for d in exc.diagnostics]) from None


def _plural(n, word):
    return f"{n} {word}{'' if n == 1 else 's'}"


def cmd_check(args, out, err):
    model = _load(args.file)
    warnings = validate_model(model)
    for d in warnings:
        _emit_diag(str(d), d.severity, err)
    summary = f"{len(model.itgs)} ITGs, {_plural(len(model.definitions), 'definition')}, OK"
    if warnings:
        summary += f" ({_plural(len(warnings), 'warning')})"
    print(summary, file=out)
    return EXIT_OK


def _itg_for(model, name) -> ITG:
    try:
        return expand(model, name)
    except SbcReferenceError as exc:
        raise _Fail(EXIT_FAIL, [str(exc)]) from None


def _render(itg, fmt):
    if fmt == "json":
        return export.export_json(itg)
    if fmt == "dot":
        return export.export_dot(itg)
    header = f"// {_plural(len(itg.states), 'state')}, {_plural(len(itg.transitions), 'transition')}\n"
    return header + dsl.format_itg(itg) + "\n"


def _write(text, args, out):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


def cmd_expand(args, out, err):
    model = _load(args.file)
    _write(_render(_itg_for(model, args.def_), args.format or "sbc"), args, out)
    return EXIT_OK


def cmd_export(args, out, err):
    model = _load(args.file)
    _write(_render(_itg_for(model, args.def_), args.format or "json"), args, out)
    return EXIT_OK


def _operand(model, selector):
    if selector.startswith("expand:"):
        return process_for_itg(_itg_for(model, selector[len("expand:"):]))
    try:
        return start(model, selector)
    except SbcReferenceError as exc:
        raise _Fail(EXIT_FAIL, [str(exc)]) from None


def cmd_equiv(args, out, err):
    model = _load(args.file)
    left, right = _operand(model, args.left), _operand(model, args.right)
    try:
        same, witness = bisimilar(left, right)
    except StateSpaceLimit as exc:
        raise _Fail(EXIT_FAIL, [str(exc)]) from None
    if same:
        print("bisimilar", file=out)
        return EXIT_OK
    print("not bisimilar", file=out)
    print(f"witness: {witness}", file=out)
    return EXIT_FAIL


def _scenario(args, model):
    if not args.scenario:
        return None
    try:
        scenario = load_scenario(args.scenario)
    except OSError as exc:
        raise _Fail(EXIT_USAGE, [f"{args.scenario}: {exc.strerror or exc}"]) from None
    except ScenarioError as exc:
        raise _Fail(EXIT_USAGE, [str(exc)]) from None
    problems = check_scenario(scenario, model)
    if problems:
        raise _Fail(EXIT_FAIL, [f"{args.scenario}: {p}" for p in problems])
    return scenario


def _parse_seeds(text):
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            raise ValueError
        return range(int(lo), int(hi) + 1)
    except ValueError:
        raise _Fail(EXIT_USAGE, [f"--seeds expects N..M, got {text!r}"]) from None


def _process(model, name):
    try:
        return start(model, name)
    except SbcReferenceError as exc:
        raise _Fail(EXIT_FAIL, [str(exc)]) from None


def cmd_simulate(args, out, err):
    model = _load(args.file)
    scenario = _scenario(args, model)
    process = _process(model, args.def_)
    if args.max_steps < 1:
        raise _Fail(EXIT_USAGE, ["--max-steps must be at least 1"])

    def one(seed):
        return run(process, model, scenario, seed, args.max_steps, args.lenient_stubs)

    try:
        if args.seeds:
            seeds = _parse_seeds(args.seeds)
            with ThreadPoolExecutor() as pool:
                traces = list(pool.map(one, seeds))
            for seed, trace in zip(seeds, traces):
                print(f"seed {seed}: {trace.status} after {len(trace.steps)} steps "
                      f"| env: {format_env(trace.final.env)}".rstrip(), file=out)
        else:
            out.write(one(args.seed).format())
    except SimulationError as exc:
        raise _Fail(EXIT_FAIL, [f"simulation error: {exc}"]) from None
    return EXIT_OK


def cmd_step(args, out, err):
    model = _load(args.file)
    scenario = _scenario(args, model)
    try:
        config = initial_config(_process(model, args.def_))
        k = 0
        while True:
            cands = enabled(config, model, scenario, args.lenient_stubs)
            print(f"at {node_name(config.node)}", file=out)
            if not cands:
                print("no enabled transitions", file=out)
                return EXIT_OK
            for i, c in enumerate(cands):
                print(f"  [{i}] {c.prefix}", file=out)
            out.write("> ")
            out.flush()
            line = sys.stdin.readline()
            if not line or line.strip() in ("q", "quit"):
                print(file=out)
                return EXIT_OK
            try:
                choice = int(line)
            except ValueError:
                print(f"not a number: {line.strip()!r}", file=out)
                continue
            if not 0 <= choice < len(cands):
                print(f"choice out of range 0..{len(cands) - 1}", file=out)
                continue
            k += 1
            config, step = fire(config, cands[choice], model, scenario, args.lenient_stubs)
            print(replace(step, index=k).format(), file=out)
    except SimulationError as exc:
        raise _Fail(EXIT_FAIL, [f"simulation error: {exc}"]) from None


def build_parser():
    parser = argparse.ArgumentParser(prog="sbcpa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and validate a model")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    for name, func, fmt_help in (("expand", cmd_expand, "default: .sbc itg text"),
                                 ("export", cmd_export, "default: json")):
        p = sub.add_parser(name, help=f"{name} a definition or ITG into a single ITG")
        p.add_argument("file")
        p.add_argument("--def", dest="def_", required=True, metavar="NAME")
        p.add_argument("--format", choices=("dot", "json"), help=fmt_help)
        p.add_argument("--out", metavar="PATH")
        p.set_defaults(func=func)

    p = sub.add_parser("equiv", help="check strong bisimilarity of two operands")
    p.add_argument("file")
    p.add_argument("--left", required=True, metavar="[expand:]NAME")
    p.add_argument("--right", required=True, metavar="[expand:]NAME")
    p.set_defaults(func=cmd_equiv)

    for name, func in (("simulate", cmd_simulate), ("step", cmd_step)):
        p = sub.add_parser(name, help=f"{name} a definition")
        p.add_argument("file")
        p.add_argument("--def", dest="def_", required=True, metavar="NAME")
        p.add_argument("--scenario", metavar="FILE")
        p.add_argument("--lenient-stubs", action="store_true")
        if name == "simulate":
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--seeds", metavar="N..M")
            p.add_argument("--max-steps", type=int, default=1000)
        p.set_defaults(func=func)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args, out, err)
    except _Fail as fail:
        for line in fail.lines:
            _emit_diag(line, ERROR, err)
        return fail.code
    except SbcError as exc:
        _emit_diag(str(exc), ERROR, err)
        return EXIT_FAIL
