"""Shared fixtures: the bundled models and the small counter graphs built by hand.

The hand-built ITGs do not go through the parser, so tests comparing them to
parsed models check the DSL independently.
"""

import sys

import pytest

from sbcpa import load_bundled
from sbcpa.exprlang import parse_guard, parse_snippet
from sbcpa.model import ITG, STOP, Agent, Interaction, Prefix, Transition

USER = Agent.actor("User")
COUNTER = Agent.component("Counter")
LOGGER = Agent.component("Logger")

IA = {
    "a41": Interaction("a41", USER, "inc", COUNTER),
    "a42": Interaction("a42", USER, "reset", COUNTER),
    "a43": Interaction("a43", COUNTER, "log", LOGGER),
    "a51": Interaction("a51", USER, "dec", COUNTER),
    "a52": Interaction("a52", COUNTER, "log", LOGGER),
    "a53": Interaction("a53", USER, "finish", COUNTER),
    "a55": Interaction("a55", USER, "reset", COUNTER),
    "a61": Interaction("a61", USER, "finish", COUNTER),
}


def P(guard, ia, snippet=None):
    return Prefix(parse_guard(guard), IA[ia], parse_snippet(snippet))


def T(src, prefix, dst):
    return Transition(src, prefix, STOP if dst == "•" else dst)


R41 = P(None, "a41")
R42 = P(None, "a42", "A = A + 100;")
R43 = P("A > 200", "a43")
R51 = P("c_count > 0", "a51", "c_count = c_count - 1;")
R52 = P(None, "a52")
R53 = P("c_count <= 0", "a53")
R55 = P(None, "a55", "credit = 3000;")
R61 = P(None, "a61")


def itg41():
    return ITG.build("ITG_41", "s41", [T("s41", R41, "s42"), T("s41", R42, "•"), T("s42", R43, "•")],
                     parse_snippet("A = 500;"))


def itg51():
    return ITG.build("ITG_51", "s51", [T("s51", R51, "s52"), T("s52", R52, "s51"), T("s51", R53, "•")],
                     parse_snippet("c_count = 100;"))


def itg61():
    return ITG.build("ITG_61", "s61", [T("s61", R61, "•")])


# Hand-written expected results of the three composition rules.  Copied
# states keep their original names (s52, never s54) and use a51/a52.
def expected_itg55():
    return ITG.build("s55", "s55", [
        T("s55", P(None, "a55", "credit = 3000; c_count = 100;"), "s51"),
        T("s51", R51, "s52"),
        T("s52", R52, "s51"),
        T("s51", R53, "•"),
    ])


def expected_itg71():
    return ITG.build("s71", "s71", [
        T("s71", R51, "s52"), T("s71", R53, "•"), T("s71", R61, "•"),
        T("s52", R52, "s51"), T("s51", R51, "s52"), T("s51", R53, "•"),
    ], parse_snippet("c_count = 100;"))


def expected_itg81():
    return ITG.build("s81", "s81", [
        T("s81", R51, "s52 par s61"),
        T("s81", R53, "• par s61"),
        T("s81", R61, "s51 par •"),
        T("s52 par s61", R52, "s81"),
        T("s52 par s61", R61, "s52 par •"),
        T("• par s61", R61, "• par •"),
        T("s52 par •", R52, "s51 par •"),
        T("s51 par •", R53, "• par •"),
        T("s51 par •", R51, "s52 par •"),
    ], parse_snippet("c_count = 100;"))


@pytest.fixture(scope="session")
def counter():
    return load_bundled("counter.sbc")


@pytest.fixture(scope="session")
def atm():
    return load_bundled("atm.sbc")


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
