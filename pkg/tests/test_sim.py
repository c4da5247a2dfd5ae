from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from conftest import R41, R42, itg51
from sbcpa import load_bundled
from sbcpa.model import INACTIVE
from sbcpa.semantics import AtState, Config, Par, expand, process_for_itg, start
from sbcpa.sim import (
    COMPLETE, DEADLOCK, INACTIVE_STATUS, STEP_LIMIT, Scenario, ScenarioError, SimulationError, Step,
    check_scenario, enabled, fire, initial_config, parse_scenario, replay, run, simulate,
    step_interactive,
)


@pytest.fixture(scope="module")
def withdrawal():
    return load_bundled("withdrawal.scn")


@pytest.fixture(scope="module")
def overdraw():
    return load_bundled("overdraw.scn")


def atm_config(atm, state, env):
    g = atm.itg("ITG_101")
    return Config(AtState(g, state), env)


def leftmost(node):
    while isinstance(node, Par):
        node = node.left
    return node


# -- enabled / fire ---------------------------------------------------------------

def test_enabled_at_s41(counter):
    g = counter.itg("ITG_41")
    cands = enabled(Config(AtState(g, "s41"), {"A": 500}), counter)
    assert {c.prefix.interaction.id for c in cands} == {"a41", "a42"}


def test_guard_blocks_at_s42(counter):
    g = counter.itg("ITG_41")
    assert enabled(Config(AtState(g, "s42"), {"A": 100}), counter) == []


def test_string_guard_blocks_withdraw(atm):
    cands = enabled(atm_config(atm, "s103", {"cardValid": "no", "amount": 100.0}), atm)
    assert cands == []
    cands = enabled(atm_config(atm, "s103", {"cardValid": "yes", "amount": 100.0}), atm)
    assert [c.prefix.interaction.channel for c in cands] == ["withdrawCash"]


def test_unbound_guard_variable_is_reported(counter):
    g = counter.itg("ITG_41")
    with pytest.raises(SimulationError, match="A"):
        enabled(Config(AtState(g, "s42"), {}), counter)


def test_fire_a42(counter):
    g = counter.itg("ITG_41")
    config = Config(AtState(g, "s41"), {"A": 500})
    (cand,) = [c for c in enabled(config, counter) if c.prefix.interaction.id == "a42"]
    new, step = fire(config, cand, counter)
    assert new.node is INACTIVE
    assert new.env == {"A": 600}
    assert step.env == {"A": 600}


def test_fire_validate_pin_with_stub(atm, withdrawal):
    config = atm_config(atm, "s102", {"cardId": "c1", "PIN": "1234"})
    (cand,) = enabled(config, atm, withdrawal)
    new, step = fire(config, cand, atm, withdrawal)
    assert new.env["cardValid"] == "yes" and new.env["accountId"] == "a1"
    assert dict(step.bindings) == {"cardId": "c1", "PIN": "1234", "cardValid": "yes", "accountId": "a1"}


def test_fire_nil_snippet_keeps_env(counter):
    g = counter.itg("ITG_41")
    config = Config(AtState(g, "s41"), {"A": 500})
    (cand,) = [c for c in enabled(config, counter) if c.prefix.interaction.id == "a41"]
    assert fire(config, cand, counter)[0].env == {"A": 500}


def test_strict_missing_stub(atm):
    config = atm_config(atm, "s102", {"cardId": "c1", "PIN": "1234"})
    (cand,) = enabled(config, atm)
    with pytest.raises(SimulationError, match="cardValid"):
        fire(config, cand, atm)


def test_lenient_uses_defaults(atm):
    config = atm_config(atm, "s102", {"cardId": "c1", "PIN": "1234"})
    (cand,) = enabled(config, atm, lenient=True)
    new, _ = fire(config, cand, atm, lenient=True)
    assert new.env["cardValid"] == "" and new.env["accountId"] == ""


def test_missing_input_is_error(atm):
    config = atm_config(atm, "s101", {})
    (cand,) = enabled(config, atm)
    with pytest.raises(SimulationError, match="cardId"):
        fire(config, cand, atm)


def test_inout_reads_back():
    from sbcpa import parse_model
    m = parse_model("""
        actor U; component C; channel bump(inout n: Integer);
        interaction a = U -> :C . bump;
        itg X { init [n = 1;] -> s; s -[ a / n = n + 1; ]-> STOP; }
    """)
    trace = simulate(m, "X")
    assert trace.steps[0].bindings == (("n", 1),)
    assert trace.final.env == {"n": 2}


# -- whole runs ---------------------------------------------------------------------

@pytest.mark.parametrize("seed", [0, 1, 2, 17])
def test_itg51_counts_down(counter, seed):
    trace = simulate(counter, "ITG_51", seed=seed)
    ids = Counter(s.prefix.interaction.id for s in trace.steps)
    assert len(trace.steps) == 201
    assert ids == {"a51": 100, "a52": 100, "a53": 1}
    assert trace.steps[-1].prefix.interaction.id == "a53"
    assert trace.final.env == {"c_count": 0}
    assert trace.status == INACTIVE_STATUS


def test_itg41_outcomes_and_fairness(counter):
    process = start(counter, "ITG_41")
    first = Counter()
    finals = set()
    for seed in range(10_000):
        trace = run(process, counter, seed=seed)
        first[trace.steps[0].prefix.interaction.id] += 1
        path = tuple(s.prefix.interaction.id for s in trace.steps)
        finals.add((path, tuple(sorted(trace.final.env.items()))))
    assert finals == {(("a42",), (("A", 600),)), (("a41", "a43"), (("A", 500),))}
    for ia in ("a41", "a42"):
        assert 0.45 <= first[ia] / 10_000 <= 0.55


def test_atm_withdrawal(atm, withdrawal):
    trace = simulate(atm, "s_ATM", withdrawal, seed=42, max_steps=50)
    assert [s.prefix.interaction.id for s in trace.steps] == ["a101", "a102", "a103", "a104", "a105"]
    assert leftmost(trace.final.node).state == "s101"
    assert trace.status == COMPLETE
    assert trace.final.env["cash"] == 100.0


def test_atm_overdraw_deadlocks(atm, overdraw):
    trace = simulate(atm, "s_ATM", overdraw, seed=42, max_steps=50)
    assert [s.prefix.interaction.id for s in trace.steps] == ["a101", "a102", "a103", "a104"]
    assert leftmost(trace.final.node).state == "s105"
    assert trace.status == DEADLOCK
    assert enabled(trace.final, atm, overdraw) == []


def test_unscripted_atm_hits_step_limit(atm):
    # operator interactions loop forever without a script
    trace = simulate(atm, "ITG_201", seed=3, max_steps=5, lenient=True)
    assert trace.status == STEP_LIMIT and len(trace.steps) == 5


def test_max_steps_must_be_positive(counter):
    with pytest.raises(ValueError):
        simulate(counter, "ITG_41", max_steps=0)


def test_simulate_accepts_itg(counter):
    assert simulate(counter, itg51()).final.env == {"c_count": 0}


def test_trace_format(counter):
    text = simulate(counter, "ITG_41", seed=0).format()
    lines = text.splitlines()
    assert lines[0] == "0 init {A = 500;} | env: A=500"
    assert lines[-1].startswith("status: inactive after ")
    assert any(line.startswith("1 User -> :Counter . ") for line in lines)


def test_trace_line_shape(atm, withdrawal):
    trace = simulate(atm, "s_ATM", withdrawal)
    line = trace.steps[2].format()
    assert line.startswith('3 Customer -> :ATM . withdrawCash(amount=100.0) [cardValid == "yes"] {nil} | env: ')
    assert 'accountId="a1"' in line


# -- step mode -------------------------------------------------------------------

def test_step_interactive(counter):
    config = initial_config(start(counter, "ITG_41"))
    cands = enabled(config, counter)
    assert len(cands) == 2
    nxt = step_interactive(config, 0, counter)
    assert nxt == fire(config, cands[0], counter)[0]


def test_step_interactive_at_inactive(counter):
    with pytest.raises(SimulationError, match="no enabled transitions"):
        step_interactive(Config(INACTIVE, {}), 0, counter)


def test_step_interactive_out_of_range(counter):
    config = initial_config(start(counter, "ITG_41"))
    with pytest.raises(SimulationError, match="out of range"):
        step_interactive(config, 2, counter)


@pytest.mark.parametrize("seed", range(5))
def test_replay_reproduces_trace(atm, withdrawal, counter, seed):
    for model, name, scn in ((counter, "s81", None), (counter, "ITG_41", None), (atm, "s_ATM", withdrawal)):
        trace = simulate(model, name, scn, seed=seed, max_steps=30)
        final = replay(start(model, name), model, [s.choice for s in trace.steps], scn)
        assert final == trace.final


# -- properties -----------------------------------------------------------------------

@pytest.mark.parametrize("seed", range(5))
def test_deterministic(atm, withdrawal, counter, seed):
    a = simulate(counter, "s81", seed=seed, max_steps=40).format()
    b = simulate(counter, "s81", seed=seed, max_steps=40).format()
    assert a == b
    assert simulate(atm, "s_ATM", withdrawal, seed).format() == simulate(atm, "s_ATM", withdrawal, seed).format()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_env_chains_and_conserves(seed):
    model = load_bundled("counter.sbc")
    trace = simulate(model, "s81", seed=seed, max_steps=60)
    before = trace.initial_env
    for step in trace.steps:
        written = step.prefix.snippet.writes() | {k for k, _ in step.bindings}
        for var, value in before.items():
            if var not in written:
                assert step.env[var] == value
        before = step.env
    assert before == trace.final.env


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_expanded_and_direct_traces_agree(seed):
    model = load_bundled("counter.sbc")
    expanded = run(process_for_itg(expand(model, "s81")), model, seed=seed, max_steps=300)
    direct = run(start(model, "s91"), model, seed=seed, max_steps=300)
    assert expanded.labels == direct.labels
    assert expanded.status == direct.status
    assert expanded.final.env == direct.final.env


# -- scenarios -----------------------------------------------------------------------

def test_parse_scenario():
    scn = parse_scenario('''
        // comment
        step Customer withdrawCash amount=100
        stub Bank retrieveBalance balance=500.5
        stub Bank validatePIN cardValid="yes" accountId="a1"
    ''')
    assert scn.steps == (Step("Customer", "withdrawCash", (("amount", 100),)),)
    assert scn.stub("Bank", "validatePIN") == {"cardValid": "yes", "accountId": "a1"}
    assert scn.stub("Bank", "retrieveBalance") == {"balance": 500.5}
    assert scn.stub("ATM", "nothing") == {}


@pytest.mark.parametrize("text", [
    "wait Customer go",
    "step Customer",
    "step Customer go amount",
    "step Customer go amount=x",
    "stub Bank go a=1 b",
])
def test_bad_scenario_lines(text):
    with pytest.raises(ScenarioError, match=":1:"):
        parse_scenario(text)


def test_check_scenario(atm, withdrawal, overdraw):
    assert check_scenario(withdrawal, atm) == []
    assert check_scenario(overdraw, atm) == []
    bad = Scenario(
        (Step("Nobody", "withdrawCash", (("amount", 1),)),
         Step("Customer", "withdrawCash", (("cash", 1),)),
         Step("Customer", "validatePIN", (("cardValid", "x"),)),
         Step("Customer", "withdrawCash", (("amount", "lots"),))),
        {("Bank", "retrieveBalance"): (("accountId", "a"),), ("Vault", "nope"): ()},
    )
    problems = check_scenario(bad, atm)
    assert len(problems) == 7, problems


def test_scenario_gates_actor_steps(atm):
    scn = Scenario((Step("Operator", "refillCash", (("cash", 10),)),), {})
    trace = simulate(atm, "s_ATM", scn)
    assert [s.prefix.interaction.id for s in trace.steps] == ["a201"]
    assert trace.status == COMPLETE


def test_initial_snippets_run_first(counter):
    trace = simulate(counter, "s55", max_steps=1)
    assert trace.initial_env == {}
    assert trace.steps[0].env == {"credit": 3000, "c_count": 100}


def test_prefix_labels_in_order(counter):
    g = counter.itg("ITG_41")
    cands = enabled(Config(AtState(g, "s41"), {"A": 1}), counter)
    assert [c.prefix.label for c in cands] == sorted([R41.label, R42.label])
