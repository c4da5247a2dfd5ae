"""
Checking behavioural equivalence
================================

A definition can be run directly, stepping its operands on the fly, or
expanded into one graph first. Strong bisimulation confirms both forms
behave the same.
"""

from sbcpa import bisimilar, expand, load_bundled, start
from sbcpa.exprlang import parse_guard
from sbcpa.model import ITG, Prefix, Transition

model = load_bundled("counter.sbc")

expanded = expand(model, "s81")       # one graph, 6 states
on_the_fly = start(model, "s91")      # (ref s51 par ref s61), never expanded
print("expanded vs on-the-fly:", bisimilar(expanded, on_the_fly))

# Change one guard and the check fails with a distinguishing trace.
t = expanded.transitions[0]
mutated = Transition(t.source, Prefix(parse_guard("c_count > 1"), t.prefix.interaction, t.prefix.snippet),
                     t.target)
mutant = ITG(expanded.name, expanded.states, expanded.initial_state,
             (mutated,) + expanded.transitions[1:], expanded.initial_snippet)
same, witness = bisimilar(mutant, on_the_fly)
print("after mutating", t.source, "->", same)
print("witness:", witness)

# Different graphs: the witness starts with the first step that cannot be matched.
print(bisimilar(model.itg("ITG_51"), model.itg("ITG_61")))
