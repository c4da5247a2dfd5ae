"""
Running models
==============

Simulation evaluates guards, runs code snippets and binds channel
parameters. Choices among enabled transitions are uniform and seeded.
"""

from collections import Counter

from sbcpa import load_bundled, simulate

counter = load_bundled("counter.sbc")

# ITG_51 counts c_count down from 100. Its guards leave one enabled
# transition at every step, so every seed gives the same 201 firings.
trace = simulate(counter, "ITG_51", seed=7)
print(Counter(s.prefix.interaction.id for s in trace.steps), trace.final.env, trace.status)

# ITG_41 has a real choice at s41. Over many seeds both branches show up
# about equally often.
first = Counter(simulate(counter, "ITG_41", seed=k).steps[0].prefix.interaction.id for k in range(2000))
print(first)

# The ATM is an open system. A scenario scripts the customer's requests
# and stubs the bank's answers.
atm = load_bundled("atm.sbc")
ok = simulate(atm, "s_ATM", load_bundled("withdrawal.scn"), seed=42)
print(ok.format())

# With a balance of 50 the dispense guard `balance > amount` stays false.
short = simulate(atm, "s_ATM", load_bundled("overdraw.scn"), seed=42)
print(short.format())
