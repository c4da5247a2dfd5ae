"""
Composing interaction transition graphs
=======================================

Sequence, alternative and parallel composition turn a state expression
into a single graph. The counter model ships with the package.
"""

from sbcpa import expand, load_bundled, print_model
from sbcpa.dsl import format_itg

model = load_bundled("counter.sbc")
print(print_model(model))

# `a55 / credit = 3000; . ref s51` prefixes ITG_51 with one transition.
# The prefix absorbs the initial snippet of ITG_51, so the composed graph
# starts with an empty initialization.
s55 = expand(model, "s55")
print(format_itg(s55))

# Alternative: the new initial state offers the first steps of both
# operands and commits to one of them. s61 is unreachable afterwards and
# is dropped.
s71 = expand(model, "s71")
print(format_itg(s71))

# Parallel: interleaving over reachable state pairs, inactive pairs
# included. 3 x 2 states, 3*2 + 3*1 transitions.
s81 = expand(model, "s81")
print(format_itg(s81))
print(len(s81.states), "states,", len(s81.transitions), "transitions")
