"""
Writing and validating a model
==============================

Models are plain text. The parser reports every problem it can find,
each with a file position.
"""

from sbcpa import ModelError, parse_model, print_model, simulate

SOURCE = """
actor Student;
component Registrar;

channel getPastDueBalance(in studentId: String; out PastDueBalance: Real);
channel enroll(in studentId: String);

interaction r1 = Student -> :Registrar . getPastDueBalance;
interaction r2 = Student -> :Registrar . enroll;

itg ITG_Reg {
  init [studentId = "s1";] -> ask;
  ask -[ r1 ]-> decide;
  decide -[ PastDueBalance <= 0 ? r2 ]-> STOP;
}
"""

model = parse_model(SOURCE)
print(print_model(model))

# Out-parameters need a value: with no scenario stub, lenient mode uses
# the type default (0.0), which lets enrollment go through.
print(simulate(model, "ITG_Reg", lenient=True).format())

# A few mistakes at once: undeclared interaction, unknown channel and a
# guard reading a variable nothing ever sets.
BROKEN = SOURCE.replace("-[ r1 ]->", "-[ r9 ]->").replace(". enroll;", ". enrol;") \
    .replace("PastDueBalance <= 0", "owed <= 0")
try:
    parse_model(BROKEN, "registrar.sbc")
except ModelError as exc:
    for d in exc.diagnostics:
        print(d)
