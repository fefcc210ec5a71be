"""
Writing a machine down, validating it, running it
=================================================

A machine is a universe bound, a signature, one transition witness per
symbol, and one default witness per extra symbol. The validator checks
that the witnesses define every next value from the current state alone
(and nothing peeks at the next stage), that defaults only mention the
order, and that the transition determines a unique successor on a
sample of states. Only then does the runtime agree to execute it.
"""

from gseqa import OrdinalSet, check_machine, parse_machine
from gseqa.errors import MachineInvalid
from gseqa.runtime import Budget, run, unload

TEXT = """\
kappa: w
flavor: gseqa
signature:
  h: Constant
default {
  h: x = 0
}
tau {
  In: In(x)
  Out: In(x) & (exists y. (y < h))
  h: x = 1
}
"""

# The machine holds its input, raises h to 1, and from then on copies
# the input to the output. Once nothing changes any more the run ends.
vm = check_machine(parse_machine(TEXT))
print("validated:", vm.spec.flavor, "machine over kappa", vm.spec.kappa)

trace = run(vm, OrdinalSet.finite({2, 5}), Budget(maxSuccessorStepsPerSegment=50))
print("outcome:   ", type(trace.outcome).__name__)
print("stamp:     ", trace.final_stamp, "(run length", str(trace.length) + ")")
print("output:    ", unload(trace.outcome.finalState))

# Validation is a real gate, not a formality. Swap the Out witness for
# one that consults the next stage's input and the machine is rejected:
# the transition must be explicit about the future, never circular.
broken = TEXT.replace("Out: In(x) & (exists y. (y < h))", "Out: In@1(x)")
try:
    check_machine(parse_machine(broken))
except MachineInvalid as exc:
    print("\nrejected variant:")
    for issue in exc.issues:
        print("  ", issue)
