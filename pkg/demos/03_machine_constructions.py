"""
Building machines from tables and from other machines
=====================================================

Four constructions, each checked here by running both sides of the
identity it promises: a machine table compiles to a machine computing
the same outputs; composition runs one machine after another; flip
complements the output (watch the representation switch to cofinite);
lift re-plants a machine in a larger universe without changing what it
computes below the old bound.
"""

import dataclasses

from gseqa import OrdinalNotation, OrdinalSet, check_machine
from gseqa.runtime import Budget, run, unload
from gseqa.transforms import compile_tm, compose, flip, lift, parse_tm

BUDGET = Budget(maxSuccessorStepsPerSegment=400, maxLimitJumps=1)

# A two-state table: walk right to the first mark, erase it, stop.
# The compiled machine therefore removes the least element of its input.
TABLE = parse_tm(
    """
    states: seek z
    initial: seek
    final: z
    (seek, 0) -> (seek, 0, R)
    (seek, 1) -> (z, 0, R)
    """
)
erase_least = check_machine(compile_tm(TABLE))


def output(vm, elements):
    trace = run(vm, OrdinalSet.finite(elements), BUDGET)
    return unload(trace.outcome.finalState)


print("table machine on {3,5}:", output(erase_least, {3, 5}))

# Composition: the compiled machine twice in a row erases the two
# lowest marks. The composed machine and the staged runs agree.
twice = check_machine(compose(erase_least.spec, erase_least.spec))
staged = output(erase_least, set(output(erase_least, {1, 2, 4}).elements))
print("composed on {1,2,4}:   ", output(twice, {1, 2, 4}), "(staged:", str(staged) + ")")

# Flip: same computation, complemented output. The result is a
# cofinite set, stored by its finitely many exceptions.
flipped = check_machine(flip(erase_least.spec))
print("flipped on {3,5}:      ", output(flipped, {3, 5}))

# Lift: take the same table pinned to a six-element universe, then
# move it to twelve. Outputs below six agree input by input, and the
# lifted run is exactly one step longer.
m6 = dataclasses.replace(compile_tm(TABLE), kappa=OrdinalNotation.from_int(6))
vm6 = check_machine(m6, allow_finite_kappa=True)
vm12 = check_machine(lift(m6, 12), allow_finite_kappa=True)
for elements in ({0}, {2, 4}, {1, 3, 5}):
    t6 = run(vm6, OrdinalSet.finite(elements), BUDGET)
    t12 = run(vm12, OrdinalSet.finite(elements), BUDGET)
    print(
        f"lift check {str(elements):12}",
        unload(t6.outcome.finalState) == unload(t12.outcome.finalState),
        f"(lengths {t6.final_stamp} -> {t12.final_stamp})",
    )
