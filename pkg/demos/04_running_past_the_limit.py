"""
Limit stages and a run that ends just past one
==============================================

At a limit stage every cell takes the limit inferior of its history
when that value exists below the bound, and 0 otherwise. The runtime
cannot watch infinitely many steps, so it classifies each touched
cell's sampled history (stable, periodic, certified unbounded, ...)
and installs the resulting state; the classification is kept in the
trace for inspection.

The showcase is a dovetailer: given a machine table, it interleaves
simulations of that table on inputs {0}, {1}, {2}, ... forever, marking
a bookkeeping cell whenever a simulation halts. No finite stage knows
the whole answer, but the stage at w does: its output cell collects
exactly the inputs whose simulation halted, and one more step freezes
everything. The run terminates at stamp w+1, i.e. with length w+2.
"""

from gseqa import OrdinalSet, check_machine
from gseqa.runtime import Budget, run, unload
from gseqa.transforms import compile_tm, dovetail, parse_tm

# Walk right in two alternating states; halt on a mark seen in the
# first one. On input {k} this halts exactly when k is even.
TABLE = parse_tm(
    """
    states: q0 q1 z
    initial: q0
    final: z
    (q0, 0) -> (q1, 0, R)
    (q0, 1) -> (z, 1, R)
    (q1, 0) -> (q0, 0, R)
    (q1, 1) -> (q1, 1, R)
    """
)

vm = check_machine(dovetail(compile_tm(TABLE)))
budget = Budget(maxSuccessorStepsPerSegment=9000, maxLimitJumps=2)
trace = run(vm, OrdinalSet.finite(), budget)

print("outcome:    ", type(trace.outcome).__name__)
print("final stamp:", trace.final_stamp, "   run length:", trace.length)

out = unload(trace.outcome.finalState)
print("halting inputs found below 32:", sorted(x for x in out.elements if x < 32))

# The limit record explains how each cell crossed w. The round counter
# c0 grew without bound, so its limit inferior does not exist below w
# and the rule sends it to 0; the certification is part of the record.
record = trace.limitRecords[0]
for symbol in ("c0", "c1", "d"):
    cell = record.cell(symbol)
    print(f"cell {symbol}: {cell.kind:12} -> {cell.value}  (certified: {cell.verified})")
