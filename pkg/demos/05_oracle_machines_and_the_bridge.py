"""
Oracle machine programs and the compiled bridge
===============================================

The reference simulator runs classical tape programs extended with two
row kinds: oracle-read rows branch on whether the oracle holds the
current head position, and jump rows warp the head to one of the
program's ordinal parameters. Input is a single set coding the pair
(tape, oracle), with tape marks on pair codes (x, 0) and oracle marks
on pair codes (o, 1).

Every program also compiles into a machine whose short terminating
runs reproduce the simulator's verdicts: same halting behaviour, same
output. The crosscheck subcommand of the CLI automates exactly this
comparison; here we drive it as a library.
"""

from gseqa.alpharef import (
    Halted,
    code_sets,
    parse_alpha_program,
    run_alpha_machine,
    simulate_alpha_as_gseqap,
)
from gseqa.runtime import Budget, Terminated, run
from gseqa.validator import check_machine

# Walks the head to position 3 and accepts iff the oracle holds 3.
PROGRAM = parse_alpha_program(
    """
    states: s0 s1 s2 s3 yes no done
    initial: s0
    final: done
    (s0, 0) -> (s1, 0, R)
    (s0, 1) -> (s1, 1, R)
    (s1, 0) -> (s2, 0, R)
    (s1, 1) -> (s2, 1, R)
    (s2, 0) -> (s3, 0, R)
    (s2, 1) -> (s3, 1, R)
    (s3, 0) -> oracle-read(yes, no)
    (s3, 1) -> oracle-read(yes, no)
    (yes, 0) -> (done, 1, R)
    (yes, 1) -> (done, 1, R)
    (no, 0) -> (no, 0, R)
    (no, 1) -> (no, 1, R)
    """
)

for oracle in ({3}, set()):
    coded = code_sets((), oracle)
    verdict = run_alpha_machine(PROGRAM, coded, budget=200)
    print(f"oracle {str(oracle):6} coded as {coded} ->", verdict)

# The bridge: a machine with the same verdicts. Diverging programs
# correspond to runs that fail to terminate within the universe bound,
# halting ones to short terminating runs with identical output.
vm = check_machine(simulate_alpha_as_gseqap(PROGRAM))
print("\nbridge machine symbols:", [d.name for d in vm.spec.sigma.extras()])

for oracle in ({3}, set()):
    coded = code_sets((), oracle)
    reference = run_alpha_machine(PROGRAM, coded, budget=200)
    trace = run(vm, coded, Budget(maxSuccessorStepsPerSegment=150, maxLimitJumps=1))
    agree = isinstance(reference, Halted) == (
        isinstance(trace.outcome, Terminated) and trace.is_short(vm.spec.kappa)
    )
    if isinstance(reference, Halted) and isinstance(trace.outcome, Terminated):
        agree = agree and trace.outcome.output == reference.output
    print(f"oracle {str(oracle):6}: simulator and bridge agree: {agree}")
