"""Machine admission, witness assembly, and the exploration diagnostic."""

import random

import pytest

from gseqa import (
    ArityMismatch,
    D6Violation,
    EvalDomain,
    MachineInvalid,
    NotBounded,
    NotSimple,
    OrdinalNotation,
    OrdinalSet,
    OMEGA,
    Signature,
    State,
    SymbolDecl,
    apply_transition,
    check_bounded,
    check_machine,
    check_simple,
    diagnose_bep,
    parse_formula,
    sample_states,
)
from gseqa.logic import with_copy
from gseqa.validator import GSEQA, GSEQAP, MachineSpec, default_values

W = OMEGA
BASE = Signature()


def machine(sigma=BASE, tau=None, defaults=None, kappa=W, flavor=GSEQA, params=None):
    return MachineSpec(
        kappa=kappa,
        sigma=sigma,
        flavor=flavor,
        params=dict(params or {}),
        tauWitnesses={k: parse_formula(v, sigma) for k, v in (tau or {}).items()},
        defaultWitnesses={k: parse_formula(v, sigma) for k, v in (defaults or {}).items()},
    )


def bitflip():
    return machine(tau={"In": "~In(x)", "Out": "Out(x)"})


def erasure():
    return machine(tau={"In": "false", "Out": "Out(x)"})


def copier():
    return machine(tau={"In": "In(x)", "Out": "In(x)"})


# --- witness assembly -------------------------------------------------------


def test_check_bounded_assembles_biconditionals():
    phi = check_bounded(bitflip())
    vm = check_machine(bitflip())
    assert vm.phi_tau == phi
    rebuilt = vm.reconstruct_witnesses()
    assert set(rebuilt) == {"In", "Out"}
    assert rebuilt["In"] == with_copy(parse_formula("~In(x)", BASE), 0)
    assert rebuilt["Out"] == with_copy(parse_formula("Out(x)", BASE), 0)


def test_check_bounded_renames_single_variable():
    sigma = BASE
    spec = machine(tau={"In": "In(y)", "Out": "Out(x)"})
    vm = check_machine(spec)
    assert vm.reconstruct_witnesses()["In"] == with_copy(
        parse_formula("In(x)", sigma), 0
    )


def test_copy1_witness_is_not_bounded():
    spec = machine(tau={"In": "In@1(x)", "Out": "Out(x)"})
    with pytest.raises(NotBounded) as info:
        check_bounded(spec)
    assert info.value.symbol == "In"


def test_missing_witness_is_not_bounded():
    sigma = BASE.extend([SymbolDecl("R", "Relation", 1)])
    spec = machine(sigma, tau={"In": "In(x)", "Out": "Out(x)"})
    with pytest.raises(NotBounded) as info:
        check_bounded(spec)
    assert info.value.symbol == "R"


def test_witness_for_unknown_symbol_rejected():
    spec = MachineSpec(
        kappa=W,
        sigma=BASE,
        flavor=GSEQA,
        tauWitnesses={
            "In": parse_formula("In(x)", BASE),
            "Out": parse_formula("Out(x)", BASE),
            "Ghost": parse_formula("In(x)", BASE),
        },
    )
    with pytest.raises(NotBounded):
        check_bounded(spec)


def test_wrong_variable_count_is_arity_mismatch():
    sigma = BASE.extend([SymbolDecl("E", "Relation", 2)])
    bad = machine(
        sigma,
        tau={"In": "In(x)", "Out": "Out(x)", "E": "in(x1, x2) & in(x2, x3)"},
        defaults={"E": "false"},
    )
    with pytest.raises(ArityMismatch):
        check_bounded(bad)


def test_check_simple_accepts_membership_only():
    sigma = BASE.extend([SymbolDecl("h", "Constant")])
    spec = machine(
        sigma,
        tau={"In": "In(x)", "Out": "Out(x)", "h": "x = h"},
        defaults={"h": "x = 0"},
    )
    phi = check_simple(spec)
    assert phi == check_machine(spec).phi_default


def test_check_simple_rejects_symbol_mentions():
    sigma = BASE.extend([SymbolDecl("h", "Constant")])
    spec = machine(
        sigma,
        tau={"In": "In(x)", "Out": "Out(x)", "h": "x = h"},
        defaults={"h": "In(x)"},
    )
    with pytest.raises(NotSimple) as info:
        check_simple(spec)
    assert info.value.symbol == "h"


def test_default_for_distinguished_symbol_rejected():
    spec = machine(
        tau={"In": "In(x)", "Out": "Out(x)"},
        defaults={"Out": "false"},
    )
    with pytest.raises(NotSimple):
        check_simple(spec)


# --- whole-machine admission ------------------------------------------------


def test_valid_machines_admit():
    for spec in (bitflip(), erasure(), copier()):
        vm = check_machine(spec)
        assert vm.tci.schema == "GSeqA"
        assert vm.kappa == W


def test_finite_kappa_needs_the_flag():
    spec = machine(
        tau={"In": "In(x)", "Out": "In(x)"}, kappa=OrdinalNotation.from_int(6)
    )
    with pytest.raises(MachineInvalid) as info:
        check_machine(spec)
    assert any(i.kind == "NonLimitKappa" for i in info.value.issues)
    vm = check_machine(spec, allow_finite_kappa=True)
    assert vm.kappa.to_int() == 6


def test_successor_kappa_rejected():
    succ = OMEGA.add(OrdinalNotation.from_int(1))
    spec = machine(tau={"In": "In(x)", "Out": "Out(x)"}, kappa=succ)
    with pytest.raises(MachineInvalid) as info:
        check_machine(spec)
    assert any(i.kind == "NonLimitKappa" for i in info.value.issues)


def test_pinned_constant_needs_parameterized_flavor():
    sigma = BASE.extend([SymbolDecl("c", "Constant")])
    tau = {"In": "In(x)", "Out": "Out(x)", "c": "x = c"}
    defaults = {"c": "x = 3"}
    pinned = {"c": OrdinalNotation.from_int(3)}

    hidden = machine(sigma, tau, defaults, params=pinned)
    with pytest.raises(MachineInvalid) as info:
        check_machine(hidden)
    assert any(i.kind == "BadConstraint" for i in info.value.issues)

    ok = machine(sigma, tau, defaults, flavor=GSEQAP, params=pinned)
    vm = check_machine(ok)
    assert vm.tci.pinned() == pinned


def test_pinning_a_relation_rejected():
    spec = machine(
        tau={"In": "In(x)", "Out": "Out(x)"},
        flavor=GSEQAP,
        params={"In": OrdinalNotation.from_int(1)},
    )
    with pytest.raises(MachineInvalid) as info:
        check_machine(spec)
    assert any(
        i.kind == "BadConstraint" and i.symbol == "In" for i in info.value.issues
    )


def test_pin_must_sit_below_kappa():
    sigma = BASE.extend([SymbolDecl("c", "Constant")])
    spec = machine(
        sigma,
        tau={"In": "In(x)", "Out": "Out(x)", "c": "x = c"},
        defaults={"c": "x = 0"},
        flavor=GSEQAP,
        params={"c": W},
    )
    with pytest.raises(MachineInvalid) as info:
        check_machine(spec)
    assert any(i.kind == "BadConstraint" for i in info.value.issues)


def test_missing_out_witness_reported_as_missing_distinguished():
    spec = machine(tau={"In": "In(x)"})
    with pytest.raises(MachineInvalid) as info:
        check_machine(spec)
    kinds = {i.kind for i in info.value.issues}
    assert "MissingDistinguished" in kinds


def test_ambiguous_constant_witness_caught_by_sampling():
    sigma = BASE.extend([SymbolDecl("h", "Constant")])
    spec = machine(
        sigma,
        tau={"In": "In(x)", "Out": "Out(x)", "h": "x = 0 | x = 1"},
        defaults={"h": "x = 0"},
    )
    with pytest.raises(MachineInvalid) as info:
        check_machine(spec)
    bad = [i for i in info.value.issues if i.kind == "D6Violation"]
    assert bad and bad[0].symbol == "h" and bad[0].state is not None


def test_unpinned_constant_default_must_be_single_valued():
    sigma = BASE.extend([SymbolDecl("h", "Constant")])
    spec = machine(
        sigma,
        tau={"In": "In(x)", "Out": "Out(x)", "h": "x = h"},
        defaults={"h": "in(x, 5)"},
    )
    with pytest.raises(MachineInvalid) as info:
        check_machine(spec)
    assert any(
        i.kind == "BadConstraint" and i.symbol == "h" for i in info.value.issues
    )


def test_default_must_match_pin():
    sigma = BASE.extend([SymbolDecl("c", "Constant")])
    spec = machine(
        sigma,
        tau={"In": "In(x)", "Out": "Out(x)", "c": "x = c"},
        defaults={"c": "x = 2"},
        flavor=GSEQAP,
        params={"c": OrdinalNotation.from_int(3)},
    )
    with pytest.raises(MachineInvalid) as info:
        check_machine(spec)
    assert any(i.kind == "BadConstraint" for i in info.value.issues)


def test_issue_reports_are_deterministic():
    spec = machine(tau={"In": "In@1(x)"})
    grab = lambda: [str(i) for i in pytest.raises(MachineInvalid, check_machine, spec).value.issues]
    assert grab() == grab()


# --- step kernel -------------------------------------------------------------


def test_apply_transition_flips_input():
    vm = check_machine(bitflip())
    s = State.make(W, unary={"In": OrdinalSet.finite({1, 3}), "Out": OrdinalSet.finite()})
    nxt = apply_transition(vm, s, debug=True)
    assert nxt.relation("In") == OrdinalSet.cofinite({1, 3})
    again = apply_transition(vm, nxt, debug=True)
    assert again.relation("In") == OrdinalSet.finite({1, 3})


def test_apply_transition_surrogate_matches_complement():
    vm = check_machine(bitflip())
    s = State.make(W, unary={"In": OrdinalSet.finite({0, 2}), "Out": OrdinalSet.finite()})
    nxt = apply_transition(vm, s, EvalDomain.surrogate(5), debug=True)
    assert nxt.relation("In") == OrdinalSet.finite({1, 3, 4})


def test_default_values_use_bare_order_only():
    sigma = BASE.extend([SymbolDecl("h", "Constant"), SymbolDecl("R", "Relation", 1)])
    spec = machine(
        sigma,
        tau={"In": "In(x)", "Out": "Out(x)", "h": "x = h", "R": "R(x)"},
        defaults={"h": "x = 0", "R": "in(x, 3)"},
    )
    constants, unary, _ = default_values(spec)
    assert constants == {"h": 0}
    assert unary == {"R": OrdinalSet.finite({0, 1, 2})}


# --- sampling ----------------------------------------------------------------


def test_sampled_states_respect_pins():
    sigma = BASE.extend([SymbolDecl("c", "Constant")])
    spec = machine(
        sigma,
        tau={"In": "In(x)", "Out": "Out(x)", "c": "x = c"},
        defaults={"c": "x = 4"},
        flavor=GSEQAP,
        params={"c": OrdinalNotation.from_int(4)},
    )
    for s in sample_states(spec, random.Random(7), count=20):
        assert s.constant("c") == 4


def test_sampled_states_fit_finite_universe():
    spec = machine(
        tau={"In": "In(x)", "Out": "Out(x)"}, kappa=OrdinalNotation.from_int(5)
    )
    for s in sample_states(spec, random.Random(7), count=20):
        assert s.relation("In").kind == "finite"
        assert all(e < 5 for e in s.relation("In").elements)


# --- bounded-exploration diagnostic ------------------------------------------


def sample_for(spec, count=24, seed=11):
    return sample_states(spec, random.Random(seed), count=count)


def test_bitflip_explores_nothing():
    vm = check_machine(bitflip())
    report = diagnose_bep(vm, sample_for(bitflip()))
    assert report.found
    assert report.terms == ()
    assert "constant" in report.detail


def test_erasure_defeats_every_probe_set():
    vm = check_machine(erasure())
    report = diagnose_bep(vm, sample_for(erasure()))
    assert not report.found
    s1, s2 = report.counterexample
    assert s1.relation("In") != s2.relation("In")


def test_moded_update_is_explained_by_one_constant():
    sigma = BASE.extend([SymbolDecl("e", "Constant")])
    spec = machine(
        sigma,
        tau={
            "In": "(e = 0 & In(x)) | (~(e = 0) & ~In(x))",
            "Out": "Out(x)",
            "e": "x = e",
        },
        defaults={"e": "x = 0"},
    )
    vm = check_machine(spec)
    report = diagnose_bep(vm, sample_for(spec))
    assert report.found
    assert report.terms == ("e",)


def test_empty_sample_is_vacuous():
    vm = check_machine(bitflip())
    report = diagnose_bep(vm, [])
    assert report.found and "vacuous" in report.detail
