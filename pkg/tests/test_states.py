"""State representation, typing constraints, and delta tests."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gseqa import OMEGA, OrdinalNotation, OrdinalSet, parse_ordinal
from gseqa.errors import KappaMismatch, ParseError, Unrepresentable
from gseqa.logic import Signature, SymbolDecl
from gseqa.states import (
    State,
    Tci,
    format_state,
    models_tci,
    parse_state,
    state_delta,
)

SIGMA = Signature(
    [
        SymbolDecl("h", "Constant"),
        SymbolDecl("R", "Relation", 1),
        SymbolDecl("E", "Relation", 2),
    ]
)


def sample_state() -> State:
    return State.make(
        OMEGA,
        constants={"h": 3},
        unary={
            "In": OrdinalSet.finite({1, 3}),
            "Out": OrdinalSet.cofinite({0}),
            "R": OrdinalSet.finite(),
        },
        nary={"E": {(0, 1), (2, 2)}},
    )


def test_state_accessors_and_hashing():
    s = sample_state()
    assert s.constant("h") == 3
    assert s.relation("In").member(3)
    assert (2, 2) in s.tuples("E")
    assert s.support_bound() == 4
    t = State.make(
        OMEGA,
        constants={"h": 3},
        unary=s.unary_map(),
        nary={"E": {(2, 2), (0, 1)}},
    )
    assert s == t and hash(s) == hash(t)
    with pytest.raises(KeyError):
        s.constant("zz")


def test_with_updates_is_functional():
    s = sample_state()
    t = s.with_updates(constants={"h": 5}, unary={"In": OrdinalSet.finite()})
    assert t.constant("h") == 5
    assert s.constant("h") == 3
    assert not t.relation("In").member(1)
    assert t.relation("Out") == s.relation("Out")


def test_models_tci_accepts_well_typed_state():
    verdict = models_tci(sample_state(), SIGMA, Tci(OMEGA, "GSeqA"))
    assert verdict.ok, verdict.reasons


def test_models_tci_universe_mismatch():
    verdict = models_tci(sample_state(), SIGMA, Tci(parse_ordinal("w*2"), "GSeqA"))
    assert not verdict.ok
    assert any("universe" in r for r in verdict.reasons)


def test_models_tci_range_under_finite_surrogate():
    s = State.make(
        OrdinalNotation.from_int(4),
        constants={"h": 9},
        unary={"In": OrdinalSet.finite({1}), "Out": OrdinalSet.finite()},
    )
    verdict = models_tci(s, SIGMA, Tci(OrdinalNotation.from_int(4), "GSeqA"))
    assert not verdict.ok
    assert any("range" in r for r in verdict.reasons)


def test_models_tci_parameter_pinning():
    tci = Tci(OMEGA, "GSeqAP", (("h", OrdinalNotation.from_int(3)),))
    assert models_tci(sample_state(), SIGMA, tci).ok
    bad = models_tci(
        sample_state().with_updates(constants={"h": 4}), SIGMA, tci
    )
    assert not bad.ok
    assert any("ParameterMismatch" in r for r in bad.reasons)


def test_models_tci_undeclared_symbol():
    s = sample_state().with_updates(constants={"ghost": 1})
    verdict = models_tci(s, SIGMA, Tci(OMEGA, "GSeqA"))
    assert not verdict.ok
    assert any("BadConstraint" in r for r in verdict.reasons)


def test_gseqa_schema_cannot_pin():
    with pytest.raises(ValueError):
        Tci(OMEGA, "GSeqA", (("h", OrdinalNotation.from_int(3)),))


def test_state_delta_shapes():
    s = sample_state()
    t = s.with_updates(
        constants={"h": 4},
        unary={"In": OrdinalSet.finite({1})},
        nary={"E": {(0, 1)}},
    )
    d = state_delta(s, t)
    assert d["h"] == OrdinalSet.cofinite()
    assert d["In"] == OrdinalSet.finite({3})
    assert d["E"] == frozenset({(2, 2)})
    assert d["Out"] == OrdinalSet.finite()
    same = state_delta(s, s)
    assert all(
        (v == OrdinalSet.finite() or v == frozenset()) for v in same.values()
    )


def test_state_delta_guards():
    s = sample_state()
    other = State.make(parse_ordinal("w*2"), constants={"h": 3})
    with pytest.raises(KappaMismatch):
        state_delta(s, other)
    shape = State.make(OMEGA, unary={"h": OrdinalSet.finite()})
    with pytest.raises(Unrepresentable):
        state_delta(s, shape)


def test_snapshot_roundtrip_exact():
    s = sample_state()
    text = format_state(s)
    assert "state kappa=w" in text
    assert parse_state(text) == s


sets_ = st.builds(
    lambda el, co: OrdinalSet.cofinite(el) if co else OrdinalSet.finite(el),
    st.frozensets(st.integers(min_value=0, max_value=20), max_size=5),
    st.booleans(),
)


@given(
    st.dictionaries(st.sampled_from(["h", "t", "g"]), st.integers(0, 30), max_size=3),
    st.dictionaries(st.sampled_from(["In", "Out", "R"]), sets_, max_size=3),
)
def test_snapshot_roundtrip_random(consts, unaries):
    s = State.make(OMEGA, constants=consts, unary=unaries, nary={"E": {(1, 2)}})
    assert parse_state(format_state(s)) == s


def test_parse_state_rejects_junk():
    with pytest.raises(ParseError):
        parse_state("constants: h=3")
    with pytest.raises(ParseError):
        parse_state("state kappa=w\nwhat: ever")
