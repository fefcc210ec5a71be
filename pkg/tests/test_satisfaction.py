"""Evaluator tests: vectorized engine against the plain oracle, Omega
semantics on hand-checked formulas, and the defined-set machinery."""

from __future__ import annotations

import random

import pytest

from corpus_tools import (
    CORPUS_SIGMA,
    brute_sat,
    random_formula,
    random_state,
    stamp_random_copies,
)
from gseqa import OMEGA, OrdinalSet
from gseqa.errors import NotClosed, Unrepresentable, Unsupported
from gseqa.logic import parse_formula, with_copy
from gseqa.satisfaction import (
    EvalDomain,
    defined_relation,
    defined_set,
    evaluate_with_views,
    sat,
    sat2,
    threshold_bound,
)
from gseqa.states import State


def P(text: str, doubled: bool = False):
    return parse_formula(text, CORPUS_SIGMA, doubled=doubled)


def base_state() -> State:
    return State.make(
        OMEGA,
        constants={"h": 3, "t": 1},
        unary={
            "In": OrdinalSet.finite({1, 3}),
            "Out": OrdinalSet.cofinite({2}),
            "R": OrdinalSet.finite(),
        },
        nary={"E": {(0, 1), (1, 2)}},
    )


# -- the vectorized surrogate engine against the plain recursive oracle -----


def test_surrogate_agrees_with_brute_oracle_on_random_corpus():
    rng = random.Random(20260815)
    views = None
    for trial in range(400):
        state = random_state(rng)
        f = random_formula(rng, rank=3, guarded=False)
        views = {None: state, 0: state}
        for n in (3, 7, 12):
            got = evaluate_with_views(f, views, EvalDomain.surrogate(n))
            want = brute_sat(f, views, n)
            assert got == want, (trial, n, f)


def test_surrogate_two_state_agrees_with_oracle():
    rng = random.Random(77)
    for trial in range(200):
        s1, s2 = random_state(rng), random_state(rng)
        f = stamp_random_copies(random_formula(rng, rank=2, guarded=False), rng)
        views = {0: s1, 1: s2}
        got = sat2(f, (s1, s2), EvalDomain.surrogate(9))
        assert got == brute_sat(f, views, 9), (trial, f)


# -- Omega mode on formulas with hand-computed truth ------------------------


def test_omega_every_element_has_a_successor():
    f = P("forall x. exists y. x < y")
    s = base_state()
    assert sat(f, s, EvalDomain.omega()) is True
    assert sat(f, s, EvalDomain.surrogate(5)) is False


def test_omega_no_maximum_exists():
    f = P("exists y. forall x. (x < y | x = y)")
    s = base_state()
    assert sat(f, s, EvalDomain.omega()) is False
    assert sat(f, s, EvalDomain.surrogate(5)) is True


def test_omega_cofinite_relation_truths():
    s = base_state()
    assert sat(P("forall x. (Out(x) | x = 2)"), s, EvalDomain.omega())
    assert not sat(P("forall x. Out(x)"), s, EvalDomain.omega())
    assert sat(P("exists x. (h < x & Out(x))"), s, EvalDomain.omega())
    assert sat(P("forall x. (In(x) -> x < 4)"), s, EvalDomain.omega())


def test_omega_least_element_reasoning():
    s = base_state()
    least_in = P("exists x. (In(x) & forall y. (y < x -> ~In(y)))")
    assert sat(least_in, s, EvalDomain.omega())
    # the least element of a cofinite set exists too
    least_out = P("exists x. (Out(x) & forall y. (y < x -> ~Out(y)))")
    assert sat(least_out, s, EvalDomain.omega())


def test_omega_finite_kappa_state_is_rejected():
    s = State.make(OrdinalSet.finite().support_bound() and OMEGA)  # placeholder
    fin = State.make(
        __import__("gseqa").OrdinalNotation.from_int(6),
        unary={"In": OrdinalSet.finite(), "Out": OrdinalSet.finite()},
    )
    with pytest.raises(Unsupported):
        sat(P("forall x. exists y. x < y"), fin, EvalDomain.omega())


def test_closedness_is_enforced():
    with pytest.raises(NotClosed):
        sat(P("In(x)"), base_state(), EvalDomain.omega())


def test_copy_discipline():
    s = base_state()
    with pytest.raises(Unsupported):
        sat(P("exists x. In@1(x)", doubled=True), s, EvalDomain.omega())
    with pytest.raises(Unsupported):
        sat2(P("exists x. In(x)"), (s, s), EvalDomain.omega())


def test_sat2_bit_flip_sentence():
    s = base_state()
    flipped = s.with_updates(unary={"In": OrdinalSet.cofinite({1, 3})})
    sentence = P("forall x. (In@1(x) <-> ~In@0(x))", doubled=True)
    assert sat2(sentence, (s, flipped), EvalDomain.omega())
    assert not sat2(sentence, (s, s), EvalDomain.omega())


# -- guarded-fragment differential: Omega equals every surrogate past B -----


def test_omega_matches_surrogate_window_on_guarded_corpus():
    rng = random.Random(4127)
    for trial in range(250):
        state = random_state(rng)
        f = random_formula(rng, rank=3, guarded=True)
        b = threshold_bound(f, state)
        omega_verdict = sat(f, state, EvalDomain.omega())
        for n in range(b, b + 9):
            assert sat(f, state, EvalDomain.surrogate(n)) == omega_verdict, (
                trial,
                n,
                f,
            )


def test_tail_decomposable_biconditional_shapes_match_window():
    # stall-style sentences: unguarded quantifier over a tail-constant body
    s = base_state()
    shapes = [
        "forall x. (In(x) <-> In(x))",
        "forall x. (R(x) <-> In(x) & x < h)",
        "forall x. (Out(x) <-> ~(x = 2))",
        "exists x. (Out(x) & ~In(x))",
        "forall x. (x < h -> (In(x) | Out(x)))",
    ]
    for text in shapes:
        f = P(text)
        b = threshold_bound(f, s)
        omega_verdict = sat(f, s, EvalDomain.omega())
        for n in range(b, b + 9):
            assert sat(f, s, EvalDomain.surrogate(n)) == omega_verdict, text


# -- defined sets and relations ---------------------------------------------


def test_defined_set_finite_and_cofinite():
    s = base_state()
    assert defined_set(P("In(x)"), s, EvalDomain.omega()) == OrdinalSet.finite({1, 3})
    assert defined_set(P("~In(x)"), s, EvalDomain.omega()) == OrdinalSet.cofinite({1, 3})
    assert defined_set(P("x < h"), s, EvalDomain.omega()) == OrdinalSet.finite({0, 1, 2})
    assert defined_set(P("h < x"), s, EvalDomain.omega()) == OrdinalSet.cofinite(
        {0, 1, 2, 3}
    )
    assert defined_set(P("x = h"), s, EvalDomain.omega()) == OrdinalSet.finite({3})


def test_defined_set_with_quantified_body():
    s = base_state()
    # strict upper bounds of In: everything above its maximum element 3
    ub = P("forall y. (In(y) -> y < x)")
    assert defined_set(ub, s, EvalDomain.omega()) == OrdinalSet.cofinite({0, 1, 2, 3})
    # elements with an E-successor
    has_succ = P("exists y. E(x, y)")
    assert defined_set(has_succ, s, EvalDomain.omega()) == OrdinalSet.finite({0, 1})


def test_defined_set_ignoring_its_variable():
    s = base_state()
    taut = P("x = x")
    assert defined_set(taut, s, EvalDomain.omega()) == OrdinalSet.cofinite()
    assert defined_set(taut, s, EvalDomain.surrogate(4)) == OrdinalSet.finite(
        {0, 1, 2, 3}
    )


def test_defined_set_surrogate_truncates():
    s = base_state()
    assert defined_set(P("~In(x)"), s, EvalDomain.surrogate(5)) == OrdinalSet.finite(
        {0, 2, 4}
    )


def test_defined_set_needs_one_variable():
    s = base_state()
    with pytest.raises(NotClosed):
        defined_set(P("E(x, y)"), s, EvalDomain.omega())
    with pytest.raises(NotClosed):
        defined_set(P("exists x. In(x)"), s, EvalDomain.omega())


def test_defined_set_agrees_with_pointwise_oracle_on_random_corpus():
    rng = random.Random(99)
    for _ in range(150):
        state = random_state(rng)
        f = random_formula(rng, rank=2, guarded=True, scope=["x"], depth=3)
        got = defined_set(f, state, EvalDomain.surrogate(10), var="x")
        want = {a for a in range(10) if brute_sat(f, {None: state, 0: state}, 10, {"x": a})}
        assert set(got.members_below(10)) == want, f


def test_defined_relation_finite():
    s = base_state()
    f = P("E(x, y) & In(x)")
    assert defined_relation(f, s, EvalDomain.omega(), ("x", "y")) == frozenset(
        {(1, 2)}
    )
    swapped = defined_relation(f, s, EvalDomain.omega(), ("y", "x"))
    assert swapped == frozenset({(2, 1)})


def test_defined_relation_infinite_is_refused():
    s = base_state()
    with pytest.raises(Unrepresentable):
        defined_relation(P("x < y"), s, EvalDomain.omega(), ("x", "y"))
    with pytest.raises(Unrepresentable):
        defined_relation(P("In(x)"), s, EvalDomain.omega(), ("x", "y"))


def test_defined_relation_surrogate_expands_ignored_vars():
    s = base_state()
    got = defined_relation(P("In(x)"), s, EvalDomain.surrogate(4), ("x", "y"))
    assert got == frozenset({(1, yy) for yy in range(4)} | {(3, yy) for yy in range(4)})


def test_threshold_bound_shape():
    s = base_state()
    f0 = P("In(h)")
    f2 = P("forall x. exists y. E(x, y)")
    assert threshold_bound(f0, s) == s.support_bound() - 1 + 2**1 + 1
    assert threshold_bound(f2, s) > threshold_bound(f0, s)
    lit = P("x = 40")
    assert threshold_bound(lit, s) >= 40
