"""Machine specifications and their admission checks.

A machine is given by a universe bound, a finite signature, per-symbol
transition witnesses (each a formula over copy-0 symbols that defines the
symbol's next interpretation), and per-symbol default witnesses over the
membership relation alone. This module normalizes and assembles those
witnesses into the transition sentence and the default sentence, checks
the structural and semantic admission conditions, and houses the single
step kernel that the runtime drives.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping

from .errors import (
    ArityMismatch,
    D6Violation,
    GseqaError,
    MachineInvalid,
    NotBounded,
    NotSimple,
    ThresholdViolation,
    Unrepresentable,
    Unsupported,
    ValidationIssue,
)
from .logic import (
    MEMBERSHIP,
    And,
    Apply,
    Const,
    Equal,
    Exists,
    Forall,
    Formula,
    FuncApp,
    Iff,
    Implies,
    Not,
    Or,
    OrdinalLiteral,
    Signature,
    SymbolDecl,
    Term,
    Truth,
    Var,
    format_formula,
    free_vars,
    land,
    substitute,
    symbol_refs,
    with_copy,
)
from .ordinals import OMEGA, OrdinalNotation, OrdinalSet
from .satisfaction import EvalDomain, defined_relation, defined_set, sat2
from .states import State, Tci, models_tci, state_delta

GSEQA = "gseqa"
GSEQAP = "gseqap"


# ---------------------------------------------------------------------------
# machine specifications


@dataclass(frozen=True)
class MachineSpec:
    """A machine as written down: universe bound, signature, witnesses.

    tauWitnesses maps each non-membership symbol to the formula defining
    its next interpretation; defaultWitnesses maps each symbol beyond the
    three distinguished ones to the formula defining its initial value.
    Witness formulas use the canonical variables from witness_variables
    (a single free variable may carry any name and is renamed on
    normalization). params pins constants to fixed ordinals and is only
    admissible under the "gseqap" flavor.

    name and program are bookkeeping: name labels traces, program keeps
    the source table a compiled machine came from so later constructions
    can reuse it. Neither takes part in equality.
    """

    kappa: OrdinalNotation
    sigma: Signature
    flavor: str
    params: dict[str, OrdinalNotation] = field(default_factory=dict)
    tauWitnesses: dict[str, Formula] = field(default_factory=dict)
    defaultWitnesses: dict[str, Formula] = field(default_factory=dict)
    name: str = field(default="machine", compare=False)
    program: object = field(default=None, compare=False, repr=False)


def witness_variables(decl: SymbolDecl) -> tuple[str, ...]:
    """Canonical free variables for a symbol's witness formula.

    Constants use one variable ranging over candidate values; a function
    of arity n uses n+1 (the last one for the result), so the witness
    describes the graph.
    """
    if decl.kind == "Constant":
        return ("x",)
    n = decl.arity + 1 if decl.kind == "Function" else decl.arity
    return ("x",) if n == 1 else tuple(f"x{i}" for i in range(1, n + 1))


@dataclass(frozen=True)
class ValidatedMachine:
    """A machine that passed admission, with its assembled sentences.

    phi_tau is the conjunction of per-symbol biconditionals over the
    doubled signature; phi_default the analogous single-state sentence
    for initial values; tci the derived interpretation constraint.
    """

    spec: MachineSpec
    phi_tau: Formula
    phi_default: Formula
    tci: Tci
    _tau_parts: tuple["_Part", ...] = field(compare=False, repr=False)

    @property
    def kappa(self) -> OrdinalNotation:
        return self.spec.kappa

    @property
    def sigma(self) -> Signature:
        return self.spec.sigma

    def reconstruct_witnesses(self) -> dict[str, Formula]:
        """Recover the per-symbol witness bodies from phi_tau.

        Inverts the assembly performed by check_bounded, up to the
        canonical choice of variable names.
        """
        out: dict[str, Formula] = {}
        for psi in _conjuncts(self.phi_tau):
            name, body = _split_psi(psi)
            out[name] = body
        return out


@dataclass(frozen=True)
class _Part:
    """One normalized transition witness, ready for the step kernel."""

    decl: SymbolDecl
    variables: tuple[str, ...]
    body: Formula


# ---------------------------------------------------------------------------
# witness normalization


def _walk_terms(f: Formula) -> Iterator[Term]:
    if isinstance(f, Apply):
        yield from f.args
    elif isinstance(f, Equal):
        yield f.left
        yield f.right
    elif isinstance(f, Not):
        yield from _walk_terms(f.body)
    elif isinstance(f, (And, Or, Implies, Iff)):
        yield from _walk_terms(f.left)
        yield from _walk_terms(f.right)
    elif isinstance(f, (Exists, Forall)):
        yield from _walk_terms(f.body)


def _walk_applies(f: Formula) -> Iterator[Apply]:
    if isinstance(f, Apply):
        yield f
    elif isinstance(f, Not):
        yield from _walk_applies(f.body)
    elif isinstance(f, (And, Or, Implies, Iff)):
        yield from _walk_applies(f.left)
        yield from _walk_applies(f.right)
    elif isinstance(f, (Exists, Forall)):
        yield from _walk_applies(f.body)


def _subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, FuncApp):
        for a in t.args:
            yield from _subterms(a)


def _check_symbol_usage(formula: Formula, sigma: Signature) -> None:
    """Reject references to undeclared symbols and arity abuse."""
    for app in _walk_applies(formula):
        if app.name not in sigma:
            raise ArityMismatch(f"undeclared relation {app.name!r}")
        decl = sigma.decl(app.name)
        if decl.kind != "Relation":
            raise ArityMismatch(f"{app.name!r} is a {decl.kind.lower()}, not a relation")
        if decl.arity != len(app.args):
            raise ArityMismatch(
                f"{app.name!r} has arity {decl.arity}, applied to {len(app.args)}"
            )
    for top in _walk_terms(formula):
        for t in _subterms(top):
            if isinstance(t, Const):
                if t.name not in sigma or sigma.decl(t.name).kind != "Constant":
                    raise ArityMismatch(f"{t.name!r} is not a declared constant")
            elif isinstance(t, FuncApp):
                if t.name not in sigma or sigma.decl(t.name).kind != "Function":
                    raise ArityMismatch(f"{t.name!r} is not a declared function")
                if sigma.decl(t.name).arity != len(t.args):
                    raise ArityMismatch(f"wrong argument count for {t.name!r}")


def _fit_variables(
    name: str, formula: Formula, variables: tuple[str, ...]
) -> Formula:
    fv = free_vars(formula)
    if fv <= set(variables):
        return formula
    if len(variables) == 1 and len(fv) == 1:
        (old,) = fv
        return substitute(formula, {old: Var(variables[0])})
    raise ArityMismatch(
        f"witness for {name!r} uses variables {sorted(fv)}, expected {variables}"
    )


def _normalize_tau(decl: SymbolDecl, formula: Formula, sigma: Signature) -> _Part:
    variables = witness_variables(decl)
    formula = _fit_variables(decl.name, formula, variables)
    for sym, copy in symbol_refs(formula):
        if copy is not None and copy != 0:
            raise NotBounded(decl.name, f"references {sym}@{copy}")
    _check_symbol_usage(formula, sigma)
    return _Part(decl, variables, with_copy(formula, 0))


def _normalize_default(decl: SymbolDecl, formula: Formula, sigma: Signature) -> _Part:
    variables = witness_variables(decl)
    formula = _fit_variables(decl.name, formula, variables)
    for sym, copy in symbol_refs(formula):
        if sym != MEMBERSHIP:
            raise NotSimple(decl.name, f"mentions {sym!r}; only membership is allowed")
        if copy is not None:
            raise NotSimple(decl.name, "copy indices have no place in a default")
    _check_symbol_usage(formula, sigma)
    return _Part(decl, variables, formula)


# ---------------------------------------------------------------------------
# sentence assembly


def _head_tau(part: _Part) -> Formula:
    decl, variables = part.decl, part.variables
    if decl.kind == "Constant":
        return Equal(Var(variables[0]), Const(decl.name, 1))
    if decl.kind == "Function":
        args = tuple(Var(v) for v in variables[:-1])
        return Equal(FuncApp(decl.name, args, 1), Var(variables[-1]))
    return Apply(decl.name, tuple(Var(v) for v in variables), 1)


def _head_default(part: _Part) -> Formula:
    decl, variables = part.decl, part.variables
    if decl.kind == "Constant":
        return Equal(Var(variables[0]), Const(decl.name, None))
    if decl.kind == "Function":
        args = tuple(Var(v) for v in variables[:-1])
        return Equal(FuncApp(decl.name, args, None), Var(variables[-1]))
    return Apply(decl.name, tuple(Var(v) for v in variables), None)


def _close(variables: tuple[str, ...], body: Formula) -> Formula:
    for var in reversed(variables):
        body = Forall(var, body)
    return body


def _assemble(parts: list[_Part], head: Callable[[_Part], Formula]) -> Formula:
    psis = [_close(p.variables, Iff(head(p), p.body)) for p in parts]
    return land(*psis) if psis else Truth(True)


def _conjuncts(f: Formula) -> Iterator[Formula]:
    if isinstance(f, And):
        yield from _conjuncts(f.left)
        yield from _conjuncts(f.right)
    else:
        yield f


def _split_psi(psi: Formula) -> tuple[str, Formula]:
    while isinstance(psi, Forall):
        psi = psi.body
    if not isinstance(psi, Iff):
        raise GseqaError("conjunct is not a witness biconditional")
    head = psi.left
    if isinstance(head, Apply):
        return head.name, psi.right
    if isinstance(head, Equal) and isinstance(head.right, Const):
        return head.right.name, psi.right
    if isinstance(head, Equal) and isinstance(head.left, FuncApp):
        return head.left.name, psi.right
    raise GseqaError("unrecognized witness head shape")


def _collect_tau(spec: MachineSpec) -> tuple[list[_Part], list[ValidationIssue]]:
    parts: list[_Part] = []
    issues: list[ValidationIssue] = []
    declared = set(spec.sigma.names())
    for name in spec.tauWitnesses:
        if name not in declared or name == MEMBERSHIP:
            issues.append(
                ValidationIssue(
                    "NotBounded", "witness for a symbol outside the signature",
                    symbol=name,
                )
            )
    for decl in spec.sigma.doubled_symbols():
        formula = spec.tauWitnesses.get(decl.name)
        if formula is None:
            kind = (
                "MissingDistinguished" if decl.distinguished != "None" else "NotBounded"
            )
            issues.append(
                ValidationIssue(kind, "no transition witness", symbol=decl.name)
            )
            continue
        try:
            parts.append(_normalize_tau(decl, formula, spec.sigma))
        except (NotBounded, ArityMismatch) as exc:
            issues.append(
                ValidationIssue(type(exc).__name__, str(exc), symbol=decl.name)
            )
    return parts, issues


def _collect_default(spec: MachineSpec) -> tuple[list[_Part], list[ValidationIssue]]:
    parts: list[_Part] = []
    issues: list[ValidationIssue] = []
    needed = {d.name for d in spec.sigma.defaulted_symbols()}
    for name in spec.defaultWitnesses:
        if name not in needed:
            issues.append(
                ValidationIssue(
                    "NotSimple",
                    "default given for a symbol whose initial value is fixed",
                    symbol=name,
                )
            )
    for decl in spec.sigma.defaulted_symbols():
        formula = spec.defaultWitnesses.get(decl.name)
        if formula is None:
            issues.append(
                ValidationIssue("NotSimple", "no default witness", symbol=decl.name)
            )
            continue
        try:
            parts.append(_normalize_default(decl, formula, spec.sigma))
        except (NotSimple, ArityMismatch) as exc:
            issues.append(
                ValidationIssue(type(exc).__name__, str(exc), symbol=decl.name)
            )
    return parts, issues


def check_bounded(spec: MachineSpec) -> Formula:
    """Assemble the transition sentence, or raise why it cannot be built.

    The result is the conjunction, over every non-membership symbol, of
    a universally closed biconditional pinning the symbol's copy-1
    interpretation to its copy-0 witness.
    """
    parts, issues = _collect_tau(spec)
    if issues:
        first = issues[0]
        if first.kind == "ArityMismatch":
            raise ArityMismatch(str(first))
        raise NotBounded(first.symbol or "?", first.detail)
    return _assemble(parts, _head_tau)


def check_simple(spec: MachineSpec) -> Formula:
    """Assemble the default sentence, or raise why it cannot be built."""
    parts, issues = _collect_default(spec)
    if issues:
        first = issues[0]
        if first.kind == "ArityMismatch":
            raise ArityMismatch(str(first))
        raise NotSimple(first.symbol or "?", first.detail)
    return _assemble(parts, _head_default)


# ---------------------------------------------------------------------------
# the step kernel


def domain_for(kappa: OrdinalNotation) -> EvalDomain | None:
    """The evaluation domain matching a universe bound, if one exists.

    Finite bounds get the matching surrogate; w gets the genuine
    threshold evaluator. Larger bounds have no desk-scale evaluation, so
    machines over them can be checked structurally but not run.
    """
    if kappa.is_finite:
        return EvalDomain.surrogate(kappa.to_int())
    if kappa == OMEGA:
        return EvalDomain.omega()
    return None


def _singleton(s: OrdinalSet) -> int | None:
    if s.kind == "finite" and len(s.elements) == 1:
        return next(iter(s.elements))
    return None


def _step_parts(
    parts: tuple[_Part, ...] | list[_Part],
    state: State,
    domain: EvalDomain,
) -> State:
    constants: dict[str, int] = {}
    unary: dict[str, OrdinalSet] = {}
    nary: dict[str, frozenset[tuple[int, ...]]] = {}
    for part in parts:
        name = part.decl.name
        try:
            if part.decl.kind == "Constant":
                values = defined_set(part.body, state, domain, var=part.variables[0])
                value = _singleton(values)
                if value is None:
                    raise D6Violation(
                        state, name,
                        f"witness defines {_describe(values)} rather than one value",
                    )
                constants[name] = value
            elif part.decl.kind == "Relation" and part.decl.arity == 1:
                unary[name] = defined_set(part.body, state, domain, var=part.variables[0])
            elif part.decl.kind == "Relation":
                nary[name] = defined_relation(
                    part.body, state, domain, variables=part.variables
                )
            else:
                graph = defined_relation(
                    part.body, state, domain, variables=part.variables
                )
                nary[name] = _check_graph(name, graph, part.decl.arity, state, domain)
        except Unrepresentable as exc:
            raise Unrepresentable(f"next value of {name!r}: {exc}") from exc
    return State.make(state.kappa, constants, unary, nary)


def _describe(s: OrdinalSet) -> str:
    if s.kind == "cofinite":
        return "a cofinite set"
    return f"a set of size {len(s.elements)}"


def _check_graph(
    name: str,
    graph: frozenset[tuple[int, ...]],
    arity: int,
    state: State,
    domain: EvalDomain,
) -> frozenset[tuple[int, ...]]:
    if domain.is_omega:
        raise Unsupported(
            f"function symbol {name!r} cannot have a total graph "
            "inside the finite-support representation at scale w"
        )
    images: dict[tuple[int, ...], int] = {}
    for row in graph:
        key = row[:arity]
        if key in images:
            raise D6Violation(state, name, f"two images for arguments {key}")
        images[key] = row[arity]
    for key in itertools.product(range(domain.size), repeat=arity):
        if key not in images:
            raise D6Violation(state, name, f"no image for arguments {key}")
    return graph


def apply_transition(
    vm: ValidatedMachine,
    state: State,
    domain: EvalDomain | None = None,
    *,
    debug: bool = False,
) -> State:
    """One successor step: each symbol's next interpretation from its witness.

    With debug set, the freshly built state pair is re-checked against
    the assembled transition sentence through the doubled-signature
    evaluator, catching any drift between the two code paths.
    """
    if domain is None:
        domain = domain_for(vm.kappa)
        if domain is None:
            raise Unsupported(f"no evaluation domain for kappa = {vm.kappa}")
    nxt = _step_parts(vm._tau_parts, state, domain)
    if debug and not sat2(vm.phi_tau, (state, nxt), domain):
        raise GseqaError(
            "step kernel disagrees with the assembled transition sentence"
        )
    return nxt


# ---------------------------------------------------------------------------
# machine admission


def _blank_state(spec: MachineSpec) -> State:
    constants = {d.name: 0 for d in spec.sigma if d.kind == "Constant"}
    unary = {
        d.name: OrdinalSet.finite()
        for d in spec.sigma
        if d.kind == "Relation" and d.arity == 1 and d.distinguished != "Membership"
    }
    nary = {
        d.name: frozenset()
        for d in spec.sigma
        if (d.kind == "Relation" and d.arity >= 2 and d.distinguished != "Membership")
        or d.kind == "Function"
    }
    return State.make(spec.kappa, constants, unary, nary)


def default_values(
    spec: MachineSpec, parts: list[_Part] | None = None
) -> tuple[dict[str, int], dict[str, OrdinalSet], dict[str, frozenset[tuple[int, ...]]]]:
    """Initial values of the non-distinguished symbols, from their defaults.

    Evaluated over the bare order structure, so the blank state's
    contents never leak in. Raises when a constant's default fails to
    pin exactly one value.
    """
    if parts is None:
        parts, issues = _collect_default(spec)
        if issues:
            raise NotSimple(issues[0].symbol or "?", issues[0].detail)
    domain = domain_for(spec.kappa)
    if domain is None:
        raise Unsupported(f"no evaluation domain for kappa = {spec.kappa}")
    blank = _blank_state(spec)
    constants: dict[str, int] = {}
    unary: dict[str, OrdinalSet] = {}
    nary: dict[str, frozenset[tuple[int, ...]]] = {}
    for part in parts:
        name = part.decl.name
        if part.decl.kind == "Constant":
            values = defined_set(part.body, blank, domain, var=part.variables[0])
            value = _singleton(values)
            if value is None:
                raise D6Violation(
                    blank, name, f"default defines {_describe(values)}"
                )
            constants[name] = value
        elif part.decl.kind == "Relation" and part.decl.arity == 1:
            unary[name] = defined_set(part.body, blank, domain, var=part.variables[0])
        elif part.decl.kind == "Relation":
            nary[name] = defined_relation(
                part.body, blank, domain, variables=part.variables
            )
        else:
            graph = defined_relation(part.body, blank, domain, variables=part.variables)
            nary[name] = _check_graph(name, graph, part.decl.arity, blank, domain)
    return constants, unary, nary


def sample_states(
    spec: MachineSpec,
    rng: random.Random,
    count: int = 64,
    bound: int = 12,
) -> list[State]:
    """Random states over the machine's signature, respecting pinning.

    Support is kept below the given bound (clamped to a finite universe
    when there is one); at scale w roughly a third of the unary sets come
    out cofinite so the complement-heavy paths get exercised too.
    """
    if spec.kappa.is_finite:
        bound = min(bound, spec.kappa.to_int())
    cofinite_ok = not spec.kappa.is_finite
    pinned = {name: val.to_int() for name, val in spec.params.items()
              if val.is_finite}
    states = []
    for _ in range(count):
        constants: dict[str, int] = {}
        unary: dict[str, OrdinalSet] = {}
        nary: dict[str, frozenset[tuple[int, ...]]] = {}
        for decl in spec.sigma:
            if decl.distinguished == "Membership":
                continue
            if decl.kind == "Constant":
                constants[decl.name] = pinned.get(decl.name, rng.randrange(bound))
            elif decl.kind == "Relation" and decl.arity == 1:
                support = frozenset(i for i in range(bound) if rng.random() < 0.3)
                if cofinite_ok and rng.random() < 0.3:
                    unary[decl.name] = OrdinalSet.cofinite(support)
                else:
                    unary[decl.name] = OrdinalSet.finite(support)
            elif decl.kind == "Relation":
                rows = {
                    tuple(rng.randrange(bound) for _ in range(decl.arity))
                    for _ in range(rng.randrange(4))
                }
                nary[decl.name] = frozenset(rows)
            else:
                if spec.kappa.is_finite:
                    nary[decl.name] = frozenset(
                        key + (rng.randrange(bound),)
                        for key in _product_keys(bound, decl.arity)
                    )
                else:
                    nary[decl.name] = frozenset()
        states.append(State.make(spec.kappa, constants, unary, nary))
    return states


def _product_keys(bound: int, arity: int) -> Iterator[tuple[int, ...]]:
    return itertools.product(range(bound), repeat=arity)


def check_machine(
    spec: MachineSpec,
    *,
    allow_finite_kappa: bool = False,
    sample_size: int = 64,
    seed: int = 2026,
) -> ValidatedMachine:
    """Admit a machine specification or raise MachineInvalid with every defect.

    Structural checks cover the universe bound, the flavor and pinning
    discipline, and witness assembly. Semantic checks evaluate constant
    defaults for uniqueness and run the step kernel over a seeded sample
    of random states, so non-functional witnesses surface here rather
    than mid-run; the runtime repeats the same checks lazily at every
    state it actually visits.
    """
    issues: list[ValidationIssue] = []

    if spec.kappa.is_finite:
        if not allow_finite_kappa:
            issues.append(
                ValidationIssue(
                    "NonLimitKappa",
                    f"kappa = {spec.kappa} is finite; pass allow_finite_kappa "
                    "to accept a finite surrogate universe",
                )
            )
        elif spec.kappa.to_int() == 0:
            issues.append(ValidationIssue("NonLimitKappa", "empty universe"))
    elif not spec.kappa.is_limit:
        issues.append(
            ValidationIssue("NonLimitKappa", f"kappa = {spec.kappa} is a successor")
        )

    if spec.flavor not in (GSEQA, GSEQAP):
        issues.append(ValidationIssue("BadConstraint", f"unknown flavor {spec.flavor!r}"))
    if spec.params:
        if spec.flavor == GSEQA:
            issues.append(
                ValidationIssue(
                    "BadConstraint",
                    "pinned constants amount to hidden input and need the "
                    "parameterized flavor",
                )
            )
        for name, value in spec.params.items():
            if name not in spec.sigma or spec.sigma.decl(name).kind != "Constant":
                issues.append(
                    ValidationIssue(
                        "BadConstraint",
                        "only declared constants can be pinned",
                        symbol=name,
                    )
                )
            elif not value < spec.kappa:
                issues.append(
                    ValidationIssue(
                        "BadConstraint",
                        f"pinned value {value} is not below kappa = {spec.kappa}",
                        symbol=name,
                    )
                )

    tau_parts, tau_issues = _collect_tau(spec)
    default_parts, default_issues = _collect_default(spec)
    issues.extend(tau_issues)
    issues.extend(default_issues)

    domain = domain_for(spec.kappa)
    if not issues and domain is not None:
        issues.extend(_semantic_issues(spec, tau_parts, default_parts, domain,
                                       sample_size, seed))

    if issues:
        raise MachineInvalid(issues)

    phi_tau = _assemble(tau_parts, _head_tau)
    phi_default = _assemble(default_parts, _head_default)
    schema = "GSeqAP" if spec.flavor == GSEQAP else "GSeqA"
    tci = Tci(spec.kappa, schema, tuple(sorted(spec.params.items())))
    return ValidatedMachine(spec, phi_tau, phi_default, tci, tuple(tau_parts))


def _semantic_issues(
    spec: MachineSpec,
    tau_parts: list[_Part],
    default_parts: list[_Part],
    domain: EvalDomain,
    sample_size: int,
    seed: int,
) -> list[ValidationIssue]:
    issues: list[ValidationIssue] = []
    try:
        constants, _, _ = default_values(spec, default_parts)
    except D6Violation as exc:
        issues.append(
            ValidationIssue("BadConstraint", exc.detail, symbol=exc.symbol)
        )
        constants = {}
    except (Unrepresentable, ThresholdViolation, Unsupported) as exc:
        issues.append(ValidationIssue("Unrepresentable", str(exc)))
        constants = {}
    for name, value in spec.params.items():
        if name in constants and value.is_finite and constants[name] != value.to_int():
            issues.append(
                ValidationIssue(
                    "BadConstraint",
                    f"default value {constants[name]} disagrees with pin {value}",
                    symbol=name,
                )
            )

    rng = random.Random(seed)
    for state in sample_states(spec, rng, count=sample_size):
        if not models_tci(state, spec.sigma, Tci(
            spec.kappa,
            "GSeqAP" if spec.flavor == GSEQAP else "GSeqA",
            tuple(sorted(spec.params.items())) if spec.flavor == GSEQAP else (),
        )).ok:
            continue
        try:
            _step_parts(tau_parts, state, domain)
        except D6Violation as exc:
            issues.append(
                ValidationIssue(
                    "D6Violation", exc.detail, symbol=exc.symbol, state=state
                )
            )
            break
        except (Unrepresentable, ThresholdViolation, Unsupported) as exc:
            issues.append(ValidationIssue("Unrepresentable", str(exc), state=state))
            break
    return issues


# ---------------------------------------------------------------------------
# bounded-exploration diagnostic


@dataclass(frozen=True)
class BepReport:
    """Outcome of the bounded-exploration probe.

    found means a finite set of ground probes determined the per-symbol
    disagreement map on the whole sample; terms lists a smallest such
    set (empty when the map is constant). When no set of probes works,
    counterexample holds two states agreeing on every probe whose
    disagreement maps differ.
    """

    found: bool
    terms: tuple[str, ...]
    counterexample: tuple[State, State] | None
    detail: str


def _ground_terms(vm: ValidatedMachine, depth: int) -> list[tuple[str, Term]]:
    consts = [
        (d.name, Const(d.name, None))
        for d in vm.sigma
        if d.kind == "Constant"
    ]
    funcs = [d for d in vm.sigma if d.kind == "Function"]
    layers: list[list[tuple[str, Term]]] = [consts]
    for _ in range(depth - 1):
        prev = [t for layer in layers for t in layer]
        new: list[tuple[str, Term]] = []
        for f in funcs:
            for combo in itertools.product(prev, repeat=f.arity):
                label = f"{f.name}({', '.join(c[0] for c in combo)})"
                new.append((label, FuncApp(f.name, tuple(c[1] for c in combo), None)))
        if not new:
            break
        layers.append(new)
    return [t for layer in layers for t in layer]


def _term_value(state: State, term: Term) -> int | None:
    if isinstance(term, Const):
        try:
            return state.constant(term.name)
        except KeyError:
            return None
    if isinstance(term, FuncApp):
        args = tuple(_term_value(state, a) for a in term.args)
        if any(a is None for a in args):
            return None
        graph = state.tuples(term.name)
        for row in graph:
            if row[: len(args)] == args:
                return row[len(args)]
        return None
    raise GseqaError("not a ground term")


def _canon_delta(delta: dict[str, object]) -> tuple[tuple[str, object], ...]:
    return tuple(sorted(delta.items(), key=lambda kv: kv[0]))


def diagnose_bep(
    vm: ValidatedMachine,
    states: list[State],
    depth: int = 3,
) -> BepReport:
    """Search for ground probes witnessing bounded exploration on a sample.

    Probes are the values of ground terms (constants, then function
    applications nested up to the given depth) together with relation
    atoms over those terms. The report says whether states agreeing on
    all probes always showed the same state-to-successor disagreement
    map. Purely diagnostic: a negative answer on a finite sample proves
    nothing about the machine, it just exhibits the offending pair.
    """
    if not states:
        return BepReport(True, (), None, "vacuous: empty state sample")
    domain = domain_for(vm.kappa)
    if domain is None:
        raise Unsupported(f"no evaluation domain for kappa = {vm.kappa}")

    terms = _ground_terms(vm, depth)
    probes: list[tuple[str, Callable[[State], object]]] = []
    for label, term in terms:
        probes.append((label, lambda s, t=term: _term_value(s, t)))
    relations = [
        d for d in vm.sigma
        if d.kind == "Relation" and d.distinguished != "Membership"
    ]
    for decl in relations:
        for combo in itertools.product(terms, repeat=decl.arity):
            label = f"{decl.name}({', '.join(c[0] for c in combo)})"
            arg_terms = tuple(c[1] for c in combo)

            def atom(s: State, name=decl.name, ats=arg_terms) -> object:
                values = tuple(_term_value(s, t) for t in ats)
                if any(v is None for v in values):
                    return None
                if len(values) == 1:
                    return s.relation(name).member(values[0])
                return values in s.tuples(name)

            probes.append((label, atom))

    rows = []
    for s in states:
        delta = _canon_delta(state_delta(s, _step_parts(vm._tau_parts, s, domain)))
        vector = tuple(fn(s) for _, fn in probes)
        rows.append((s, vector, delta))

    groups: dict[tuple, dict] = {}
    for s, vector, delta in rows:
        groups.setdefault(vector, {}).setdefault(delta, s)
    for bucket in groups.values():
        if len(bucket) > 1:
            first, second = list(bucket.values())[:2]
            return BepReport(
                False,
                (),
                (first, second),
                "states agreeing on every ground probe disagree in their "
                "successor deltas; no witness set exists at this depth",
            )

    # A witness set exists; shrink it. Columns with identical value
    # vectors across the sample are interchangeable, so dedupe first.
    deltas = [delta for _, _, delta in rows]
    if len(set(deltas)) == 1:
        return BepReport(
            True, (), None,
            "trivially satisfied: the disagreement map is constant on the sample",
        )
    columns: dict[tuple, str] = {}
    for idx, (label, _) in enumerate(probes):
        col = tuple(vector[idx] for _, vector, _ in rows)
        columns.setdefault(col, label)
    col_items = list(columns.items())
    for size in range(1, min(len(col_items), 4) + 1):
        for subset in itertools.combinations(range(len(col_items)), size):
            ok = True
            seen: dict[tuple, tuple] = {}
            for row_idx in range(len(rows)):
                key = tuple(col_items[i][0][row_idx] for i in subset)
                if key in seen and seen[key] != deltas[row_idx]:
                    ok = False
                    break
                seen.setdefault(key, deltas[row_idx])
            if ok:
                labels = tuple(col_items[i][1] for i in subset)
                return BepReport(
                    True, labels, None,
                    f"{size} probe(s) determine the disagreement map on the sample",
                )
    labels = tuple(label for _, label in col_items)
    return BepReport(
        True, labels, None,
        "the full probe set determines the disagreement map; no small subset does",
    )
