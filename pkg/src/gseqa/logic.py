"""First-order formulas over machine signatures.

The abstract syntax keeps the derived connectives (or, implies, iff,
forall) as explicit nodes so that parsing and printing round-trip; the
evaluators treat every node directly.

Concrete syntax, lowest precedence first:

    formula  := 'forall' VAR '.' formula | 'exists' VAR '.' formula | iff
    iff      := imp ('<->' imp)*
    imp      := or ('->' imp)?                 (right associative)
    or       := and ('|' and)*
    and      := unary ('&' unary)*
    unary    := '~' unary | atom
    atom     := '(' formula ')' | 'true' | 'false'
              | REL['@'COPY] '(' terms ')' | 'in' '(' term ',' term ')'
              | term '=' term | term '<' term
    term     := NUMBER | 'w' | VAR | SYM['@'COPY] [ '(' terms ')' ]

`x < y` and `in(x, y)` are the same membership atom (ordinals are the
sets of their predecessors); it prints in infix form. In doubled mode
every non-membership symbol reference must carry a copy suffix `@0` or
`@1`; membership is shared between the copies and never takes one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import ArityMismatch, ParseError, Unsupported
from .ordinals import OMEGA, OrdinalNotation

__all__ = [
    "SymbolDecl",
    "Signature",
    "MEMBERSHIP",
    "Var",
    "Const",
    "FuncApp",
    "OrdinalLiteral",
    "Term",
    "Apply",
    "Equal",
    "Not",
    "And",
    "Or",
    "Implies",
    "Iff",
    "Exists",
    "Forall",
    "Truth",
    "Formula",
    "BinaryFormula",
    "parse_formula",
    "format_formula",
    "free_vars",
    "substitute",
    "quantifier_rank",
    "support_constants",
    "ordinal_literals",
    "symbol_refs",
    "with_copy",
    "is_binary",
    "v",
    "lit",
    "cst",
    "rel",
    "lt",
    "eq",
    "land",
    "lor",
    "lnot",
    "limp",
    "liff",
    "ex",
    "fa",
    "TRUE",
    "FALSE",
]

MEMBERSHIP = "in"

_RESERVED = {"forall", "exists", "in", "true", "false", "w"}


@dataclass(frozen=True)
class SymbolDecl:
    """One signature entry.

    kind is "Relation", "Function", or "Constant"; arity is 0 for
    constants. distinguished marks the three special symbols
    ("Membership", "In", "Out") and is "None" otherwise.
    """

    name: str
    kind: str
    arity: int = 0
    distinguished: str = "None"

    def __post_init__(self) -> None:
        if self.kind not in ("Relation", "Function", "Constant"):
            raise ValueError(f"bad symbol kind {self.kind!r}")
        if self.kind == "Constant" and self.arity != 0:
            raise ValueError("constants have arity 0")
        if self.kind != "Constant" and self.arity < 1:
            raise ValueError(f"{self.name}: relations and functions need arity >= 1")
        if self.distinguished not in ("Membership", "In", "Out", "None"):
            raise ValueError(f"bad distinguished tag {self.distinguished!r}")


class Signature:
    """A finite signature containing the membership, In, and Out symbols."""

    def __init__(self, decls: Iterable[SymbolDecl] = ()):
        self._decls: dict[str, SymbolDecl] = {}
        for d in (
            SymbolDecl(MEMBERSHIP, "Relation", 2, "Membership"),
            SymbolDecl("In", "Relation", 1, "In"),
            SymbolDecl("Out", "Relation", 1, "Out"),
        ):
            self._decls[d.name] = d
        for d in decls:
            if d.distinguished != "None" or d.name in self._decls:
                existing = self._decls.get(d.name)
                if existing == d:
                    continue
                raise ValueError(f"cannot redeclare {d.name!r}")
            if d.name in _RESERVED:
                raise ValueError(f"{d.name!r} is reserved")
            self._decls[d.name] = d

    def __contains__(self, name: str) -> bool:
        return name in self._decls

    def __iter__(self) -> Iterator[SymbolDecl]:
        return iter(self._decls.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Signature):
            return NotImplemented
        return self._decls == other._decls

    def decl(self, name: str) -> SymbolDecl:
        try:
            return self._decls[name]
        except KeyError:
            raise KeyError(f"symbol {name!r} not in signature") from None

    def names(self) -> list[str]:
        return list(self._decls)

    def extras(self) -> list[SymbolDecl]:
        """Declarations beyond the three distinguished symbols."""
        return [d for d in self._decls.values() if d.distinguished == "None"]

    def doubled_symbols(self) -> list[SymbolDecl]:
        """Everything except membership: the part that exists in two copies."""
        return [d for d in self._decls.values() if d.distinguished != "Membership"]

    def defaulted_symbols(self) -> list[SymbolDecl]:
        """Symbols needing a default value: everything but membership, In, Out."""
        return [d for d in self._decls.values() if d.distinguished == "None"]

    def extend(self, decls: Iterable[SymbolDecl]) -> "Signature":
        return Signature(self.extras() + list(decls))

    def __repr__(self) -> str:
        extras = ", ".join(f"{d.name}/{d.kind[0]}{d.arity}" for d in self.extras())
        return f"Signature(in, In, Out{', ' + extras if extras else ''})"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str
    copy: int | None = None


@dataclass(frozen=True)
class FuncApp:
    name: str
    args: tuple["Term", ...]
    copy: int | None = None


@dataclass(frozen=True)
class OrdinalLiteral:
    value: OrdinalNotation

    def __post_init__(self) -> None:
        if isinstance(self.value, int):
            object.__setattr__(self, "value", OrdinalNotation.from_int(self.value))


Term = Union[Var, Const, FuncApp, OrdinalLiteral]


@dataclass(frozen=True)
class Apply:
    """Relation application; membership atoms use the 'in' symbol, copy None."""

    name: str
    args: tuple[Term, ...]
    copy: int | None = None


@dataclass(frozen=True)
class Equal:
    left: Term
    right: Term


@dataclass(frozen=True)
class Truth:
    value: bool


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Apply, Equal, Truth, Not, And, Or, Implies, Iff, Exists, Forall]

# A binary formula is an ordinary Formula in which every non-membership
# symbol reference carries a copy index; see is_binary.
BinaryFormula = Formula


# ---------------------------------------------------------------------------
# small construction helpers, used heavily by the transformations


def v(name: str) -> Var:
    return Var(name)


def lit(n: "int | OrdinalNotation") -> OrdinalLiteral:
    return OrdinalLiteral(OrdinalNotation.from_int(n) if isinstance(n, int) else n)


def cst(name: str, copy: int | None = None) -> Const:
    return Const(name, copy)


def rel(name: str, *args: Term, copy: int | None = None) -> Apply:
    return Apply(name, tuple(args), copy)


def lt(a: Term, b: Term) -> Apply:
    return Apply(MEMBERSHIP, (a, b), None)


def eq(a: Term, b: Term) -> Equal:
    return Equal(a, b)


TRUE = Truth(True)
FALSE = Truth(False)


def land(*fs: Formula) -> Formula:
    fs = tuple(f for f in fs if f != TRUE)
    if not fs:
        return TRUE
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def lor(*fs: Formula) -> Formula:
    fs = tuple(f for f in fs if f != FALSE)
    if not fs:
        return FALSE
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


def lnot(f: Formula) -> Formula:
    return Not(f)


def limp(a: Formula, b: Formula) -> Formula:
    return Implies(a, b)


def liff(a: Formula, b: Formula) -> Formula:
    return Iff(a, b)


def ex(var: str, body: Formula) -> Formula:
    return Exists(var, body)


def fa(var: str, body: Formula) -> Formula:
    return Forall(var, body)


# ---------------------------------------------------------------------------
# measures and traversals


def _term_vars(t: Term) -> Iterator[str]:
    if isinstance(t, Var):
        yield t.name
    elif isinstance(t, FuncApp):
        for a in t.args:
            yield from _term_vars(a)


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Apply):
        return frozenset(x for t in f.args for x in _term_vars(t))
    if isinstance(f, Equal):
        return frozenset(_term_vars(f.left)) | frozenset(_term_vars(f.right))
    if isinstance(f, Truth):
        return frozenset()
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def quantifier_rank(f: Formula) -> int:
    if isinstance(f, (Apply, Equal, Truth)):
        return 0
    if isinstance(f, Not):
        return quantifier_rank(f.body)
    if isinstance(f, (And, Or, Implies, Iff)):
        return max(quantifier_rank(f.left), quantifier_rank(f.right))
    if isinstance(f, (Exists, Forall)):
        return 1 + quantifier_rank(f.body)
    raise TypeError(f"not a formula: {f!r}")


def _term_refs(t: Term) -> Iterator[tuple[str, int | None]]:
    if isinstance(t, Const):
        yield (t.name, t.copy)
    elif isinstance(t, FuncApp):
        yield (t.name, t.copy)
        for a in t.args:
            yield from _term_refs(a)


def symbol_refs(f: Formula) -> Iterator[tuple[str, int | None]]:
    """Every (symbol, copy) reference in the formula, membership included."""
    if isinstance(f, Apply):
        yield (f.name, f.copy)
        for t in f.args:
            yield from _term_refs(t)
    elif isinstance(f, Equal):
        yield from _term_refs(f.left)
        yield from _term_refs(f.right)
    elif isinstance(f, Truth):
        return
    elif isinstance(f, Not):
        yield from symbol_refs(f.body)
    elif isinstance(f, (And, Or, Implies, Iff)):
        yield from symbol_refs(f.left)
        yield from symbol_refs(f.right)
    elif isinstance(f, (Exists, Forall)):
        yield from symbol_refs(f.body)
    else:
        raise TypeError(f"not a formula: {f!r}")


def support_constants(f: Formula) -> frozenset[tuple[str, int | None]]:
    """The constant symbols referenced by the formula."""
    out = set()
    for name, copy in symbol_refs(f):
        out.add((name, copy))
    return frozenset((n, c) for n, c in out if n != MEMBERSHIP)


def ordinal_literals(f: Formula) -> frozenset[OrdinalNotation]:
    found: set[OrdinalNotation] = set()

    def walk_term(t: Term) -> None:
        if isinstance(t, OrdinalLiteral):
            found.add(t.value)
        elif isinstance(t, FuncApp):
            for a in t.args:
                walk_term(a)

    def walk(g: Formula) -> None:
        if isinstance(g, Apply):
            for t in g.args:
                walk_term(t)
        elif isinstance(g, Equal):
            walk_term(g.left)
            walk_term(g.right)
        elif isinstance(g, Truth):
            pass
        elif isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, (And, Or, Implies, Iff)):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, (Exists, Forall)):
            walk(g.body)

    walk(f)
    return frozenset(found)


def _subst_term(t: Term, env: dict[str, Term]) -> Term:
    if isinstance(t, Var):
        return env.get(t.name, t)
    if isinstance(t, FuncApp):
        return FuncApp(t.name, tuple(_subst_term(a, env) for a in t.args), t.copy)
    return t


def substitute(f: Formula, env: dict[str, Term]) -> Formula:
    """Capture-checked substitution of terms for free variables.

    The replacement terms used here are always variable-free (constants,
    literals), so instead of renaming bound variables this raises
    Unsupported if a substitution would capture.
    """
    if isinstance(f, Apply):
        return Apply(f.name, tuple(_subst_term(t, env) for t in f.args), f.copy)
    if isinstance(f, Equal):
        return Equal(_subst_term(f.left, env), _subst_term(f.right, env))
    if isinstance(f, Truth):
        return f
    if isinstance(f, Not):
        return Not(substitute(f.body, env))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(substitute(f.left, env), substitute(f.right, env))
    if isinstance(f, (Exists, Forall)):
        inner = {k: t for k, t in env.items() if k != f.var}
        for t in inner.values():
            if f.var in _term_vars(t):
                raise Unsupported(f"substitution would capture {f.var!r}")
        return type(f)(f.var, substitute(f.body, inner))
    raise TypeError(f"not a formula: {f!r}")


def with_copy(f: Formula, copy: int) -> BinaryFormula:
    """Stamp every bare non-membership symbol reference with a copy index."""

    def on_term(t: Term) -> Term:
        if isinstance(t, Const):
            return Const(t.name, t.copy if t.copy is not None else copy)
        if isinstance(t, FuncApp):
            c = t.copy if t.copy is not None else copy
            return FuncApp(t.name, tuple(on_term(a) for a in t.args), c)
        return t

    if isinstance(f, Apply):
        c = f.copy
        if f.name != MEMBERSHIP and c is None:
            c = copy
        return Apply(f.name, tuple(on_term(t) for t in f.args), c)
    if isinstance(f, Equal):
        return Equal(on_term(f.left), on_term(f.right))
    if isinstance(f, Truth):
        return f
    if isinstance(f, Not):
        return Not(with_copy(f.body, copy))
    if isinstance(f, (And, Or, Implies, Iff)):
        return type(f)(with_copy(f.left, copy), with_copy(f.right, copy))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, with_copy(f.body, copy))
    raise TypeError(f"not a formula: {f!r}")


def is_binary(f: Formula) -> bool:
    """True when every non-membership symbol reference carries a copy index."""
    return all(copy is not None for name, copy in symbol_refs(f) if name != MEMBERSHIP)


# ---------------------------------------------------------------------------
# parsing


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow><->|->)|(?P<op>[()~&|=<,.@])|(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos:].strip()[0]!r} at {pos}")
            break
        if m.group("arrow"):
            tokens.append(("arrow", m.group("arrow"), m.start()))
        elif m.group("op"):
            tokens.append(("op", m.group("op"), m.start()))
        elif m.group("num"):
            tokens.append(("num", m.group("num"), m.start()))
        else:
            tokens.append(("ident", m.group("ident"), m.start()))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, sigma: Signature, doubled: bool):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.sigma = sigma
        self.doubled = doubled
        self.bound: list[str] = []

    def error(self, msg: str) -> ParseError:
        where = self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)
        return ParseError(f"{msg} at position {where} in {self.text!r}")

    def peek(self) -> tuple[str, str] | None:
        if self.i < len(self.tokens):
            kind, val, _ = self.tokens[self.i]
            return kind, val
        return None

    def take(self) -> tuple[str, str]:
        if self.i >= len(self.tokens):
            raise self.error("unexpected end of input")
        kind, val, _ = self.tokens[self.i]
        self.i += 1
        return kind, val

    def expect(self, value: str) -> None:
        tok = self.peek()
        if tok is None or tok[1] != value:
            raise self.error(f"expected {value!r}")
        self.i += 1

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[1] == value

    # precedence chain -----------------------------------------------------

    def formula(self) -> Formula:
        tok = self.peek()
        if tok and tok[0] == "ident" and tok[1] in ("forall", "exists"):
            return self.quantified()
        return self.iff_level()

    def quantified(self) -> Formula:
        _, quant = self.take()
        kind, name = self.take()
        if kind != "ident" or name in _RESERVED:
            raise self.error("expected a variable name after quantifier")
        if name in self.sigma:
            raise self.error(f"variable {name!r} shadows a signature symbol")
        self.expect(".")
        self.bound.append(name)
        body = self.formula()
        self.bound.pop()
        return Forall(name, body) if quant == "forall" else Exists(name, body)

    def iff_level(self) -> Formula:
        f = self.imp_level()
        while self.at("<->"):
            self.take()
            f = Iff(f, self.imp_level())
        return f

    def imp_level(self) -> Formula:
        f = self.or_level()
        if self.at("->"):
            self.take()
            return Implies(f, self.imp_level())
        return f

    def or_level(self) -> Formula:
        f = self.and_level()
        while self.at("|"):
            self.take()
            f = Or(f, self.and_level())
        return f

    def and_level(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        if self.at("~"):
            self.take()
            return Not(self.unary())
        tok = self.peek()
        if tok and tok[0] == "ident" and tok[1] in ("forall", "exists"):
            return self.quantified()
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise self.error("expected a formula")
        kind, val = tok
        if val == "(":
            self.take()
            f = self.formula()
            self.expect(")")
            return f
        if kind == "ident" and val == "true":
            self.take()
            return TRUE
        if kind == "ident" and val == "false":
            self.take()
            return FALSE
        if kind == "ident" and val == MEMBERSHIP:
            self.take()
            self.expect("(")
            a = self.term()
            self.expect(",")
            b = self.term()
            self.expect(")")
            return Apply(MEMBERSHIP, (a, b), None)
        if kind == "ident" and val in self.sigma and self.sigma.decl(val).kind == "Relation":
            return self.relation_atom()
        left = self.term()
        nxt = self.peek()
        if nxt and nxt[1] == "=":
            self.take()
            return Equal(left, self.term())
        if nxt and nxt[1] == "<":
            self.take()
            return Apply(MEMBERSHIP, (left, self.term()), None)
        raise self.error("expected '=' or '<' after term")

    def relation_atom(self) -> Formula:
        _, name = self.take()
        copy = self.copy_suffix(name)
        decl = self.sigma.decl(name)
        self.expect("(")
        args = [self.term()]
        while self.at(","):
            self.take()
            args.append(self.term())
        self.expect(")")
        if len(args) != decl.arity:
            raise ArityMismatch(f"{name} expects {decl.arity} arguments, got {len(args)}")
        return Apply(name, tuple(args), copy)

    def copy_suffix(self, name: str) -> int | None:
        if self.at("@"):
            self.take()
            kind, val = self.take()
            if kind != "num" or val not in ("0", "1"):
                raise self.error("copy index must be 0 or 1")
            return int(val)
        if self.doubled:
            raise self.error(f"symbol {name!r} needs a copy index in doubled mode")
        return None

    def term(self) -> Term:
        kind, val = self.take()
        if kind == "num":
            return OrdinalLiteral(OrdinalNotation.from_int(int(val)))
        if kind != "ident":
            raise self.error(f"expected a term, got {val!r}")
        if val == "w":
            return OrdinalLiteral(OMEGA)
        if val in ("true", "false", "forall", "exists", MEMBERSHIP):
            raise self.error(f"{val!r} cannot appear in a term")
        if val in self.sigma:
            decl = self.sigma.decl(val)
            copy = self.copy_suffix(val)
            if decl.kind == "Constant":
                return Const(val, copy)
            if decl.kind == "Function":
                self.expect("(")
                args = [self.term()]
                while self.at(","):
                    self.take()
                    args.append(self.term())
                self.expect(")")
                if len(args) != decl.arity:
                    raise ArityMismatch(
                        f"{val} expects {decl.arity} arguments, got {len(args)}"
                    )
                return FuncApp(val, tuple(args), copy)
            raise self.error(f"relation {val!r} used as a term")
        return Var(val)


def parse_formula(text: str, sigma: Signature, doubled: bool = False) -> Formula:
    """Parse concrete syntax against a signature.

    With doubled=True every non-membership symbol reference must carry an
    explicit copy suffix and the result is a binary formula over the
    doubled signature.
    """
    p = _Parser(text, sigma, doubled)
    f = p.formula()
    if p.i != len(p.tokens):
        raise p.error("trailing input")
    return f


# ---------------------------------------------------------------------------
# printing


_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}


def _fmt_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return t.name if t.copy is None else f"{t.name}@{t.copy}"
    if isinstance(t, OrdinalLiteral):
        return str(t.value)
    if isinstance(t, FuncApp):
        head = t.name if t.copy is None else f"{t.name}@{t.copy}"
        return f"{head}({', '.join(_fmt_term(a) for a in t.args)})"
    raise TypeError(f"not a term: {t!r}")


def _fmt(f: Formula, parent: int) -> str:
    if isinstance(f, Truth):
        return "true" if f.value else "false"
    if isinstance(f, Apply):
        if f.name == MEMBERSHIP:
            return f"{_fmt_term(f.args[0])} < {_fmt_term(f.args[1])}"
        head = f.name if f.copy is None else f"{f.name}@{f.copy}"
        return f"{head}({', '.join(_fmt_term(a) for a in f.args)})"
    if isinstance(f, Equal):
        return f"{_fmt_term(f.left)} = {_fmt_term(f.right)}"
    if isinstance(f, Not):
        return f"~{_fmt(f.body, 5)}"
    if isinstance(f, (Exists, Forall)):
        quant = "exists" if isinstance(f, Exists) else "forall"
        text = f"{quant} {f.var}. ({_fmt(f.body, 0)})"
        # a bare quantifier body would swallow anything printed after it
        return f"({text})" if parent > 0 else text
    if isinstance(f, (And, Or, Implies, Iff)):
        op = {And: "&", Or: "|", Implies: "->", Iff: "<->"}[type(f)]
        prec = _PREC[type(f)]
        if isinstance(f, Implies):
            left, right = _fmt(f.left, prec + 1), _fmt(f.right, prec)
        else:
            left, right = _fmt(f.left, prec), _fmt(f.right, prec + 1)
        body = f"{left} {op} {right}"
        return f"({body})" if prec < parent else body
    raise TypeError(f"not a formula: {f!r}")


def format_formula(f: Formula) -> str:
    return _fmt(f, 0)
