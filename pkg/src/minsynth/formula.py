"""Temporal formulas over finite traces: parsing, normal forms, reversal, semantics.

Future-time connectives: X (next), N (weak next), U (until), R (release),
F (eventually), G (globally).  Past-time counterparts: Y, Z, S, T, O, H.
Formulas are immutable and safe to share.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator


class FormulaError(Exception):
    """Base class for formula-level failures."""


class ParseError(FormulaError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class MixedDialectError(FormulaError):
    pass


class EmptyTraceError(FormulaError):
    pass


class UnknownPropositionError(FormulaError):
    pass


class NotInNnfError(FormulaError):
    pass


IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
UNARY_OPS = {"X", "N", "F", "G", "Y", "Z", "O", "H"}
BINARY_OPS = {"U", "R", "S", "T"}
KEYWORDS = {"true", "false"} | UNARY_OPS | BINARY_OPS


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)

    @property
    def dialect(self) -> str:
        return dialect_of(self)


@dataclass(frozen=True, slots=True)
class TrueFormula(Formula):
    pass


@dataclass(frozen=True, slots=True)
class FalseFormula(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Next(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class WeakNext(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Release(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Eventually(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class Globally(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class Yesterday(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class WeakYesterday(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class Since(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Trigger(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Once(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class Historically(Formula):
    sub: Formula


TRUE = TrueFormula()
FALSE = FalseFormula()

FUTURE_NODES = (Next, WeakNext, Until, Release, Eventually, Globally)
PAST_NODES = (Yesterday, WeakYesterday, Since, Trigger, Once, Historically)
UNARY_NODES = (Not, Next, WeakNext, Eventually, Globally,
               Yesterday, WeakYesterday, Once, Historically)
BINARY_NODES = (And, Or, Implies, Iff, Until, Release, Since, Trigger)

_UNARY_BY_OP = {
    "X": Next, "N": WeakNext, "F": Eventually, "G": Globally,
    "Y": Yesterday, "Z": WeakYesterday, "O": Once, "H": Historically,
}
_BINARY_BY_OP = {"U": Until, "R": Release, "S": Since, "T": Trigger}
_OP_BY_NODE = {v: k for k, v in _UNARY_BY_OP.items()}
_OP_BY_NODE.update({v: k for k, v in _BINARY_BY_OP.items()})

_REVERSAL = {
    Next: Yesterday, Yesterday: Next,
    WeakNext: WeakYesterday, WeakYesterday: WeakNext,
    Until: Since, Since: Until,
    Release: Trigger, Trigger: Release,
    Eventually: Once, Once: Eventually,
    Globally: Historically, Historically: Globally,
}


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, BINARY_NODES):
        return (f.left, f.right)
    if isinstance(f, UNARY_NODES):
        return (f.sub,)
    return ()


def rebuild(f: Formula, subs: tuple[Formula, ...]) -> Formula:
    cls = type(f)
    if isinstance(f, BINARY_NODES):
        return cls(subs[0], subs[1])
    if isinstance(f, UNARY_NODES):
        return cls(subs[0])
    return f


def postorder(f: Formula) -> list[Formula]:
    """Unique subformulas of f, children before parents."""
    seen: dict[Formula, None] = {}

    def walk(g: Formula) -> None:
        if g in seen:
            return
        for c in children(g):
            walk(c)
        seen[g] = None

    walk(f)
    return list(seen)


def atoms(f: Formula) -> list[str]:
    """Sorted proposition names occurring in f."""
    return sorted({g.name for g in postorder(f) if isinstance(g, Atom)})


def connective_count(f: Formula) -> int:
    return sum(1 for g in postorder(f)
               if not isinstance(g, (Atom, TrueFormula, FalseFormula)))


def dialect_of(f: Formula) -> str:
    has_future = any(isinstance(g, FUTURE_NODES) for g in postorder(f))
    has_past = any(isinstance(g, PAST_NODES) for g in postorder(f))
    if has_future and has_past:
        raise MixedDialectError(
            "formula mixes future and past temporal connectives")
    if has_future:
        return "future"
    if has_past:
        return "past"
    return "propositional"


# ---------------------------------------------------------------------------
# Printing.  Precedence: <-> lowest, then ->, |, &, binary temporal, unary.
# -> , <-> and the binary temporal operators associate to the right.

_PREC_IFF, _PREC_IMPL, _PREC_OR, _PREC_AND, _PREC_TEMP, _PREC_UNARY = 1, 2, 3, 4, 5, 6


def _prec(f: Formula) -> int:
    if isinstance(f, Iff):
        return _PREC_IFF
    if isinstance(f, Implies):
        return _PREC_IMPL
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    if isinstance(f, (Until, Release, Since, Trigger)):
        return _PREC_TEMP
    if isinstance(f, UNARY_NODES):
        return _PREC_UNARY
    return 7


def to_text(f: Formula) -> str:
    if isinstance(f, TrueFormula):
        return "true"
    if isinstance(f, FalseFormula):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "!" + _wrap(f.sub, _PREC_UNARY)
    if isinstance(f, UNARY_NODES):
        return _OP_BY_NODE[type(f)] + " " + _wrap(f.sub, _PREC_UNARY)
    me = _prec(f)
    if isinstance(f, (And, Or)):
        op = "&" if isinstance(f, And) else "|"
        return f"{_wrap(f.left, me)} {op} {_wrap(f.right, me + 1)}"
    op = {"Implies": "->", "Iff": "<->"}.get(type(f).__name__) \
        or _OP_BY_NODE[type(f)]
    return f"{_wrap(f.left, me + 1)} {op} {_wrap(f.right, me)}"


def _wrap(f: Formula, minimum: int) -> str:
    text = to_text(f)
    return text if _prec(f) >= minimum else f"({text})"


# ---------------------------------------------------------------------------
# Parsing.

class _Tok:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind, self.text, self.pos = kind, text, pos


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "()!&|":
            kind = {"(": "lpar", ")": "rpar", "!": "not",
                    "&": "and", "|": "or"}[c]
            toks.append(_Tok(kind, c, i))
            i += 1
            continue
        if text.startswith("<->", i):
            toks.append(_Tok("iff", "<->", i))
            i += 3
            continue
        if text.startswith("->", i):
            toks.append(_Tok("impl", "->", i))
            i += 2
            continue
        m = IDENT_RE.match(text, i)
        if m:
            word = m.group(0)
            if word in ("true", "false"):
                toks.append(_Tok("const", word, i))
            elif word in UNARY_OPS:
                toks.append(_Tok("unop", word, i))
            elif word in BINARY_OPS:
                toks.append(_Tok("binop", word, i))
            else:
                toks.append(_Tok("name", word, i))
            i = m.end()
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    toks.append(_Tok("end", "", n))
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def parse(self) -> Formula:
        f = self.iff()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected token {t.text!r}", t.pos)
        return f

    def iff(self) -> Formula:
        left = self.impl()
        if self.peek().kind == "iff":
            self.take()
            return Iff(left, self.iff())
        return left

    def impl(self) -> Formula:
        left = self.disj()
        if self.peek().kind == "impl":
            self.take()
            return Implies(left, self.impl())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek().kind == "or":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.temp()
        while self.peek().kind == "and":
            self.take()
            left = And(left, self.temp())
        return left

    def temp(self) -> Formula:
        left = self.unary()
        if self.peek().kind == "binop":
            op = self.take()
            return _BINARY_BY_OP[op.text](left, self.temp())
        return left

    def unary(self) -> Formula:
        t = self.peek()
        if t.kind == "not":
            self.take()
            return Not(self.unary())
        if t.kind == "unop":
            self.take()
            return _UNARY_BY_OP[t.text](self.unary())
        return self.primary()

    def primary(self) -> Formula:
        t = self.take()
        if t.kind == "const":
            return TRUE if t.text == "true" else FALSE
        if t.kind == "name":
            return Atom(t.text)
        if t.kind == "lpar":
            f = self.iff()
            closing = self.take()
            if closing.kind != "rpar":
                raise ParseError("expected ')'", closing.pos)
            return f
        raise ParseError(
            f"expected formula, found {t.text!r}" if t.text
            else "expected formula, found end of input", t.pos)


def parse_formula(text: str, dialect: str = "auto") -> Formula:
    """Parse a formula; dialect is one of future, past, auto."""
    if not text.strip():
        raise ParseError("empty formula", 0)
    if dialect not in ("future", "past", "auto"):
        raise ValueError(f"unknown dialect {dialect!r}")
    f = _Parser(_tokenize(text)).parse()
    d = dialect_of(f)  # raises on mixed connectives
    if dialect != "auto" and d not in (dialect, "propositional"):
        raise MixedDialectError(
            f"expected {dialect} formula, found {d} connectives")
    return f


# ---------------------------------------------------------------------------
# Traces.

@dataclass(frozen=True)
class Trace:
    """Finite sequence of assignments over a fixed proposition set."""

    props: tuple[str, ...]
    steps: tuple[frozenset[str], ...]

    def __post_init__(self):
        universe = set(self.props)
        for step in self.steps:
            extra = step - universe
            if extra:
                raise UnknownPropositionError(
                    f"step mentions unknown propositions {sorted(extra)}")

    @staticmethod
    def make(props, steps) -> "Trace":
        return Trace(tuple(props), tuple(frozenset(s) for s in steps))

    def reverse(self) -> "Trace":
        return Trace(self.props, self.steps[::-1])

    def __len__(self) -> int:
        return len(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    def __iter__(self) -> Iterator[frozenset[str]]:
        return iter(self.steps)


def evaluate(f: Formula, trace: Trace, dialect: str | None = None) -> bool:
    """Truth of f on a nonempty trace.

    Future formulas are evaluated at position 0, past formulas at the last
    position.  Propositional formulas follow the future convention unless
    dialect="past" is passed explicitly.
    """
    n = len(trace)
    if n == 0:
        raise EmptyTraceError("cannot evaluate on the empty trace")
    own = dialect_of(f)
    if dialect is None:
        dialect = own if own != "propositional" else "future"
    elif own != "propositional" and own != dialect:
        raise MixedDialectError(
            f"cannot evaluate {own} formula with {dialect} semantics")
    missing = set(atoms(f)) - set(trace.props)
    if missing:
        raise UnknownPropositionError(
            f"formula mentions propositions outside the trace: {sorted(missing)}")
    subs = postorder(f)
    val: dict[Formula, list[bool]] = {g: [False] * n for g in subs}
    positions = range(n - 1, -1, -1) if dialect == "future" else range(n)
    for i in positions:
        step = trace[i]
        for g in subs:
            val[g][i] = _step_value(g, val, i, n, step)
    return val[f][0] if dialect == "future" else val[f][n - 1]


def _step_value(g, val, i, n, step):
    if isinstance(g, TrueFormula):
        return True
    if isinstance(g, FalseFormula):
        return False
    if isinstance(g, Atom):
        return g.name in step
    if isinstance(g, Not):
        return not val[g.sub][i]
    if isinstance(g, And):
        return val[g.left][i] and val[g.right][i]
    if isinstance(g, Or):
        return val[g.left][i] or val[g.right][i]
    if isinstance(g, Implies):
        return (not val[g.left][i]) or val[g.right][i]
    if isinstance(g, Iff):
        return val[g.left][i] == val[g.right][i]
    if isinstance(g, Next):
        return i + 1 < n and val[g.sub][i + 1]
    if isinstance(g, WeakNext):
        return i + 1 >= n or val[g.sub][i + 1]
    if isinstance(g, Until):
        return val[g.right][i] or (val[g.left][i]
                                   and i + 1 < n and val[g][i + 1])
    if isinstance(g, Release):
        return val[g.right][i] and (val[g.left][i]
                                    or i + 1 >= n or val[g][i + 1])
    if isinstance(g, Eventually):
        return val[g.sub][i] or (i + 1 < n and val[g][i + 1])
    if isinstance(g, Globally):
        return val[g.sub][i] and (i + 1 >= n or val[g][i + 1])
    if isinstance(g, Yesterday):
        return i > 0 and val[g.sub][i - 1]
    if isinstance(g, WeakYesterday):
        return i == 0 or val[g.sub][i - 1]
    if isinstance(g, Since):
        return val[g.right][i] or (val[g.left][i] and i > 0 and val[g][i - 1])
    if isinstance(g, Trigger):
        return val[g.right][i] and (val[g.left][i] or i == 0 or val[g][i - 1])
    if isinstance(g, Once):
        return val[g.sub][i] or (i > 0 and val[g][i - 1])
    if isinstance(g, Historically):
        return val[g.sub][i] and (i == 0 or val[g][i - 1])
    raise FormulaError(f"cannot evaluate node {type(g).__name__}")


# ---------------------------------------------------------------------------
# Normal forms and reversal.

def negation_normal_form(f: Formula) -> Formula:
    """Push negations down to atoms; eliminates -> and <->."""
    if dialect_of(f) == "past":
        raise MixedDialectError("negation normal form is defined for "
                                "future-dialect formulas")
    return _nnf(f, False)


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, TrueFormula):
        return FALSE if neg else TRUE
    if isinstance(f, FalseFormula):
        return TRUE if neg else FALSE
    if isinstance(f, Atom):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return _nnf(f.sub, not neg)
    if isinstance(f, And):
        cls = Or if neg else And
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Or):
        cls = And if neg else Or
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Implies):
        return _nnf(Or(Not(f.left), f.right), neg)
    if isinstance(f, Iff):
        return _nnf(Or(And(f.left, f.right),
                       And(Not(f.left), Not(f.right))), neg)
    if isinstance(f, Next):
        return WeakNext(_nnf(f.sub, True)) if neg else Next(_nnf(f.sub, False))
    if isinstance(f, WeakNext):
        return Next(_nnf(f.sub, True)) if neg else WeakNext(_nnf(f.sub, False))
    if isinstance(f, Until):
        cls = Release if neg else Until
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Release):
        cls = Until if neg else Release
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Eventually):
        return Globally(_nnf(f.sub, True)) if neg \
            else Eventually(_nnf(f.sub, False))
    if isinstance(f, Globally):
        return Eventually(_nnf(f.sub, True)) if neg \
            else Globally(_nnf(f.sub, False))
    raise FormulaError(f"cannot normalize node {type(f).__name__}")


def reverse_connectives(f: Formula) -> Formula:
    """Swap every temporal connective with its mirror-time counterpart.

    Future formulas become past formulas and vice versa.  Applying the map
    twice returns a structurally equal formula.
    """
    dialect_of(f)  # reject mixed input
    cls = _REVERSAL.get(type(f))
    subs = tuple(reverse_connectives(c) for c in children(f))
    if cls is not None:
        return cls(*subs)
    return rebuild(f, subs)


def expand_eventualities(f: Formula) -> Formula:
    """Rewrite F into true-U and G into false-R throughout."""
    subs = tuple(expand_eventualities(c) for c in children(f))
    f = rebuild(f, subs)
    if isinstance(f, Eventually):
        return Until(TRUE, f.sub)
    if isinstance(f, Globally):
        return Release(FALSE, f.sub)
    return f


_NNF_OK = (TrueFormula, FalseFormula, Atom, And, Or, Next, WeakNext,
           Until, Release, Eventually, Globally)


def xnf_expand(f: Formula) -> Formula:
    """One-step unfolding of an NNF future formula.

    The result is a Boolean combination whose leaves are literals over the
    propositions plus atomic next-step obligations (Next and WeakNext nodes,
    left unexpanded).  F and G are unfolded through their U / R forms.
    """
    if isinstance(f, Not):
        if not isinstance(f.sub, Atom):
            raise NotInNnfError(f"negation above {type(f.sub).__name__}")
        return f
    if not isinstance(f, _NNF_OK):
        raise NotInNnfError(f"{type(f).__name__} is not allowed in NNF")
    if isinstance(f, (TrueFormula, FalseFormula, Atom)):
        return f
    if isinstance(f, And):
        return And(xnf_expand(f.left), xnf_expand(f.right))
    if isinstance(f, Or):
        return Or(xnf_expand(f.left), xnf_expand(f.right))
    if isinstance(f, (Next, WeakNext)):
        return f
    if isinstance(f, Until):
        return Or(xnf_expand(f.right), And(xnf_expand(f.left), Next(f)))
    if isinstance(f, Release):
        return And(xnf_expand(f.right), Or(xnf_expand(f.left), WeakNext(f)))
    if isinstance(f, Eventually):
        return xnf_expand(Until(TRUE, f.sub))
    return xnf_expand(Release(FALSE, f.sub))
