import random

import pytest

from minsynth import formula as fm
from minsynth.formula import (
    And, Atom, EmptyTraceError, Eventually, Globally, Iff, Implies,
    MixedDialectError, Next, Not, NotInNnfError, Or, ParseError, Release,
    Since, Trace, TrueFormula, UnknownPropositionError, Until, WeakNext,
    Yesterday, evaluate, negation_normal_form, parse_formula,
    reverse_connectives, xnf_expand,
)

from util import all_traces


def trace(props, *steps):
    return Trace.make(props, steps)


class TestParsing:
    def test_eventually(self):
        assert parse_formula("F a") == Eventually(Atom("a"))
        assert parse_formula("F a").dialect == "future"

    def test_past(self):
        f = parse_formula("Y(a S b)")
        assert f == Yesterday(Since(Atom("a"), Atom("b")))
        assert f.dialect == "past"

    def test_incomplete_binary(self):
        with pytest.raises(ParseError) as err:
            parse_formula("a U")
        assert err.value.position == 3

    def test_empty(self):
        with pytest.raises(ParseError):
            parse_formula("   ")

    def test_mixed_dialect(self):
        with pytest.raises(MixedDialectError):
            parse_formula("X a & Y b")

    def test_requested_dialect_mismatch(self):
        with pytest.raises(MixedDialectError):
            parse_formula("Y a", dialect="future")
        # propositional text satisfies either request
        assert parse_formula("a & b", dialect="past") == And(Atom("a"), Atom("b"))

    def test_precedence(self):
        assert parse_formula("!a & b | c") == \
            Or(And(Not(Atom("a")), Atom("b")), Atom("c"))
        assert parse_formula("a -> b -> c") == \
            Implies(Atom("a"), Implies(Atom("b"), Atom("c")))
        assert parse_formula("a U b & c") == \
            And(Until(Atom("a"), Atom("b")), Atom("c"))
        assert parse_formula("a U b U c") == \
            Until(Atom("a"), Until(Atom("b"), Atom("c")))

    def test_keyword_prefix_is_an_atom(self):
        assert parse_formula("Xa") == Atom("Xa")

    def test_unexpected_character(self):
        with pytest.raises(ParseError):
            parse_formula("a @ b")

    def test_trailing_tokens(self):
        with pytest.raises(ParseError):
            parse_formula("a b")


def random_future_formula(rng, props, depth):
    if depth == 0:
        choice = rng.random()
        if choice < 0.1:
            return fm.TRUE if rng.random() < 0.5 else fm.FALSE
        return Atom(rng.choice(props))
    cls = rng.choice([Not, And, Or, Implies, Iff, Next, WeakNext, Until,
                      Release, Eventually, Globally])
    if cls in (Not, Next, WeakNext, Eventually, Globally):
        return cls(random_future_formula(rng, props, depth - 1))
    return cls(random_future_formula(rng, props, depth - 1),
               random_future_formula(rng, props, depth - 1))


class TestPrinting:
    @pytest.mark.parametrize("text", [
        "F a", "G (a -> X b)", "a U b U c", "(a U b) U c", "!(a & b)",
        "a <-> b <-> c", "a | b & c", "N !a", "F (a & N b)",
    ])
    def test_round_trip_examples(self, text):
        f = parse_formula(text)
        assert parse_formula(str(f)) == f

    def test_round_trip_random(self):
        rng = random.Random(4021)
        for _ in range(300):
            f = random_future_formula(rng, ["a", "b", "c"], 3)
            assert parse_formula(str(f)) == f


class TestEvaluate:
    def test_examples(self):
        assert evaluate(parse_formula("F b"), trace(["a", "b"], {"a"}, {"b"}))
        assert not evaluate(parse_formula("X a"), trace(["a"], {"a"}))
        assert evaluate(parse_formula("N a"), trace(["a"], {"a"}))
        assert evaluate(parse_formula("a S b"), trace(["a", "b"], {"a"}, {"b"}))

    def test_since_evaluated_at_last_position(self):
        f = parse_formula("a S b")
        assert evaluate(f, trace(["a", "b"], {"b"}, {"a"}))
        assert not evaluate(f, trace(["a", "b"], {"b"}, set()))

    def test_empty_trace(self):
        with pytest.raises(EmptyTraceError):
            evaluate(parse_formula("F a"), trace(["a"]))

    def test_unknown_proposition(self):
        with pytest.raises(UnknownPropositionError):
            evaluate(parse_formula("F c"), trace(["a"], {"a"}))

    def test_trace_membership_invariant(self):
        with pytest.raises(UnknownPropositionError):
            trace(["a"], {"b"})

    def test_past_propositional_convention(self):
        f = parse_formula("a")
        t = trace(["a"], set(), {"a"})
        assert not evaluate(f, t)                     # position 0
        assert evaluate(f, t, dialect="past")         # last position


class TestNnf:
    def test_until_dual(self):
        f = negation_normal_form(parse_formula("!(a U b)"))
        assert f == Release(Not(Atom("a")), Not(Atom("b")))

    def test_next_dual(self):
        assert negation_normal_form(parse_formula("!X a")) == \
            WeakNext(Not(Atom("a")))

    def test_double_negation(self):
        assert negation_normal_form(parse_formula("!!a")) == Atom("a")

    def test_language_preserved(self):
        rng = random.Random(77)
        props = ["a", "b"]
        traces = all_traces(props, 4)
        for _ in range(60):
            f = random_future_formula(rng, props, 3)
            g = negation_normal_form(f)
            for steps in traces:
                t = Trace.make(props, steps)
                assert evaluate(f, t, dialect="future") == \
                    evaluate(g, t, dialect="future")

    def test_length_five_spot_check(self):
        f = parse_formula("!(G (a -> X b) <-> F !a)")
        g = negation_normal_form(f)
        props = ["a", "b"]
        for steps in all_traces(props, 5, minlen=5):
            t = Trace.make(props, steps)
            assert evaluate(f, t, dialect="future") == \
                evaluate(g, t, dialect="future")


class TestReversal:
    def test_examples(self):
        assert reverse_connectives(parse_formula("X(a U b)")) == \
            parse_formula("Y(a S b)")
        assert reverse_connectives(parse_formula("F a")) == parse_formula("O a")
        assert reverse_connectives(parse_formula("G(a -> X b)")) == \
            parse_formula("H(a -> Y b)")

    def test_involution(self):
        rng = random.Random(55)
        for _ in range(200):
            f = random_future_formula(rng, ["a", "b", "c"], 3)
            assert reverse_connectives(reverse_connectives(f)) == f

    def test_trace_reversal_identity(self):
        rng = random.Random(99)
        props = ["a", "b"]
        traces = all_traces(props, 4)
        for _ in range(40):
            f = random_future_formula(rng, props, 2)
            g = reverse_connectives(f)
            for steps in traces:
                t = Trace.make(props, steps)
                assert evaluate(f, t, dialect="future") == \
                    evaluate(g, t.reverse(), dialect="past")


class TestXnf:
    def test_until(self):
        u = parse_formula("a U b")
        assert xnf_expand(u) == Or(Atom("b"), And(Atom("a"), Next(u)))

    def test_release(self):
        r = parse_formula("a R b")
        assert xnf_expand(r) == And(Atom("b"), Or(Atom("a"), WeakNext(r)))

    def test_literal(self):
        assert xnf_expand(Atom("a")) == Atom("a")
        assert xnf_expand(Not(Atom("a"))) == Not(Atom("a"))

    def test_rejects_non_nnf(self):
        with pytest.raises(NotInNnfError):
            xnf_expand(Not(parse_formula("a U b")))
        with pytest.raises(NotInNnfError):
            xnf_expand(parse_formula("a -> b"))

    def test_soundness(self):
        # the unfolding evaluated over one step plus obligations on the rest
        rng = random.Random(31)
        props = ["a", "b"]
        for _ in range(50):
            f = negation_normal_form(random_future_formula(rng, props, 2))
            x = xnf_expand(f)
            for steps in all_traces(props, 3):
                t = Trace.make(props, steps)
                rest = Trace.make(props, steps[1:])
                assert evaluate(f, t, dialect="future") == \
                    _eval_xnf(x, steps[0], rest)


def _eval_xnf(g, sigma, rest):
    if isinstance(g, TrueFormula):
        return True
    if isinstance(g, fm.FalseFormula):
        return False
    if isinstance(g, Atom):
        return g.name in sigma
    if isinstance(g, Not):
        return not _eval_xnf(g.sub, sigma, rest)
    if isinstance(g, And):
        return _eval_xnf(g.left, sigma, rest) and _eval_xnf(g.right, sigma, rest)
    if isinstance(g, Or):
        return _eval_xnf(g.left, sigma, rest) or _eval_xnf(g.right, sigma, rest)
    if isinstance(g, Next):
        return len(rest) >= 1 and evaluate(g.sub, rest, dialect="future")
    if isinstance(g, WeakNext):
        return len(rest) == 0 or evaluate(g.sub, rest, dialect="future")
    raise AssertionError(f"unexpected node {type(g).__name__}")
