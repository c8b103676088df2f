import itertools
import random

import pytest

from minsynth.bdd import BddError, BddManager, CrossManagerError, UnknownVariableError


def fresh(n=4):
    m = BddManager()
    vs = [m.add_var(f"v{i}") for i in range(n)]
    return m, vs


def random_function(m, vs, rng, size=12):
    """Random function built from the variable refs by random connectives."""
    pool = list(vs) + [m.true, m.false]
    for _ in range(size):
        op = rng.randrange(4)
        a, b = rng.choice(pool), rng.choice(pool)
        if op == 0:
            pool.append(a & b)
        elif op == 1:
            pool.append(a | b)
        elif op == 2:
            pool.append(~a)
        else:
            pool.append(a ^ b)
    return pool[-1]


def truth_table(m, f, names):
    rows = []
    for bits in itertools.product((False, True), repeat=len(names)):
        rows.append(m.eval(f, dict(zip(names, bits))))
    return tuple(rows)


class TestIte:
    def test_identity(self):
        m, (x, y, *_) = fresh()
        assert m.ite(x, m.true, m.false) == x

    def test_negation(self):
        m, (x, *_) = fresh()
        assert m.ite(x, m.false, m.true) == ~x

    def test_redundant_test(self):
        m, (x, y, *_) = fresh()
        assert m.ite(x, y, y) == y

    def test_cross_manager(self):
        m, (x, *_) = fresh()
        m2, (x2, *_) = fresh()
        with pytest.raises(CrossManagerError):
            m.ite(x, x2, m.false)


class TestCanonicity:
    def test_semantic_equality_is_node_equality(self):
        rng = random.Random(2024)
        m = BddManager()
        names = [f"v{i}" for i in range(6)]
        vs = [m.add_var(n) for n in names]
        for _ in range(200):
            f = random_function(m, vs, rng)
            g = random_function(m, vs, rng)
            assert (truth_table(m, f, names) == truth_table(m, g, names)) \
                == (f == g)

    def test_reduction_invariants(self):
        m = BddManager()
        names = [f"v{i}" for i in range(5)]
        vs = [m.add_var(n) for n in names]
        rng = random.Random(5)
        for _ in range(50):
            random_function(m, vs, rng)
        seen = set()
        for (level, lo, hi), node in m._unique.items():
            assert lo != hi, "unreduced node"
            assert (level, lo, hi) not in seen
            seen.add((level, lo, hi))
            for child in (lo, hi):
                if child > 1:
                    assert m._nodes[child][0] > level, "order violated"


class TestQuantify:
    def test_examples(self):
        m, (x, y, *_) = fresh()
        assert m.exists(["v0"], x & y) == y
        assert m.forall(["v0"], x | y) == y
        assert m.exists(["v0"], y) == y

    def test_unknown_variable(self):
        m, (x, *_) = fresh()
        with pytest.raises(UnknownVariableError):
            m.exists(["nope"], x)

    def test_against_truth_tables(self):
        rng = random.Random(17)
        m = BddManager()
        names = [f"v{i}" for i in range(4)]
        vs = [m.add_var(n) for n in names]
        for _ in range(60):
            f = random_function(m, vs, rng)
            var = rng.choice(names)
            rest = [n for n in names if n != var]
            ex = m.exists([var], f)
            fa = m.forall([var], f)
            for bits in itertools.product((False, True), repeat=3):
                env = dict(zip(rest, bits))
                lo = m.eval(f, {**env, var: False})
                hi = m.eval(f, {**env, var: True})
                assert m.eval(ex, {**env, var: False}) == (lo or hi)
                assert m.eval(fa, {**env, var: False}) == (lo and hi)


class TestCompose:
    def test_single_substitution(self):
        m, (x, y, z0, z1) = fresh()
        f = z0 & z1
        assert m.compose(f, {"v2": x | y}) == (x | y) & z1

    def test_identity(self):
        m, vs = fresh()
        f = vs[0] | ~vs[2]
        assert m.compose(f, {}) == f
        assert m.compose(f, {"v0": vs[0]}) == f

    def test_constant(self):
        m, vs = fresh()
        assert m.compose(vs[0], {"v0": m.false}) == m.false

    def test_simultaneous_against_truth_tables(self):
        rng = random.Random(23)
        m = BddManager()
        names = [f"v{i}" for i in range(4)]
        vs = [m.add_var(n) for n in names]
        for _ in range(40):
            f = random_function(m, vs, rng)
            images = {n: random_function(m, vs, rng, size=6)
                      for n in rng.sample(names, 2)}
            g = m.compose(f, images)
            for bits in itertools.product((False, True), repeat=4):
                env = dict(zip(names, bits))
                inner = dict(env)
                for n, image in images.items():
                    inner[n] = m.eval(image, env)
                assert m.eval(g, env) == m.eval(f, inner)


class TestRestrict:
    def test_agreement_example(self):
        m, (x, y, *_) = fresh()
        r = m.restrict(x & y, x)
        for ybit in (False, True):
            env = {"v0": True, "v1": ybit, "v2": False, "v3": False}
            assert m.eval(r, env) == ybit

    def test_full_care_set(self):
        m, vs = fresh()
        f = vs[0] | vs[1] & ~vs[3]
        assert m.restrict(f, m.true) == f

    def test_constant_function(self):
        m, vs = fresh()
        assert m.restrict(m.true, vs[1]) == m.true

    def test_empty_care_set(self):
        m, vs = fresh()
        with pytest.raises(BddError):
            m.restrict(vs[0], m.false)

    def test_care_agreement_property(self):
        rng = random.Random(41)
        m = BddManager()
        names = [f"v{i}" for i in range(6)]
        vs = [m.add_var(n) for n in names]
        for _ in range(80):
            f = random_function(m, vs, rng)
            c = random_function(m, vs, rng)
            if c == m.false:
                continue
            r = m.restrict(f, c)
            assert r & c == f & c


class TestLeastAssignment:
    def test_disjunction(self):
        m, (x, y, *_) = fresh(2)
        assert m.least_assignment(x | y, ["v0", "v1"]) == \
            {"v0": False, "v1": True}

    def test_unsat(self):
        m, _ = fresh(2)
        assert m.least_assignment(m.false, ["v0", "v1"]) is None

    def test_unique(self):
        m, (x, y) = fresh(2)
        assert m.least_assignment(x & ~y, ["v0", "v1"]) == \
            {"v0": True, "v1": False}

    def test_support_must_be_covered(self):
        m, (x, y) = fresh(2)
        with pytest.raises(BddError):
            m.least_assignment(x & y, ["v0"])

    def test_is_minimum_of_enumeration(self):
        rng = random.Random(3)
        m = BddManager()
        names = [f"v{i}" for i in range(4)]
        vs = [m.add_var(n) for n in names]
        for _ in range(60):
            f = random_function(m, vs, rng)
            got = m.least_assignment(f, names)
            sat = [bits for bits in itertools.product((False, True), repeat=4)
                   if m.eval(f, dict(zip(names, bits)))]
            if not sat:
                assert got is None
            else:
                assert tuple(got[n] for n in names) == min(sat)


class TestSerialization:
    def test_ite_text_round_trip(self):
        rng = random.Random(8)
        m = BddManager()
        names = [f"v{i}" for i in range(4)]
        vs = [m.add_var(n) for n in names]
        for _ in range(40):
            f = random_function(m, vs, rng)
            assert m.parse_ite_text(m.to_ite_text(f)) == f

    def test_formula_text_round_trip(self):
        from minsynth.automata import _formula_to_bdd
        from minsynth.formula import parse_formula
        rng = random.Random(9)
        m = BddManager()
        names = [f"v{i}" for i in range(4)]
        vs = [m.add_var(n) for n in names]
        for _ in range(40):
            f = random_function(m, vs, rng)
            assert _formula_to_bdd(m, parse_formula(m.to_formula_text(f))) == f

    def test_copy_preserves_semantics(self):
        rng = random.Random(10)
        m = BddManager()
        names = [f"v{i}" for i in range(4)]
        vs = [m.add_var(n) for n in names]
        other = BddManager()
        for n in reversed(names):  # a different variable order
            other.add_var(n)
        for _ in range(30):
            f = random_function(m, vs, rng)
            g = m.copy_to(other, f)
            for bits in itertools.product((False, True), repeat=4):
                env = dict(zip(names, bits))
                assert m.eval(f, env) == other.eval(g, env)

    def test_sat_paths_cover_exactly(self):
        rng = random.Random(11)
        m = BddManager()
        names = [f"v{i}" for i in range(4)]
        vs = [m.add_var(n) for n in names]
        for _ in range(30):
            f = random_function(m, vs, rng)
            covered = set()
            for path in m.sat_paths(f):
                free = [n for n in names if n not in path]
                for bits in itertools.product((False, True), repeat=len(free)):
                    env = {**path, **dict(zip(free, bits))}
                    covered.add(tuple(env[n] for n in names))
            want = {bits for bits in itertools.product((False, True), repeat=4)
                    if m.eval(f, dict(zip(names, bits)))}
            assert covered == want
