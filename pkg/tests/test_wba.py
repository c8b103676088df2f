import pytest

from minsynth import automata, bench, formula as fm
from minsynth.compile import pipeline_brzozowski_explicit, pltlf_to_dfa
from minsynth.wba import (
    ALIVE, WbaError, codfa_to_wba, determinize_wba, roundtrip_via_wba,
    validate_wba, wdba_to_dfa,
)

from util import language_of


def codfa_for(text):
    f = fm.parse_formula(text)
    rev = pltlf_to_dfa(fm.reverse_connectives(f))
    return f, automata.reverse_automaton(rev)


class TestEncoding:
    def test_adds_one_state(self):
        _, c = codfa_for("F a")
        w = codfa_to_wba(c)
        assert w.aut.n_states == c.n_states + 1
        assert w.sink == c.n_states

    def test_structure_validates(self):
        for text in ("F a", "a U b", "X a"):
            _, c = codfa_for(text)
            validate_wba(codfa_to_wba(c), c)

    def test_accepting_states_gain_sink_edge(self):
        _, c = codfa_for("F a")
        w = codfa_to_wba(c)
        not_alive = ~w.aut.mgr.var(ALIVE)
        for s in c.accepting:
            assert w.aut.edges[s][w.sink] == not_alive

    def test_original_labels_imply_alive(self):
        _, c = codfa_for("a U b")
        w = codfa_to_wba(c)
        alive = w.aut.mgr.var(ALIVE)
        for s, label, d in w.aut.all_edges():
            if d != w.sink:
                assert (label & ~alive).is_false

    def test_alive_name_clash(self):
        a = automata.new_automaton("codfa", ["alive"])
        a.n_states = 1
        a.initial = frozenset({0})
        with pytest.raises(WbaError):
            codfa_to_wba(a)

    def test_requires_codfa(self):
        a = automata.new_automaton("nfa", ["a"])
        with pytest.raises(WbaError):
            codfa_to_wba(a)


class TestDecoding:
    def test_roundtrip_matches_direct_pipeline(self):
        for text in ("F a", "X a", "a U b", "G(a -> X b)"):
            f, c = codfa_for(text)
            direct, _ = pipeline_brzozowski_explicit(f)
            via = roundtrip_via_wba(c)
            assert automata.is_isomorphic(via, direct), text

    def test_sink_subset_is_unique(self):
        _, c = codfa_for("F a")
        w = codfa_to_wba(c)
        det = determinize_wba(w)
        containing = [i for i, members in enumerate(det.subset_origin)
                      if w.sink in members]
        assert len(containing) == 1
        assert frozenset({w.sink}) == det.subset_origin[containing[0]]
        assert det.accepting == frozenset(containing)

    def test_alive_is_stripped(self):
        _, c = codfa_for("F a")
        out = roundtrip_via_wba(c)
        assert ALIVE not in out.props

    def test_language_preserved(self):
        for text in ("F a", "a U b", "F(a & N b)"):
            f, c = codfa_for(text)
            out = roundtrip_via_wba(c)
            assert language_of(out, 4) == bench.oracle_language(f, 4), text

    def test_empty_language(self):
        f, c = codfa_for("G a & F !a")
        direct, _ = pipeline_brzozowski_explicit(f)
        via = roundtrip_via_wba(c)
        assert automata.is_isomorphic(via, direct)
        assert language_of(via, 4) == set()

    def test_rejects_undeterminized_input(self):
        _, c = codfa_for("F a")
        w = codfa_to_wba(c)
        with pytest.raises(WbaError):
            wdba_to_dfa(w.aut)

    def test_batch_roundtrip(self):
        for i in range(25):
            f = bench.gen_random(8000 + i, 2, 2, 1)
            rev = pltlf_to_dfa(fm.reverse_connectives(f))
            c = automata.reverse_automaton(rev)
            direct, _ = pipeline_brzozowski_explicit(f)
            assert automata.is_isomorphic(roundtrip_via_wba(c), direct), str(f)

    def test_text_format_keeps_the_kind(self):
        _, c = codfa_for("F a")
        w = codfa_to_wba(c)
        text = automata.to_text(w.aut)
        assert text.startswith("kind: wba")
        back = automata.from_text(text)
        assert back.kind == "wba"
        assert ALIVE in back.props
        assert language_of(back, 3) == language_of(w.aut, 3)
