import csv

import pytest

from minsynth import automata, symbolic
from minsynth.cli import main


def run_cli(*argv):
    return main(list(argv))


class TestCompileCommand:
    def test_writes_minimal_dfa(self, tmp_path, capsys):
        out = tmp_path / "out.dfa"
        code = run_cli("compile", "-f", "F a", "--pipeline", "hopcroft",
                       "-o", str(out))
        assert code == 0
        text = out.read_text()
        assert "states: 2" in text
        reloaded = automata.from_text(text)
        assert reloaded.n_states == 2

    def test_dot_export(self, tmp_path):
        out = tmp_path / "out.dfa"
        dot = tmp_path / "out.dot"
        assert run_cli("compile", "-f", "F a", "-o", str(out),
                       "--dot", str(dot)) == 0
        assert "digraph" in dot.read_text()

    def test_symbolic_pipeline_writes_symbolic_text(self, tmp_path):
        out = tmp_path / "out.sym"
        assert run_cli("compile", "-f", "F a", "--pipeline", "brz-symbolic",
                       "-o", str(out)) == 0
        assert out.read_text().startswith("symbolicdfa")

    def test_unknown_pipeline_is_usage_error(self, tmp_path, capsys):
        assert run_cli("compile", "--pipeline", "nosuch") == 2

    def test_missing_formula_is_usage_error(self, capsys):
        assert run_cli("compile") == 2
        assert "error:" in capsys.readouterr().err

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.dfa", tmp_path / "b.dfa"
        run_cli("compile", "-f", "G(a -> X b)", "-o", str(a))
        run_cli("compile", "-f", "G(a -> X b)", "-o", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_syntax_error(self, capsys):
        assert run_cli("compile", "-f", "a U") == 2
        assert "error:" in capsys.readouterr().err


class TestSynthesizeCommand:
    def test_realizable(self, tmp_path, capsys):
        out = tmp_path / "strategy.txt"
        code = run_cli("synthesize", "-f", "F y", "--inputs", "x",
                       "--outputs", "y", "--pipeline", "brz-symbolic",
                       "-o", str(out))
        assert code == 0
        assert "REALIZABLE" in capsys.readouterr().out
        strategy = symbolic.strategy_from_text(out.read_text())
        assert strategy.dfa.outputs == ("y",)

    def test_unrealizable_exit_code(self, tmp_path, capsys):
        code = run_cli("synthesize", "-f", "F x", "--inputs", "x",
                       "--outputs", "y", "-o", str(tmp_path / "s.txt"))
        assert code == 1
        assert "UNREALIZABLE" in capsys.readouterr().out

    def test_overlapping_partition(self, tmp_path, capsys):
        assert run_cli("synthesize", "-f", "F y", "--inputs", "y",
                       "--outputs", "y") == 2

    def test_uncovered_prop(self, capsys):
        assert run_cli("synthesize", "-f", "F y & F z", "--inputs", "x",
                       "--outputs", "y") == 2

    @pytest.mark.parametrize("pipeline", ["hopcroft", "brz-explicit"])
    def test_explicit_pipelines(self, tmp_path, pipeline, capsys):
        code = run_cli("synthesize", "-f", "F y", "--inputs", "x",
                       "--outputs", "y", "--pipeline", pipeline,
                       "-o", str(tmp_path / "s.txt"))
        assert code == 0

    @pytest.mark.parametrize("prune", ["none", "conj", "restrict"])
    def test_prune_modes(self, tmp_path, prune):
        assert run_cli("synthesize", "-f", "F y", "--inputs", "x",
                       "--outputs", "y", "--prune", prune,
                       "-o", str(tmp_path / "s.txt")) == 0


class TestCheckCommand:
    def test_agreement(self, capsys):
        assert run_cli("check", "-f", "G(a -> X b)", "--maxlen", "3") == 0
        assert "ok:" in capsys.readouterr().out


class TestBenchCommand:
    def test_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "bench.csv"
        code = run_cli("bench", "--kv", "1", "--random", "2",
                       "--timeout", "30", "-o", str(out))
        assert code == 0
        with open(out, newline="") as handle:
            rows = list(csv.reader(handle))
        assert len(rows) == 1 + 3 * 3
        assert rows[0][0] == "instance"

    def test_nothing_to_run(self, capsys):
        assert run_cli("bench") == 2

    def test_unknown_pipeline(self, tmp_path):
        assert run_cli("bench", "--kv", "1", "--pipelines", "bogus",
                       "-o", str(tmp_path / "x.csv")) == 2


class TestPlayCommand:
    def test_replays_strategy(self, tmp_path, capsys):
        strat = tmp_path / "s.txt"
        run_cli("synthesize", "-f", "F y", "--inputs", "x", "--outputs", "y",
                "-o", str(strat))
        capsys.readouterr()
        moves = tmp_path / "moves.txt"
        moves.write_text("x\n\n")
        code = run_cli("play", "--strategy", str(strat),
                       "--inputs-file", str(moves))
        assert code == 0
        assert "ACCEPTED at step 0" in capsys.readouterr().out

    def test_unknown_input_prop(self, tmp_path, capsys):
        strat = tmp_path / "s.txt"
        run_cli("synthesize", "-f", "F y", "--inputs", "x", "--outputs", "y",
                "-o", str(strat))
        moves = tmp_path / "moves.txt"
        moves.write_text("zz\n")
        assert run_cli("play", "--strategy", str(strat),
                       "--inputs-file", str(moves)) == 2


class TestResourceExit:
    def test_timeout_exit_code(self, tmp_path, capsys):
        code = run_cli("compile", "-f", str(__import__("minsynth.bench",
                       fromlist=["gen_kv"]).gen_kv(2)), "--timeout", "0",
                       "-o", str(tmp_path / "o.dfa"))
        assert code == 3
        assert "error:" in capsys.readouterr().err

    def test_state_cap_exit_code(self, tmp_path, capsys):
        code = run_cli("compile", "-f", "F(a & N b) & G(a -> X b)",
                       "--state-cap", "1", "-o", str(tmp_path / "o.dfa"))
        assert code == 3

    def test_env_var_cap(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("MINSYNTH_STATE_CAP", "1")
        code = run_cli("compile", "-f", "F(a & N b) & G(a -> X b)",
                       "-o", str(tmp_path / "o.dfa"))
        assert code == 3
