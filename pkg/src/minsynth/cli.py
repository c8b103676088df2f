"""Command-line interface.

Exit codes: 0 ok, 1 unrealizable or verification mismatch, 2 usage error,
3 resource limit or timeout.
"""

from __future__ import annotations

import argparse
import sys

from . import automata, bench, compile as pipelines, formula as fm, symbolic
from .compile import Limits, PipelineError, ResourceLimitError, TimeoutExceeded

EXIT_OK = 0
EXIT_UNREALIZABLE = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _err(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def _load_formula(args) -> fm.Formula:
    if args.formula is not None:
        text = args.formula
    elif args.file is not None:
        with open(args.file, encoding="utf-8") as handle:
            text = handle.read()
    else:
        raise UsageError("a formula is required (use -f or --file)")
    return fm.parse_formula(text)


class UsageError(Exception):
    pass


def _limits(args) -> Limits:
    cap = args.state_cap if args.state_cap else pipelines.default_state_cap()
    return Limits.from_timeout(args.timeout, cap)


def _split_props(value: str) -> tuple[str, ...]:
    return tuple(x for x in value.replace(",", " ").split() if x)


def cmd_compile(args) -> int:
    f = _load_formula(args)
    limits = _limits(args)
    if args.pipeline == "hopcroft":
        dfa, _ = pipelines.pipeline_hopcroft(f, limits)
    elif args.pipeline == "brz-explicit":
        dfa, _ = pipelines.pipeline_brzozowski_explicit(f, limits)
    else:
        sdfa, _, _ = pipelines.pipeline_brzozowski_symbolic(f, limits=limits)
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(symbolic.symbolic_dfa_to_text(sdfa))
        print(f"wrote symbolic automaton with {len(sdfa.statevars)} "
              f"state variables to {args.output}")
        return EXIT_OK
    with open(args.output, "w", encoding="utf-8") as handle:
        handle.write(automata.to_text(dfa))
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as handle:
            handle.write(automata.to_dot(dfa))
    print(f"wrote {dfa.n_states}-state dfa to {args.output}")
    return EXIT_OK


def cmd_synthesize(args) -> int:
    f = _load_formula(args)
    limits = _limits(args)
    inputs = _split_props(args.inputs)
    outputs = _split_props(args.outputs)
    if set(inputs) & set(outputs):
        raise UsageError("inputs and outputs overlap")
    missing = set(fm.atoms(f)) - set(inputs) - set(outputs)
    if missing:
        raise UsageError(
            f"propositions not assigned to a player: {sorted(missing)}")
    if args.pipeline == "brz-symbolic":
        sdfa, reachable, _ = pipelines.pipeline_brzozowski_symbolic(
            f, inputs, outputs, limits)
    else:
        if args.pipeline == "hopcroft":
            dfa, _ = pipelines.pipeline_hopcroft(f, limits)
        else:
            dfa, _ = pipelines.pipeline_brzozowski_explicit(f, limits)
        sdfa = symbolic.encode_explicit_dfa(dfa, inputs, outputs)
        reachable = symbolic.reachable_states_fixpoint(sdfa, limits)
    prune = {"conj": "conjunction"}.get(args.prune, args.prune)
    r = None if prune == "none" else reachable
    game = symbolic.solve_game(sdfa, prune=prune, r=r, limits=limits)
    if not game.realizable:
        print("UNREALIZABLE")
        return EXIT_UNREALIZABLE
    print("REALIZABLE")
    strategy = symbolic.extract_strategy(sdfa, game)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(symbolic.strategy_to_text(strategy))
        print(f"wrote strategy to {args.output}")
    return EXIT_OK


def cmd_check(args) -> int:
    f = _load_formula(args)
    limits = _limits(args)
    if args.pipeline == "hopcroft":
        dfa, _ = pipelines.pipeline_hopcroft(f, limits)
    else:
        dfa, _ = pipelines.pipeline_brzozowski_explicit(f, limits)
    expected = bench.oracle_language(f, args.maxlen)
    actual = automata.accepted_set(dfa, args.maxlen)
    if expected == actual:
        print(f"ok: automaton matches the oracle on {len(expected)} traces "
              f"up to length {args.maxlen}")
        return EXIT_OK
    _err(f"language mismatch: oracle {len(expected)} traces, "
         f"automaton {len(actual)}")
    return EXIT_UNREALIZABLE


def cmd_bench(args) -> int:
    instances = []
    if args.kv:
        instances.extend(bench.kv_instances(args.kv))
    if args.random:
        instances.extend(bench.random_instances(
            args.random, seed=args.seed, nprops=args.nprops,
            nconjuncts=args.nconjuncts, depth=args.depth))
    if args.formulas:
        instances.extend(bench.file_instances(args.formulas))
    if not instances:
        raise UsageError("nothing to run (use --kv, --random, or --formulas)")
    selected = _split_props(args.pipelines)
    unknown = set(selected) - set(pipelines.PIPELINES)
    if unknown:
        raise UsageError(f"unknown pipelines: {sorted(unknown)}")
    rows = bench.run_harness(instances, selected, timeout_s=args.timeout,
                             csv_path=args.output,
                             state_cap=args.state_cap or None,
                             prune={"conj": "conjunction"}.get(args.prune,
                                                               args.prune))
    solved = sum(1 for r in rows if r.status == "ok")
    print(f"wrote {len(rows)} rows to {args.output} ({solved} ok)")
    return EXIT_OK


def cmd_play(args) -> int:
    with open(args.strategy, encoding="utf-8") as handle:
        strategy = symbolic.strategy_from_text(handle.read())
    d = strategy.dfa
    if args.inputs_file:
        with open(args.inputs_file, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    else:
        lines = sys.stdin.read().splitlines()
    state = dict(d.init)
    if d.mgr.eval(d.accept, state):
        print("ACCEPTED at step -1 (initial state is accepting)")
        return EXIT_OK
    for k, line in enumerate(lines):
        given = frozenset(line.split())
        extra = given - set(d.inputs)
        if extra:
            raise UsageError(
                f"line {k + 1}: not input propositions: {sorted(extra)}")
        outs = {y for y in d.outputs
                if d.mgr.eval(strategy.output_funcs[y], state)}
        sigma = given | outs
        state = symbolic.step_symbolic(d, state, sigma)
        shown = " ".join(sorted(sigma)) or "(empty)"
        print(f"step {k}: {shown}")
        if d.mgr.eval(d.accept, state):
            print(f"ACCEPTED at step {k}")
            return EXIT_OK
    print("FAILED: no accepted prefix within the provided inputs")
    return EXIT_UNREALIZABLE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minsynth",
        description="Compile finite-trace temporal formulas to minimal DFAs "
                    "and solve the induced reachability games.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, pipeline_default="hopcroft"):
        p.add_argument("-f", "--formula")
        p.add_argument("--file")
        p.add_argument("--pipeline", choices=pipelines.PIPELINES,
                       default=pipeline_default)
        p.add_argument("--timeout", type=float, default=None)
        p.add_argument("--state-cap", type=int, default=0)

    p = sub.add_parser("compile", help="write the automaton for a formula")
    common(p)
    p.add_argument("-o", "--output", default="out.dfa")
    p.add_argument("--dot")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("synthesize", help="decide realizability and extract "
                                          "a strategy")
    common(p, pipeline_default="brz-symbolic")
    p.add_argument("--inputs", default="")
    p.add_argument("--outputs", default="")
    p.add_argument("--prune", choices=("none", "conj", "restrict"),
                   default="restrict")
    p.add_argument("-o", "--output", default="strategy.txt")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("check", help="cross-verify a compiled automaton "
                                     "against the trace oracle")
    common(p)
    p.add_argument("--maxlen", type=int, default=4)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="run the comparison harness")
    p.add_argument("--kv", type=int, default=0)
    p.add_argument("--random", type=int, default=0)
    p.add_argument("--formulas", help="file of extra formulas, one per line")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--nprops", type=int, default=3)
    p.add_argument("--nconjuncts", type=int, default=2)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--pipelines",
                   default="hopcroft,brz-explicit,brz-symbolic")
    p.add_argument("--prune", choices=("none", "conj", "restrict"),
                   default="restrict")
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--state-cap", type=int, default=0)
    p.add_argument("-o", "--output", default="bench.csv")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("play", help="step a strategy file against inputs "
                                    "read line by line")
    p.add_argument("--strategy", required=True)
    p.add_argument("--inputs-file")
    p.set_defaults(func=cmd_play)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except (TimeoutExceeded, ResourceLimitError) as exc:
        _err(f"{exc} ({exc.phase})")
        return EXIT_RESOURCE
    except PipelineError as exc:
        _err(str(exc))
        return EXIT_RESOURCE
    except (fm.FormulaError, automata.AutomataError, symbolic.SymbolicError,
            bench.BenchError, OSError) as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
