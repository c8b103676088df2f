"""Benchmark generators, brute-force oracles, and the comparison harness."""

from __future__ import annotations

import csv
import itertools
import random
import time
from dataclasses import dataclass, field

from . import automata, compile as pipelines, formula as fm, symbolic
from .automata import SemiSymbolicAutomaton
from .compile import Limits, PipelineError, ResourceLimitError, TimeoutExceeded

CSV_HEADER = ("instance,family,pipeline,revdfa_states,dfa_states_or_statevars,"
              "construct_ms,game_ms,total_ms,iterations,realizable,status")

ORACLE_MAX_PROPS = 4
ORACLE_MAX_LEN = 6


class BenchError(Exception):
    pass


@dataclass
class BenchInstance:
    id: str
    family: str
    formula: fm.Formula
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    params: dict = field(default_factory=dict)


@dataclass
class HarnessRow:
    instance: str
    family: str
    pipeline: str
    revdfa_states: int | None = None
    dfa_states_or_statevars: int | None = None
    construct_ms: int | None = None
    game_ms: int | None = None
    total_ms: int | None = None
    iterations: int | None = None
    realizable: str = "n/a"
    status: str = "ok"

    def as_csv(self) -> list[str]:
        def num(v):
            return "" if v is None else str(v)
        return [self.instance, self.family, self.pipeline,
                num(self.revdfa_states), num(self.dfa_states_or_statevars),
                num(self.construct_ms), num(self.game_ms), num(self.total_ms),
                num(self.iterations), self.realizable, self.status]


# ---------------------------------------------------------------------------
# Formula generators.

def gen_kv(m: int) -> fm.Formula:
    """Repeated-assignment family over p1..pm: the final assignment of the
    trace must already occur strictly before the end.  Its canonical DFA
    grows doubly exponentially in m while the reverse DFA stays singly
    exponential."""
    if m < 1:
        raise BenchError("m must be at least 1")
    clause = None
    for i in range(1, m + 1):
        p = fm.Atom(f"p{i}")
        seen_at_end = fm.Eventually(fm.And(p, fm.WeakNext(fm.FALSE)))
        part = fm.Iff(p, seen_at_end)
        clause = part if clause is None else fm.And(clause, part)
    return fm.Eventually(fm.And(fm.Next(fm.TRUE), clause))


_TEMPLATES = (
    lambda rng, leaf: fm.Eventually(leaf(rng)),
    lambda rng, leaf: fm.Globally(leaf(rng)),
    lambda rng, leaf: fm.Until(leaf(rng), leaf(rng)),
    lambda rng, leaf: fm.Next(leaf(rng)),
    lambda rng, leaf: fm.Globally(fm.Implies(leaf(rng), fm.Next(leaf(rng)))),
    lambda rng, leaf: fm.Eventually(fm.And(leaf(rng), fm.WeakNext(leaf(rng)))),
)


def gen_random(seed: int, nprops: int, nconjuncts: int, depth: int,
               props=None) -> fm.Formula:
    """Deterministic random conjunction of temporal templates.

    Each conjunct draws uniformly from six shapes (eventually, globally,
    until, next, response, eventually-with-weak-next) whose leaves are
    random propositional formulas: with probability 0.4 a possibly negated
    atom, otherwise a binary and/or over shallower leaves, down to the
    given depth.
    """
    if min(seed, nprops, nconjuncts, depth) < 1:
        raise BenchError("all generator parameters must be at least 1")
    rng = random.Random(seed)
    pool = list(props) if props is not None else [f"p{i + 1}" for i in range(nprops)]

    def leaf(r, d=None):
        d = depth if d is None else d
        if d <= 0 or r.random() < 0.4:
            atom = fm.Atom(r.choice(pool))
            return fm.Not(atom) if r.random() < 0.5 else atom
        cls = fm.And if r.random() < 0.5 else fm.Or
        return cls(leaf(r, d - 1), leaf(r, d - 1))

    out = None
    for _ in range(nconjuncts):
        template = rng.choice(_TEMPLATES)
        part = template(rng, lambda r: leaf(r))
        out = part if out is None else fm.And(out, part)
    return out


# ---------------------------------------------------------------------------
# Language oracle: exhaustive semantics over every short trace.

def oracle_language(f: fm.Formula, maxlen: int, props=None
                    ) -> set[tuple[frozenset[str], ...]]:
    """All traces of length 1..maxlen satisfying f, by direct evaluation.

    Future formulas share suffix values across traces, past formulas share
    prefix values, so the enumeration is linear in the number of traces.
    """
    props = tuple(props) if props is not None else tuple(fm.atoms(f))
    if len(props) > ORACLE_MAX_PROPS:
        raise BenchError(f"oracle limited to {ORACLE_MAX_PROPS} propositions")
    if not 1 <= maxlen <= ORACLE_MAX_LEN:
        raise BenchError(f"oracle limited to trace length {ORACLE_MAX_LEN}")
    dialect = fm.dialect_of(f)
    if dialect == "past":
        return _oracle_past(f, maxlen, props)
    return _oracle_future(f, maxlen, props)


def _sigmas(props):
    return [frozenset(p for p, b in zip(props, bits) if b)
            for bits in itertools.product((False, True), repeat=len(props))]


def _oracle_future(f, maxlen, props):
    subs = fm.postorder(f)
    sigmas = _sigmas(props)
    accepted = set()
    # values per trace, built from the values of its one-shorter suffix
    previous: dict[tuple, dict] = {(): None}
    for _ in range(maxlen):
        current: dict[tuple, dict] = {}
        for suffix, suffix_vals in previous.items():
            for sigma in sigmas:
                trace = (sigma,) + suffix
                vals = {}
                for g in subs:
                    vals[g] = _future_step(g, vals, suffix_vals, sigma)
                current[trace] = vals
                if vals[f]:
                    accepted.add(trace)
        previous = current
    return accepted


def _future_step(g, vals, nxt, sigma):
    if isinstance(g, fm.TrueFormula):
        return True
    if isinstance(g, fm.FalseFormula):
        return False
    if isinstance(g, fm.Atom):
        return g.name in sigma
    if isinstance(g, fm.Not):
        return not vals[g.sub]
    if isinstance(g, fm.And):
        return vals[g.left] and vals[g.right]
    if isinstance(g, fm.Or):
        return vals[g.left] or vals[g.right]
    if isinstance(g, fm.Implies):
        return not vals[g.left] or vals[g.right]
    if isinstance(g, fm.Iff):
        return vals[g.left] == vals[g.right]
    if isinstance(g, fm.Next):
        return nxt is not None and nxt[g.sub]
    if isinstance(g, fm.WeakNext):
        return nxt is None or nxt[g.sub]
    if isinstance(g, fm.Until):
        return vals[g.right] or (vals[g.left] and nxt is not None and nxt[g])
    if isinstance(g, fm.Release):
        return vals[g.right] and (vals[g.left] or nxt is None or nxt[g])
    if isinstance(g, fm.Eventually):
        return vals[g.sub] or (nxt is not None and nxt[g])
    if isinstance(g, fm.Globally):
        return vals[g.sub] and (nxt is None or nxt[g])
    raise fm.FormulaError(f"future oracle cannot handle {type(g).__name__}")


def _oracle_past(f, maxlen, props):
    subs = fm.postorder(f)
    sigmas = _sigmas(props)
    accepted = set()
    previous: dict[tuple, dict] = {(): None}
    for _ in range(maxlen):
        current: dict[tuple, dict] = {}
        for prefix, prefix_vals in previous.items():
            for sigma in sigmas:
                trace = prefix + (sigma,)
                vals = {}
                for g in subs:
                    vals[g] = _past_step(g, vals, prefix_vals, sigma)
                current[trace] = vals
                if vals[f]:
                    accepted.add(trace)
        previous = current
    return accepted


def _past_step(g, vals, prev, sigma):
    if isinstance(g, fm.TrueFormula):
        return True
    if isinstance(g, fm.FalseFormula):
        return False
    if isinstance(g, fm.Atom):
        return g.name in sigma
    if isinstance(g, fm.Not):
        return not vals[g.sub]
    if isinstance(g, fm.And):
        return vals[g.left] and vals[g.right]
    if isinstance(g, fm.Or):
        return vals[g.left] or vals[g.right]
    if isinstance(g, fm.Implies):
        return not vals[g.left] or vals[g.right]
    if isinstance(g, fm.Iff):
        return vals[g.left] == vals[g.right]
    if isinstance(g, fm.Yesterday):
        return prev is not None and prev[g.sub]
    if isinstance(g, fm.WeakYesterday):
        return prev is None or prev[g.sub]
    if isinstance(g, fm.Since):
        return vals[g.right] or (vals[g.left] and prev is not None and prev[g])
    if isinstance(g, fm.Trigger):
        return vals[g.right] and (vals[g.left] or prev is None or prev[g])
    if isinstance(g, fm.Once):
        return vals[g.sub] or (prev is not None and prev[g])
    if isinstance(g, fm.Historically):
        return vals[g.sub] and (prev is None or prev[g])
    raise fm.FormulaError(f"past oracle cannot handle {type(g).__name__}")


# ---------------------------------------------------------------------------
# Game oracle: explicit backward induction over a complete DFA.

def oracle_game(dfa: SemiSymbolicAutomaton, inputs, outputs
                ) -> tuple[bool, frozenset[int]]:
    """Realizability by explicit backward induction.

    The winning set starts from the accepting states and grows by states
    that have an output assignment whose every input completion stays
    winning; the verdict is membership of the initial state.
    """
    inputs, outputs = tuple(inputs), tuple(outputs)
    if set(inputs) | set(outputs) != set(dfa.props) \
            or set(inputs) & set(outputs):
        raise BenchError("inputs and outputs must partition the propositions")
    table = automata.transition_table(dfa)
    x_choices = _sigmas(inputs)
    y_choices = _sigmas(outputs)
    winning = set(dfa.accepting)
    changed = True
    while changed:
        changed = False
        for s in range(dfa.n_states):
            if s in winning:
                continue
            row = table[s]
            for y in y_choices:
                if all(row[frozenset(x | y)] in winning for x in x_choices):
                    winning.add(s)
                    changed = True
                    break
    realizable = next(iter(dfa.initial)) in winning
    return realizable, frozenset(winning)


# ---------------------------------------------------------------------------
# Harness.

def run_harness(instances, pipelines_to_run, timeout_s: float, csv_path,
                state_cap: int | None = None, prune: str = "restrict"
                ) -> list[HarnessRow]:
    """One row per (instance, pipeline): construct, then solve the game.

    Every cell runs under its own wall-clock timeout and state cap; rows
    are ordered by (instance id, pipeline name) and written as CSV.
    """
    state_cap = state_cap if state_cap is not None else pipelines.default_state_cap()
    rows = []
    for inst in sorted(instances, key=lambda i: i.id):
        for pl in sorted(pipelines_to_run):
            rows.append(_run_cell(inst, pl, timeout_s, state_cap, prune))
    with open(csv_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_HEADER.split(","))
        for row in rows:
            writer.writerow(row.as_csv())
    return rows


def _run_cell(inst: BenchInstance, pipeline: str, timeout_s: float,
              state_cap: int, prune: str) -> HarnessRow:
    row = HarnessRow(instance=inst.id, family=inst.family, pipeline=pipeline)
    limits = Limits.from_timeout(timeout_s, state_cap)
    t0 = time.perf_counter()
    try:
        if pipeline == "hopcroft":
            dfa, report = pipelines.pipeline_hopcroft(inst.formula, limits)
            game = _solve_on_explicit(dfa, inst, limits)
        elif pipeline == "brz-explicit":
            dfa, report = pipelines.pipeline_brzozowski_explicit(inst.formula, limits)
            game = _solve_on_explicit(dfa, inst, limits)
        elif pipeline == "brz-symbolic":
            sdfa, reachable, report = pipelines.pipeline_brzozowski_symbolic(
                inst.formula, inst.inputs, inst.outputs, limits)
            game = symbolic.solve_game(sdfa, prune=prune, r=reachable,
                                       limits=limits)
        else:
            raise BenchError(f"unknown pipeline {pipeline!r}")
    except TimeoutExceeded:
        row.status = "timeout"
        return row
    except (ResourceLimitError, PipelineError):
        row.status = "resource"
        return row
    total = (time.perf_counter() - t0) * 1000.0
    construct = report.total_ms
    row.revdfa_states = report.revdfa_states
    row.dfa_states_or_statevars = report.dfa_states_or_statevars
    row.construct_ms = round(construct)
    row.game_ms = round(max(total - construct, 0.0))
    row.total_ms = round(total)
    row.iterations = game.iterations
    row.realizable = "yes" if game.realizable else "no"
    return row


def _solve_on_explicit(dfa: SemiSymbolicAutomaton, inst: BenchInstance,
                       limits: Limits):
    sdfa = symbolic.encode_explicit_dfa(dfa, inst.inputs, inst.outputs)
    return symbolic.solve_game(sdfa, prune="none", limits=limits)


def kv_instances(max_m: int) -> list[BenchInstance]:
    """KV cells: the environment owns every proposition, so the system only
    chooses when to stop; realizable by pigeonhole."""
    out = []
    for m in range(1, max_m + 1):
        f = gen_kv(m)
        out.append(BenchInstance(id=f"kv-{m}", family="kv", formula=f,
                                 inputs=tuple(fm.atoms(f)), outputs=(),
                                 params={"m": m}))
    return out


def file_instances(path) -> list[BenchInstance]:
    """Load externally supplied formulas, one per line.

    A line is a future-dialect formula, optionally followed by
    ``:: inputs | outputs`` naming the partition (space separated).  Without
    a partition every proposition belongs to the environment.  Blank lines
    and lines starting with # are skipped.
    """
    out = []
    stem = str(path).rsplit("/", 1)[-1].rsplit(".", 1)[0]
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            text, _, partition = line.partition("::")
            f = fm.parse_formula(text.strip())
            props = fm.atoms(f)
            if partition.strip():
                left, _, right = partition.partition("|")
                inputs = tuple(left.split())
                outputs = tuple(right.split())
                missing = set(props) - set(inputs) - set(outputs)
                if missing:
                    raise BenchError(
                        f"{path}:{lineno}: partition misses {sorted(missing)}")
            else:
                inputs, outputs = tuple(props), ()
            out.append(BenchInstance(
                id=f"{stem}-{lineno:04d}", family="file", formula=f,
                inputs=inputs, outputs=outputs, params={"line": lineno}))
    if not out:
        raise BenchError(f"no formulas found in {path}")
    return out


def game_instances(count: int, seed: int) -> list[BenchInstance]:
    """Synthesis cells over x1, x2 (environment) and y1, y2 (system)."""
    pool = ("x1", "x2", "y1", "y2")
    out = []
    for i in range(count):
        f = gen_random(seed * 7919 + i + 1, nprops=4, nconjuncts=2, depth=1,
                       props=pool)
        props = fm.atoms(f)
        out.append(BenchInstance(
            id=f"game-{i:04d}", family="random", formula=f,
            inputs=tuple(p for p in props if p.startswith("x")),
            outputs=tuple(p for p in props if p.startswith("y")),
            params={"seed": seed * 7919 + i + 1}))
    return out


def random_instances(count: int, seed: int, nprops: int = 3,
                     nconjuncts: int = 2, depth: int = 1,
                     max_connectives: int | None = None) -> list[BenchInstance]:
    """Seeded random cells; the first half of the propositions (rounded up)
    are inputs, the rest outputs."""
    out = []
    attempt = 0
    while len(out) < count:
        attempt += 1
        sub_seed = seed * 10007 + attempt
        f = gen_random(sub_seed, nprops, 1 + (attempt % nconjuncts), depth)
        if max_connectives is not None \
                and fm.connective_count(f) > max_connectives:
            continue
        props = fm.atoms(f)
        cut = (len(props) + 1) // 2
        out.append(BenchInstance(
            id=f"random-{len(out):04d}", family="random", formula=f,
            inputs=tuple(props[:cut]), outputs=tuple(props[cut:]),
            params={"seed": sub_seed, "nprops": nprops, "depth": depth}))
    return out
