"""Formula-to-minimal-DFA pipelines.

Three routes from a future-dialect formula to a canonical automaton:

* direct: one-step-unfolding NFA, subset construction, partition-refinement
  minimization;
* double-reversal, explicit: minimal DFA for the reversed (past) formula,
  reversed into a co-DFA and determinized;
* double-reversal, symbolic: same first half, then a fused reversal plus
  symbolic subset construction that never builds the explicit DFA.
"""

from __future__ import annotations

import os
import time
from collections import deque
from dataclasses import dataclass, field

from . import automata, formula as fm, symbolic
from .automata import SemiSymbolicAutomaton
from .bdd import BddManager, Ref

DEFAULT_STATE_CAP = 10 ** 6


class PipelineError(Exception):
    def __init__(self, message: str, phase: str):
        super().__init__(message)
        self.phase = phase


class ResourceLimitError(PipelineError):
    pass


class TimeoutExceeded(PipelineError):
    pass


@dataclass
class Limits:
    """Cooperative caps checked inside the long-running loops."""

    state_cap: int = DEFAULT_STATE_CAP
    deadline: float | None = None

    @staticmethod
    def from_timeout(timeout_s: float | None,
                     state_cap: int = DEFAULT_STATE_CAP) -> "Limits":
        deadline = None if timeout_s is None else time.monotonic() + timeout_s
        return Limits(state_cap=state_cap, deadline=deadline)

    def check_time(self, phase: str) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise TimeoutExceeded(f"timeout during {phase}", phase)

    def check_states(self, count: int, phase: str) -> None:
        if count > self.state_cap:
            raise ResourceLimitError(
                f"state cap {self.state_cap} exceeded during {phase}", phase)


def default_state_cap() -> int:
    value = os.environ.get("MINSYNTH_STATE_CAP")
    return int(value) if value else DEFAULT_STATE_CAP


@dataclass
class PipelineReport:
    pipeline: str
    revdfa_states: int = 0
    dfa_states_or_statevars: int = 0
    phase_ms: dict[str, float] = field(default_factory=dict)
    total_ms: float = 0.0
    status: str = "ok"


class _Stopwatch:
    def __init__(self):
        self.t0 = time.perf_counter()
        self.marks: dict[str, float] = {}

    def lap(self, phase: str) -> None:
        now = time.perf_counter()
        self.marks[phase] = self.marks.get(phase, 0.0) + (now - self.t0) * 1000.0
        self.t0 = now

    def total(self) -> float:
        return sum(self.marks.values())


# ---------------------------------------------------------------------------
# Future formula -> NFA through one-step unfolding.

def ltlf_to_nfa(f: fm.Formula, limits: Limits | None = None) -> SemiSymbolicAutomaton:
    """NFA over the formula's propositions accepting exactly its traces.

    States are obligation sets drawn from the unfolding closure, plus one
    accepting end state entered on the last symbol.  The empty trace is
    rejected.
    """
    if fm.dialect_of(f) == "past":
        raise fm.MixedDialectError("the NFA front end takes future formulas")
    core = fm.expand_eventualities(fm.negation_normal_form(f))
    props = fm.atoms(f)
    work_mgr = BddManager()
    for p in props:
        work_mgr.add_var(p)
    next_vars: dict[fm.Formula, str] = {}
    weak_vars: dict[fm.Formula, str] = {}
    var_payload: dict[str, fm.Formula] = {}

    def obligation_var(node: fm.Formula) -> str:
        table = next_vars if isinstance(node, fm.Next) else weak_vars
        name = table.get(node.sub)
        if name is None:
            prefix = "X" if isinstance(node, fm.Next) else "N"
            name = f"{prefix}.{len(next_vars) + len(weak_vars)}"
            table[node.sub] = name
            var_payload[name] = node.sub
            work_mgr.add_var(name)
        return name

    unfold_cache: dict[fm.Formula, Ref] = {}

    def unfold(member: fm.Formula) -> Ref:
        got = unfold_cache.get(member)
        if got is None:
            got = _xnf_to_bdd(fm.xnf_expand(member), work_mgr, obligation_var)
            unfold_cache[member] = got
        return got

    start = _tidy_state(frozenset({core}))
    if start is None:  # contradictory root: keep one dead initial state
        start = frozenset({fm.FALSE})
    index: dict[frozenset[fm.Formula], int] = {start: 0}
    worklist = deque([start])
    mid_edges: list[tuple[int, dict[frozenset[fm.Formula], Ref]]] = []
    end_edges: dict[int, Ref] = {}
    while worklist:
        state = worklist.popleft()
        if limits is not None:
            limits.check_time("front-end")
        src = index[state]
        combined = work_mgr.all_of(unfold(member) for member in
                                   sorted(state, key=str))
        # closing move: strong obligations fail, weak obligations succeed
        closing = combined
        for name in work_mgr.support(combined):
            if name.startswith("X."):
                closing = work_mgr.cofactor(closing, name, False)
            elif name.startswith("N."):
                closing = work_mgr.cofactor(closing, name, True)
        if not closing.is_false:
            end_edges[src] = closing
        by_successor: dict[frozenset[fm.Formula], Ref] = {}
        for path in work_mgr.sat_paths(combined):
            cube = work_mgr.true
            successors = set()
            for name, value in path.items():
                if name.startswith(("X.", "N.")):
                    if value:
                        successors.add(var_payload[name])
                else:
                    v = work_mgr.var(name)
                    cube = work_mgr.and_(cube, v if value else work_mgr.not_(v))
            successor = _tidy_state(frozenset(successors))
            if successor is None:
                continue
            old = by_successor.get(successor)
            by_successor[successor] = cube if old is None \
                else work_mgr.or_(old, cube)
        for successor in by_successor:
            if successor not in index:
                index[successor] = len(index)
                worklist.append(successor)
                if limits is not None:
                    limits.check_states(len(index), "front-end")
        mid_edges.append((src, by_successor))
    end_state = len(index)
    nfa = automata.new_automaton("nfa", props)
    nfa.n_states = end_state + 1
    nfa.initial = frozenset({0})
    nfa.accepting = frozenset({end_state})
    for src, by_successor in mid_edges:
        for successor, cube in by_successor.items():
            nfa.add_edge(src, index[successor],
                         work_mgr.copy_to(nfa.mgr, cube))
    for src, label in end_edges.items():
        nfa.add_edge(src, end_state, work_mgr.copy_to(nfa.mgr, label))
    return nfa


def _tidy_state(members: frozenset[fm.Formula]):
    """Drop trivially true obligations; a false obligation kills the state."""
    if any(isinstance(m, fm.FalseFormula) for m in members):
        return None
    return frozenset(m for m in members if not isinstance(m, fm.TrueFormula))


def _xnf_to_bdd(f: fm.Formula, mgr: BddManager, obligation_var) -> Ref:
    if isinstance(f, fm.TrueFormula):
        return mgr.true
    if isinstance(f, fm.FalseFormula):
        return mgr.false
    if isinstance(f, fm.Atom):
        return mgr.var(f.name)
    if isinstance(f, fm.Not):
        return mgr.not_(_xnf_to_bdd(f.sub, mgr, obligation_var))
    if isinstance(f, fm.And):
        return mgr.and_(_xnf_to_bdd(f.left, mgr, obligation_var),
                        _xnf_to_bdd(f.right, mgr, obligation_var))
    if isinstance(f, fm.Or):
        return mgr.or_(_xnf_to_bdd(f.left, mgr, obligation_var),
                       _xnf_to_bdd(f.right, mgr, obligation_var))
    if isinstance(f, (fm.Next, fm.WeakNext)):
        return mgr.var(obligation_var(f))
    raise fm.NotInNnfError(f"unexpected node {type(f).__name__} in unfolding")


# ---------------------------------------------------------------------------
# Past formula -> minimal DFA through truth-value tracking.

def pltlf_to_dfa(f: fm.Formula, limits: Limits | None = None) -> SemiSymbolicAutomaton:
    """Minimal complete DFA for a past-dialect formula.

    A state is the valuation of the tracked subformulas after the last
    consumed symbol: every since/trigger/once/historically node, the
    argument of every yesterday / weak-yesterday node, and the root.  A
    fresh pre-initial state rejects the empty trace.  The truth-tracking
    automaton is then minimized.
    """
    if fm.dialect_of(f) == "future":
        raise fm.MixedDialectError("the DFA front end takes past formulas")
    props = fm.atoms(f)
    subs = fm.postorder(f)
    tracked: list[fm.Formula] = []
    for g in subs:
        if isinstance(g, (fm.Yesterday, fm.WeakYesterday)):
            candidate = g.sub
        elif isinstance(g, (fm.Since, fm.Trigger, fm.Once, fm.Historically)):
            candidate = g
        else:
            continue
        if not isinstance(candidate, (fm.TrueFormula, fm.FalseFormula)) \
                and candidate not in tracked:
            tracked.append(candidate)
    if f not in tracked:
        tracked.append(f)

    a = automata.new_automaton("dfa", props)
    mgr = a.mgr

    def next_values(state: dict[fm.Formula, bool] | None) -> dict[fm.Formula, Ref]:
        """BDD over the propositions for each subformula's new value."""
        memo: dict[fm.Formula, Ref] = {}

        def val(g: fm.Formula) -> Ref:
            got = memo.get(g)
            if got is not None:
                return got
            if isinstance(g, fm.TrueFormula):
                r = mgr.true
            elif isinstance(g, fm.FalseFormula):
                r = mgr.false
            elif isinstance(g, fm.Atom):
                r = mgr.var(g.name)
            elif isinstance(g, fm.Not):
                r = mgr.not_(val(g.sub))
            elif isinstance(g, fm.And):
                r = mgr.and_(val(g.left), val(g.right))
            elif isinstance(g, fm.Or):
                r = mgr.or_(val(g.left), val(g.right))
            elif isinstance(g, fm.Implies):
                r = val(g.left).implies(val(g.right))
            elif isinstance(g, fm.Iff):
                r = mgr.iff_(val(g.left), val(g.right))
            elif isinstance(g, fm.Yesterday):
                r = _held(state, g.sub, mgr, first=mgr.false)
            elif isinstance(g, fm.WeakYesterday):
                r = _held(state, g.sub, mgr, first=mgr.true)
            elif isinstance(g, fm.Since):
                prev = _held(state, g, mgr, first=mgr.false)
                r = mgr.or_(val(g.right), mgr.and_(val(g.left), prev))
            elif isinstance(g, fm.Trigger):
                prev = _held(state, g, mgr, first=mgr.true)
                r = mgr.and_(val(g.right), mgr.or_(val(g.left), prev))
            elif isinstance(g, fm.Once):
                prev = _held(state, g, mgr, first=mgr.false)
                r = mgr.or_(val(g.sub), prev)
            elif isinstance(g, fm.Historically):
                prev = _held(state, g, mgr, first=mgr.true)
                r = mgr.and_(val(g.sub), prev)
            else:
                raise fm.FormulaError(
                    f"cannot track node {type(g).__name__}")
            memo[g] = r
            return r

        return {g: val(g) for g in tracked}

    pre = 0
    root_idx = tracked.index(f)
    index: dict[tuple[bool, ...], int] = {}
    rows: dict[int, dict[int, Ref]] = {}
    acc: set[int] = set()
    worklist: deque[tuple[bool, ...] | None] = deque([None])
    while worklist:
        key = worklist.popleft()
        if limits is not None:
            limits.check_time("front-end")
        if key is None:
            src = pre
            state = None
        else:
            src = index[key]
            state = dict(zip(tracked, key))
        functions = next_values(state)
        leaves: list[tuple[Ref, tuple[bool, ...]]] = [(mgr.true, ())]
        for g in tracked:
            fn = functions[g]
            nxt: list[tuple[Ref, tuple[bool, ...]]] = []
            for guard, values in leaves:
                hit = mgr.and_(guard, fn)
                if not hit.is_false:
                    nxt.append((hit, values + (True,)))
                miss = mgr.and_(guard, mgr.not_(fn))
                if not miss.is_false:
                    nxt.append((miss, values + (False,)))
            leaves = nxt
        for guard, values in leaves:
            dst = index.get(values)
            if dst is None:
                dst = len(index) + 1
                index[values] = dst
                worklist.append(values)
                if limits is not None:
                    limits.check_states(len(index) + 1, "front-end")
                if values[root_idx]:
                    acc.add(dst)
            rows.setdefault(src, {})
            old = rows[src].get(dst)
            rows[src][dst] = guard if old is None else mgr.or_(old, guard)
    a.n_states = len(index) + 1
    a.initial = frozenset({pre})
    a.accepting = frozenset(acc)
    for src, row in rows.items():
        for dst, label in row.items():
            a.add_edge(src, dst, label)
    return automata.minimize(a, limits)


def _held(state, node, mgr, first: Ref) -> Ref:
    if state is None:
        return first
    if isinstance(node, fm.TrueFormula):
        return mgr.true
    if isinstance(node, fm.FalseFormula):
        return mgr.false
    return mgr.true if state[node] else mgr.false


# ---------------------------------------------------------------------------
# Pipelines.

def pipeline_hopcroft(f: fm.Formula, limits: Limits | None = None
                      ) -> tuple[SemiSymbolicAutomaton, PipelineReport]:
    """Unfold to an NFA, determinize, then merge equivalent states."""
    watch = _Stopwatch()
    nfa = ltlf_to_nfa(f, limits)
    watch.lap("front-end")
    dfa = automata.determinize_explicit(nfa, limits)
    watch.lap("determinize")
    minimal = automata.minimize(dfa, limits)
    watch.lap("minimize")
    report = PipelineReport(pipeline="hopcroft", revdfa_states=0,
                            dfa_states_or_statevars=minimal.n_states,
                            phase_ms=watch.marks, total_ms=watch.total())
    return minimal, report


def pipeline_brzozowski_explicit(f: fm.Formula, limits: Limits | None = None
                                 ) -> tuple[SemiSymbolicAutomaton, PipelineReport]:
    """Minimal DFA for the reversed formula, reversed and determinized.

    No minimization pass runs on the result; reachable subset construction
    over the reverse-deterministic automaton is canonical by itself.
    """
    watch = _Stopwatch()
    reverse_dfa = pltlf_to_dfa(fm.reverse_connectives(f), limits)
    watch.lap("front-end")
    codfa = automata.reverse_automaton(reverse_dfa)
    dfa = automata.determinize_explicit(codfa, limits)
    dfa = automata.complete_with_sink(dfa)
    watch.lap("determinize")
    report = PipelineReport(pipeline="brz-explicit",
                            revdfa_states=reverse_dfa.n_states,
                            dfa_states_or_statevars=dfa.n_states,
                            phase_ms=watch.marks, total_ms=watch.total())
    return dfa, report


def pipeline_brzozowski_symbolic(f: fm.Formula, inputs=None, outputs=None,
                                 limits: Limits | None = None):
    """Symbolic route: the explicit DFA for f is never constructed.

    Returns the symbolic automaton, its reachable-state function, and the
    report.  The proposition partition defaults to all-inputs; it only
    matters for later game solving.
    """
    watch = _Stopwatch()
    reverse_dfa = pltlf_to_dfa(fm.reverse_connectives(f), limits)
    watch.lap("front-end")
    props = set(reverse_dfa.props)
    if inputs is None and outputs is None:
        inputs, outputs = tuple(reverse_dfa.props), ()
    else:
        inputs = tuple(inputs or ())
        outputs = tuple(outputs or ())
        missing = props - set(inputs) - set(outputs)
        if missing:
            raise ValueError(f"propositions not covered by the partition: "
                             f"{sorted(missing)}")
    sdfa = symbolic.symbolic_determinize_reversed(reverse_dfa, inputs, outputs)
    watch.lap("symbolic-encode")
    reachable = symbolic.reachable_states_fixpoint(sdfa, limits)
    watch.lap("reachable")
    report = PipelineReport(pipeline="brz-symbolic",
                            revdfa_states=reverse_dfa.n_states,
                            dfa_states_or_statevars=len(sdfa.statevars),
                            phase_ms=watch.marks, total_ms=watch.total())
    return sdfa, reachable, report


PIPELINES = ("hopcroft", "brz-explicit", "brz-symbolic")
