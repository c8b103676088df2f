"""Semi-symbolic finite automata: explicit states, BDD-labeled edges.

Supported kinds: nfa, dfa, codfa (reverse-deterministic) and wba (the
alive-extended encoding built in the wba module).  A dfa here is always
complete: from every state the outgoing labels partition the assignment
space.  Languages never contain the empty trace unless an initial state
is accepting.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field, replace

from .bdd import BddManager, Ref
from .formula import Trace, UnknownPropositionError, dialect_of, parse_formula


class AutomataError(Exception):
    pass


class IncompleteDfaError(AutomataError):
    pass


class NondeterminismError(AutomataError):
    pass


@dataclass
class SemiSymbolicAutomaton:
    kind: str
    props: tuple[str, ...]
    n_states: int
    initial: frozenset[int]
    accepting: frozenset[int]
    mgr: BddManager
    # src -> dst -> label; labels are satisfiable and merged per (src, dst)
    edges: dict[int, dict[int, Ref]] = field(default_factory=dict)
    # set by determinize_explicit: original-state subset per new state
    subset_origin: tuple[frozenset[int], ...] | None = None

    def out(self, s: int) -> list[tuple[int, Ref]]:
        return sorted(self.edges.get(s, {}).items())

    def add_edge(self, src: int, dst: int, label: Ref) -> None:
        if label.is_false:
            return
        row = self.edges.setdefault(src, {})
        old = row.get(dst)
        row[dst] = label if old is None else self.mgr.or_(old, label)

    def all_edges(self) -> list[tuple[int, Ref, int]]:
        return [(s, label, d)
                for s in sorted(self.edges)
                for d, label in sorted(self.edges[s].items())]


def new_automaton(kind: str, props) -> SemiSymbolicAutomaton:
    mgr = BddManager()
    props = tuple(props)
    for p in props:
        mgr.add_var(p)
    return SemiSymbolicAutomaton(kind=kind, props=props, n_states=0,
                                 initial=frozenset(), accepting=frozenset(),
                                 mgr=mgr)


# ---------------------------------------------------------------------------
# Runs.

def run(a: SemiSymbolicAutomaton, trace: Trace) -> bool:
    """Accept iff some run over the whole trace ends in an accepting state.

    The empty trace is accepted iff an initial state is accepting.
    """
    unknown = set(trace.props) - set(a.props)
    if unknown:
        raise UnknownPropositionError(
            f"trace mentions propositions outside the automaton: {sorted(unknown)}")
    current = set(a.initial)
    for step in trace:
        nxt: set[int] = set()
        for s in current:
            for d, label in a.edges.get(s, {}).items():
                if d not in nxt and a.mgr.eval(label, step):
                    nxt.add(d)
        current = nxt
        if not current:
            return False
    return bool(current & a.accepting)


def accepted_set(a: SemiSymbolicAutomaton, maxlen: int) -> set[tuple[frozenset[str], ...]]:
    """All accepted traces of length 1..maxlen (test helper)."""
    sigmas = [frozenset(c) for c in _assignments(a.props)]
    out: set[tuple[frozenset[str], ...]] = set()

    def walk(current: frozenset[int], prefix: tuple[frozenset[str], ...]):
        if len(prefix) >= 1 and current & a.accepting:
            out.add(prefix)
        if len(prefix) == maxlen:
            return
        for sigma in sigmas:
            nxt = frozenset(
                d for s in current for d, label in a.edges.get(s, {}).items()
                if a.mgr.eval(label, sigma))
            if nxt:
                walk(nxt, prefix + (sigma,))

    walk(frozenset(a.initial), ())
    return out


def _assignments(props):
    for bits in itertools.product((False, True), repeat=len(props)):
        yield {p for p, b in zip(props, bits) if b}


# ---------------------------------------------------------------------------
# Reversal and pruning.

def reverse_automaton(a: SemiSymbolicAutomaton) -> SemiSymbolicAutomaton:
    """Swap initial and accepting states and flip every edge."""
    kind = "codfa" if a.kind == "dfa" else "nfa"
    rev = SemiSymbolicAutomaton(kind=kind, props=a.props, n_states=a.n_states,
                                initial=a.accepting, accepting=a.initial,
                                mgr=a.mgr)
    for s, label, d in a.all_edges():
        rev.add_edge(d, s, label)
    return rev


def reachable_prune(a: SemiSymbolicAutomaton) -> SemiSymbolicAutomaton:
    keep: set[int] = set()
    frontier = sorted(a.initial)
    while frontier:
        s = frontier.pop()
        if s in keep:
            continue
        keep.add(s)
        frontier.extend(d for d in a.edges.get(s, {}) if d not in keep)
    order = sorted(keep)
    remap = {old: new for new, old in enumerate(order)}
    pruned = SemiSymbolicAutomaton(
        kind=a.kind, props=a.props, n_states=len(order),
        initial=frozenset(remap[s] for s in a.initial),
        accepting=frozenset(remap[s] for s in a.accepting if s in keep),
        mgr=a.mgr)
    for s, label, d in a.all_edges():
        if s in keep and d in keep:
            pruned.add_edge(remap[s], remap[d], label)
    if a.subset_origin is not None:
        pruned.subset_origin = tuple(a.subset_origin[old] for old in order)
    return pruned


# ---------------------------------------------------------------------------
# Determinization.

def determinize_explicit(a: SemiSymbolicAutomaton, limits=None) -> SemiSymbolicAutomaton:
    """Subset construction, emitting only reachable subsets.

    Output is a complete DFA; the dead subset (empty set) appears when some
    assignment has no successor.  subset_origin records the member states of
    the input behind each output state.
    """
    det = SemiSymbolicAutomaton(kind="dfa", props=a.props, n_states=0,
                                initial=frozenset(), accepting=frozenset(),
                                mgr=a.mgr)
    start = frozenset(a.initial)
    index: dict[frozenset[int], int] = {start: 0}
    origin = [start]
    worklist = deque([start])
    acc: set[int] = set()
    while worklist:
        subset = worklist.popleft()
        if limits is not None:
            limits.check_time("determinize")
        src = index[subset]
        if subset & a.accepting:
            acc.add(src)
        # per target state of the input, the disjunction of matching labels
        into: dict[int, Ref] = {}
        for s in sorted(subset):
            for d, label in a.edges.get(s, {}).items():
                old = into.get(d)
                into[d] = label if old is None else a.mgr.or_(old, label)
        # split the assignment space by successor subset
        leaves: list[tuple[Ref, frozenset[int]]] = [(a.mgr.true, frozenset())]
        for d in sorted(into):
            label = into[d]
            nxt: list[tuple[Ref, frozenset[int]]] = []
            for guard, members in leaves:
                hit = a.mgr.and_(guard, label)
                if not hit.is_false:
                    nxt.append((hit, members | {d}))
                miss = a.mgr.and_(guard, a.mgr.not_(label))
                if not miss.is_false:
                    nxt.append((miss, members))
            leaves = nxt
        for guard, members in leaves:
            dst = index.get(members)
            if dst is None:
                dst = len(index)
                index[members] = dst
                origin.append(members)
                worklist.append(members)
                if limits is not None:
                    limits.check_states(len(index), "determinize")
            det.add_edge(src, dst, guard)
    det.n_states = len(index)
    det.initial = frozenset({0})
    det.accepting = frozenset(acc)
    det.subset_origin = tuple(origin)
    return canonical_renumber(det)


def complete_with_sink(a: SemiSymbolicAutomaton) -> SemiSymbolicAutomaton:
    """Route uncovered assignments of a deterministic automaton to a fresh
    rejecting sink."""
    _check_deterministic(a)
    missing: dict[int, Ref] = {}
    for s in range(a.n_states):
        covered = a.mgr.any_of(label for _, label in a.out(s))
        gap = a.mgr.not_(covered)
        if not gap.is_false:
            missing[s] = gap
    if not missing:
        return a
    sink = a.n_states
    out = replace(a, n_states=a.n_states + 1,
                  edges={s: dict(row) for s, row in a.edges.items()},
                  subset_origin=None)
    for s, gap in missing.items():
        out.add_edge(s, sink, gap)
    out.add_edge(sink, sink, a.mgr.true)
    return out


def _check_deterministic(a: SemiSymbolicAutomaton) -> None:
    if len(a.initial) > 1:
        raise NondeterminismError("more than one initial state")
    for s in range(a.n_states):
        labels = [label for _, label in a.out(s)]
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                if not a.mgr.and_(labels[i], labels[j]).is_false:
                    raise NondeterminismError(
                        f"overlapping labels out of state {s}")


def _check_complete_dfa(a: SemiSymbolicAutomaton) -> None:
    if a.kind != "dfa":
        raise IncompleteDfaError(f"expected a dfa, got kind {a.kind!r}")
    _check_deterministic(a)
    for s in range(a.n_states):
        covered = a.mgr.any_of(label for _, label in a.out(s))
        if not covered.is_true:
            raise IncompleteDfaError(f"state {s} does not cover all assignments")


# ---------------------------------------------------------------------------
# Minimization (Moore-style refinement with label-function signatures).

def minimize(a: SemiSymbolicAutomaton, limits=None) -> SemiSymbolicAutomaton:
    """Canonical minimal complete DFA for the language of a.

    Starts from the accepting / rejecting split and refines: two states
    separate as soon as their label disjunctions into some block differ as
    Boolean functions.
    """
    _check_complete_dfa(a)
    a = reachable_prune(a)
    block_of = [0] * a.n_states
    for s in a.accepting:
        block_of[s] = 1
    n_blocks = 2 if a.accepting and len(a.accepting) < a.n_states else 1
    if not a.accepting:
        block_of = [0] * a.n_states
    while True:
        if limits is not None:
            limits.check_time("minimize")
        signatures: dict[tuple, int] = {}
        new_block_of = [0] * a.n_states
        for s in range(a.n_states):
            into: dict[int, int] = {}
            for d, label in a.out(s):
                b = block_of[d]
                merged = into.get(b)
                into[b] = label.node if merged is None else \
                    a.mgr.or_(Ref(a.mgr, merged), label).node
            sig = (block_of[s], tuple(sorted(into.items())))
            idx = signatures.setdefault(sig, len(signatures))
            new_block_of[s] = idx
        if len(signatures) == n_blocks:
            block_of = new_block_of
            break
        n_blocks = len(signatures)
        block_of = new_block_of
    rep: dict[int, int] = {}
    for s in range(a.n_states):
        rep.setdefault(block_of[s], s)
    quotient = SemiSymbolicAutomaton(
        kind="dfa", props=a.props, n_states=n_blocks,
        initial=frozenset({block_of[next(iter(a.initial))]}),
        accepting=frozenset(block_of[s] for s in a.accepting),
        mgr=a.mgr)
    for b, s in rep.items():
        for d, label in a.out(s):
            quotient.add_edge(b, block_of[d], label)
    return canonical_renumber(quotient)


def canonical_renumber(a: SemiSymbolicAutomaton) -> SemiSymbolicAutomaton:
    """Deterministic state numbering: breadth-first from the initial states,
    successors ordered by the least satisfying assignment of their labels."""
    order: list[int] = []
    seen: set[int] = set()
    queue = sorted(a.initial)
    seen.update(queue)
    order.extend(queue)
    qi = 0
    while qi < len(order):
        s = order[qi]
        qi += 1
        ranked = sorted(a.out(s), key=lambda item: _label_rank(a, item[1]))
        for d, _ in ranked:
            if d not in seen:
                seen.add(d)
                order.append(d)
    for s in range(a.n_states):  # unreachable states keep a stable tail order
        if s not in seen:
            order.append(s)
    remap = {old: new for new, old in enumerate(order)}
    out = SemiSymbolicAutomaton(
        kind=a.kind, props=a.props, n_states=a.n_states,
        initial=frozenset(remap[s] for s in a.initial),
        accepting=frozenset(remap[s] for s in a.accepting),
        mgr=a.mgr)
    for s, label, d in a.all_edges():
        out.add_edge(remap[s], remap[d], label)
    if a.subset_origin is not None:
        out.subset_origin = tuple(a.subset_origin[old] for old in order)
    return out


def _label_rank(a: SemiSymbolicAutomaton, label: Ref) -> tuple:
    least = a.mgr.least_assignment(label, a.props)
    if least is None:
        return (2,)
    return (0, tuple(least[p] for p in a.props))


# ---------------------------------------------------------------------------
# Isomorphism of minimal complete DFAs.

def is_isomorphic(a: SemiSymbolicAutomaton, b: SemiSymbolicAutomaton) -> bool:
    """State bijection preserving initial, accepting, and edge labels.

    Both inputs must be minimal complete DFAs over the same propositions;
    traversal pairs successors through the least satisfying assignment of
    each outgoing label.
    """
    if set(a.props) != set(b.props):
        raise AutomataError("automata disagree on propositions")
    _check_complete_dfa(a)
    _check_complete_dfa(b)
    if a.n_states != b.n_states or len(a.accepting) != len(b.accepting):
        return False
    # move b's labels into a's manager so functions compare by node id
    b_edges: dict[int, list[tuple[int, Ref]]] = {}
    for s in range(b.n_states):
        b_edges[s] = [(d, b.mgr.copy_to(a.mgr, label))
                      for d, label in b.out(s)]
    pair_ab: dict[int, int] = {}
    pair_ba: dict[int, int] = {}
    sa, sb = next(iter(a.initial)), next(iter(b.initial))
    queue = [(sa, sb)]
    while queue:
        u, v = queue.pop(0)
        got = pair_ab.get(u)
        if got is not None:
            if got != v or pair_ba.get(v) != u:
                return False
            continue
        if v in pair_ba:
            return False
        if (u in a.accepting) != (v in b.accepting):
            return False
        pair_ab[u] = v
        pair_ba[v] = u
        for du, label in a.out(u):
            witness = a.mgr.least_assignment(label, a.props)
            assert witness is not None
            sigma = {p for p, value in witness.items() if value}
            targets = [(dv, lv) for dv, lv in b_edges[v]
                       if a.mgr.eval(lv, sigma)]
            if len(targets) != 1:
                return False
            dv, lv = targets[0]
            if lv != label:
                return False
            queue.append((du, dv))
    return len(pair_ab) == a.n_states


# ---------------------------------------------------------------------------
# Helpers for oracles and tests.

def transition_table(a: SemiSymbolicAutomaton) -> list[dict[frozenset[str], int]]:
    """Per-state successor lookup by full assignment (deterministic kinds)."""
    _check_complete_dfa(a)
    sigmas = [frozenset(c) for c in _assignments(a.props)]
    table: list[dict[frozenset[str], int]] = []
    for s in range(a.n_states):
        row: dict[frozenset[str], int] = {}
        for sigma in sigmas:
            for d, label in a.out(s):
                if a.mgr.eval(label, sigma):
                    row[sigma] = d
                    break
        table.append(row)
    return table


# ---------------------------------------------------------------------------
# Text format and DOT export.

def to_text(a: SemiSymbolicAutomaton) -> str:
    lines = [
        f"kind: {a.kind}",
        "props: " + " ".join(a.props),
        f"states: {a.n_states}",
        "initial: " + " ".join(str(s) for s in sorted(a.initial)),
        "accepting: " + " ".join(str(s) for s in sorted(a.accepting)),
    ]
    for s, label, d in a.all_edges():
        lines.append(f"trans: {s} -> {d} [{a.mgr.to_formula_text(label)}]")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> SemiSymbolicAutomaton:
    kind = props = None
    n_states = 0
    initial: frozenset[int] = frozenset()
    accepting: frozenset[int] = frozenset()
    trans: list[tuple[int, int, str]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(":")
        key, rest = key.strip(), rest.strip()
        if key == "kind":
            kind = rest
        elif key == "props":
            props = tuple(rest.split())
        elif key == "states":
            n_states = int(rest)
        elif key == "initial":
            initial = frozenset(int(x) for x in rest.split())
        elif key == "accepting":
            accepting = frozenset(int(x) for x in rest.split())
        elif key == "trans":
            head, _, labeltext = rest.partition("[")
            if not labeltext.endswith("]"):
                raise AutomataError(f"malformed transition line: {line!r}")
            src_s, _, dst_s = head.partition("->")
            trans.append((int(src_s), int(dst_s), labeltext[:-1].strip()))
        else:
            raise AutomataError(f"unknown line in automaton text: {line!r}")
    if kind is None or props is None:
        raise AutomataError("automaton text misses kind or props")
    a = new_automaton(kind, props)
    a.n_states = n_states
    a.initial = initial
    a.accepting = accepting
    for src, dst, labeltext in trans:
        f = parse_formula(labeltext)
        if dialect_of(f) != "propositional":
            raise AutomataError(
                f"edge label is not propositional: {labeltext!r}")
        a.add_edge(src, dst, _formula_to_bdd(a.mgr, f))
    return a


def _formula_to_bdd(mgr: BddManager, f) -> Ref:
    from . import formula as fm
    if isinstance(f, fm.TrueFormula):
        return mgr.true
    if isinstance(f, fm.FalseFormula):
        return mgr.false
    if isinstance(f, fm.Atom):
        return mgr.var(f.name)
    if isinstance(f, fm.Not):
        return mgr.not_(_formula_to_bdd(mgr, f.sub))
    if isinstance(f, fm.And):
        return mgr.and_(_formula_to_bdd(mgr, f.left), _formula_to_bdd(mgr, f.right))
    if isinstance(f, fm.Or):
        return mgr.or_(_formula_to_bdd(mgr, f.left), _formula_to_bdd(mgr, f.right))
    if isinstance(f, fm.Implies):
        return _formula_to_bdd(mgr, f.left).implies(_formula_to_bdd(mgr, f.right))
    if isinstance(f, fm.Iff):
        return mgr.iff_(_formula_to_bdd(mgr, f.left), _formula_to_bdd(mgr, f.right))
    raise AutomataError(f"non-propositional node {type(f).__name__} in label")


def to_dot(a: SemiSymbolicAutomaton) -> str:
    lines = ["digraph automaton {", "  rankdir=LR;", "  node [shape=circle];"]
    for s in sorted(a.accepting):
        lines.append(f"  {s} [shape=doublecircle];")
    for i, s in enumerate(sorted(a.initial)):
        lines.append(f"  __init{i} [shape=point];")
        lines.append(f"  __init{i} -> {s};")
    for s, label, d in a.all_edges():
        text = a.mgr.to_formula_text(label).replace('"', r'\"')
        lines.append(f'  {s} -> {d} [label="{text}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
