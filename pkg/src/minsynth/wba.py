"""Alive-proposition encoding of a co-DFA as a weak Buchi automaton.

The encoding exists so that finite-word subset construction can run inside
infinite-word machinery: a fresh proposition keeps the word "alive", a sink
state absorbs the moment it goes down, and decoding strips both again.
The round trip must land on the same canonical DFA as the direct route.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import automata
from .automata import AutomataError, SemiSymbolicAutomaton

ALIVE = "alive"


class WbaError(AutomataError):
    pass


@dataclass
class WeakBuchiAutomaton:
    aut: SemiSymbolicAutomaton  # kind wba, over the original props plus alive
    sink: int


def codfa_to_wba(c: SemiSymbolicAutomaton) -> WeakBuchiAutomaton:
    """Steps: add a sink, route accepting states to it on not-alive, guard
    every original edge with alive, loop the sink on not-alive, and make the
    sink the only accepting state."""
    if c.kind != "codfa":
        raise WbaError(f"expected a codfa, got kind {c.kind!r}")
    if ALIVE in c.props:
        raise WbaError(f"input already uses the proposition {ALIVE!r}")
    w = automata.new_automaton("wba", tuple(c.props) + (ALIVE,))
    sink = c.n_states
    w.n_states = c.n_states + 1
    w.initial = c.initial
    w.accepting = frozenset({sink})
    alive = w.mgr.var(ALIVE)
    not_alive = w.mgr.not_(alive)
    for s, label, d in c.all_edges():
        w.add_edge(s, d, w.mgr.and_(c.mgr.copy_to(w.mgr, label), alive))
    for s in sorted(c.accepting):
        w.add_edge(s, sink, not_alive)
    w.add_edge(sink, sink, not_alive)
    return WeakBuchiAutomaton(aut=w, sink=sink)


def validate_wba(w: WeakBuchiAutomaton, original: SemiSymbolicAutomaton) -> None:
    """Structural checks for the five construction steps."""
    a = w.aut
    mgr = a.mgr
    alive = mgr.var(ALIVE)
    not_alive = mgr.not_(alive)
    if a.n_states != original.n_states + 1:
        raise WbaError("sink state missing")
    if a.accepting != frozenset({w.sink}):
        raise WbaError("sink is not the unique accepting state")
    sink_out = a.edges.get(w.sink, {})
    if list(sink_out) != [w.sink] or sink_out[w.sink] != not_alive:
        raise WbaError("sink must carry exactly one self-loop on !alive")
    for s, label, d in a.all_edges():
        if s == w.sink:
            continue
        if d == w.sink:
            if label != not_alive:
                raise WbaError(f"sink-entering edge {s}->{d} is not !alive")
            if s not in original.accepting:
                raise WbaError(f"non-accepting state {s} enters the sink")
        elif not mgr.and_(label, not_alive).is_false:
            raise WbaError(f"edge {s}->{d} does not imply alive")
    for s in original.accepting:
        if a.edges.get(s, {}).get(w.sink) is None:
            raise WbaError(f"accepting state {s} lacks its sink edge")


def determinize_wba(w: WeakBuchiAutomaton, limits=None) -> SemiSymbolicAutomaton:
    """Subset construction over the alive-extended alphabet."""
    return automata.determinize_explicit(w.aut, limits)


def wdba_to_dfa(d: SemiSymbolicAutomaton) -> SemiSymbolicAutomaton:
    """Decode a determinized encoding back to a DFA over the original props.

    Steps: drop the sink subset, fix alive to true on every label, and
    accept exactly the states that moved to the sink subset on not-alive.
    An encoding whose sink subset is unreachable denotes the empty language
    and decodes to the all-rejecting automaton.
    """
    if ALIVE not in d.props:
        raise WbaError(f"input does not range over {ALIVE!r}")
    if d.subset_origin is None:
        raise WbaError("input lacks subset bookkeeping from determinization")
    sink_candidates = sorted(d.accepting)
    if len(sink_candidates) > 1:
        raise WbaError("no unique sink subset found")
    sink_subset = sink_candidates[0] if sink_candidates else None
    keep = [s for s in range(d.n_states) if s != sink_subset]
    remap = {old: new for new, old in enumerate(keep)}
    props = tuple(p for p in d.props if p != ALIVE)
    out = automata.new_automaton("dfa", props)
    out.n_states = len(keep)
    out.initial = frozenset(remap[s] for s in d.initial)
    accepting = set()
    for s, label, t in d.all_edges():
        if s == sink_subset:
            continue
        if t == sink_subset:
            accepting.add(remap[s])
            continue
        fixed = d.mgr.cofactor(label, ALIVE, True)
        if fixed.is_false:
            continue
        out.add_edge(remap[s], remap[t], d.mgr.copy_to(out.mgr, fixed))
    out.accepting = frozenset(accepting)
    out.subset_origin = tuple(d.subset_origin[s] for s in keep)
    # subsets reached only through not-alive moves lose their incoming
    # edges once alive is fixed; drop them before completing
    out = automata.reachable_prune(out)
    return automata.canonical_renumber(
        automata.complete_with_sink(out))


def roundtrip_via_wba(c: SemiSymbolicAutomaton, limits=None) -> SemiSymbolicAutomaton:
    """codfa -> weak Buchi -> determinize -> DFA."""
    w = codfa_to_wba(c)
    validate_wba(w, c)
    det = determinize_wba(w, limits)
    return wdba_to_dfa(det)
