"""Shared oracles and enumeration helpers for the test suite."""

from __future__ import annotations

import itertools

from minsynth import automata, formula as fm, symbolic


def sigmas(props):
    """All assignments over props, as frozensets of true names."""
    return [frozenset(p for p, b in zip(props, bits) if b)
            for bits in itertools.product((False, True), repeat=len(props))]


def all_traces(props, maxlen, minlen=1):
    out = []
    space = sigmas(props)
    for k in range(minlen, maxlen + 1):
        out.extend(itertools.product(space, repeat=k))
    return out


def language_of(a, maxlen):
    return automata.accepted_set(a, maxlen)


def symbolic_language(d, props, maxlen):
    """Accepted traces of a symbolic automaton, sharing prefix states."""
    accepted = set()
    space = sigmas(props)

    def walk(state, prefix):
        if prefix and d.mgr.eval(d.accept, state):
            accepted.add(prefix)
        if len(prefix) == maxlen:
            return
        for s in space:
            walk(symbolic.step_symbolic(d, state, s), prefix + (s,))

    walk(dict(d.init), ())
    return accepted


def state_signatures(a, maxlen):
    """Per-state acceptance behavior over all traces up to maxlen.

    Two states with different signatures are inequivalent; on the small
    automata used in tests this exhausts the distinctions, so the number of
    distinct signatures among reachable states equals the minimal DFA size.
    """
    table = automata.transition_table(a)
    space = sigmas(a.props)
    signatures = []
    for s in range(a.n_states):
        accepted = []
        frontier = [(s, ())]
        for _ in range(maxlen):
            nxt = []
            for state, word in frontier:
                for sigma in space:
                    target = table[state][sigma]
                    longer = word + (sigma,)
                    if target in a.accepting:
                        accepted.append(longer)
                    nxt.append((target, longer))
            frontier = nxt
        signatures.append((s in a.accepting, frozenset(accepted)))
    return signatures


def nerode_count(a, maxlen=4):
    reachable = automata.reachable_prune(a)
    return len(set(state_signatures(reachable, maxlen)))


def codfa_subset_run(codfa, trace):
    """Subset reached by a co-DFA on a trace (explicit simulation)."""
    current = set(codfa.initial)
    for step in trace:
        current = {d for s in current
                   for d, label in codfa.edges.get(s, {}).items()
                   if codfa.mgr.eval(label, step)}
    return frozenset(current)


def adversary_worst_case(d, strategy, max_steps):
    """Breadth-first walk of every adversary play under a strategy.

    Returns the number of steps after which every play has reached an
    accepting state, or None if some play survives max_steps.  Strategies
    are positional, so worst case over state sets equals worst case over
    input sequences.
    """
    mgr = d.mgr
    x_choices = sigmas(d.inputs)
    frontier = {tuple(sorted(d.init.items()))}
    for depth in range(max_steps):
        nxt = set()
        for key in frontier:
            state = dict(key)
            outs = {y for y in d.outputs
                    if mgr.eval(strategy.output_funcs[y], state)}
            for x in x_choices:
                after = symbolic.step_symbolic(d, state, x | outs)
                if not mgr.eval(d.accept, after):
                    nxt.add(tuple(sorted(after.items())))
        if not nxt:
            return depth + 1
        frontier = nxt
    return None


def compare_languages(f, a, maxlen):
    from minsynth import bench
    return bench.oracle_language(f, maxlen) == language_of(a, maxlen)
