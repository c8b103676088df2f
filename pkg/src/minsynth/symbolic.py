"""Fully-symbolic DFAs, reachability, game solving, strategies.

States live in assignments over a vector of state variables; the transition
function is oneOOL function per state variable over state variables plus
propositions.  Variable order: each state variable interleaved with its
primed copy, then input propositions, then output propositions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automata import SemiSymbolicAutomaton
from .bdd import BddManager, Ref
from .formula import Trace, UnknownPropositionError


class SymbolicError(Exception):
    pass


@dataclass
class SymbolicDfa:
    mgr: BddManager
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    statevars: tuple[str, ...]
    init: dict[str, bool]
    delta: dict[str, Ref]
    accept: Ref

    @property
    def props(self) -> tuple[str, ...]:
        return self.inputs + self.outputs

    def primed(self, z: str) -> str:
        return z + "'"


@dataclass
class GameResult:
    realizable: bool
    iterations: int
    w: Ref
    t: Ref
    r: Ref | None = None
    w_history: list[Ref] = field(default_factory=list)


@dataclass
class Strategy:
    dfa: SymbolicDfa
    output_funcs: dict[str, Ref]

    @property
    def stop(self) -> Ref:
        return self.dfa.accept


def _new_symbolic(inputs, outputs, statevars) -> SymbolicDfa:
    mgr = BddManager()
    for z in statevars:
        mgr.add_var(z)
        mgr.add_var(z + "'")
    for p in tuple(inputs) + tuple(outputs):
        mgr.add_var(p)
    return SymbolicDfa(mgr=mgr, inputs=tuple(inputs), outputs=tuple(outputs),
                       statevars=tuple(statevars), init={}, delta={},
                       accept=mgr.false)


# ---------------------------------------------------------------------------
# Construction from explicit automata.

def encode_explicit_dfa(a: SemiSymbolicAutomaton, inputs, outputs) -> SymbolicDfa:
    """Binary state encoding of a complete explicit DFA.

    Uses ceil(log2 n) state variables; spare codes are self-trapping and
    rejecting, so the encoded automaton is total on all assignments.
    """
    from .automata import _check_complete_dfa
    _check_complete_dfa(a)
    _check_partition(a.props, inputs, outputs)
    nbits = max(a.n_states - 1, 0).bit_length()
    statevars = tuple(f"z{i}" for i in range(nbits))
    d = _new_symbolic(inputs, outputs, statevars)
    mgr = d.mgr

    def code(s: int) -> dict[str, bool]:
        return {z: bool(s >> i & 1) for i, z in enumerate(statevars)}

    def cube(s: int) -> Ref:
        return mgr.cube(code(s))

    assigned = mgr.any_of(cube(s) for s in range(a.n_states))
    spare = mgr.not_(assigned)
    d.init = code(next(iter(a.initial)))
    d.accept = mgr.any_of(cube(s) for s in sorted(a.accepting))
    for i, z in enumerate(statevars):
        parts = []
        for s, label, t in a.all_edges():
            if t >> i & 1:
                parts.append(mgr.and_(cube(s), a.mgr.copy_to(mgr, label)))
        fn = mgr.any_of(parts)
        if not spare.is_false:
            fn = mgr.or_(fn, mgr.and_(spare, mgr.var(z)))
        d.delta[z] = fn
    return d


def symbolic_determinize_reversed(a: SemiSymbolicAutomaton, inputs, outputs
                                  ) -> SymbolicDfa:
    """Fused reversal plus subset construction of a reverse-language DFA.

    One state variable per state of a.  Reading a's edges backwards, the
    next value of variable s is true when some currently-set t has an
    a-edge from s to t matching the symbol; the initial assignment sets
    exactly a's accepting states and acceptance is a's initial variable.
    """
    _check_partition(a.props, inputs, outputs)
    statevars = tuple(f"s{i}" for i in range(a.n_states))
    d = _new_symbolic(inputs, outputs, statevars)
    mgr = d.mgr
    parts: dict[int, list[Ref]] = {s: [] for s in range(a.n_states)}
    for s, label, t in a.all_edges():
        parts[s].append(mgr.and_(mgr.var(f"s{t}"), a.mgr.copy_to(mgr, label)))
    for s in range(a.n_states):
        d.delta[f"s{s}"] = mgr.any_of(parts[s])
    d.init = {f"s{i}": (i in a.accepting) for i in range(a.n_states)}
    d.accept = mgr.any_of(mgr.var(f"s{i}") for i in sorted(a.initial))
    return d


def _check_partition(props, inputs, outputs) -> None:
    inputs, outputs = set(inputs), set(outputs)
    if inputs & outputs:
        raise SymbolicError(
            f"propositions both input and output: {sorted(inputs & outputs)}")
    uncovered = set(props) - inputs - outputs
    if uncovered:
        raise SymbolicError(
            f"propositions not covered by the partition: {sorted(uncovered)}")


# ---------------------------------------------------------------------------
# Runs.

def run_symbolic(d: SymbolicDfa, trace: Trace) -> bool:
    state = simulate(d, trace)
    return d.mgr.eval(d.accept, state)


def simulate(d: SymbolicDfa, trace: Trace) -> dict[str, bool]:
    """State assignment reached after consuming the whole trace."""
    unknown = set(trace.props) - set(d.props)
    if unknown:
        raise UnknownPropositionError(
            f"trace mentions unknown propositions: {sorted(unknown)}")
    state = dict(d.init)
    for step in trace:
        state = step_symbolic(d, state, step)
    return state


def step_symbolic(d: SymbolicDfa, state: dict[str, bool],
                  sigma) -> dict[str, bool]:
    env = dict(state)
    for p in d.props:
        env[p] = p in sigma
    return {z: d.mgr.eval(d.delta[z], env) for z in d.statevars}


# ---------------------------------------------------------------------------
# Reachability.

def reachable_states_fixpoint(d: SymbolicDfa, limits=None) -> Ref:
    """Least fixpoint of the forward image from the initial assignment."""
    mgr = d.mgr
    prime = {z: d.primed(z) for z in d.statevars}
    trans = mgr.true
    for z in d.statevars:
        shifted = mgr.rename(d.delta[z], prime)
        trans = mgr.and_(trans, mgr.iff_(mgr.var(z), shifted))
    quantified = [d.primed(z) for z in d.statevars] + list(d.props)
    r = mgr.cube(d.init)
    while True:
        if limits is not None:
            limits.check_time("reachable")
        source = mgr.rename(r, prime)
        image = mgr.exists(quantified, mgr.and_(source, trans))
        nxt = mgr.or_(r, image)
        if nxt == r:
            return r
        r = nxt


def enumerate_states(d: SymbolicDfa, r: Ref) -> list[dict[str, bool]]:
    """Explicit expansion of a state-set function (test helper)."""
    out = []
    for path in d.mgr.sat_paths(r):
        free = [z for z in d.statevars if z not in path]
        for bits in range(1 << len(free)):
            full = dict(path)
            for i, z in enumerate(free):
                full[z] = bool(bits >> i & 1)
            out.append({z: full.get(z, False) for z in d.statevars})
    uniq = {tuple(sorted(s.items())): s for s in out}
    return [uniq[k] for k in sorted(uniq)]


# ---------------------------------------------------------------------------
# The reachability game.

def solve_game(d: SymbolicDfa, prune: str = "none", r: Ref | None = None,
               limits=None, keep_history: bool = False) -> GameResult:
    """Backward fixpoint of winning states and winning (state, output) pairs.

    Starting from the accepting set, a state joins when some output forces
    every input to land in the current winning set.  With pruning enabled
    the pair set is cut down to reachable states after every step, either
    by conjunction or by the restrict operator.
    """
    if prune not in ("none", "conjunction", "restrict"):
        raise SymbolicError(f"unknown prune mode {prune!r}")
    if prune != "none" and r is None:
        raise SymbolicError("pruning requires the reachable-state function")
    mgr = d.mgr
    t = d.accept
    w = d.accept
    history = [w]
    iterations = 0
    while True:
        if limits is not None:
            limits.check_time("game")
        iterations += 1
        after = mgr.compose(w, d.delta)
        forced = mgr.forall(d.inputs, after)
        t_next = mgr.or_(t, mgr.and_(mgr.not_(w), forced))
        if prune == "conjunction":
            t_next = mgr.and_(t_next, r)
        elif prune == "restrict":
            t_next = mgr.restrict(t_next, r)
        w_next = mgr.exists(d.outputs, t_next)
        if keep_history:
            history.append(w_next)
        if prune == "restrict":
            settled = mgr.and_(w_next, r) == mgr.and_(w, r) \
                and mgr.and_(t_next, r) == mgr.and_(t, r)
        else:
            settled = w_next == w
        t, w = t_next, w_next
        if settled:
            break
    realizable = mgr.eval(w, {**d.init, **{p: False for p in d.props}})
    return GameResult(realizable=realizable, iterations=iterations,
                      w=w, t=t, r=r, w_history=history if keep_history else [])


def extract_strategy(d: SymbolicDfa, g: GameResult) -> Strategy:
    """Deterministic winning outputs: the least satisfying output vector of
    the pair set at each state, fixed one output variable at a time."""
    if not g.realizable:
        raise SymbolicError("cannot extract a strategy from an unrealizable game")
    mgr = d.mgr
    fn = g.t
    funcs: dict[str, Ref] = {}
    for i, y in enumerate(d.outputs):
        rest = d.outputs[i + 1:]
        t0 = mgr.cofactor(fn, y, False)
        t1 = mgr.cofactor(fn, y, True)
        can0 = mgr.exists(rest, t0) if rest else t0
        fy = mgr.not_(can0)
        funcs[y] = fy
        fn = mgr.ite(fy, t1, t0)
    return Strategy(dfa=d, output_funcs=funcs)


def run_strategy(s: Strategy, inputs: list) -> tuple[Trace, int | None]:
    """Drive the strategy against a sequence of input assignments.

    Outputs are emitted before each adversary input is consumed.  Returns
    the consumed trace and the first index whose post-symbol state is
    accepting; the index is None when no prefix is accepted, and -1 in the
    degenerate case of an accepting initial state.
    """
    d = s.dfa
    mgr = d.mgr
    input_set = set(d.inputs)
    state = dict(d.init)
    if mgr.eval(d.accept, state):
        return Trace.make(d.props, []), -1
    steps = []
    for k, given in enumerate(inputs):
        extra = set(given) - input_set
        if extra:
            raise UnknownPropositionError(
                f"input assignment mentions non-input propositions: {sorted(extra)}")
        outs = {y for y in d.outputs if mgr.eval(s.output_funcs[y], state)}
        sigma = frozenset(given) | outs
        steps.append(sigma)
        state = step_symbolic(d, state, sigma)
        if mgr.eval(d.accept, state):
            return Trace.make(d.props, steps), k
    return Trace.make(d.props, steps), None


# ---------------------------------------------------------------------------
# Strategy and symbolic-automaton file formats.

def strategy_to_text(s: Strategy) -> str:
    d = s.dfa
    lines = ["strategy",
             "inputs: " + " ".join(d.inputs),
             "outputs: " + " ".join(d.outputs),
             "statevars: " + " ".join(d.statevars),
             "init: " + "".join("1" if d.init[z] else "0" for z in d.statevars)]
    for z in d.statevars:
        lines.append(f"delta {z}: {d.mgr.to_ite_text(d.delta[z])}")
    for y in d.outputs:
        lines.append(f"out {y}: {d.mgr.to_ite_text(s.output_funcs[y])}")
    lines.append(f"accept: {d.mgr.to_ite_text(d.accept)}")
    return "\n".join(lines) + "\n"


def strategy_from_text(text: str) -> Strategy:
    lines = [ln.rstrip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "strategy":
        raise SymbolicError("not a strategy file")
    body: list[tuple[str, str]] = []
    for ln in lines[1:]:
        key, _, rest = ln.partition(":")
        body.append((key.strip(), rest.strip()))
    fields = dict(body)
    inputs = tuple(fields.get("inputs", "").split())
    outputs = tuple(fields.get("outputs", "").split())
    statevars = tuple(fields.get("statevars", "").split())
    initbits = fields.get("init", "")
    if len(initbits) != len(statevars):
        raise SymbolicError("init bitstring does not match the state variables")
    d = _new_symbolic(inputs, outputs, statevars)
    d.init = {z: b == "1" for z, b in zip(statevars, initbits)}
    funcs: dict[str, Ref] = {}
    for key, rest in body:
        words = key.split()
        if words[0] == "delta" and len(words) == 2:
            d.delta[words[1]] = d.mgr.parse_ite_text(rest)
        elif words[0] == "out" and len(words) == 2:
            funcs[words[1]] = d.mgr.parse_ite_text(rest)
        elif words[0] == "accept":
            d.accept = d.mgr.parse_ite_text(rest)
    missing = [z for z in statevars if z not in d.delta]
    if missing:
        raise SymbolicError(f"strategy file misses delta for {missing}")
    missing = [y for y in outputs if y not in funcs]
    if missing:
        raise SymbolicError(f"strategy file misses outputs for {missing}")
    return Strategy(dfa=d, output_funcs=funcs)


def symbolic_dfa_to_text(d: SymbolicDfa) -> str:
    lines = ["symbolicdfa",
             "inputs: " + " ".join(d.inputs),
             "outputs: " + " ".join(d.outputs),
             "statevars: " + " ".join(d.statevars),
             "init: " + "".join("1" if d.init[z] else "0" for z in d.statevars)]
    for z in d.statevars:
        lines.append(f"delta {z}: {d.mgr.to_ite_text(d.delta[z])}")
    lines.append(f"accept: {d.mgr.to_ite_text(d.accept)}")
    return "\n".join(lines) + "\n"
