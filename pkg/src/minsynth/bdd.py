"""Reduced ordered binary decision diagrams.

One manager per task; a manager owns a variable order (registration order),
a unique table and the operation caches.  References are canonical: two
semantically equal functions built in the same manager compare equal.
No complement edges.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, Mapping

# strategy-file variable names may carry primes and dots
_VAR_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.']*")


class BddError(Exception):
    pass


class CrossManagerError(BddError):
    pass


class UnknownVariableError(BddError):
    pass


_FALSE = 0
_TRUE = 1
_LEAF_LEVEL = 1 << 30


class Ref:
    """Handle to one Boolean function inside one manager."""

    __slots__ = ("mgr", "node")

    def __init__(self, mgr: "BddManager", node: int):
        self.mgr = mgr
        self.node = node

    def __eq__(self, other):
        return (isinstance(other, Ref) and other.mgr is self.mgr
                and other.node == self.node)

    def __hash__(self):
        return hash((id(self.mgr), self.node))

    def __repr__(self):
        return f"Ref(node={self.node})"

    @property
    def is_true(self) -> bool:
        return self.node == _TRUE

    @property
    def is_false(self) -> bool:
        return self.node == _FALSE

    def __and__(self, other: "Ref") -> "Ref":
        return self.mgr.and_(self, other)

    def __or__(self, other: "Ref") -> "Ref":
        return self.mgr.or_(self, other)

    def __invert__(self) -> "Ref":
        return self.mgr.not_(self)

    def __xor__(self, other: "Ref") -> "Ref":
        return self.mgr.xor_(self, other)

    def implies(self, other: "Ref") -> "Ref":
        return self.mgr.ite(self, other, self.mgr.true)

    def equiv(self, other: "Ref") -> "Ref":
        return self.mgr.iff_(self, other)


class BddManager:
    def __init__(self):
        # node id -> (level, low, high); ids 0/1 are the terminals
        self._nodes: list[tuple[int, int, int]] = [
            (_LEAF_LEVEL, 0, 0), (_LEAF_LEVEL, 0, 0)]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._ite_cache: dict[tuple[int, int, int], int] = {}
        self._quant_cache: dict[tuple, int] = {}
        self._restrict_cache: dict[tuple[int, int], int] = {}
        self._var_level: dict[str, int] = {}
        self._level_var: list[str] = []

    # -- variables ----------------------------------------------------------

    def add_var(self, name: str) -> Ref:
        if name in self._var_level:
            return self.var(name)
        level = len(self._level_var)
        self._var_level[name] = level
        self._level_var.append(name)
        return Ref(self, self._mk(level, _FALSE, _TRUE))

    def var(self, name: str) -> Ref:
        level = self._level(name)
        return Ref(self, self._mk(level, _FALSE, _TRUE))

    def has_var(self, name: str) -> bool:
        return name in self._var_level

    def var_names(self) -> list[str]:
        return list(self._level_var)

    def _level(self, name: str) -> int:
        try:
            return self._var_level[name]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {name!r}") from None

    @property
    def true(self) -> Ref:
        return Ref(self, _TRUE)

    @property
    def false(self) -> Ref:
        return Ref(self, _FALSE)

    # -- kernel -------------------------------------------------------------

    def _mk(self, level: int, low: int, high: int) -> int:
        if low == high:
            return low
        key = (level, low, high)
        node = self._unique.get(key)
        if node is None:
            node = len(self._nodes)
            self._nodes.append(key)
            self._unique[key] = node
        return node

    def _cof(self, n: int, level: int) -> tuple[int, int]:
        lv, lo, hi = self._nodes[n]
        if lv == level:
            return lo, hi
        return n, n

    def _ite(self, f: int, g: int, h: int) -> int:
        if f == _TRUE:
            return g
        if f == _FALSE:
            return h
        if g == h:
            return g
        if g == _TRUE and h == _FALSE:
            return f
        key = (f, g, h)
        r = self._ite_cache.get(key)
        if r is not None:
            return r
        nodes = self._nodes
        level = min(nodes[f][0], nodes[g][0], nodes[h][0])
        f0, f1 = self._cof(f, level)
        g0, g1 = self._cof(g, level)
        h0, h1 = self._cof(h, level)
        r = self._mk(level, self._ite(f0, g0, h0), self._ite(f1, g1, h1))
        self._ite_cache[key] = r
        return r

    def _check(self, *refs: Ref) -> None:
        for r in refs:
            if not isinstance(r, Ref) or r.mgr is not self:
                raise CrossManagerError(
                    "reference does not belong to this manager")

    # -- Boolean connectives -------------------------------------------------

    def ite(self, f: Ref, g: Ref, h: Ref) -> Ref:
        self._check(f, g, h)
        return Ref(self, self._ite(f.node, g.node, h.node))

    def not_(self, f: Ref) -> Ref:
        self._check(f)
        return Ref(self, self._ite(f.node, _FALSE, _TRUE))

    def and_(self, f: Ref, g: Ref) -> Ref:
        self._check(f, g)
        return Ref(self, self._ite(f.node, g.node, _FALSE))

    def or_(self, f: Ref, g: Ref) -> Ref:
        self._check(f, g)
        return Ref(self, self._ite(f.node, _TRUE, g.node))

    def xor_(self, f: Ref, g: Ref) -> Ref:
        self._check(f, g)
        return Ref(self, self._ite(f.node, self._ite(g.node, _FALSE, _TRUE),
                                   g.node))

    def iff_(self, f: Ref, g: Ref) -> Ref:
        self._check(f, g)
        return Ref(self, self._ite(f.node, g.node,
                                   self._ite(g.node, _FALSE, _TRUE)))

    def all_of(self, refs: Iterable[Ref]) -> Ref:
        out = self.true
        for r in refs:
            out = self.and_(out, r)
        return out

    def any_of(self, refs: Iterable[Ref]) -> Ref:
        out = self.false
        for r in refs:
            out = self.or_(out, r)
        return out

    # -- quantification ------------------------------------------------------

    def exists(self, names: Iterable[str], f: Ref) -> Ref:
        return self._quantify(names, f, True)

    def forall(self, names: Iterable[str], f: Ref) -> Ref:
        return self._quantify(names, f, False)

    def _quantify(self, names: Iterable[str], f: Ref, exists: bool) -> Ref:
        self._check(f)
        levels = frozenset(self._level(n) for n in names)
        if not levels:
            return f
        key_levels = tuple(sorted(levels))

        def rec(n: int) -> int:
            if n <= _TRUE:
                return n
            key = (exists, n, key_levels)
            r = self._quant_cache.get(key)
            if r is not None:
                return r
            level, lo, hi = self._nodes[n]
            rlo, rhi = rec(lo), rec(hi)
            if level in levels:
                r = self._ite(rlo, _TRUE, rhi) if exists \
                    else self._ite(rlo, rhi, _FALSE)
            else:
                r = self._mk(level, rlo, rhi)
            self._quant_cache[key] = r
            return r

        return Ref(self, rec(f.node))

    # -- substitution ---------------------------------------------------------

    def compose(self, f: Ref, mapping: Mapping[str, Ref]) -> Ref:
        """Simultaneous substitution of functions for variables."""
        self._check(f, *mapping.values())
        images = {self._level(name): g.node for name, g in mapping.items()}
        memo: dict[int, int] = {}

        def rec(n: int) -> int:
            if n <= _TRUE:
                return n
            r = memo.get(n)
            if r is not None:
                return r
            level, lo, hi = self._nodes[n]
            rlo, rhi = rec(lo), rec(hi)
            g = images.get(level)
            if g is None:
                g = self._mk(level, _FALSE, _TRUE)
            r = self._ite(g, rhi, rlo)
            memo[n] = r
            return r

        return Ref(self, rec(f.node))

    def cofactor(self, f: Ref, name: str, value: bool) -> Ref:
        return self.compose(f, {name: self.true if value else self.false})

    def rename(self, f: Ref, mapping: Mapping[str, str]) -> Ref:
        return self.compose(f, {a: self.var(b) for a, b in mapping.items()})

    # -- generalized cofactor --------------------------------------------------

    def restrict(self, f: Ref, care: Ref) -> Ref:
        """Simplify f against a care set (Coudert-Madre restrict).

        The result agrees with f on every assignment satisfying care;
        elsewhere values are chosen to shrink the diagram.
        """
        self._check(f, care)
        if care.node == _FALSE:
            raise BddError("restrict against an empty care set")

        def rec(fn: int, cn: int) -> int:
            if cn == _TRUE or fn <= _TRUE:
                return fn
            key = (fn, cn)
            r = self._restrict_cache.get(key)
            if r is not None:
                return r
            flv = self._nodes[fn][0]
            clv, clo, chi = self._nodes[cn]
            if clv < flv:
                r = rec(fn, self._ite(clo, _TRUE, chi))
            elif flv < clv:
                _, flo, fhi = self._nodes[fn]
                r = self._mk(flv, rec(flo, cn), rec(fhi, cn))
            elif clo == _FALSE:
                r = rec(self._nodes[fn][2], chi)
            elif chi == _FALSE:
                r = rec(self._nodes[fn][1], clo)
            else:
                _, flo, fhi = self._nodes[fn]
                r = self._mk(flv, rec(flo, clo), rec(fhi, chi))
            self._restrict_cache[key] = r
            return r

        return Ref(self, rec(f.node, care.node))

    # -- inspection -------------------------------------------------------------

    def support(self, f: Ref) -> frozenset[str]:
        self._check(f)
        seen: set[int] = set()
        levels: set[int] = set()
        stack = [f.node]
        while stack:
            n = stack.pop()
            if n <= _TRUE or n in seen:
                continue
            seen.add(n)
            level, lo, hi = self._nodes[n]
            levels.add(level)
            stack.append(lo)
            stack.append(hi)
        return frozenset(self._level_var[lv] for lv in levels)

    def eval(self, f: Ref, assignment) -> bool:
        """Evaluate under an assignment.

        A mapping gives explicit values per variable name; a set means the
        named variables are true and every other variable false.
        """
        self._check(f)
        n = f.node
        is_map = isinstance(assignment, Mapping)
        while n > _TRUE:
            level, lo, hi = self._nodes[n]
            name = self._level_var[level]
            if is_map:
                try:
                    value = assignment[name]
                except KeyError:
                    raise BddError(f"assignment misses variable {name!r}") \
                        from None
            else:
                value = name in assignment
            n = hi if value else lo
        return n == _TRUE

    def sat_paths(self, f: Ref) -> Iterator[dict[str, bool]]:
        """Partial assignments covering exactly the satisfying set."""
        self._check(f)

        def rec(n: int, path: dict[str, bool]):
            if n == _FALSE:
                return
            if n == _TRUE:
                yield dict(path)
                return
            level, lo, hi = self._nodes[n]
            name = self._level_var[level]
            path[name] = False
            yield from rec(lo, path)
            path[name] = True
            yield from rec(hi, path)
            del path[name]

        yield from rec(f.node, {})

    def count_nodes(self, f: Ref) -> int:
        self._check(f)
        seen: set[int] = set()
        stack = [f.node]
        while stack:
            n = stack.pop()
            if n <= _TRUE or n in seen:
                continue
            seen.add(n)
            _, lo, hi = self._nodes[n]
            stack.extend((lo, hi))
        return len(seen) + 1

    def least_assignment(self, f: Ref, over: Iterable[str]):
        """Lexicographically least satisfying assignment over the listed
        variables (compared as bit strings with 0 < 1), or None."""
        self._check(f)
        order = list(over)
        extra = self.support(f) - set(order)
        if extra:
            raise BddError(
                f"function depends on variables outside 'over': {sorted(extra)}")
        if f.node == _FALSE:
            return None
        out: dict[str, bool] = {}
        g = f
        for name in order:
            g0 = self.cofactor(g, name, False)
            if g0.node != _FALSE:
                out[name] = False
                g = g0
            else:
                out[name] = True
                g = self.cofactor(g, name, True)
        assert g.node == _TRUE
        return out

    def cube(self, assignment: Mapping[str, bool]) -> Ref:
        out = self.true
        for name in sorted(assignment):
            v = self.var(name)
            out = self.and_(out, v if assignment[name] else self.not_(v))
        return out

    # -- transfer and serialization -----------------------------------------------

    def copy_to(self, dst: "BddManager", f: Ref,
                rename: Mapping[str, str] | None = None) -> Ref:
        """Rebuild f inside another manager, optionally renaming variables."""
        self._check(f)
        rename = rename or {}
        memo: dict[int, Ref] = {_FALSE: dst.false, _TRUE: dst.true}

        def rec(n: int) -> Ref:
            r = memo.get(n)
            if r is not None:
                return r
            level, lo, hi = self._nodes[n]
            name = rename.get(self._level_var[level], self._level_var[level])
            r = dst.ite(dst.var(name), rec(hi), rec(lo))
            memo[n] = r
            return r

        return rec(f.node)

    def to_ite_text(self, f: Ref) -> str:
        self._check(f)

        def rec(n: int) -> str:
            if n == _FALSE:
                return "0"
            if n == _TRUE:
                return "1"
            level, lo, hi = self._nodes[n]
            return f"ite({self._level_var[level]}, {rec(hi)}, {rec(lo)})"

        return rec(f.node)

    def parse_ite_text(self, text: str) -> Ref:
        pos = 0

        def skip_ws():
            nonlocal pos
            while pos < len(text) and text[pos].isspace():
                pos += 1

        def expect(ch: str):
            nonlocal pos
            skip_ws()
            if pos >= len(text) or text[pos] != ch:
                raise BddError(f"malformed ite text near offset {pos}")
            pos += 1

        def rec() -> Ref:
            nonlocal pos
            skip_ws()
            if text.startswith("ite(", pos):
                pos += 4
                skip_ws()
                m = _VAR_RE.match(text, pos)
                if not m:
                    raise BddError(f"expected variable at offset {pos}")
                name = m.group(0)
                pos = m.end()
                expect(",")
                hi = rec()
                expect(",")
                lo = rec()
                expect(")")
                return self.ite(self.var(name), hi, lo)
            if pos < len(text) and text[pos] in "01":
                node = self.true if text[pos] == "1" else self.false
                pos += 1
                return node
            raise BddError(f"malformed ite text near offset {pos}")

        out = rec()
        skip_ws()
        if pos != len(text):
            raise BddError(f"trailing input in ite text at offset {pos}")
        return out

    def to_formula_text(self, f: Ref) -> str:
        """Render as propositional formula text (parseable by the formula
        grammar)."""
        self._check(f)

        def rec(n: int) -> str:
            if n == _FALSE:
                return "false"
            if n == _TRUE:
                return "true"
            level, lo, hi = self._nodes[n]
            v = self._level_var[level]
            if hi == _TRUE and lo == _FALSE:
                return v
            if hi == _FALSE and lo == _TRUE:
                return f"!{v}"
            if hi == _TRUE:
                return f"({v} | {rec(lo)})"
            if lo == _FALSE:
                return f"({v} & {rec(hi)})"
            if hi == _FALSE:
                return f"(!{v} & {rec(lo)})"
            if lo == _TRUE:
                return f"(!{v} | {rec(hi)})"
            return f"({v} & {rec(hi)} | !{v} & {rec(lo)})"

        return rec(f.node)
