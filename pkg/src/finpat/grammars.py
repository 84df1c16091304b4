"""Context-free grammars: cleanup, finiteness, bounded enumeration, combinators.

Text format::

    start S
    terminals 0 1
    variables S A          (optional; inferred otherwise)
    S -> A A | 0
    A -> 0 1
    A -> ~

``~`` is the empty right-hand side.  Any right-hand-side token that is not a
declared terminal is a variable.
"""

from __future__ import annotations

import sys
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from . import automata
from .errors import DomainError, ParseError, ResourceError
from .words import Alphabet, Word

Production = tuple[str, tuple[str, ...]]
_RESERVED = {"->", "|", "~"}
MAX_DAG_DEPTH = 20000


@dataclass(frozen=True)
class Cfg:
    variables: tuple[str, ...]
    terminals: Alphabet
    productions: tuple[Production, ...]
    start: str
    _by_lhs: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        variables = tuple(dict.fromkeys(self.variables))
        prods = tuple(dict.fromkeys((x, tuple(rhs)) for x, rhs in self.productions))
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "productions", prods)
        vs = set(variables)
        if self.start not in vs:
            raise DomainError(f"start symbol {self.start!r} is not a variable")
        clash = vs & set(self.terminals)
        if clash:
            raise DomainError(f"symbols both variable and terminal: {sorted(clash)}")
        for sym in list(vs) + list(self.terminals):
            if sym in _RESERVED:
                raise DomainError(f"{sym!r} is reserved in the grammar format")
        by_lhs: dict[str, list[tuple[str, ...]]] = {x: [] for x in variables}
        for x, rhs in prods:
            if x not in vs:
                raise DomainError(f"production head {x!r} is not a variable")
            for s in rhs:
                if s not in vs and s not in self.terminals:
                    raise DomainError(f"undeclared symbol {s!r} in production for {x!r}")
            by_lhs[x].append(rhs)
        object.__setattr__(self, "_by_lhs", by_lhs)

    def rules(self, x: str) -> list[tuple[str, ...]]:
        return self._by_lhs[x]

    def is_variable(self, sym: str) -> bool:
        return sym in self._by_lhs

    @property
    def size(self) -> int:
        return sum(1 + len(rhs) for _, rhs in self.productions)

    def with_start(self, x: str) -> "Cfg":
        return Cfg(self.variables, self.terminals, self.productions, x)


def make_cfg(start: str, terminals: Iterable[str], productions: Iterable[Production]) -> Cfg:
    """Build a grammar, inferring the variable set from start and productions."""
    terms = Alphabet(tuple(terminals))
    prods = [(x, tuple(rhs)) for x, rhs in productions]
    vs = [start]
    for x, rhs in prods:
        vs.append(x)
        vs.extend(s for s in rhs if s not in terms)
    return Cfg(tuple(vs), terms, tuple(prods), start)


def empty_grammar(terminals: Alphabet, start: str = "S") -> Cfg:
    return Cfg((start,), terminals, (), start)


def fresh_name(base: str, taken) -> str:
    name, i = base, 1
    while name in taken:
        name = f"{base}{i}"
        i += 1
    return name


# -- cleanup ------------------------------------------------------------------


def productive_variables(g: Cfg) -> frozenset[str]:
    prod: set[str] = set()
    changed = True
    while changed:
        changed = False
        for x, rhs in g.productions:
            if x not in prod and all(not g.is_variable(s) or s in prod for s in rhs):
                prod.add(x)
                changed = True
    return frozenset(prod)


def reachable_variables(g: Cfg) -> frozenset[str]:
    seen = {g.start}
    todo = [g.start]
    while todo:
        x = todo.pop()
        for rhs in g.rules(x):
            for s in rhs:
                if g.is_variable(s) and s not in seen:
                    seen.add(s)
                    todo.append(s)
    return frozenset(seen)


def trim(g: Cfg) -> Cfg:
    """Drop non-productive, then unreachable, variables."""
    prod = productive_variables(g)
    if g.start not in prod:
        return empty_grammar(g.terminals, g.start)
    keep = [(x, rhs) for x, rhs in g.productions
            if x in prod and all(not g.is_variable(s) or s in prod for s in rhs)]
    g1 = Cfg(tuple(v for v in g.variables if v in prod), g.terminals, tuple(keep), g.start)
    reach = reachable_variables(g1)
    return Cfg(tuple(v for v in g1.variables if v in reach), g.terminals,
               tuple((x, rhs) for x, rhs in keep if x in reach), g.start)


def is_empty(g: Cfg) -> bool:
    return g.start not in productive_variables(g)


def _can_be_nonempty(g: Cfg) -> frozenset[str]:
    ne: set[str] = set()
    changed = True
    while changed:
        changed = False
        for x, rhs in g.productions:
            if x not in ne and any(not g.is_variable(s) or s in ne for s in rhs):
                ne.add(x)
                changed = True
    return frozenset(ne)


def _derives_edges(g: Cfg):
    """Yield ``(x, rhs, i, weighted)`` for every variable occurrence rhs[i].

    ``weighted`` marks edges whose siblings can contribute a terminal, i.e.
    the ones that pump length when they lie on a cycle.
    """
    ne = _can_be_nonempty(g)
    for x, rhs in g.productions:
        for i, s in enumerate(rhs):
            if g.is_variable(s):
                w = any(not g.is_variable(t) or t in ne
                        for j, t in enumerate(rhs) if j != i)
                yield x, rhs, i, w


def _components(g: Cfg) -> dict[str, int]:
    graph = nx.DiGraph()
    graph.add_nodes_from(g.variables)
    for x, rhs, i, _ in _derives_edges(g):
        graph.add_edge(x, rhs[i])
    comp = {}
    for k, scc in enumerate(nx.strongly_connected_components(graph)):
        for v in scc:
            comp[v] = k
    return comp


def _pumping_edge(g: Cfg):
    comp = _components(g)
    for x, rhs, i, w in _derives_edges(g):
        if w and comp[x] == comp[rhs[i]]:
            return x, rhs, i
    return None


def is_finite(g: Cfg) -> bool:
    return _pumping_edge(trim(g)) is None


def shortest_words(g: Cfg) -> dict[str, Word]:
    """A shortest terminal yield for every productive variable."""
    best: dict[str, Word] = {}
    changed = True
    while changed:
        changed = False
        for x, rhs in g.productions:
            if all(not g.is_variable(s) or s in best for s in rhs):
                w = tuple(t for s in rhs for t in (best[s] if g.is_variable(s) else (s,)))
                if x not in best or len(w) < len(best[x]):
                    best[x] = w
                    changed = True
    return best


def _nonempty_words(g: Cfg, best: dict[str, Word]) -> dict[str, Word]:
    ne: dict[str, Word] = {}
    changed = True
    while changed:
        changed = False
        for x, rhs in g.productions:
            if x in ne or not all(not g.is_variable(s) or s in best for s in rhs):
                continue
            for j, s in enumerate(rhs):
                if not g.is_variable(s) or s in ne:
                    ne[x] = _expand(g, rhs, best, {j: ne.get(s, (s,))})
                    changed = True
                    break
    return ne


def _expand(g: Cfg, rhs, best, override=None) -> Word:
    override = override or {}
    out: list[str] = []
    for j, s in enumerate(rhs):
        if j in override:
            out.extend(override[j])
        elif g.is_variable(s):
            out.extend(best[s])
        else:
            out.append(s)
    return tuple(out)


def pumping_witness(g: Cfg) -> Optional[tuple[Word, Word, Word, Word, Word]]:
    """``(u, v, w, x, y)`` with ``vx`` non-empty and ``u v^i w x^i y`` in L(g) for all i.

    None when L(g) is finite.
    """
    g = trim(g)
    edge = _pumping_edge(g)
    if edge is None:
        return None
    best = shortest_words(g)
    ne = _nonempty_words(g, best)
    comp = _components(g)
    top, rhs0, i0 = edge

    # first step uses a sibling that yields something non-empty
    j = next(j for j, s in enumerate(rhs0)
             if j != i0 and (not g.is_variable(s) or s in ne))
    over = {j: ne[rhs0[j]]} if g.is_variable(rhs0[j]) else {}
    left = [_expand(g, rhs0[:i0], best, over)]
    right = [_expand(g, rhs0[i0 + 1:], best, {k - i0 - 1: v for k, v in over.items()})]

    # walk back from rhs0[i0] to `top` inside the component
    path = _variable_path(g, rhs0[i0], top, lambda v: comp[v] == comp[top])
    for x, rhs, i in path:
        left.append(_expand(g, rhs[:i], best))
        right.append(_expand(g, rhs[i + 1:], best))
    v = tuple(s for part in left for s in part)
    xx = tuple(s for part in reversed(right) for s in part)

    u_parts, y_parts = [], []
    for x, rhs, i in _variable_path(g, g.start, top, lambda _: True):
        u_parts.append(_expand(g, rhs[:i], best))
        y_parts.append(_expand(g, rhs[i + 1:], best))
    u = tuple(s for part in u_parts for s in part)
    y = tuple(s for part in reversed(y_parts) for s in part)
    return u, v, best[top], xx, y


def _variable_path(g: Cfg, src: str, dst: str, allowed):
    """Shortest chain of ``(head, rhs, position)`` steps deriving ``dst`` from ``src``."""
    prev = {src: None}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            break
        for rhs in g.rules(x):
            for i, s in enumerate(rhs):
                if g.is_variable(s) and s not in prev and allowed(s):
                    prev[s] = (x, rhs, i)
                    queue.append(s)
    steps = []
    cur = dst
    while prev[cur] is not None:
        steps.append(prev[cur])
        cur = prev[cur][0]
    return list(reversed(steps))


def length_bound(g: Cfg) -> int:
    """Upper bound b**v on word length for a finite-language grammar.

    ``b`` is the longest right-hand side (at least 2) and ``v`` the number of
    useful variables.
    """
    t = trim(g)
    if _pumping_edge(t) is not None:
        raise DomainError("length_bound needs a finite language")
    if not t.productions:
        return 1
    b = max(2, max(len(rhs) for _, rhs in t.productions))
    return b ** len(t.variables)


# -- enumeration ----------------------------------------------------------------


def enumerate_words(g: Cfg, max_len: int) -> list[Word]:
    """All words of L(g) of length <= max_len, deduplicated, length-then-lex order.

    Works bottom-up over strongly connected groups of variables, iterating each
    group to a fixpoint; every intermediate word set is capped at ``max_len``.
    """
    g = trim(g)
    if not g.productions:
        return []
    graph = nx.DiGraph()
    graph.add_nodes_from(g.variables)
    for x, rhs in g.productions:
        for s in rhs:
            if g.is_variable(s):
                graph.add_edge(x, s)
    cond = nx.condensation(graph)
    langs: dict[str, set[Word]] = {x: set() for x in g.variables}

    def combine(rhs):
        partial = {()}
        for s in rhs:
            options = langs[s] if g.is_variable(s) else ((s,),)
            partial = {u + v for u in partial for v in options if len(u) + len(v) <= max_len}
            if not partial:
                break
        return partial

    for node in reversed(list(nx.topological_sort(cond))):
        group = cond.nodes[node]["members"]
        rules = [(x, rhs) for x in group for rhs in g.rules(x)]
        changed = True
        while changed:
            changed = False
            for x, rhs in rules:
                new = combine(rhs) - langs[x]
                if new:
                    langs[x] |= new
                    changed = True
    return sorted(langs[g.start], key=g.terminals.sort_key())


# -- combinators ------------------------------------------------------------------


def rename_variables(g: Cfg, mapping) -> Cfg:
    ren = lambda s: mapping.get(s, s) if g.is_variable(s) else s  # noqa: E731
    return Cfg(tuple(ren(v) for v in g.variables), g.terminals,
               tuple((ren(x), tuple(ren(s) for s in rhs)) for x, rhs in g.productions),
               ren(g.start))


def concat_with_separators(gs: Sequence[Cfg], sep: str, lead: Optional[str] = None) -> Cfg:
    """Grammar for L(g1) sep L(g2) sep ... L(gk) sep.

    With ``lead``, every block is also preceded by that symbol:
    lead L(g1) sep lead L(g2) sep ...
    """
    gs = list(gs)
    if not gs:
        raise DomainError("need at least one grammar")
    terminals: list[str] = []
    for g in gs:
        if sep in g.terminals or (lead is not None and lead in g.terminals):
            raise DomainError(f"separator {sep!r} or {lead!r} already a terminal")
        terminals.extend(g.terminals)
    if lead == sep:
        raise DomainError("lead and separator must differ")
    terminals = list(dict.fromkeys(terminals)) + [sep] + ([lead] if lead is not None else [])
    taken = set(terminals)
    variables: list[str] = []
    prods: list[Production] = []
    starts = []
    for i, g in enumerate(gs, 1):
        mapping = {}
        for v in g.variables:
            mapping[v] = fresh_name(f"{v}.{i}", taken)
            taken.add(mapping[v])
        h = rename_variables(g, mapping)
        variables.extend(h.variables)
        prods.extend(h.productions)
        starts.append(h.start)
    start = fresh_name("S", taken)
    head = (lead,) if lead is not None else ()
    body = tuple(s for x in starts for s in head + (x, sep))
    return Cfg((start, *variables), Alphabet(tuple(terminals)), ((start, body), *prods), start)


def prefix_grammar(g: Cfg) -> Cfg:
    """Grammar for the prefix closure of L(g), the empty word included.

    Every useful variable X gets a companion generating the prefixes of its
    yields: X' -> ~ and X' -> s1 .. s(i-1) P(si) for each production
    X -> s1 .. sr, where P(Y) = Y' and P(a) = a.
    """
    g = trim(g)
    if not g.productions:
        return g
    taken = set(g.variables) | set(g.terminals)
    prime = {}
    for v in g.variables:
        prime[v] = fresh_name(v + "'", taken)
        taken.add(prime[v])
    prods: list[Production] = list(g.productions)
    for x in g.variables:
        prods.append((prime[x], ()))
        for rhs in g.rules(x):
            for i, s in enumerate(rhs):
                last = prime[s] if g.is_variable(s) else s
                prods.append((prime[x], rhs[:i] + (last,)))
    variables = (prime[g.start],) + tuple(prime[v] for v in g.variables if v != g.start) + g.variables
    return Cfg(variables, g.terminals, tuple(prods), prime[g.start])


def from_nfa(m) -> Cfg:
    """Right-linear grammar with L equal to the automaton's language."""
    m = m.to_nfa()
    taken = set(m.alphabet)
    names = {q: fresh_name(f"Q{q}", taken) for q in range(m.n)}
    start = fresh_name("S", taken | set(names.values()))
    prods: list[Production] = [(start, (names[q],)) for q in sorted(m.starts)]
    for q in range(m.n):
        for a, t in m.out(q):
            prods.append((names[q], (names[t],) if a is None else (a, names[t])))
        if q in m.accepting:
            prods.append((names[q], ()))
    return Cfg((start, *names.values()), m.alphabet, tuple(prods), start)


class _Residuals:
    """Hash-consed DAG of non-empty finite languages.

    A node is ``(accepts empty word, ((symbol, node), ...))``; interning makes
    equal languages share one node, so the DAG is a minimal trimmed DFA.
    ``None`` is the empty language.
    """

    def __init__(self, sigma: Alphabet):
        self.sigma = sigma
        self.ids: dict = {}
        self.nodes: list = []
        self._union: dict = {}
        self._concat: dict = {}
        self.eps = self.node(True, {})

    def node(self, acc: bool, out: dict) -> int:
        key = (acc, tuple(sorted(out.items(), key=lambda kv: self.sigma.index(kv[0]))))
        if key not in self.ids:
            self.ids[key] = len(self.nodes)
            self.nodes.append(key)
        return self.ids[key]

    def symbol(self, a: str) -> int:
        return self.node(False, {a: self.eps})

    def union(self, x, y):
        if x is None or x == y:
            return y
        if y is None:
            return x
        key = (min(x, y), max(x, y))
        if key not in self._union:
            (ax, ox), (ay, oy) = self.nodes[x], self.nodes[y]
            out = dict(ox)
            for a, t in oy:
                out[a] = self.union(out.get(a), t)
            self._union[key] = self.node(ax or ay, out)
        return self._union[key]

    def concat(self, x, y):
        if x is None or y is None:
            return None
        if x == self.eps:
            return y
        if y == self.eps:
            return x
        if (x, y) not in self._concat:
            (ax, ox), (ay, oy) = self.nodes[x], self.nodes[y]
            out = {a: self.concat(t, y) for a, t in ox}
            if ax:
                for a, t in oy:
                    out[a] = self.union(out.get(a), t)
            self._concat[x, y] = self.node(ax and ay, out)
        return self._concat[x, y]

    def to_dfa(self, root) -> "automata.Dfa":
        if root is None:
            return automata.trie_dfa([], self.sigma)
        number = {root: 0}
        order = [root]
        for x in order:
            for _, t in self.nodes[x][1]:
                if t not in number:
                    number[t] = len(order)
                    order.append(t)
        dead = len(order)
        delta = {(dead, a): dead for a in self.sigma}
        for x in order:
            out = dict(self.nodes[x][1])
            for a in self.sigma:
                delta[number[x], a] = number[out[a]] if a in out else dead
        accepting = frozenset(number[x] for x in order if self.nodes[x][0])
        return automata.Dfa(dead + 1, self.sigma, delta, 0, accepting)


def finite_language_dfa(g: Cfg) -> "automata.Dfa":
    """Minimal DFA for the finite language L(g).

    Built bottom-up over the strongly connected components of the derives
    graph.  In a finite grammar a cycle only passes through siblings that
    derive nothing but the empty word, so all variables of a component share
    one language and rules that re-enter the component add nothing to it.
    """
    t = trim(g)
    if not is_finite(t):
        raise DomainError("grammar generates an infinite language")
    dag = _Residuals(t.terminals)
    if is_empty(t):
        return dag.to_dfa(None)
    graph = nx.DiGraph()
    graph.add_nodes_from(t.variables)
    for x, rhs in t.productions:
        graph.add_edges_from((x, s) for s in rhs if t.is_variable(s))
    cond = nx.condensation(graph)
    member = cond.graph["mapping"]
    order = list(reversed(list(nx.topological_sort(cond))))

    def exits(c):
        for x in cond.nodes[c]["members"]:
            for rhs in t.rules(x):
                if not any(t.is_variable(s) and member[s] == c for s in rhs):
                    yield rhs

    longest: dict[int, int] = {}
    for c in order:
        longest[c] = max(sum(longest[member[s]] if t.is_variable(s) else 1 for s in rhs)
                         for rhs in exits(c))
    depth = longest[member[t.start]]
    if depth > MAX_DAG_DEPTH:
        raise ResourceError(f"longest word has {depth} symbols, over {MAX_DAG_DEPTH}")
    lang: dict[int, Optional[int]] = {}
    limit = sys.getrecursionlimit()
    # union/concat recurse once per symbol of the longest word
    sys.setrecursionlimit(max(limit, 3 * depth + 1000))
    try:
        for c in order:
            total = None
            for rhs in exits(c):
                part = dag.eps
                for s in rhs:
                    part = dag.concat(part, lang[member[s]] if t.is_variable(s) else dag.symbol(s))
                total = dag.union(total, part)
            lang[c] = total
    finally:
        sys.setrecursionlimit(limit)
    return dag.to_dfa(lang[member[t.start]])


# -- text format ----------------------------------------------------------------


def format_cfg(g: Cfg) -> str:
    lines = [f"start {g.start}", "terminals " + " ".join(g.terminals),
             "variables " + " ".join(g.variables)]
    for x, rhs in g.productions:
        lines.append(f"{x} -> " + (" ".join(rhs) if rhs else "~"))
    return "\n".join(lines) + "\n"


def parse_cfg(text: str) -> Cfg:
    start = None
    terminals: Optional[tuple[str, ...]] = None
    declared: list[str] = []
    prods: list[Production] = []
    for no, raw in enumerate(text.splitlines(), 1):
        toks = raw.split()
        if not toks:
            continue
        if toks[0] == "start" and "->" not in toks:
            if len(toks) != 2:
                raise ParseError("start takes one variable", no)
            start = toks[1]
        elif toks[0] == "terminals" and "->" not in toks:
            terminals = tuple(toks[1:])
        elif toks[0] == "variables" and "->" not in toks:
            declared.extend(toks[1:])
        elif len(toks) >= 2 and toks[1] == "->":
            head = toks[0]
            alt: list[str] = []
            for tok in toks[2:] + ["|"]:
                if tok == "|":
                    if alt == ["~"]:
                        alt = []
                    elif "~" in alt:
                        raise ParseError("'~' must stand alone", no)
                    prods.append((head, tuple(alt)))
                    alt = []
                else:
                    alt.append(tok)
        else:
            raise ParseError(f"cannot parse {raw.strip()!r}", no)
    if start is None or terminals is None:
        raise ParseError("missing 'start' or 'terminals' directive")
    try:
        terms = Alphabet(terminals)
        variables = [start, *declared]
        for x, rhs in prods:
            variables.append(x)
            variables.extend(s for s in rhs if s not in terms)
        return Cfg(tuple(variables), terms, tuple(prods), start)
    except DomainError as e:
        raise ParseError(str(e)) from None
