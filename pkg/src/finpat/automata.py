"""Finite automata: representation, simulation, finiteness and enumeration.

States are integers ``0 .. n-1``.  NFA transitions are triples
``(q, symbol, q2)`` where ``symbol`` is ``None`` for an epsilon move.

Text format, one directive per line::

    states 3
    alphabet 0 1
    start 0
    accept 2
    trans 0 0 1
    trans 1 ~ 2
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Optional, Union

import networkx as nx

from .errors import DomainError, ParseError
from .words import Alphabet, Word

EPS = None
EPS_TOKEN = "~"


@dataclass(frozen=True)
class Dfa:
    n: int
    alphabet: Alphabet
    delta: Mapping[tuple[int, str], int]
    start: int
    accepting: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "delta", dict(self.delta))
        if self.n < 1:
            raise DomainError("a DFA needs at least one state")
        if not 0 <= self.start < self.n:
            raise DomainError(f"start state {self.start} out of range")
        for q in self.accepting:
            if not 0 <= q < self.n:
                raise DomainError(f"accepting state {q} out of range")
        for q in range(self.n):
            for a in self.alphabet:
                t = self.delta.get((q, a))
                if t is None:
                    raise DomainError(f"transition ({q}, {a}) undefined")
                if not 0 <= t < self.n:
                    raise DomainError(f"transition ({q}, {a}) -> {t} out of range")
        if len(self.delta) != self.n * len(self.alphabet):
            raise DomainError("transition map mentions symbols outside the alphabet")

    def run(self, w: Iterable[str]) -> int:
        q = self.start
        for a in w:
            try:
                q = self.delta[q, a]
            except KeyError:
                raise DomainError(f"symbol {a!r} not in alphabet") from None
        return q

    def to_nfa(self) -> "Nfa":
        trans = frozenset((q, a, t) for (q, a), t in self.delta.items())
        return Nfa(self.n, self.alphabet, trans, frozenset([self.start]), self.accepting)


@dataclass(frozen=True)
class Nfa:
    n: int
    alphabet: Alphabet
    transitions: frozenset[tuple[int, Optional[str], int]]
    starts: frozenset[int]
    accepting: frozenset[int]
    _out: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        object.__setattr__(self, "starts", frozenset(self.starts))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        if not self.starts:
            raise DomainError("an NFA needs at least one start state")
        for q in self.starts | self.accepting:
            if not 0 <= q < self.n:
                raise DomainError(f"state {q} out of range")
        out: dict[int, list[tuple[Optional[str], int]]] = {q: [] for q in range(self.n)}
        for q, a, t in sorted(self.transitions, key=lambda tr: self._trans_key(tr)):
            if not (0 <= q < self.n and 0 <= t < self.n):
                raise DomainError(f"transition {(q, a, t)} references a missing state")
            if a is not EPS and a not in self.alphabet:
                raise DomainError(f"transition symbol {a!r} not in alphabet")
            if a is EPS and q == t:
                continue
            out[q].append((a, t))
        object.__setattr__(self, "_out", out)

    def _trans_key(self, tr):
        q, a, t = tr
        rank = -1 if a is EPS else (self.alphabet.index(a) if a in self.alphabet else len(self.alphabet))
        return q, rank, t

    def out(self, q: int) -> list[tuple[Optional[str], int]]:
        return self._out[q]

    def closure(self, states: Iterable[int]) -> frozenset[int]:
        seen = set(states)
        todo = list(seen)
        while todo:
            q = todo.pop()
            for a, t in self._out[q]:
                if a is EPS and t not in seen:
                    seen.add(t)
                    todo.append(t)
        return frozenset(seen)

    def step(self, states: Iterable[int], a: str) -> frozenset[int]:
        """Read ``a`` from an epsilon-closed set, returning the closed successor set."""
        return self.closure(t for q in states for b, t in self._out[q] if b == a)

    def initial(self) -> frozenset[int]:
        return self.closure(self.starts)

    def to_nfa(self) -> "Nfa":
        return self


Automaton = Union[Dfa, Nfa]


def accepts(m: Automaton, w: Iterable[str]) -> bool:
    w = tuple(w)
    m.alphabet.check_word(w)
    if isinstance(m, Dfa):
        return m.run(w) in m.accepting
    cur = m.initial()
    for a in w:
        cur = m.step(cur, a)
        if not cur:
            return False
    return bool(cur & m.accepting)


def _graph(m: Nfa) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(m.n))
    for q in range(m.n):
        for a, t in m.out(q):
            g.add_edge(q, t)
    return g


def reachable_from(m: Nfa, states: Iterable[int]) -> frozenset[int]:
    """States reachable from ``states`` along any moves, the sources included."""
    seen = set(states)
    todo = list(seen)
    while todo:
        q = todo.pop()
        for _, t in m.out(q):
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return frozenset(seen)


def reachable_states(m: Nfa) -> frozenset[int]:
    g = _graph(m)
    seen = set(m.starts)
    for q in m.starts:
        seen |= nx.descendants(g, q)
    return frozenset(seen)


def coreachable_states(m: Nfa) -> frozenset[int]:
    g = _graph(m)
    seen = set(m.accepting)
    for q in m.accepting:
        seen |= nx.ancestors(g, q)
    return frozenset(seen)


def useful_states(m: Automaton) -> frozenset[int]:
    m = m.to_nfa()
    return reachable_states(m) & coreachable_states(m)


def _pumping_edge(m: Nfa):
    """A symbol-reading transition lying on a cycle through useful states."""
    useful = useful_states(m)
    g = nx.DiGraph()
    g.add_nodes_from(useful)
    for q in useful:
        for a, t in m.out(q):
            if t in useful:
                g.add_edge(q, t)
    comp = {}
    for i, scc in enumerate(nx.strongly_connected_components(g)):
        for q in scc:
            comp[q] = i
    for q in sorted(useful):
        for a, t in m.out(q):
            if a is not EPS and t in useful and comp[q] == comp[t]:
                return q, a, t
    return None


def is_finite(m: Automaton) -> bool:
    """True iff L(m) is finite.

    Only cycles that read at least one symbol count; pure epsilon cycles do
    not pump length.
    """
    return _pumping_edge(m.to_nfa()) is None


def _shortest_path_word(m: Nfa, sources: Iterable[int], targets) -> Optional[tuple[Word, int]]:
    """Shortest word leading from some source to some state in ``targets``.

    0-1 BFS: epsilon moves are free.  Returns ``(word, reached_state)``.
    """
    targets = frozenset(targets)
    dist: dict[int, int] = {}
    prev: dict[int, tuple[Optional[int], Optional[str]]] = {}
    dq = deque()
    for s in sorted(set(sources)):
        dist[s] = 0
        prev[s] = (None, None)
        dq.append(s)
    done = set()
    while dq:
        q = dq.popleft()
        if q in done:
            continue
        done.add(q)
        if q in targets:
            out = []
            cur = q
            while prev[cur][0] is not None:
                p, a = prev[cur]
                if a is not EPS:
                    out.append(a)
                cur = p
            return tuple(reversed(out)), q
        for a, t in m.out(q):
            nd = dist[q] + (0 if a is EPS else 1)
            if t not in dist or nd < dist[t]:
                dist[t] = nd
                prev[t] = (q, a)
                if a is EPS:
                    dq.appendleft(t)
                else:
                    dq.append(t)
    return None


def pumping_decomposition(m: Automaton) -> Optional[tuple[Word, Word, Word]]:
    """``(x, y, z)`` with ``y`` non-empty and ``x y^i z`` in L(m) for all i >= 0.

    None when L(m) is finite.
    """
    m = m.to_nfa()
    edge = _pumping_edge(m)
    if edge is None:
        return None
    q, a, t = edge
    x, _ = _shortest_path_word(m, m.starts, {q})
    back, _ = _shortest_path_word(m, [t], {q})
    z, _ = _shortest_path_word(m, [q], m.accepting)
    return x, (a,) + back, z


def distance_to_accept(m: Nfa) -> dict[int, int]:
    """Fewest symbols needed to reach acceptance from each co-reachable state."""
    rev: dict[int, list[tuple[Optional[str], int]]] = {q: [] for q in range(m.n)}
    for q in range(m.n):
        for a, t in m.out(q):
            rev[t].append((a, q))
    dist = {q: 0 for q in m.accepting}
    dq = deque(sorted(m.accepting))
    done = set()
    while dq:
        q = dq.popleft()
        if q in done:
            continue
        done.add(q)
        for a, p in rev[q]:
            nd = dist[q] + (0 if a is EPS else 1)
            if p not in dist or nd < dist[p]:
                dist[p] = nd
                if a is EPS:
                    dq.appendleft(p)
                else:
                    dq.append(p)
    return dist


def enumerate_words(m: Automaton, max_len: int) -> list[Word]:
    """All accepted words of length <= max_len, by length then alphabet order."""
    m = m.to_nfa()
    dist = distance_to_accept(m)
    INF = max_len + 1

    def viable(states, remaining):
        return min((dist.get(q, INF) for q in states), default=INF) <= remaining

    result: list[Word] = []
    level = [((), m.initial())]
    for length in range(max_len + 1):
        nxt = []
        for w, states in level:
            if states & m.accepting:
                result.append(w)
            if length == max_len:
                continue
            for a in m.alphabet:
                s2 = m.step(states, a)
                if s2 and viable(s2, max_len - length - 1):
                    nxt.append((w + (a,), s2))
        level = nxt
        if not level:
            break
    return result


def shortest_common_word(machines: Sequence[Dfa]) -> Optional[Word]:
    """Shortest word accepted by every DFA (breadth-first over the lazy product).

    Ties are broken by alphabet order, so the answer is the length-lex least
    word of the intersection.
    """
    machines = list(machines)
    if not machines:
        raise DomainError("need at least one machine")
    sigma = machines[0].alphabet
    for m in machines[1:]:
        if set(m.alphabet) != set(sigma):
            raise DomainError("machines must share one alphabet")
    alive = [coreachable_states(m.to_nfa()) for m in machines]
    start = tuple(m.start for m in machines)
    if any(q not in al for q, al in zip(start, alive)):
        return None
    prev: dict[tuple[int, ...], tuple[Optional[tuple[int, ...]], Optional[str]]] = {start: (None, None)}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if all(q in m.accepting for q, m in zip(cur, machines)):
            out = []
            while prev[cur][0] is not None:
                cur, a = prev[cur][0], prev[cur][1]
                out.append(a)
            return tuple(reversed(out))
        for a in sigma:
            nxt = tuple(m.delta[q, a] for q, m in zip(cur, machines))
            if nxt in prev or any(q not in al for q, al in zip(nxt, alive)):
                continue
            prev[nxt] = (cur, a)
            queue.append(nxt)
    return None


def determinize(m: Automaton) -> Dfa:
    """Subset construction; states numbered in breadth-first discovery order."""
    if isinstance(m, Dfa):
        return m
    init = m.initial()
    ids = {init: 0}
    order = [init]
    delta = {}
    i = 0
    while i < len(order):
        cur = order[i]
        for a in m.alphabet:
            nxt = m.step(cur, a)
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
            delta[ids[cur], a] = ids[nxt]
        i += 1
    accepting = frozenset(ids[s] for s in order if s & m.accepting)
    return Dfa(len(order), m.alphabet, delta, 0, accepting)


def trie_dfa(words: Iterable[Iterable[str]], alphabet: Alphabet) -> Dfa:
    """DFA accepting exactly the given finite set of words (prefix tree plus a dead state)."""
    nodes = {(): 0}
    accepting = set()
    for w in sorted({tuple(w) for w in words}, key=alphabet.sort_key()):
        alphabet.check_word(w)
        for i in range(1, len(w) + 1):
            nodes.setdefault(w[:i], len(nodes))
        accepting.add(nodes[w])
    dead = len(nodes)
    delta = {}
    for prefix, q in nodes.items():
        for a in alphabet:
            delta[q, a] = nodes.get(prefix + (a,), dead)
    for a in alphabet:
        delta[dead, a] = dead
    return Dfa(dead + 1, alphabet, delta, 0, frozenset(accepting))


def chain_dfa(w: Iterable[str], alphabet: Alphabet) -> Dfa:
    """DFA for the single word ``w``: a chain of |w|+1 states plus a dead state."""
    return trie_dfa([tuple(w)], alphabet)


# -- text format -------------------------------------------------------------


def format_automaton(m: Automaton) -> str:
    lines = [f"states {m.n}", "alphabet " + " ".join(m.alphabet)]
    if isinstance(m, Dfa):
        lines.append(f"start {m.start}")
        lines.append("accept " + " ".join(map(str, sorted(m.accepting))))
        for q in range(m.n):
            for a in m.alphabet:
                lines.append(f"trans {q} {a} {m.delta[q, a]}")
    else:
        lines.append("start " + " ".join(map(str, sorted(m.starts))))
        lines.append("accept " + " ".join(map(str, sorted(m.accepting))))
        for tr in sorted(m.transitions, key=m._trans_key):
            q, a, t = tr
            lines.append(f"trans {q} {EPS_TOKEN if a is EPS else a} {t}")
    return "\n".join(lines) + "\n"


def _int(tok, no):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected a state number, got {tok!r}", no) from None


def parse_nfa(text: str) -> Nfa:
    n = alphabet = None
    starts, accepting, trans = set(), set(), set()
    for no, raw in enumerate(text.splitlines(), 1):
        toks = raw.split()
        if not toks:
            continue
        head, args = toks[0], toks[1:]
        if head == "states":
            if len(args) != 1:
                raise ParseError("states takes one count", no)
            n = _int(args[0], no)
        elif head == "alphabet":
            try:
                alphabet = Alphabet(tuple(args))
            except DomainError as e:
                raise ParseError(str(e), no) from None
        elif head == "start":
            starts.update(_int(a, no) for a in args)
        elif head == "accept":
            accepting.update(_int(a, no) for a in args)
        elif head == "trans":
            if len(args) != 3:
                raise ParseError("trans takes 'q symbol q2'", no)
            sym = EPS if args[1] == EPS_TOKEN else args[1]
            trans.add((_int(args[0], no), sym, _int(args[2], no)))
        else:
            raise ParseError(f"unknown directive {head!r}", no)
    if n is None or alphabet is None:
        raise ParseError("missing 'states' or 'alphabet' directive")
    try:
        return Nfa(n, alphabet, frozenset(trans), frozenset(starts), frozenset(accepting))
    except DomainError as e:
        raise ParseError(str(e)) from None


def parse_dfa(text: str) -> Dfa:
    m = parse_nfa(text)
    if len(m.starts) != 1:
        raise ParseError("a DFA has exactly one start state")
    delta = {}
    for q, a, t in m.transitions:
        if a is EPS:
            raise ParseError("a DFA has no epsilon transitions")
        if (q, a) in delta and delta[q, a] != t:
            raise ParseError(f"nondeterministic transition on ({q}, {a})")
        delta[q, a] = t
    try:
        return Dfa(m.n, m.alphabet, delta, next(iter(m.starts)), m.accepting)
    except DomainError as e:
        raise ParseError(str(e)) from None


def parse_automaton(text: str) -> Automaton:
    """A Dfa when the text describes a total deterministic machine, else an Nfa."""
    try:
        return parse_dfa(text)
    except ParseError:
        return parse_nfa(text)
