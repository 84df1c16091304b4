"""Pushdown automata in single-push/single-pop normal form.

Every move either pushes one stack symbol or pops one; a pop of ``g`` fires
only with ``g`` on top.  Acceptance is by empty stack at the end of the
input, and a configuration with an empty stack has no moves.

The decision procedures here explore configurations ``(state, stack)``
explicitly.  Stack height is capped (by default at ``s * n**2``, which is
enough for any accepting computation of a finite-language machine), and a
:class:`Budget` turns runaway searches into :class:`ResourceError`.

Text format::

    states 3
    alphabet a b
    stack Z X
    initstack Z
    start 0
    move 0 a push X 1
    move 1 ~ pop X 2
"""

from __future__ import annotations

import itertools
import time
from collections import defaultdict, deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from . import grammars, matcher
from .errors import DomainError, ParseError, ResourceError
from .grammars import Cfg, fresh_name
from .words import Alphabet, Pattern, Word, variables

PUSH, POP = "push", "pop"
EPS = None
DEFAULT_MAX_CONFIGS = 10**6


class Move(NamedTuple):
    source: int
    symbol: Optional[str]
    action: str
    stack_symbol: str
    target: int


class Config(NamedTuple):
    state: int
    stack: tuple[str, ...]  # top is last


@dataclass(frozen=True)
class Pda:
    n: int
    alphabet: Alphabet
    stack_alphabet: Alphabet
    moves: frozenset[Move]
    start: int
    init_stack: str
    _out: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        moves = frozenset(Move(*mv) for mv in self.moves)
        object.__setattr__(self, "moves", moves)
        if not 0 <= self.start < self.n:
            raise DomainError(f"start state {self.start} out of range")
        if self.init_stack not in self.stack_alphabet:
            raise DomainError(f"initial stack symbol {self.init_stack!r} not in stack alphabet")
        out: dict[int, list[Move]] = {q: [] for q in range(self.n)}
        for mv in sorted(moves, key=self._move_key):
            if not (0 <= mv.source < self.n and 0 <= mv.target < self.n):
                raise DomainError(f"move {mv} references a missing state")
            if mv.action not in (PUSH, POP):
                raise DomainError(f"move {mv} must push or pop exactly one symbol")
            if mv.stack_symbol not in self.stack_alphabet:
                raise DomainError(f"move {mv} uses unknown stack symbol")
            if mv.symbol is not EPS and mv.symbol not in self.alphabet:
                raise DomainError(f"move {mv} reads a symbol outside the alphabet")
            out[mv.source].append(mv)
        object.__setattr__(self, "_out", out)

    def _move_key(self, mv):
        sym = -1 if mv.symbol is EPS else self.alphabet.symbols.index(mv.symbol) \
            if mv.symbol in self.alphabet else len(self.alphabet)
        return mv.source, sym, mv.action, mv.stack_symbol, mv.target

    def out(self, q: int) -> list[Move]:
        return self._out[q]

    @property
    def initial(self) -> Config:
        return Config(self.start, (self.init_stack,))


class Budget:
    """Caps the number of configurations a search may visit, and its wall time."""

    def __init__(self, max_configs: int = DEFAULT_MAX_CONFIGS, seconds: Optional[float] = None):
        self.max_configs = max_configs
        self.deadline = None if seconds is None else time.monotonic() + seconds
        self.used = 0

    def charge(self, k: int = 1) -> None:
        self.used += k
        if self.used > self.max_configs:
            raise ResourceError(f"exceeded {self.max_configs} visited configurations")
        if self.deadline is not None and self.used % 1024 == 0 and time.monotonic() > self.deadline:
            raise ResourceError("time budget exhausted")


def stack_bound(m: Pda) -> int:
    """``s * n**2``: a stack height sufficient for some accepting run of every
    accepted word, provided L(m) is finite."""
    return len(m.stack_alphabet) * m.n * m.n


def successors(m: Pda, c: Config, bound: int):
    """Yield ``(symbol_or_None, next_config)`` without exceeding height ``bound``."""
    if not c.stack:
        return
    top = c.stack[-1]
    for mv in m.out(c.state):
        if mv.action == POP:
            if mv.stack_symbol == top:
                yield mv.symbol, Config(mv.target, c.stack[:-1])
        elif len(c.stack) < bound:
            yield mv.symbol, Config(mv.target, c.stack + (mv.stack_symbol,))


def accepts_bounded(m: Pda, w: Iterable[str], bound: int,
                    budget: Optional[Budget] = None) -> bool:
    """True iff some run reading exactly ``w`` empties the stack, never exceeding ``bound``."""
    if bound < 1:
        raise DomainError("bound must be at least 1")
    w = m.alphabet.check_word(w)
    start = (m.start, (m.init_stack,), 0)
    seen = {start}
    todo = [start]
    while todo:
        q, stack, i = todo.pop()
        if budget is not None:
            budget.charge()
        if not stack:
            if i == len(w):
                return True
            continue
        for a, c2 in successors(m, Config(q, stack), bound):
            if a is EPS:
                nxt = (c2.state, c2.stack, i)
            elif i < len(w) and w[i] == a:
                nxt = (c2.state, c2.stack, i + 1)
            else:
                continue
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return False


def accepts(m: Pda, w: Iterable[str]) -> bool:
    return accepts_bounded(m, w, stack_bound(m))


# -- conversions ------------------------------------------------------------------


def cfg_to_pda(g: Cfg) -> Pda:
    """Top-down PDA for L(g).

    State 0 pushes the start variable over a fresh bottom marker and moves to
    the loop state 1.  In the loop a terminal on top is matched against the
    input, and a variable is popped and replaced by a production body, one
    push per intermediate state (body reversed).  Popping the marker leads to
    the halting state 2.
    """
    taken = set(g.variables) | set(g.terminals)
    bottom = fresh_name("Z", taken)
    stack = Alphabet((bottom, *g.variables, *g.terminals))
    moves = [Move(0, EPS, PUSH, g.start, 1), Move(1, EPS, POP, bottom, 2)]
    moves += [Move(1, a, POP, a, 1) for a in g.terminals]
    n = 3
    for x, rhs in g.productions:
        if not rhs:
            moves.append(Move(1, EPS, POP, x, 1))
            continue
        first = n
        n += len(rhs)
        moves.append(Move(1, EPS, POP, x, first))
        for k, sym in enumerate(reversed(rhs)):
            target = first + k + 1 if k + 1 < len(rhs) else 1
            moves.append(Move(first + k, EPS, PUSH, sym, target))
    return Pda(n, g.terminals, stack, frozenset(moves), 0, bottom)


def _summaries(m: Pda) -> dict[tuple[int, str], set[int]]:
    """For each demanded ``(p, A)``: the states ``q`` such that from ``p`` with
    ``A`` on top the machine can eventually pop that ``A``, arriving in ``q``.

    Demand-driven: only pairs reachable from the initial configuration are
    explored.
    """
    sums: dict[tuple[int, str], set[int]] = defaultdict(set)
    demanded: set[tuple[int, str]] = set()
    pushers: dict[tuple[int, str], list[tuple[int, str]]] = defaultdict(list)
    resumers: dict[tuple[int, str], set[int]] = defaultdict(set)
    queue = deque([("demand", m.start, m.init_stack)])
    while queue:
        ev = queue.popleft()
        if ev[0] == "demand":
            _, p, a = ev
            if (p, a) in demanded:
                continue
            demanded.add((p, a))
            for mv in m.out(p):
                if mv.action == POP:
                    if mv.stack_symbol == a:
                        queue.append(("add", p, a, mv.target))
                    continue
                key = (mv.target, mv.stack_symbol)
                pushers[key].append((p, a))
                queue.append(("demand", *key))
                for t in list(sums[key]):
                    queue.append(("resume", t, a, p))
        elif ev[0] == "resume":
            # the pushed symbol was popped; p's own top `a` is exposed in state t
            _, t, a, p = ev
            if p in resumers[t, a]:
                continue
            resumers[t, a].add(p)
            queue.append(("demand", t, a))
            for q in list(sums[t, a]):
                queue.append(("add", p, a, q))
        else:
            _, p, a, q = ev
            if q in sums[p, a]:
                continue
            sums[p, a].add(q)
            for p2, a2 in pushers.get((p, a), ()):
                queue.append(("resume", q, a2, p2))
            for p2 in resumers.get((p, a), ()):
                queue.append(("add", p2, a, q))
    return sums


def pda_to_cfg(m: Pda) -> Cfg:
    """Triple construction, restricted to realizable ``[p,A,q]`` variables."""
    sums = _summaries(m)
    taken = set(m.alphabet)
    names: dict[tuple[int, str, int], str] = {}

    def var(t):
        if t not in names:
            names[t] = fresh_name(f"[{t[0]},{t[1]},{t[2]}]", taken)
            taken.add(names[t])
        return names[t]

    start = fresh_name("S", taken | {f"[{q}" for q in range(m.n)})
    taken.add(start)
    prods: list[tuple[str, tuple[str, ...]]] = []
    todo = deque()
    seen = set()

    def need(t):
        if t not in seen:
            seen.add(t)
            todo.append(t)
        return var(t)

    for q in sorted(sums.get((m.start, m.init_stack), ())):
        prods.append((start, (need((m.start, m.init_stack, q)),)))
    while todo:
        p, a, q = todo.popleft()
        head = var((p, a, q))
        for mv in m.out(p):
            read = () if mv.symbol is EPS else (mv.symbol,)
            if mv.action == POP:
                if mv.stack_symbol == a and mv.target == q:
                    prods.append((head, read))
            else:
                for t in sorted(sums.get((mv.target, mv.stack_symbol), ())):
                    if q in sums.get((t, a), ()):
                        prods.append((head, read + (need((mv.target, mv.stack_symbol, t)),
                                                    need((t, a, q)))))
    return Cfg((start, *names.values()), m.alphabet, tuple(prods), start)


def halts_on_empty_stack(m: Pda) -> bool:
    """True when the initial stack symbol is never pushed and every state
    entered by popping it has no moves, so an emptied stack really ends the run."""
    if any(mv.action == PUSH and mv.stack_symbol == m.init_stack for mv in m.moves):
        return False
    ends = {mv.target for mv in m.moves if mv.action == POP and mv.stack_symbol == m.init_stack}
    return all(not m.out(q) for q in ends)


def shuffle_with_dfa(n: Pda, dfa) -> Pda:
    """PDA for the perfect shuffle of L(dfa) with L(n).

    Accepts ``u1 v1 u2 v2 ... ul vl`` for ``u`` in L(dfa), ``v`` in L(n) and
    ``|u| = |v| = l``.  The two input alphabets must be disjoint, and ``n``
    must satisfy :func:`halts_on_empty_stack`.
    """
    if set(n.alphabet) & set(dfa.alphabet):
        raise DomainError("shuffled alphabets must be disjoint")
    if not halts_on_empty_stack(n):
        raise DomainError("inner PDA must halt when its stack empties")
    taken = set(n.stack_alphabet)
    bottom = fresh_name("Z", taken)
    mark = fresh_name("M", taken | {bottom})
    stack = Alphabet((*n.stack_alphabet, bottom, mark))
    alphabet = Alphabet((*dfa.alphabet, *n.alphabet))

    ids: dict[tuple, int] = {}

    def sid(key):
        if key not in ids:
            ids[key] = len(ids)
        return ids[key]

    start = sid(("start",))
    final = sid(("final",))
    moves = [Move(start, EPS, PUSH, n.init_stack, sid((n.start, dfa.start, 0)))]
    for p in range(dfa.n):
        for mv in n.moves:
            phases = (0, 1) if mv.symbol is EPS else (1,)
            for ph in phases:
                after = ph if mv.symbol is EPS else 0
                moves.append(Move(sid((mv.source, p, ph)), mv.symbol, mv.action,
                                  mv.stack_symbol, sid((mv.target, p, after))))
        for q in range(n.n):
            for a in dfa.alphabet:
                mid = sid(("mid", q, p, a))
                moves.append(Move(sid((q, p, 0)), a, PUSH, mark, mid))
                moves.append(Move(mid, EPS, POP, mark, sid((q, dfa.delta[p, a], 1))))
            if p in dfa.accepting:
                moves.append(Move(sid((q, p, 0)), EPS, POP, bottom, final))
    return Pda(len(ids), alphabet, stack, frozenset(moves), start, bottom)


# -- explicit configuration graphs ------------------------------------------------


class ConfigGraph:
    """Configurations reachable from the initial one, with labelled edges.

    After construction only configurations that can still reach acceptance
    are kept (``useful``); node 0 is the initial configuration.
    """

    def __init__(self, m: Pda, bound: Optional[int] = None, budget: Optional[Budget] = None):
        self.pda = m
        self.bound = stack_bound(m) if bound is None else bound
        budget = budget or Budget()
        self.nodes: list[Config] = [m.initial]
        index = {m.initial: 0}
        self.edges: list[list[tuple[Optional[str], int]]] = []
        i = 0
        while i < len(self.nodes):
            budget.charge()
            out = []
            for a, c2 in successors(m, self.nodes[i], self.bound):
                j = index.get(c2)
                if j is None:
                    j = index[c2] = len(self.nodes)
                    self.nodes.append(c2)
                out.append((a, j))
            self.edges.append(out)
            i += 1
        self.index = index
        self.accepting = frozenset(i for i, c in enumerate(self.nodes) if not c.stack)
        self.rev: list[list[tuple[Optional[str], int]]] = [[] for _ in self.nodes]
        for i, out in enumerate(self.edges):
            for a, j in out:
                self.rev[j].append((a, i))
        useful = set(self.accepting)
        todo = list(useful)
        while todo:
            j = todo.pop()
            for _, i in self.rev[j]:
                if i not in useful:
                    useful.add(i)
                    todo.append(i)
        self.useful = frozenset(useful)

    def out(self, i: int):
        return [(a, j) for a, j in self.edges[i] if j in self.useful]

    def reads(self, i: int) -> bool:
        return any(a is not EPS for a, _ in self.out(i))

    def lengths_from(self, sources: Iterable[int], reverse: bool = False,
                     limit: Optional[int] = None) -> dict[int, int]:
        """Word lengths along useful paths from ``sources`` (or into them, if ``reverse``).

        Each node maps to a bitmask with bit ``k`` set when some path of
        length ``k`` connects it.  Finite only when the useful part has no
        symbol-reading cycle.  ``limit`` drops lengths above it.
        """
        adj = self.rev if reverse else self.edges
        cap = -1 if limit is None else (1 << (limit + 1)) - 1
        masks = {i: 1 for i in sources if i in self.useful}
        todo = deque(masks)
        while todo:
            i = todo.popleft()
            mask = masks[i]
            for a, j in adj[i]:
                if j not in self.useful:
                    continue
                old = masks.get(j, 0)
                new = old | ((mask if a is EPS else mask << 1) & cap)
                if new != old:
                    masks[j] = new
                    todo.append(j)
        return masks


# -- decision procedures --------------------------------------------------------------


def pda_intersection_nonempty(ms: Sequence[Pda], budget: Optional[Budget] = None,
                              max_len: Optional[int] = None) -> Optional[Word]:
    """A shortest word accepted by every PDA, or None.

    Runs all machines in parallel: symbol moves are taken jointly, epsilon
    moves one machine at a time in machine order between symbols (epsilon
    moves of different machines commute, so no interleaving is lost).  Each
    machine is capped at its own stack bound.
    """
    ms = list(ms)
    if not ms:
        raise DomainError("need at least one PDA")
    budget = budget or Budget()
    graphs = [ConfigGraph(m, budget=budget) for m in ms]
    if any(0 not in g.useful for g in graphs):
        return None
    k = len(ms)
    start = (tuple(0 for _ in ms), 0)
    dist = {start: 0}
    prev: dict = {start: None}
    dq = deque([start])
    done = set()
    while dq:
        cur = dq.popleft()
        if cur in done:
            continue
        done.add(cur)
        budget.charge()
        nodes, phase = cur
        if all(i in g.accepting for i, g in zip(nodes, graphs)):
            out = []
            while prev[cur] is not None:
                cur, a = prev[cur]
                if a is not EPS:
                    out.append(a)
            return tuple(reversed(out))
        d = dist[cur]
        nexts = []
        for c in range(phase, k):
            for a, j in graphs[c].out(nodes[c]):
                if a is EPS:
                    nexts.append(((nodes[:c] + (j,) + nodes[c + 1:], c), EPS, 0))
        if max_len is None or d < max_len:
            for a in graphs[0].pda.alphabet:
                choice = []
                for g, i in zip(graphs, nodes):
                    js = [j for b, j in g.out(i) if b == a]
                    if not js:
                        break
                    choice.append(js)
                else:
                    for combo in itertools.product(*choice):
                        nexts.append(((combo, 0), a, 1))
        for nxt, a, cost in nexts:
            nd = d + cost
            if nxt not in dist or nd < dist[nxt]:
                dist[nxt] = nd
                prev[nxt] = (cur, a)
                (dq.appendleft if cost == 0 else dq.append)(nxt)
    return None


def _finite_graph(g: Cfg, budget: Optional[Budget]) -> ConfigGraph:
    t = grammars.trim(g)
    if not grammars.is_finite(t):
        raise DomainError("grammar generates an infinite language")
    return ConfigGraph(cfg_to_pda(t), budget=budget)


def cfg_square_search(g: Cfg, budget: Optional[Budget] = None,
                      max_len: Optional[int] = None) -> Optional[Word]:
    """A square ``ww`` in the finite language L(g), or None.

    Each candidate midpoint ``C`` is a reachable configuration; two copies of
    the PDA read the same half-word in lock step, one from the initial
    configuration and one from ``C``.  Success means copy one lands on ``C``
    and copy two accepts.
    """
    budget = budget or Budget()
    cg = _finite_graph(g, budget)
    if 0 not in cg.useful:
        return None
    fwd = cg.lengths_from([0])
    bwd = cg.lengths_from(cg.accepting, reverse=True)
    candidates = []
    for c in sorted(cg.useful):
        common = fwd.get(c, 0) & bwd.get(c, 0) & ~1
        if max_len is not None:
            common &= (1 << (max_len // 2 + 1)) - 1
        # a midpoint can be taken just before the second half's first read
        if common and cg.reads(c):
            candidates.append(((common & -common).bit_length() - 1, c, common.bit_length() - 1))
    for _, mid, longest in sorted(candidates):
        half = _lockstep_half(cg, mid, bwd, budget, longest)
        if half is not None:
            return half + half
    return None


def _lockstep_half(cg: ConfigGraph, mid: int, bwd, budget: Budget, longest: int) -> Optional[Word]:
    to_mid = cg.lengths_from([mid], reverse=True, limit=longest)

    def viable(c1, c2, started):
        common = to_mid.get(c1, 0) & bwd.get(c2, 0)
        return bool(common if started else common & ~1)

    start = (0, mid, 0, False)
    if not viable(0, mid, False):
        return None
    prev = {start: None}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        budget.charge()
        c1, c2, phase, started = cur
        if started and c1 == mid and c2 in cg.accepting:
            out = []
            while prev[cur] is not None:
                cur, a = prev[cur]
                if a is not EPS:
                    out.append(a)
            return tuple(reversed(out))
        nexts = []
        if phase == 0:
            nexts += [((j, c2, 0, started), EPS) for a, j in cg.out(c1) if a is EPS]
        nexts += [((c1, j, 1, started), EPS) for a, j in cg.out(c2) if a is EPS]
        for a, j1 in cg.out(c1):
            if a is EPS:
                continue
            for b, j2 in cg.out(c2):
                if b == a:
                    nexts.append(((j1, j2, 0, True), a))
        for nxt, a in nexts:
            if nxt not in prev and viable(nxt[0], nxt[1], nxt[3]):
                prev[nxt] = (cur, a)
                queue.append(nxt)
    return None


@dataclass(frozen=True)
class FactorWitness:
    word: Word
    morphism: dict[str, Word]
    start: int


def cfg_pattern_factor_search(g: Cfg, p: Pattern, budget: Optional[Budget] = None,
                              max_len: Optional[int] = None) -> Optional[FactorWitness]:
    """A word of L(g) with a factor matched by ``p``, or None.

    Infinite languages are answered at once by pumping.  Otherwise L(g) is
    compiled to its minimal DFA, whose states stand in for the PDA
    configurations that share a future, and the word is explored as prefix,
    then h(p1), ..., h(pl), then suffix.  The boundary before each pattern
    letter is the set of states the reading so far can be in (initially all
    of them, since the prefix is free); a variable's image is chosen at its
    first occurrence (shortest first) and replayed from the boundary at
    later ones.  ``max_len`` caps the factor length.
    """
    p = tuple(p)
    if not p:
        raise DomainError("a pattern must be non-empty")
    pump = grammars.pumping_witness(g)
    if pump is not None:
        u, v, w, x, y = pump
        reps = len(p)
        word = u + v * reps + w + x * reps + y
        core, pos = (v, len(u)) if v else (x, len(u) + len(w))
        return FactorWitness(word, {var: core for var in variables(p)}, pos)

    budget = budget or Budget()
    dfa = grammars.finite_language_dfa(g)
    found = matcher.factor_search(dfa.to_nfa(), p, max_len, budget.charge)
    if found is None:
        return None
    word, wit = found
    return FactorWitness(word, wit.morphism, wit.start)


# -- text format ----------------------------------------------------------------


def format_pda(m: Pda) -> str:
    lines = [f"states {m.n}", "alphabet " + " ".join(m.alphabet),
             "stack " + " ".join(m.stack_alphabet), f"initstack {m.init_stack}",
             f"start {m.start}"]
    for mv in sorted(m.moves, key=m._move_key):
        sym = "~" if mv.symbol is EPS else mv.symbol
        lines.append(f"move {mv.source} {sym} {mv.action} {mv.stack_symbol} {mv.target}")
    return "\n".join(lines) + "\n"


def parse_pda(text: str) -> Pda:
    n = alphabet = stack = init = start = None
    moves = []
    for no, raw in enumerate(text.splitlines(), 1):
        toks = raw.split()
        if not toks:
            continue
        head, args = toks[0], toks[1:]
        try:
            if head == "states":
                n = int(args[0])
            elif head == "alphabet":
                alphabet = Alphabet(tuple(args))
            elif head == "stack":
                stack = Alphabet(tuple(args))
            elif head == "initstack":
                (init,) = args
            elif head == "start":
                start = int(args[0])
            elif head == "move":
                q, a, action, g, t = args
                if action not in (PUSH, POP):
                    raise ParseError(f"action must be push or pop, got {action!r}", no)
                moves.append(Move(int(q), EPS if a == "~" else a, action, g, int(t)))
            else:
                raise ParseError(f"unknown directive {head!r}", no)
        except (ValueError, IndexError, DomainError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"bad {head!r} line: {e}", no) from None
    if None in (n, alphabet, stack, init, start):
        raise ParseError("missing one of states/alphabet/stack/initstack/start")
    try:
        return Pda(n, alphabet, stack, frozenset(moves), start, init)
    except DomainError as e:
        raise ParseError(str(e)) from None
