"""Pattern matching by non-erasing morphisms, against words and NFA languages."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import networkx as nx

from . import automata
from .automata import Automaton
from .errors import DomainError
from .words import Pattern, Word, apply_morphism, variables


@dataclass(frozen=True)
class MatchWitness:
    morphism: dict[str, Word]
    start: int
    length: int


def _check_pattern(p) -> Pattern:
    p = tuple(p)
    if not p:
        raise DomainError("a pattern must be non-empty")
    return p


def match_exact(p: Pattern, w: Word) -> Optional[dict[str, Word]]:
    """A non-erasing morphism h with h(p) == w, or None.

    Backtracking left to right; a variable's image is chosen at its first
    occurrence, shortest first, and checked against the word at later
    occurrences.  A length budget (committed lengths plus one symbol per
    position still unbound) prunes impossible splits.
    """
    p = _check_pattern(p)
    w = tuple(w)
    n, ell = len(w), len(p)
    if ell > n:
        return None
    # occurrences of each variable at positions >= j
    remaining = [dict() for _ in range(ell + 1)]
    for j in range(ell - 1, -1, -1):
        remaining[j] = dict(remaining[j + 1])
        remaining[j][p[j]] = remaining[j].get(p[j], 0) + 1

    binding: dict[str, Word] = {}

    def rest_min(j):
        return sum(c * (len(binding[x]) if x in binding else 1) for x, c in remaining[j].items())

    def go(j, pos):
        if j == ell:
            return pos == n
        if pos + rest_min(j) > n:
            return False
        x = p[j]
        if x in binding:
            img = binding[x]
            if w[pos:pos + len(img)] != img:
                return False
            return go(j + 1, pos + len(img))
        later = remaining[j][x]
        fixed = rest_min(j) - later
        max_len = (n - pos - fixed) // later
        for size in range(1, max_len + 1):
            binding[x] = w[pos:pos + size]
            if go(j + 1, pos + size):
                return True
        del binding[x]
        return False

    if go(0, 0):
        return dict(binding)
    return None


def match_factor(p: Pattern, w: Word) -> Optional[MatchWitness]:
    """Leftmost, then shortest, factor of ``w`` matched by ``p``."""
    p = _check_pattern(p)
    w = tuple(w)
    for start in range(len(w) - len(p) + 1):
        for end in range(start + len(p), len(w) + 1):
            h = match_exact(p, w[start:end])
            if h is not None:
                return MatchWitness(h, start, end - start)
    return None


def _guided(m: automata.Nfa, p: Pattern, here: frozenset, final_ok, longest, charge=None,
            max_total=None):
    """Walk ``p`` over ``m`` from the closed state set ``here``.

    Images are picked at first occurrence (shortest first, alphabet order) and
    replayed later; ``final_ok`` decides the set reached after the last letter.
    ``longest(states)`` bounds how many more symbols can still be read.
    ``charge`` is called once per search node; ``max_total`` caps |h(p)|.

    An image only matters through the state map it induces (state -> closed
    set reached by reading it), so per binding step just the first image with
    each map is tried; the number of maps is bounded by the transition
    monoid of ``m``, not by the number of words.
    """
    ell = len(p)
    binding: dict[str, Word] = {}
    maps: dict[str, tuple] = {}
    failed = set()
    ahead: dict[frozenset, frozenset] = {}
    identity = tuple(m.closure([q]) for q in range(m.n))

    def forward(states):
        if states not in ahead:
            ahead[states] = automata.reachable_from(m, states)
        return ahead[states]

    def apply(f, states):
        return frozenset().union(*(f[q] for q in states))

    def need(j):
        return sum(len(binding[x]) if x in binding else 1 for x in p[j:])

    def room(j, here):
        # symbols still allowed from position j of the pattern
        left = longest(here)
        if max_total is not None:
            left = min(left, max_total - sum(len(binding[x]) for x in p[:j]))
        return left

    def go(j, here):
        if charge is not None:
            charge()
        if j == ell:
            return final_ok(here)
        left = room(j, here)
        if need(j) > left:
            return False
        key = (j, here, tuple((x, maps[x]) for x in sorted(set(p[j:])) if x in maps),
               left if max_total is not None else None)
        if key in failed:
            return False
        x = p[j]
        if x in binding:
            cur = apply(maps[x], here)
            if cur and go(j + 1, cur):
                return True
        else:
            occurrences = p[j:].count(x)
            other = need(j) - occurrences
            seen = {identity}
            level = [((), identity)]
            size = 0
            while level:
                size += 1
                if occurrences * size + other > left:
                    break
                nxt_level = []
                for img, f in level:
                    for a in m.alphabet:
                        g = tuple(m.step(t, a) if t else t for t in f)
                        if g in seen:
                            continue
                        seen.add(g)
                        nxt = apply(g, here)
                        if not nxt:
                            continue
                        ext = img + (a,)
                        # a later occurrence must read ext somewhere ahead;
                        # if it cannot, no extension of ext can either
                        if occurrences > 1 and not any(g[q] for q in forward(nxt)):
                            continue
                        nxt_level.append((ext, g))
                        binding[x], maps[x] = ext, g
                        if go(j + 1, nxt):
                            return True
                        del binding[x], maps[x]
                level = nxt_level
        failed.add(key)
        return False

    return dict(binding) if go(0, here) else None


def _longest_words(m: automata.Nfa):
    """``states -> max symbols still readable before acceptance`` for finite L(m)."""
    useful = automata.useful_states(m)
    g = nx.DiGraph()
    g.add_nodes_from(useful)
    for q in useful:
        for a, t in m.out(q):
            if t in useful:
                g.add_edge(q, t)
    cond = nx.condensation(g)
    member = cond.graph["mapping"]
    best: dict[int, int] = {}
    for c in reversed(list(nx.topological_sort(cond))):
        val = 0 if cond.nodes[c]["members"] & m.accepting else -1
        for q in cond.nodes[c]["members"]:
            for a, t in m.out(q):
                if t in useful and member[t] != c:
                    val = max(val, (a is not None) + best[member[t]])
        best[c] = val
    return lambda states: max((best[member[q]] for q in states if q in useful), default=-1)


def nfa_pattern_accept(m: Automaton, p: Pattern) -> Optional[tuple[Word, dict[str, Word]]]:
    """Some x in the finite language L(m) and h with h(p) == x, or None."""
    p = _check_pattern(p)
    nfa = m.to_nfa()
    if not automata.is_finite(nfa):
        raise DomainError("pattern acceptance is only decided here for finite languages")
    longest = _longest_words(nfa)
    h = _guided(nfa, p, nfa.initial(), lambda s: bool(s & nfa.accepting), longest)
    if h is None:
        return None
    return apply_morphism(h, p), h


def nfa_pattern_factor_accept(m: Automaton, p: Pattern) -> Optional[tuple[Word, MatchWitness]]:
    """Some x in L(m) with a factor h(p), returned with its witness."""
    p = _check_pattern(p)
    nfa = m.to_nfa()
    pump = automata.pumping_decomposition(nfa)
    if pump is not None:
        x, y, z = pump
        word = x + y * len(p) + z
        return word, MatchWitness({v: y for v in variables(p)}, len(x), len(y) * len(p))

    return factor_search(nfa, p)


def factor_search(m: automata.Nfa, p: Pattern, max_len: Optional[int] = None,
                  charge=None) -> Optional[tuple[Word, MatchWitness]]:
    """Pattern-as-factor search over a finite L(m).

    The prefix before the factor is free, so the walk starts from every
    useful state at once; the start state and the prefix/suffix are
    recovered afterwards.  ``max_len`` caps the factor length.
    """
    useful = automata.useful_states(m)
    if not useful:
        return None
    h = _guided(m, p, frozenset(useful), lambda s: bool(s & useful), _longest_words(m),
                charge, max_len)
    if h is None:
        return None
    factor = apply_morphism(h, p)
    dist_in = _shortest_into(m)
    for q in sorted(useful, key=lambda q: (len(dist_in[q]), q)):
        end = m.closure([q])
        for a in factor:
            end = m.step(end, a)
        if end & useful:
            suffix, _ = automata._shortest_path_word(m, end & useful, m.accepting)
            prefix = dist_in[q]
            return prefix + factor + suffix, MatchWitness(h, len(prefix), len(factor))
    raise AssertionError("factor found but no start state replays it")


def _shortest_into(m: automata.Nfa) -> dict[int, Word]:
    out = {}
    for q in automata.reachable_states(m):
        out[q] = automata._shortest_path_word(m, m.starts, {q})[0]
    return out


def validate(p: Pattern, w: Word, witness: MatchWitness) -> bool:
    """True iff the witness really places h(p) at its claimed position in ``w``."""
    try:
        image = apply_morphism(witness.morphism, p)
    except DomainError:
        return False
    return len(image) == witness.length and tuple(w)[witness.start:witness.start + witness.length] == image
