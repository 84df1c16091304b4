"""Hardness gadgets and the brute-force oracles that certify them.

* 3-SAT -> clause DFAs over {0,1} (finite-language DFA intersection)
* clause DFAs -> one DFA for L(A1)#...L(Ak)# plus the pattern a^k
* 3-SAT -> Angluin-style pattern/word pair with zero padding
* PCP -> grammar S -> A#B# that generates a square iff the instance is solvable
* DFAs -> finite grammar whose words have a k-power factor iff the DFAs intersect
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional

from . import automata, grammars, pda
from .automata import EPS, Dfa, Nfa
from .errors import DomainError, ParseError, ResourceError
from .grammars import Cfg
from .words import Alphabet, Pattern, Word

BINARY = Alphabet(("0", "1"))
SEPARATOR = "#"
BLOCK_MARKER = "$"
SAT_GUARD = 24
PCP_GUARD = 12

# Leech's uniform squarefree morphism on {0, 1, 2}
LEECH = {
    "0": tuple("0121021201210"),
    "1": tuple("1202102012021"),
    "2": tuple("2010210120102"),
}
TERNARY = Alphabet(("0", "1", "2"))


# -- 3-SAT -------------------------------------------------------------------------


@dataclass(frozen=True)
class SatInstance:
    """3-CNF formula.  Literals are DIMACS integers: ``i`` is V_i, ``-i`` its negation."""

    n: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        clauses = tuple(tuple(c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        if self.n < 1 or not clauses:
            raise DomainError("need n >= 1 variables and m >= 1 clauses")
        for c in clauses:
            if len(c) != 3:
                raise DomainError(f"clause {c} does not have exactly 3 literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.n:
                    raise DomainError(f"literal {lit} out of range 1..{self.n}")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)


def sat_brute_force(phi: SatInstance) -> Optional[tuple[bool, ...]]:
    """First satisfying assignment in counting order (False before True), or None."""
    if phi.n > SAT_GUARD:
        raise ResourceError(f"brute force limited to {SAT_GUARD} variables")
    for bits in itertools.product((False, True), repeat=phi.n):
        if phi.satisfied_by(bits):
            return bits
    return None


def encode_assignment(bits: Sequence[bool]) -> Word:
    return tuple("1" if b else "0" for b in bits)


def sat_to_clause_dfas(phi: SatInstance) -> list[Dfa]:
    """One DFA per clause accepting the length-n encodings that satisfy it.

    States: ``u_i`` (i bits read, clause not yet satisfied, i < n),
    ``s_i`` (i bits read, satisfied, 1 <= i <= n) and a dead state:
    2n + 1 in all.
    """
    n = phi.n
    u = list(range(n))                  # u_0 .. u_{n-1}
    s = [None] + list(range(n, 2 * n))  # s_1 .. s_n
    dead = 2 * n
    dfas = []
    for clause in phi.clauses:
        delta = {}
        for i in range(n):
            for b in "01":
                hit = any(abs(l) == i + 1 and (b == "1") == (l > 0) for l in clause)
                if hit:
                    delta[u[i], b] = s[i + 1]
                else:
                    delta[u[i], b] = u[i + 1] if i + 1 < n else dead
                delta[s[i + 1], b] = s[i + 2] if i + 1 < n else dead
                delta[dead, b] = dead
        dfas.append(Dfa(2 * n + 1, BINARY, delta, u[0], frozenset([s[n]])))
    return dfas


def dfas_to_kpower_instance(dfas: Sequence[Dfa], sep: str = SEPARATOR) -> tuple[Dfa, Pattern]:
    """DFA for L(A1) sep L(A2) sep ... L(Ak) sep, and the pattern a^k.

    The machines are glued with epsilon bridges into an NFA, which is then
    determinized.
    """
    dfas = list(dfas)
    k = len(dfas)
    if k < 2:
        raise DomainError("need k >= 2 machines")
    sigma = dfas[0].alphabet
    for d in dfas:
        if set(d.alphabet) != set(sigma):
            raise DomainError("machines must share one alphabet")
        if not automata.is_finite(d):
            raise DomainError("every machine must accept a finite language")
    if sep in sigma:
        raise DomainError(f"separator {sep!r} already in the alphabet")
    alphabet = Alphabet((*sigma, sep))
    trans = set()
    offsets = []
    total = 0
    for d in dfas:
        offsets.append(total)
        total += d.n + 1  # machine states plus its outgoing bridge
    final = total
    for i, d in enumerate(dfas):
        off = offsets[i]
        bridge = off + d.n
        for (q, a), t in d.delta.items():
            trans.add((off + q, a, off + t))
        for q in d.accepting:
            trans.add((off + q, EPS, bridge))
        target = offsets[i + 1] + dfas[i + 1].start if i + 1 < k else final
        trans.add((bridge, sep, target))
    nfa = Nfa(total + 1, alphabet, frozenset(trans),
              frozenset([dfas[0].start]), frozenset([final]))
    return automata.determinize(nfa), ("a",) * k


# -- Angluin-style gadget ---------------------------------------------------------------


def angluin_word(n: int, m: int) -> Word:
    pad = 2 * n + 6 * m
    text = "0" * pad + "0111" * n + "01111111" * m + "01111" * m + "0" + "0" * pad
    return tuple(text)


def angluin_pattern(phi: SatInstance) -> Pattern:
    n, m = phi.n, phi.m
    pad = ("v",) * (2 * n + 6 * m)

    def f(lit):
        return f"x{lit}" if lit > 0 else f"y{-lit}"

    body: list[str] = ["v"]
    for i in range(1, n + 1):
        body += [f"x{i}", f"y{i}", "v"]
    for j, clause in enumerate(phi.clauses, 1):
        body += [f(l) for l in clause] + [f"z{j}", "v"]
    for j in range(1, m + 1):
        body += [f"z{j}", f"u{j}", "v"]
    return pad + tuple(body) + pad


def sat_to_angluin_gadget(phi: SatInstance) -> tuple[Pattern, Word, Dfa]:
    """Pattern p, word w and a chain DFA for {w}; p matches (a factor of) w iff phi is satisfiable."""
    w = angluin_word(phi.n, phi.m)
    return angluin_pattern(phi), w, automata.chain_dfa(w, BINARY)


# -- PCP -------------------------------------------------------------------------------


@dataclass(frozen=True)
class PcpInstance:
    pairs: tuple[tuple[Word, Word], ...]

    def __post_init__(self):
        pairs = tuple((tuple(x), tuple(y)) for x, y in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise DomainError("a PCP instance needs at least one pair")
        for x, y in pairs:
            if not x or not y:
                raise DomainError("PCP words must be non-empty")
        clash = set(self.sigma) & set(self.generated_symbols)
        if clash:
            raise DomainError(f"instance alphabet overlaps generated symbols {sorted(clash)}")

    @property
    def sigma(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(s for x, y in self.pairs for s in x + y))

    @property
    def index_symbols(self) -> tuple[str, ...]:
        return tuple(f"c{i}" for i in range(1, len(self.pairs) + 1))

    @property
    def generated_symbols(self) -> tuple[str, ...]:
        return (SEPARATOR, *self.index_symbols)


def pcp_to_square_cfg(inst: PcpInstance, max_indices: Optional[int] = None) -> Cfg:
    """S -> A#B#,  A -> x_i A c_i | x_i c_i,  B -> y_i B c_i | y_i c_i.

    With ``max_indices`` the A/B recursion is unrolled to that depth, giving
    the finite sub-language whose blocks use at most that many indices.
    """
    terms = (*inst.sigma, SEPARATOR, *inst.index_symbols)
    prods: list[tuple[str, tuple[str, ...]]] = []
    if max_indices is None:
        prods.append(("S", ("A", SEPARATOR, "B", SEPARATOR)))
        for side, k in (("A", 0), ("B", 1)):
            for i, pair in enumerate(inst.pairs, 1):
                prods.append((side, (*pair[k], side, f"c{i}")))
                prods.append((side, (*pair[k], f"c{i}")))
        return grammars.make_cfg("S", terms, prods)
    if max_indices < 1:
        raise DomainError("max_indices must be at least 1")
    prods.append(("S", (f"A{max_indices}", SEPARATOR, f"B{max_indices}", SEPARATOR)))
    for side, k in (("A", 0), ("B", 1)):
        for d in range(1, max_indices + 1):
            for i, pair in enumerate(inst.pairs, 1):
                if d > 1:
                    prods.append((f"{side}{d}", (*pair[k], f"{side}{d - 1}", f"c{i}")))
                prods.append((f"{side}{d}", (*pair[k], f"c{i}")))
    return grammars.make_cfg("S", terms, prods)


def pcp_bounded_solve(inst: PcpInstance, max_indices: int) -> Optional[tuple[int, ...]]:
    """Shortest (then lexicographically least) solution with at most ``max_indices`` indices."""
    if max_indices > PCP_GUARD:
        raise ResourceError(f"bounded PCP search limited to {PCP_GUARD} indices")
    # state: which side is ahead and the unmatched overhang
    start = (0, ())
    seen = {start}
    level = [((), start)]
    for _ in range(max_indices):
        nxt = []
        for seq, (ahead, over) in level:
            for i, (x, y) in enumerate(inst.pairs, 1):
                top = (over if ahead == 0 else ()) + x
                bot = (over if ahead == 1 else ()) + y
                k = min(len(top), len(bot))
                if top[:k] != bot[:k]:
                    continue
                state = (0, top[k:]) if len(top) >= len(bot) else (1, bot[k:])
                if not state[1]:
                    return seq + (i,)
                if state not in seen:
                    seen.add(state)
                    nxt.append((seq + (i,), state))
        level = nxt
    return None


def pcp_index_word(seq: Sequence[int]) -> Word:
    """The index block a derivation of the solution leaves behind (reversed)."""
    return tuple(f"c{i}" for i in reversed(seq))


# -- squarefree words and the k-power factor gadget ------------------------------------------


def leech(w: Word) -> Word:
    return tuple(s for a in w for s in LEECH[a])


def squarefree_word(min_len: int) -> Word:
    """The shortest iterate h^t(0) of the Leech morphism with length >= min_len."""
    if min_len < 1:
        raise DomainError("min_len must be at least 1")
    w: Word = ("0",)
    while len(w) < min_len:
        w = leech(w)
    return w


def _levels(min_len: int) -> int:
    t, size = 0, 1
    while size < min_len:
        t, size = t + 1, size * 13
    return t


def squarefree_slp_grammar(min_len: int) -> Cfg:
    """Straight-line grammar for :func:`squarefree_word`, 3(T+1) variables for 13^T >= min_len."""
    if min_len < 1:
        raise DomainError("min_len must be at least 1")
    top = _levels(min_len)
    name = lambda t, a: f"H{t}_{a}"  # noqa: E731
    prods = [(name(0, a), (a,)) for a in TERNARY]
    for t in range(1, top + 1):
        for a in TERNARY:
            prods.append((name(t, a), tuple(name(t - 1, b) for b in LEECH[a])))
    variables = tuple(name(t, a) for t in range(top, -1, -1) for a in TERNARY)
    return Cfg(variables, TERNARY, tuple(prods), name(top, "0"))


@dataclass(frozen=True)
class KPowerFactorGadget:
    slp: Cfg
    prefixes: Cfg
    prefix_pda: pda.Pda
    shuffles: tuple[pda.Pda, ...]
    blocks: tuple[Cfg, ...]
    grammar: Cfg
    pattern: Pattern


def kpower_factor_gadget(dfas: Sequence[Dfa], sep: str = SEPARATOR,
                         marker: Optional[str] = BLOCK_MARKER) -> KPowerFactorGadget:
    """Every stage of the DFA-intersection -> k-power-factor construction.

    Each block is preceded by ``marker``.  Without it (``marker=None``) the
    language is L(B1)#...L(Bk)#, where a k-power factor can straddle a
    separator without the whole word being a k-power: z2 may equal a suffix
    of z1, as in ``a0a1a2a1a0#a0#``.  With the marker every k-power factor
    is the whole word.
    """
    dfas = list(dfas)
    k = len(dfas)
    if k < 2:
        raise DomainError("need k >= 2 machines")
    sigma = set(dfas[0].alphabet)
    for d in dfas:
        if set(d.alphabet) != sigma:
            raise DomainError("machines must share one alphabet")
    reserved = set(TERNARY) | {sep} | ({marker} if marker is not None else set())
    if sigma & reserved or sep in TERNARY or marker in TERNARY or marker == sep:
        raise DomainError("DFA alphabet must avoid 0, 1, 2, the separator and the marker")
    n = max(d.n for d in dfas)
    slp = squarefree_slp_grammar(n ** k)
    prefixes = grammars.prefix_grammar(slp)
    prefix_pda = pda.cfg_to_pda(prefixes)
    shuffles = tuple(pda.shuffle_with_dfa(prefix_pda, d) for d in dfas)
    blocks = tuple(grammars.trim(pda.pda_to_cfg(a)) for a in shuffles)
    grammar = grammars.concat_with_separators(blocks, sep, lead=marker)
    return KPowerFactorGadget(slp, prefixes, prefix_pda, shuffles, blocks, grammar, ("a",) * k)


def dfas_to_kpower_factor_cfg(dfas: Sequence[Dfa], sep: str = SEPARATOR,
                              marker: Optional[str] = BLOCK_MARKER) -> tuple[Cfg, Pattern]:
    g = kpower_factor_gadget(dfas, sep, marker)
    return g.grammar, g.pattern


# -- text formats -------------------------------------------------------------------------


def parse_dimacs(text: str) -> SatInstance:
    n = m = None
    lits: list[int] = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            toks = line.split()
            if len(toks) != 4 or toks[1] != "cnf":
                raise ParseError("expected 'p cnf n m'", no)
            n, m = int(toks[2]), int(toks[3])
            continue
        try:
            lits.extend(int(t) for t in line.split())
        except ValueError:
            raise ParseError(f"bad clause line {line!r}", no) from None
    if n is None:
        raise ParseError("missing 'p cnf' header")
    clauses, cur = [], []
    for lit in lits:
        if lit == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(lit)
    if cur:
        raise ParseError("last clause not terminated by 0")
    if len(clauses) != m:
        raise ParseError(f"header says {m} clauses, found {len(clauses)}")
    try:
        return SatInstance(n, tuple(clauses))
    except DomainError as e:
        raise ParseError(str(e)) from None


def format_dimacs(phi: SatInstance) -> str:
    lines = [f"p cnf {phi.n} {phi.m}"]
    lines += [" ".join(map(str, c)) + " 0" for c in phi.clauses]
    return "\n".join(lines) + "\n"


def parse_pcp(text: str) -> PcpInstance:
    pairs = []
    for no, raw in enumerate(text.splitlines(), 1):
        toks = raw.split()
        if not toks:
            continue
        if len(toks) != 2:
            raise ParseError("expected 'x y'", no)
        pairs.append((tuple(toks[0]), tuple(toks[1])))
    try:
        return PcpInstance(tuple(pairs))
    except DomainError as e:
        raise ParseError(str(e)) from None


def format_pcp(inst: PcpInstance) -> str:
    return "".join(f"{''.join(x)} {''.join(y)}\n" for x, y in inst.pairs)
