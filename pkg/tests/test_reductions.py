import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from finpat import automata, grammars, matcher, pda
from finpat.automata import trie_dfa
from finpat.errors import DomainError, ParseError, ResourceError
from finpat.reductions import (
    BLOCK_MARKER, PcpInstance, SatInstance, angluin_pattern, angluin_word, dfas_to_kpower_factor_cfg,
    dfas_to_kpower_instance, encode_assignment, format_dimacs, format_pcp, kpower_factor_gadget,
    parse_dimacs, parse_pcp, pcp_bounded_solve, pcp_index_word, pcp_to_square_cfg,
    sat_brute_force, sat_to_angluin_gadget, sat_to_clause_dfas, squarefree_slp_grammar,
    squarefree_word,
)
from finpat.words import is_squarefree, shortest_square_factor, word
from oracles import AB, BIN, brute_pcp, brute_sat, has_square, is_square, random_3cnf, random_pcp

seeds = st.integers(0, 10**6)
KNOWN_PCP = PcpInstance(((tuple("1"), tuple("111")), (tuple("10111"), tuple("10")), (tuple("10"), tuple("0"))))


# -- 3-SAT ---------------------------------------------------------------------


def test_sat_brute_force_examples():
    assert sat_brute_force(SatInstance(1, ((1, 1, 1),))) == (True,)
    assert sat_brute_force(SatInstance(1, ((1, 1, 1), (-1, -1, -1)))) is None


def test_sat_brute_force_guard():
    with pytest.raises(ResourceError):
        sat_brute_force(SatInstance(25, ((1, 2, 3),)))


def test_sat_instance_validation():
    for n, clauses in [(0, ((1, 1, 1),)), (2, ()), (2, ((1, 2),)), (2, ((1, 3, 1),)), (2, ((0, 1, 2),))]:
        with pytest.raises(DomainError):
            SatInstance(n, clauses)


def test_clause_dfa_example():
    (d,) = sat_to_clause_dfas(SatInstance(4, ((1, -2, 4),)))
    accepted = {"".join(w) for w in itertools.product("01", repeat=4) if automata.accepts(d, w)}
    assert len(accepted) == 14
    assert set(map("".join, itertools.product("01", repeat=4))) - accepted == {"0100", "0110"}
    assert d.n <= 2 * 4 + 1


def test_single_variable_clause():
    (d,) = sat_to_clause_dfas(SatInstance(1, ((1, 1, 1),)))
    assert automata.enumerate_words(d, 4) == [("1",)]


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_clause_dfas_accept_exactly_the_satisfying_encodings(seed):
    rng = random.Random(seed)
    phi = random_3cnf(rng, rng.randint(1, 5), rng.randint(1, 4))
    dfas = sat_to_clause_dfas(phi)
    for d, clause in zip(dfas, phi.clauses):
        assert d.n <= 2 * phi.n + 1
        assert automata.is_finite(d)
        single = SatInstance(phi.n, (clause,))
        for bits in itertools.product((False, True), repeat=phi.n):
            assert automata.accepts(d, encode_assignment(bits)) == single.satisfied_by(bits)
        assert all(len(w) == phi.n for w in automata.enumerate_words(d, phi.n + 2))


# -- k-power instance -------------------------------------------------------------


def test_kpower_instance_examples():
    m, p = dfas_to_kpower_instance([trie_dfa(["01"], BIN), trie_dfa(["01"], BIN)])
    assert p == ("a", "a")
    assert automata.enumerate_words(m, 8) == [tuple("01#01#")]
    assert matcher.nfa_pattern_accept(m, p) == (tuple("01#01#"), {"a": tuple("01#")})
    m, p = dfas_to_kpower_instance([trie_dfa(["0"], BIN), trie_dfa(["1"], BIN)])
    assert automata.enumerate_words(m, 8) == [tuple("0#1#")]
    assert matcher.match_exact(p, tuple("0#1#")) is None
    assert matcher.nfa_pattern_accept(m, p) is None


def test_kpower_instance_errors():
    d = trie_dfa(["01"], BIN)
    with pytest.raises(DomainError):
        dfas_to_kpower_instance([d])
    with pytest.raises(DomainError):
        dfas_to_kpower_instance([d, d], sep="0")
    with pytest.raises(DomainError):
        dfas_to_kpower_instance([d, trie_dfa(["ab"], AB)])
    loop = automata.Dfa(1, BIN, {(0, "0"): 0, (0, "1"): 0}, 0, frozenset([0]))
    with pytest.raises(DomainError):
        dfas_to_kpower_instance([d, loop])


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(2, 3))
def test_kpower_instance_language(seed, k):
    rng = random.Random(seed)
    langs = [sorted({"".join(rng.choice("01") for _ in range(rng.randint(0, 3)))
                     for _ in range(rng.randint(1, 3))}) for _ in range(k)]
    m, p = dfas_to_kpower_instance([trie_dfa(ws, BIN) for ws in langs])
    expected = sorted((tuple("#".join(c) + "#") for c in itertools.product(*langs)),
                      key=lambda w: (len(w), w))
    got = automata.enumerate_words(m, 3 * k + k)
    assert sorted(got, key=lambda w: (len(w), w)) == expected
    common = set.intersection(*map(set, langs))
    assert (matcher.nfa_pattern_accept(m, p) is not None) == bool(common)


# -- Angluin-style gadget ---------------------------------------------------------


def test_angluin_example():
    phi = SatInstance(1, ((1, 1, 1),))
    p, w, d = sat_to_angluin_gadget(phi)
    independent = "0" * 8 + "0111" + "01111111" + "01111" + "0" + "0" * 8
    assert "".join(w) == independent and len(w) == 34
    assert p[:12] == ("v",) * 8 + ("v", "x1", "y1", "v")
    assert d.n == len(w) + 2
    assert automata.enumerate_words(d, 40) == [w]


@pytest.mark.parametrize("n,m", [(1, 1), (2, 3), (3, 2), (4, 5)])
def test_angluin_word_length(n, m):
    assert len(angluin_word(n, m)) == 2 * (2 * n + 6 * m) + 4 * n + 8 * m + 5 * m + 1


def test_angluin_pattern_shape():
    phi = SatInstance(2, ((1, -2, 2), (-1, -1, 2)))
    p = angluin_pattern(phi)
    pad = 2 * 2 + 6 * 2
    assert p[:pad] == p[-pad:] == ("v",) * pad
    body = p[pad:-pad]
    assert body == ("v", "x1", "y1", "v", "x2", "y2", "v",
                    "x1", "y2", "x2", "z1", "v", "y1", "y1", "x2", "z2", "v",
                    "z1", "u1", "v", "z2", "u2", "v")


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_angluin_round_trip_three_clauses(seed):
    rng = random.Random(seed)
    phi = random_3cnf(rng, rng.randint(1, 3), 3)
    p, w, _ = sat_to_angluin_gadget(phi)
    factor = matcher.match_factor(p, w)
    assert (factor is not None) == brute_sat(phi)
    assert (matcher.match_exact(p, w) is not None) == (factor is not None)


# -- PCP -------------------------------------------------------------------------------


def test_pcp_examples():
    assert pcp_bounded_solve(PcpInstance(((("a",), ("a",)),)), 6) == (1,)
    assert pcp_bounded_solve(PcpInstance(((("a",), ("b",)),)), 6) is None
    assert pcp_bounded_solve(KNOWN_PCP, 6) == (2, 1, 1, 3)
    assert pcp_index_word((2, 1, 1, 3)) == ("c3", "c1", "c1", "c2")


def test_pcp_guard_and_validation():
    with pytest.raises(ResourceError):
        pcp_bounded_solve(KNOWN_PCP, 13)
    with pytest.raises(DomainError):
        PcpInstance(())
    with pytest.raises(DomainError):
        PcpInstance(((("a",), ()),))
    with pytest.raises(DomainError):
        PcpInstance(((("#",), ("a",)),))


def test_pcp_grammar_productions():
    g = pcp_to_square_cfg(PcpInstance(((("a",), ("b", "b")),)))
    assert set(g.productions) == {
        ("S", ("A", "#", "B", "#")),
        ("A", ("a", "A", "c1")), ("A", ("a", "c1")),
        ("B", ("b", "b", "B", "c1")), ("B", ("b", "b", "c1")),
    }


def test_pcp_identity_pair_square():
    g = pcp_to_square_cfg(PcpInstance(((("a",), ("a",)),)))
    assert ("a", "c1", "#", "a", "c1", "#") in grammars.enumerate_words(g, 6)


def test_pcp_no_square_without_solution():
    g = pcp_to_square_cfg(PcpInstance(((("a",), ("b",)),)), max_indices=3)
    assert not any(is_square(w) for w in grammars.enumerate_words(g, 20))


def test_known_pcp_square():
    seq = pcp_bounded_solve(KNOWN_PCP, 6)
    top = tuple(s for i in seq for s in KNOWN_PCP.pairs[i - 1][0])
    bot = tuple(s for i in seq for s in KNOWN_PCP.pairs[i - 1][1])
    assert top == bot
    half = top + pcp_index_word(seq) + ("#",)
    g = pcp_to_square_cfg(KNOWN_PCP, max_indices=4)
    assert half + half in grammars.enumerate_words(g, 2 * len(half))


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_pcp_solver_agrees_with_exhaustive_search(seed):
    inst = random_pcp(random.Random(seed))
    assert pcp_bounded_solve(inst, 5) == brute_pcp(inst, 5)


def test_unrolled_grammar_is_finite_and_bounded():
    g = pcp_to_square_cfg(KNOWN_PCP, max_indices=3)
    assert grammars.is_finite(g)
    for w in grammars.enumerate_words(g, 40):
        a, b = "".join(w).split("#")[:2]
        assert 1 <= a.count("c") <= 3 and 1 <= b.count("c") <= 3


# -- squarefree words and the k-power factor gadget ---------------------------------------


def test_squarefree_word_examples():
    assert squarefree_word(1) == ("0",)
    assert "".join(squarefree_word(13)) == "0121021201210"
    w = squarefree_word(14)
    assert len(w) == 169 and shortest_square_factor(w) is None
    assert len(squarefree_word(170)) == 13 ** 3
    with pytest.raises(DomainError):
        squarefree_word(0)


def test_squarefree_word_scan_depth_three():
    w = squarefree_word(13 ** 3)
    assert not has_square(w[:400]) and is_squarefree(w)


@pytest.mark.parametrize("n", [1, 13, 169])
def test_slp_grammar_generates_the_word(n):
    g = squarefree_slp_grammar(n)
    assert grammars.enumerate_words(g, n) == [squarefree_word(n)]


def test_slp_grammar_size_is_logarithmic():
    sizes = [len(squarefree_slp_grammar(13 ** t).productions) for t in range(1, 5)]
    assert sizes == [6, 9, 12, 15]


def dfa_pair(a, b):
    return [trie_dfa([a], AB), trie_dfa([b], AB)]


def test_gadget_examples():
    g, p = dfas_to_kpower_factor_cfg(dfa_pair("ab", "ab"))
    assert p == ("a", "a")
    wit = pda.cfg_pattern_factor_search(g, p)
    assert wit is not None and is_square(wit.word)
    g, p = dfas_to_kpower_factor_cfg(dfa_pair("ab", "ba"))
    assert pda.cfg_pattern_factor_search(g, p) is None


def test_gadget_blocks_are_squarefree_and_finite():
    gadget = kpower_factor_gadget(dfa_pair("ab", "ba"))
    assert grammars.is_finite(gadget.grammar)
    for b in gadget.blocks:
        ws = grammars.enumerate_words(b, grammars.length_bound(b) if grammars.length_bound(b) < 40 else 40)
        assert ws and all(is_squarefree(w) for w in ws)


def test_gadget_reserved_symbols():
    with pytest.raises(DomainError):
        dfas_to_kpower_factor_cfg([trie_dfa(["0"], BIN), trie_dfa(["1"], BIN)])
    with pytest.raises(DomainError):
        dfas_to_kpower_factor_cfg(dfa_pair("ab", "ab"), sep="$")
    with pytest.raises(DomainError):
        dfas_to_kpower_factor_cfg([trie_dfa(["ab"], AB)])


def test_unmarked_gadget_admits_a_straddling_square():
    # lengths 2 mod 3 versus the single word a: the intersection is empty
    d1 = automata.Dfa(3, AB, {(q, x): (q + 1) % 3 for q in range(3) for x in "ab"}, 0, frozenset([2]))
    d2 = trie_dfa(["a"], AB)
    assert automata.shortest_common_word([d1, d2]) is None
    literal, _ = dfas_to_kpower_factor_cfg([d1, d2], marker=None)
    straddle = tuple("a0a1a2a1a0#a0#")
    assert straddle in grammars.enumerate_words(literal, len(straddle))
    assert matcher.match_factor(("a", "a"), straddle) is not None
    marked, p = dfas_to_kpower_factor_cfg([d1, d2])
    assert pda.cfg_pattern_factor_search(marked, p) is None
    assert BLOCK_MARKER in marked.terminals


# -- text formats -------------------------------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_dimacs_round_trip(seed):
    rng = random.Random(seed)
    phi = random_3cnf(rng, rng.randint(1, 6), rng.randint(1, 10))
    assert parse_dimacs(format_dimacs(phi)) == phi


def test_dimacs_comments_and_wrapping():
    text = "c hello\np cnf 3 2\n1 -2\n3 0 -1 2 -3 0\n"
    assert parse_dimacs(text) == SatInstance(3, ((1, -2, 3), (-1, 2, -3)))


@pytest.mark.parametrize("text", [
    "1 2 3 0\n", "p cnf 3 2\n1 2 3 0\n", "p cnf 3 1\n1 2 3\n", "p cnf 3 1\n1 2 x 0\n",
    "p cnf 2 1\n1 2 3 0\n", "p dnf 3 1\n1 2 3 0\n",
])
def test_dimacs_errors(text):
    with pytest.raises(ParseError):
        parse_dimacs(text)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_pcp_round_trip(seed):
    inst = random_pcp(random.Random(seed))
    assert parse_pcp(format_pcp(inst)) == inst


@pytest.mark.parametrize("text", ["", "1 2 3\n", "1#0 1\n"])
def test_pcp_errors(text):
    with pytest.raises(ParseError):
        parse_pcp(text)


def test_encode_assignment():
    assert encode_assignment((True, False, True)) == word("101")
