import random
import subprocess
import sys

import pytest

from finpat import automata, grammars, matcher, pda, reductions, words
from finpat.automata import trie_dfa
from finpat.cli import NO, RESOURCE, USAGE, YES, main
from finpat.grammars import make_cfg
from oracles import AB, BIN, brute_sat, random_3cnf


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, out


def report(out):
    """Parse the ``yes`` report into word, start, length and morphism."""
    lines = out.splitlines()
    assert lines[0] == "yes"
    info, h = {}, {}
    for line in lines[1:]:
        if " = " in line:
            h.update(words.parse_morphism(line))
        else:
            key, _, rest = line.partition(" ")
            info[key] = words.parse_word(rest) if key == "word" else int(rest)
    return info, h


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return path
    return write


def test_match(capsys, files):
    p = files("p.txt", "a b a\n")
    code, out = run(capsys, "match", "--pattern", p, "--word", files("w.txt", "0 0 1 0 0\n"))
    assert code == YES
    _, h = report(out)
    assert words.apply_morphism(h, ("a", "b", "a")) == tuple("00100")
    code, out = run(capsys, "match", "--pattern", files("q.txt", "a a\n"), "--word", files("v.txt", "0 1 0\n"))
    assert (code, out) == (NO, "no\n")


def test_match_factor(capsys, files):
    w = tuple("0110")
    code, out = run(capsys, "match-factor", "--pattern", files("p.txt", "a a\n"),
                    "--word", files("w.txt", words.format_word(w)))
    info, h = report(out)
    assert code == YES
    assert matcher.validate(("a", "a"), w, matcher.MatchWitness(h, info["start"], info["length"]))


def test_nfa_pattern_verbs(capsys, files):
    m = files("m.dfa", automata.format_automaton(trie_dfa(["0101", "010"], BIN)))
    code, out = run(capsys, "nfa-pattern", "--nfa", m, "--pattern", files("p.txt", "a a\n"))
    info, h = report(out)
    assert code == YES and automata.accepts(trie_dfa(["0101", "010"], BIN), info["word"])
    assert words.apply_morphism(h, ("a", "a")) == info["word"]
    code, out = run(capsys, "nfa-pattern-factor", "--nfa", m, "--pattern", files("q.txt", "a b a\n"))
    info, h = report(out)
    assert matcher.validate(("a", "b", "a"), info["word"], matcher.MatchWitness(h, info["start"], info["length"]))


def test_nfa_pattern_on_infinite_language_is_usage_error(capsys, files):
    loop = automata.Dfa(1, BIN, {(0, "0"): 0, (0, "1"): 0}, 0, frozenset([0]))
    m = files("loop.dfa", automata.format_automaton(loop))
    code = main(["nfa-pattern", "--nfa", str(m), "--pattern", str(files("p.txt", "a a\n"))])
    assert code == USAGE
    assert "error" in capsys.readouterr().err


def test_cfg_verbs(capsys, files):
    g = make_cfg("S", "01", [("S", ("A", "A")), ("S", ("0", "1", "1", "0")), ("A", ("0", "1"))])
    c = files("g.cfg", grammars.format_cfg(g))
    code, out = run(capsys, "cfg-square", "--cfg", c)
    info, _ = report(out)
    assert code == YES and words.is_k_power(info["word"], 2) and info["word"] in grammars.enumerate_words(g, 4)
    code, out = run(capsys, "cfg-pattern-factor", "--cfg", c, "--pattern", files("p.txt", "a a\n"))
    info, h = report(out)
    assert matcher.validate(("a", "a"), info["word"], matcher.MatchWitness(h, info["start"], info["length"]))
    single = files("s.cfg", grammars.format_cfg(make_cfg("S", "01", [("S", tuple("010"))])))
    assert run(capsys, "cfg-square", "--cfg", single)[0] == NO


def test_intersection_verbs(capsys, files):
    a = files("a.dfa", automata.format_automaton(trie_dfa(["0", "01"], BIN)))
    b = files("b.dfa", automata.format_automaton(trie_dfa(["01", "1"], BIN)))
    code, out = run(capsys, "intersect-dfa", "--nfa", a, "--nfa", b)
    assert code == YES and report(out)[0]["word"] == tuple("01")
    pa = files("a.pda", pda.format_pda(pda.cfg_to_pda(make_cfg("S", "01", [("S", ("0",)), ("S", ("0", "1"))]))))
    pb = files("b.pda", pda.format_pda(pda.cfg_to_pda(make_cfg("S", "01", [("S", ("1",)), ("S", ("0", "1"))]))))
    code, out = run(capsys, "intersect-pda", "--pda", pa, "--pda", pb, "--k", 2)
    assert code == YES and report(out)[0]["word"] == tuple("01")
    assert run(capsys, "intersect-pda", "--pda", pa, "--pda", pb, "--k", 3)[0] == USAGE


def test_resource_exit(capsys, files):
    g = make_cfg("S", "012", [("S", tuple("0120210120"))])
    c = files("g.cfg", grammars.format_cfg(g))
    code = main(["cfg-pattern-factor", "--cfg", str(c), "--pattern", str(files("p.txt", "a b c a b\n")),
                 "--max-configs", "3"])
    assert code == RESOURCE


def test_usage_errors(capsys, files):
    assert main(["match", "--pattern", str(files("p.txt", "a\n"))]) == USAGE
    assert main(["match", "--pattern", "/nonexistent", "--word", "/nonexistent"]) == USAGE
    assert main(["intersect-dfa", "--nfa", str(files("bad.dfa", "states x\n"))]) == USAGE
    with pytest.raises(SystemExit):
        main(["no-such-verb"])


def test_sat_bundles_round_trip(capsys, files, tmp_path):
    rng = random.Random(7)
    unsat = reductions.SatInstance(2, ((1, 1, 1), (-1, -1, -1)))
    for phi in [unsat] + [random_3cnf(rng, rng.randint(1, 3), rng.randint(1, 3)) for _ in range(8)]:
        cnf = files("phi.cnf", reductions.format_dimacs(phi))
        out = tmp_path / "dfa"
        assert run(capsys, "reduce-sat-dfa", "--cnf", cnf, "--out", out)[0] == YES
        dfas = [automata.parse_dfa((out / f"clause{j}.dfa").read_text()) for j in range(1, phi.m + 1)]
        assert dfas == reductions.sat_to_clause_dfas(phi)
        paths = [a for j in range(1, phi.m + 1) for a in ("--nfa", out / f"clause{j}.dfa")]
        code, text = run(capsys, "intersect-dfa", *paths)
        assert (code == YES) == brute_sat(phi)
        if code == YES:
            bits = [s == "1" for s in report(text)[0]["word"]]
            assert phi.satisfied_by(bits)

        out = tmp_path / "kp"
        assert run(capsys, "reduce-sat-kpower", "--cnf", cnf, "--out", out)[0] == YES
        clause_dfas = reductions.sat_to_clause_dfas(phi)
        m, p = reductions.dfas_to_kpower_instance(clause_dfas * (2 if phi.m == 1 else 1))
        assert automata.parse_dfa((out / "machine.dfa").read_text()) == m
        assert words.parse_pattern((out / "pattern.txt").read_text()) == p
        code, text = run(capsys, "nfa-pattern", "--nfa", out / "machine.dfa", "--pattern", out / "pattern.txt")
        assert (code == YES) == brute_sat(phi)
        if code == YES:
            info, h = report(text)
            assert automata.accepts(m, info["word"]) and words.apply_morphism(h, p) == info["word"]

        out = tmp_path / "ang"
        code, text = run(capsys, "reduce-sat-angluin", "--cnf", cnf, "--out", out)
        p, w, d = reductions.sat_to_angluin_gadget(phi)
        assert code == YES and f"length {len(w)}" in text
        assert words.parse_pattern((out / "pattern.txt").read_text()) == p
        assert words.parse_word((out / "word.txt").read_text().strip()) == w
        assert automata.parse_dfa((out / "machine.dfa").read_text()) == d
        code, text = run(capsys, "match-factor", "--pattern", out / "pattern.txt", "--word", out / "word.txt")
        assert (code == YES) == brute_sat(phi)
        if code == YES:
            info, h = report(text)
            assert matcher.validate(p, w, matcher.MatchWitness(h, info["start"], info["length"]))


def test_pcp_bundle(capsys, files, tmp_path):
    inst = reductions.PcpInstance(((("a",), ("a",)),))
    src = files("i.pcp", reductions.format_pcp(inst))
    out = tmp_path / "pcp"
    assert run(capsys, "reduce-pcp-square", "--pcp", src, "--out", out, "--max-indices", 2)[0] == YES
    g = grammars.parse_cfg((out / "grammar.cfg").read_text())
    assert g == reductions.pcp_to_square_cfg(inst, 2)
    code, text = run(capsys, "cfg-square", "--cfg", out / "grammar.cfg")
    assert code == YES and report(text)[0]["word"] == ("a", "c1", "#", "a", "c1", "#")


def test_kpower_factor_bundle(capsys, files, tmp_path):
    a = files("a.dfa", automata.format_automaton(trie_dfa(["ab"], AB)))
    out = tmp_path / "gadget"
    assert run(capsys, "reduce-dfa-kpower-factor", "--nfa", a, "--nfa", a, "--out", out)[0] == YES
    g = grammars.parse_cfg((out / "grammar.cfg").read_text())
    assert g == reductions.dfas_to_kpower_factor_cfg([trie_dfa(["ab"], AB)] * 2)[0]
    code, text = run(capsys, "cfg-pattern-factor", "--cfg", out / "grammar.cfg",
                     "--pattern", out / "pattern.txt")
    info, h = report(text)
    assert code == YES and words.is_k_power(info["word"], 2)
    assert matcher.validate(("a", "a"), info["word"], matcher.MatchWitness(h, info["start"], info["length"]))


def test_squarefree_bundle(capsys, tmp_path):
    out = tmp_path / "sf"
    code, text = run(capsys, "gen-squarefree", "--min-len", 13, "--out", out)
    info, _ = report(text.split("\n", 2)[2])
    assert code == YES and "".join(info["word"]) == "0121021201210" and info["length"] == 13
    assert words.parse_word((out / "word.txt").read_text().strip()) == info["word"]
    slp = grammars.parse_cfg((out / "slp.cfg").read_text())
    assert slp == reductions.squarefree_slp_grammar(13)


def test_console_entry_point():
    done = subprocess.run([sys.executable, "-m", "finpat.cli", "gen-squarefree", "--min-len", "1"],
                          capture_output=True, text=True)
    assert done.returncode == YES and done.stdout.splitlines()[:2] == ["yes", "word 0"]
