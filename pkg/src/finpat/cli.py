"""Command-line front end.

Exit status: 0 = yes (witness printed), 1 = no, 2 = usage or parse error,
3 = resource cap exceeded.  Generators write file bundles into ``--out``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import automata, grammars, matcher, pda, reductions, words
from .errors import DomainError, ParseError, ResourceError

log = logging.getLogger("finpat")

YES, NO, USAGE, RESOURCE = 0, 1, 2, 3


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from None


def _first_line(text):
    lines = text.splitlines()
    return lines[0] if lines else ""


def read_word(path):
    return words.parse_word(_first_line(_read(path)))


def read_pattern(path):
    return words.parse_pattern(_first_line(_read(path)))


def read_dfa(path):
    return automata.parse_dfa(_read(path))


def _need(args, *names):
    for name in names:
        if not getattr(args, name):
            raise ParseError(f"--{name.replace('_', '-')} is required for {args.verb}")


def _budget(args):
    return pda.Budget(args.max_configs, args.timeout)


def _report(word=None, start=None, length=None, morphism=None, order=()):
    print("yes")
    if word is not None:
        print("word " + words.format_word(word))
    if start is not None:
        print(f"start {start}")
    if length is not None:
        print(f"length {length}")
    if morphism:
        print(words.format_morphism(morphism, order or None))
    return YES


def _no():
    print("no")
    return NO


def _write(out, files):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text)
        print(out / name)
    return YES


# -- verbs -----------------------------------------------------------------------


def cmd_match(args):
    _need(args, "pattern", "word")
    p, w = read_pattern(args.pattern), read_word(args.word)
    h = matcher.match_exact(p, w)
    return _no() if h is None else _report(morphism=h, order=words.variables(p))


def cmd_match_factor(args):
    _need(args, "pattern", "word")
    p, w = read_pattern(args.pattern), read_word(args.word)
    wit = matcher.match_factor(p, w)
    if wit is None:
        return _no()
    return _report(start=wit.start, length=wit.length, morphism=wit.morphism,
                   order=words.variables(p))


def cmd_nfa_pattern(args):
    _need(args, "nfa", "pattern")
    m = automata.parse_nfa(_read(args.nfa[0]))
    p = read_pattern(args.pattern)
    found = matcher.nfa_pattern_accept(m, p)
    if found is None:
        return _no()
    w, h = found
    return _report(word=w, morphism=h, order=words.variables(p))


def cmd_nfa_pattern_factor(args):
    _need(args, "nfa", "pattern")
    m = automata.parse_nfa(_read(args.nfa[0]))
    p = read_pattern(args.pattern)
    found = matcher.nfa_pattern_factor_accept(m, p)
    if found is None:
        return _no()
    w, wit = found
    return _report(word=w, start=wit.start, length=wit.length, morphism=wit.morphism,
                   order=words.variables(p))


def cmd_cfg_square(args):
    _need(args, "cfg")
    g = grammars.parse_cfg(_read(args.cfg))
    ww = pda.cfg_square_search(g, _budget(args), args.max_len)
    return _no() if ww is None else _report(word=ww)


def cmd_cfg_pattern_factor(args):
    _need(args, "cfg", "pattern")
    g = grammars.parse_cfg(_read(args.cfg))
    p = read_pattern(args.pattern)
    wit = pda.cfg_pattern_factor_search(g, p, _budget(args), args.max_len)
    if wit is None:
        return _no()
    length = len(words.apply_morphism(wit.morphism, p))
    return _report(word=wit.word, start=wit.start, length=length, morphism=wit.morphism,
                   order=words.variables(p))


def cmd_intersect_dfa(args):
    _need(args, "nfa")
    w = automata.shortest_common_word([read_dfa(f) for f in args.nfa])
    return _no() if w is None else _report(word=w)


def cmd_intersect_pda(args):
    _need(args, "pda")
    ms = [pda.parse_pda(_read(f)) for f in args.pda]
    w = pda.pda_intersection_nonempty(ms, _budget(args), args.max_len)
    return _no() if w is None else _report(word=w)


def cmd_reduce_sat_dfa(args):
    _need(args, "cnf", "out")
    phi = reductions.parse_dimacs(_read(args.cnf))
    dfas = reductions.sat_to_clause_dfas(phi)
    return _write(args.out, {f"clause{j}.dfa": automata.format_automaton(d)
                             for j, d in enumerate(dfas, 1)})


def cmd_reduce_sat_kpower(args):
    _need(args, "cnf", "out")
    phi = reductions.parse_dimacs(_read(args.cnf))
    dfas = reductions.sat_to_clause_dfas(phi)
    if len(dfas) == 1:
        dfas = dfas * 2  # L & L = L, and the reduction needs two machines
    m, p = reductions.dfas_to_kpower_instance(dfas)
    return _write(args.out, {"machine.dfa": automata.format_automaton(m),
                             "pattern.txt": words.format_pattern(p) + "\n"})


def cmd_reduce_sat_angluin(args):
    _need(args, "cnf", "out")
    phi = reductions.parse_dimacs(_read(args.cnf))
    p, w, m = reductions.sat_to_angluin_gadget(phi)
    status = _write(args.out, {"pattern.txt": words.format_pattern(p) + "\n",
                               "word.txt": words.format_word(w) + "\n",
                               "machine.dfa": automata.format_automaton(m)})
    print(f"length {len(w)}")
    return status


def cmd_reduce_pcp_square(args):
    _need(args, "pcp", "out")
    inst = reductions.parse_pcp(_read(args.pcp))
    g = reductions.pcp_to_square_cfg(inst, args.max_indices)
    return _write(args.out, {"grammar.cfg": grammars.format_cfg(g)})


def cmd_reduce_dfa_kpower_factor(args):
    _need(args, "nfa", "out")
    g, p = reductions.dfas_to_kpower_factor_cfg([read_dfa(f) for f in args.nfa])
    return _write(args.out, {"grammar.cfg": grammars.format_cfg(g),
                             "pattern.txt": words.format_pattern(p) + "\n"})


def cmd_gen_squarefree(args):
    _need(args, "min_len")
    w = reductions.squarefree_word(args.min_len)
    if args.out:
        _write(args.out, {"word.txt": words.format_word(w) + "\n",
                          "slp.cfg": grammars.format_cfg(reductions.squarefree_slp_grammar(args.min_len))})
    return _report(word=w, length=len(w))


VERBS = {
    "match": cmd_match,
    "match-factor": cmd_match_factor,
    "nfa-pattern": cmd_nfa_pattern,
    "nfa-pattern-factor": cmd_nfa_pattern_factor,
    "cfg-square": cmd_cfg_square,
    "cfg-pattern-factor": cmd_cfg_pattern_factor,
    "intersect-dfa": cmd_intersect_dfa,
    "intersect-pda": cmd_intersect_pda,
    "reduce-sat-dfa": cmd_reduce_sat_dfa,
    "reduce-sat-kpower": cmd_reduce_sat_kpower,
    "reduce-sat-angluin": cmd_reduce_sat_angluin,
    "reduce-pcp-square": cmd_reduce_pcp_square,
    "reduce-dfa-kpower-factor": cmd_reduce_dfa_kpower_factor,
    "gen-squarefree": cmd_gen_squarefree,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="finpat", description=__doc__.splitlines()[0])
    parser.add_argument("verb", choices=sorted(VERBS))
    parser.add_argument("--pattern", metavar="FILE")
    parser.add_argument("--word", metavar="FILE")
    parser.add_argument("--nfa", metavar="FILE", action="append",
                        help="automaton file; repeat for verbs taking several machines")
    parser.add_argument("--cfg", metavar="FILE")
    parser.add_argument("--pda", metavar="FILE", action="append")
    parser.add_argument("--cnf", metavar="FILE", help="DIMACS 3-CNF input")
    parser.add_argument("--pcp", metavar="FILE", help="PCP pairs, one 'x y' per line")
    parser.add_argument("--out", metavar="DIR")
    parser.add_argument("--k", type=int, help="expected number of machines, checked if given")
    parser.add_argument("--min-len", type=int)
    parser.add_argument("--max-indices", type=int,
                        help="unroll the PCP grammar to this many indices per block")
    parser.add_argument("--max-configs", type=int, default=pda.DEFAULT_MAX_CONFIGS)
    parser.add_argument("--max-len", type=int,
                        help="longest witness (or factor) the PDA searches consider")
    parser.add_argument("--timeout", type=float, default=30.0, help="soft time budget in seconds")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        machines = args.nfa or args.pda or []
        if args.k is not None and machines and len(machines) != args.k:
            raise ParseError(f"--k {args.k} given but {len(machines)} machines supplied")
        return VERBS[args.verb](args)
    except ResourceError as e:
        print(f"resource limit: {e}", file=sys.stderr)
        return RESOURCE
    except (ParseError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
