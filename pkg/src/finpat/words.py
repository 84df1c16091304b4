"""Alphabets, words, patterns and non-erasing morphisms.

A word is a plain tuple of symbol tokens.  Tokens are atomic strings such as
``"0"``, ``"#"`` or ``"c12"``, so multi-character symbols need no escaping.
The text form of a word is its tokens separated by single spaces; an empty
line is the empty word.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError, ParseError

Word = tuple[str, ...]
Pattern = tuple[str, ...]
Morphism = Mapping[str, Word]

EMPTY: Word = ()


def _check_token(tok: str) -> None:
    if not isinstance(tok, str) or not tok or any(c.isspace() for c in tok):
        raise DomainError(f"bad symbol token {tok!r}")


@dataclass(frozen=True)
class Alphabet:
    """An ordered, duplicate-free, non-empty set of symbol tokens."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        syms = tuple(self.symbols)
        object.__setattr__(self, "symbols", syms)
        if not syms:
            raise DomainError("alphabet must be non-empty")
        for s in syms:
            _check_token(s)
        if len(set(syms)) != len(syms):
            raise DomainError(f"duplicate symbols in alphabet {syms}")

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, sym):
        return sym in self.symbols

    def index(self, sym: str) -> int:
        return self.symbols.index(sym)

    def sort_key(self):
        """Key ordering words by length, then lexicographically by symbol rank."""
        rank = {s: i for i, s in enumerate(self.symbols)}
        return lambda w: (len(w), tuple(rank[s] for s in w))

    def check_word(self, w: Iterable[str]) -> Word:
        w = tuple(w)
        for s in w:
            if s not in self.symbols:
                raise DomainError(f"symbol {s!r} not in alphabet {self.symbols}")
        return w


def word(text: str) -> Word:
    """Shorthand constructor.

    ``word("0101")`` splits into characters; anything containing whitespace is
    split on whitespace instead, so ``word("c1 # a")`` gives three tokens.
    """
    if any(c.isspace() for c in text):
        return tuple(text.split())
    return tuple(text)


def pattern(text: str) -> Pattern:
    p = word(text)
    if not p:
        raise DomainError("a pattern must be non-empty")
    return p


def parse_word(line: str) -> Word:
    return tuple(line.split())


def format_word(w: Iterable[str]) -> str:
    return " ".join(w)


def parse_pattern(line: str) -> Pattern:
    p = tuple(line.split())
    if not p:
        raise ParseError("empty pattern")
    return p


def format_pattern(p: Pattern) -> str:
    return " ".join(p)


def format_morphism(h: Morphism, order: Optional[Iterable[str]] = None) -> str:
    """One ``var = image`` line per variable, in ``order`` if given."""
    keys = list(dict.fromkeys(order)) if order is not None else sorted(h)
    return "\n".join(f"{x} = {format_word(h[x])}" for x in keys)


def parse_morphism(text: str) -> dict[str, Word]:
    h = {}
    for no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if "=" not in line:
            raise ParseError(f"expected 'var = image', got {line!r}", no)
        var, _, image = line.partition("=")
        h[var.strip()] = parse_word(image)
    return h


def variables(p: Pattern) -> tuple[str, ...]:
    """Distinct variables of ``p`` in first-occurrence order."""
    return tuple(dict.fromkeys(p))


def apply_morphism(h: Morphism, p: Pattern) -> Word:
    out: list[str] = []
    for x in p:
        try:
            image = h[x]
        except KeyError:
            raise DomainError(f"morphism has no image for variable {x!r}") from None
        if not image:
            raise DomainError(f"image of {x!r} is empty; morphisms must be non-erasing")
        out.extend(image)
    return tuple(out)


def is_k_power(w: Word, k: int) -> Optional[Word]:
    """Return the root ``x`` with ``w == x * k``, or None."""
    if k < 2:
        raise DomainError(f"k must be at least 2, got {k}")
    w = tuple(w)
    if not w or len(w) % k:
        return None
    root = w[: len(w) // k]
    return root if root * k == w else None


def shortest_square_factor(w: Word) -> Optional[tuple[int, int]]:
    """Leftmost, then shortest, non-empty square factor as ``(start, length)``."""
    w = tuple(w)
    n = len(w)
    for i in range(n):
        for half in range(1, (n - i) // 2 + 1):
            if w[i : i + half] == w[i + half : i + 2 * half]:
                return i, 2 * half
    return None


def is_squarefree(w: Word) -> bool:
    return shortest_square_factor(w) is None


def is_factor(u: Word, w: Word) -> Optional[int]:
    """Leftmost start of ``u`` inside ``w``, or None."""
    u, w = tuple(u), tuple(w)
    for i in range(len(w) - len(u) + 1):
        if w[i : i + len(u)] == u:
            return i
    return None
