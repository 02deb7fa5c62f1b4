"""Reduced words in the free group F_S.

A letter is stored as the integer ``2 * index + inverted``, so generator
``i`` is ``2i`` and its inverse ``2i + 1``.  Integer order on letters is then
exactly the order a < A < b < B < ..., and the formal inverse of a letter is
``letter ^ 1``.

Words print as ASCII: generator ``i`` is a lowercase letter, its inverse the
uppercase one, and the identity is ``"e"``.  Letters run a, b, c, d, f, g, ...
(``e`` is skipped so that it never collides with the identity), which makes
the rendering identical to plain alphabetical order for up to four generators.
"""
from __future__ import annotations

import string
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import BadParameter

# 'e' denotes the identity, so generator letters skip it.
_ALPHABET = [ch for ch in string.ascii_lowercase if ch != "e"]
_LETTER_OF = {ch: 2 * i for i, ch in enumerate(_ALPHABET)}
_LETTER_OF.update({ch.upper(): 2 * i + 1 for i, ch in enumerate(_ALPHABET)})
MAX_GENERATORS = len(_ALPHABET)


class Generator(NamedTuple):
    index: int
    inverted: bool = False

    @property
    def code(self) -> int:
        return 2 * self.index + int(self.inverted)

    @classmethod
    def from_code(cls, code: int) -> "Generator":
        return cls(code >> 1, bool(code & 1))

    def inverse(self) -> "Generator":
        return Generator(self.index, not self.inverted)

    def __str__(self) -> str:
        ch = _ALPHABET[self.index]
        return ch.upper() if self.inverted else ch


def letter_str(code: int) -> str:
    ch = _ALPHABET[code >> 1]
    return ch.upper() if code & 1 else ch


class Word(tuple):
    """A reduced word, stored as a tuple of letter codes.

    Construction does not reduce; use :func:`reduce_letters` or
    :func:`parse_word` for untrusted input.
    """

    __slots__ = ()

    def __new__(cls, letters: Iterable[int] = ()):
        return super().__new__(cls, letters)

    @property
    def letters(self) -> tuple[Generator, ...]:
        return tuple(Generator.from_code(c) for c in self)

    def is_reduced(self) -> bool:
        return all(self[i] != self[i + 1] ^ 1 for i in range(len(self) - 1))

    def inverse(self) -> "Word":
        return Word(c ^ 1 for c in reversed(self))

    def __mul__(self, other: "Word") -> "Word":  # type: ignore[override]
        return multiply_reduce(self, other)

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return (len(self), tuple(self))

    def __str__(self) -> str:
        if not self:
            return "e"
        return "".join(letter_str(c) for c in self)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


IDENTITY = Word()


def reduce_letters(letters: Iterable[int]) -> Word:
    stack: list[int] = []
    for c in letters:
        if stack and stack[-1] == c ^ 1:
            stack.pop()
        else:
            stack.append(c)
    return Word(stack)


def multiply_reduce(u: Sequence[int], v: Sequence[int]) -> Word:
    """Free reduction of the concatenation ``uv``."""
    i = 0
    nu, nv = len(u), len(v)
    while i < nu and i < nv and u[nu - 1 - i] == v[i] ^ 1:
        i += 1
    return Word(tuple(u[: nu - i]) + tuple(v[i:]))


def parse_word(s: str) -> Word:
    """Parse and freely reduce, so ``parse_word("aA")`` is the identity."""
    s = s.strip()
    if s in ("e", ""):
        return IDENTITY
    try:
        return reduce_letters(_LETTER_OF[ch] for ch in s)
    except KeyError as exc:
        raise BadParameter(f"bad word {s!r}: unknown letter {exc.args[0]!r}") from None


def parse_words(s: str) -> list[Word]:
    """Comma-separated word list, e.g. ``"e,a,aB"``."""
    return [parse_word(part) for part in s.split(",") if part.strip()]


def word_count(m: int, r: int) -> int:
    """|W^{r,S}| for an alphabet of ``m`` generators."""
    if m == 1:
        return 1 + 2 * r
    return 1 + 2 * m * ((2 * m - 1) ** r - 1) // (2 * m - 2)


class WordTable(NamedTuple):
    m: int
    r: int
    words: tuple[Word, ...]
    parent: np.ndarray  # index of the word with the last letter removed; -1 for e
    last: np.ndarray  # last letter code; -1 for e
    index: dict  # Word -> position

    def count(self, r: int) -> int:
        """Number of words of length <= r (they form a prefix of ``words``)."""
        return word_count(self.m, r)


@lru_cache(maxsize=64)
def word_table(m: int, r: int) -> WordTable:
    if m < 1 or r < 0:
        raise BadParameter(f"need m >= 1 and r >= 0, got m={m}, r={r}")
    words = [IDENTITY]
    parent = [-1]
    last = [-1]
    level = [0]
    for _ in range(r):
        nxt = []
        for p in level:
            w = words[p]
            for c in range(2 * m):
                if w and w[-1] == c ^ 1:
                    continue
                nxt.append(len(words))
                words.append(Word(w + (c,)))
                parent.append(p)
                last.append(c)
        level = nxt
    # BFS over lexicographically ordered parents yields (length, lex) order
    return WordTable(
        m,
        r,
        tuple(words),
        np.asarray(parent, dtype=np.int64),
        np.asarray(last, dtype=np.int64),
        {w: i for i, w in enumerate(words)},
    )


def enumerate_words(m: int, r: int) -> list[Word]:
    """All reduced words of length <= r, ordered by (length, lexicographic)."""
    return list(word_table(m, r).words)
