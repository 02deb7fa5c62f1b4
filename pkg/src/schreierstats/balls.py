"""Rooted r-balls and their canonical codes.

The code of the r-ball around ``x`` is the partition of the reduced words of
length <= r by their endpoint ``x^w``.  Two rooted labeled balls are
isomorphic exactly when these partitions agree, so the partition is used
directly as the canonical form; no isomorphism search is needed.

A partition is stored as ``labels``: for each word (in global word order)
the index of its block, blocks numbered by first occurrence.  Blocks are
therefore sorted by their minimal word, which fixes the serialization
``"e|a,A"`` (blocks joined by ``|``, words by ``,``, colors as ``:c``).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import BadCode, ShapeMismatch
from .schreier import Coloring, SchreierGraph
from .words import multiply_reduce, parse_word, word_count, word_table


def _first_occurrence(seq: Sequence[int]) -> tuple[int, ...]:
    seen: dict = {}
    return tuple(seen.setdefault(v, len(seen)) for v in seq)


@dataclass(frozen=True)
class BallCode:
    r: int
    m: int
    labels: tuple[int, ...]
    colors: tuple[int, ...] | None = None

    @property
    def num_blocks(self) -> int:
        return max(self.labels) + 1

    @property
    def colored(self) -> bool:
        return self.colors is not None

    @cached_property
    def classes(self) -> tuple[tuple[int, ...], ...]:
        blocks: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for i, lab in enumerate(self.labels):
            blocks[lab].append(i)
        return tuple(tuple(b) for b in blocks)

    @property
    def root_color(self) -> int | None:
        return None if self.colors is None else self.colors[0]

    def uncolored(self) -> "BallCode":
        return BallCode(self.r, self.m, self.labels) if self.colored else self

    def truncate(self, r: int) -> "BallCode":
        """The code of the concentric ball of radius ``r`` <= self.r."""
        if not 0 <= r <= self.r:
            raise ShapeMismatch(f"cannot truncate radius {self.r} code to {r}")
        head = self.labels[: word_count(self.m, r)]
        labels = _first_occurrence(head)
        colors = None
        if self.colors is not None:
            # block numbering of the prefix keeps first-occurrence order
            kept = list(dict.fromkeys(head))
            colors = tuple(self.colors[b] for b in kept)
        return BallCode(r, self.m, labels, colors)

    def sort_key(self):
        return (self.r, self.m, self.labels, self.colors or ())

    def serialize(self) -> str:
        words = word_table(self.m, self.r).words
        parts = []
        for b, block in enumerate(self.classes):
            s = ",".join(str(words[i]) for i in block)
            if self.colors is not None:
                s += f":{self.colors[b]}"
            parts.append(s)
        return "|".join(parts)

    __str__ = serialize

    @classmethod
    def parse(cls, text: str, m: int | None = None, r: int | None = None) -> "BallCode":
        blocks = []
        colors: list[int] = []
        for part in text.strip().split("|"):
            words_part, sep, color = part.partition(":")
            try:
                blocks.append([parse_word(w) for w in words_part.split(",")])
                if sep:
                    colors.append(int(color))
            except ValueError as exc:
                raise BadCode(str(exc)) from None
        if colors and len(colors) != len(blocks):
            raise BadCode(f"either every block or no block carries a color: {text!r}")
        all_words = [w for b in blocks for w in b]
        if r is None:
            r = max(len(w) for w in all_words)
        if m is None:
            m = max((c >> 1 for w in all_words for c in w), default=0) + 1
        table = word_table(m, r)
        labels = [-1] * len(table.words)
        for b, block in enumerate(blocks):
            for w in block:
                i = table.index.get(w)
                if i is None or labels[i] != -1:
                    raise BadCode(f"word {w} is out of range or repeated in {text!r}")
                labels[i] = b
        if -1 in labels:
            raise BadCode(f"code {text!r} does not cover all words of length <= {r}")
        canon = _first_occurrence(labels)
        ccolors = None
        if colors:
            order = list(dict.fromkeys(labels))
            ccolors = tuple(colors[b] for b in order)
        code = cls(r, m, canon, ccolors)
        if not code.is_consistent():
            raise BadCode(f"code {text!r} is not the ball of any Schreier graph")
        return code

    def is_consistent(self) -> bool:
        """Blocks are orbits of a partial action: u ~ v implies us ~ vs when defined."""
        table = word_table(self.m, self.r)
        for c in range(2 * self.m):
            image: dict[int, int] = {}
            for i, w in enumerate(table.words):
                j = table.index.get(multiply_reduce(w, (c,)))
                if j is None:
                    continue
                b, t = self.labels[i], self.labels[j]
                if image.setdefault(b, t) != t:
                    return False
        return True


def _code_from_images(r: int, m: int, images: Sequence[int], colors=None) -> BallCode:
    labels = _first_occurrence(images)
    ccolors = None
    if colors is not None:
        reps = list(dict.fromkeys(images))
        ccolors = tuple(int(colors[v]) for v in reps)
    return BallCode(r, m, labels, ccolors)


def word_images(g: SchreierGraph, x: int, r: int) -> np.ndarray:
    """Endpoints ``x^w`` for every word of W^{r,S}, in word order."""
    g.check_vertex(x)
    table = word_table(g.m, r)
    img = np.empty(len(table.words), dtype=np.int64)
    img[0] = x
    lp = g.letter_perms
    for i in range(1, len(table.words)):
        img[i] = lp[table.last[i], img[table.parent[i]]]
    return img


def ball_code(g: SchreierGraph, x: int, r: int) -> BallCode:
    return _code_from_images(r, g.m, word_images(g, x, r).tolist())


def colored_ball_code(g: SchreierGraph, x: int, r: int, c: Coloring) -> BallCode:
    c.check_graph(g)
    return _code_from_images(r, g.m, word_images(g, x, r).tolist(), c.colors)


@dataclass(frozen=True, eq=False)
class BallTable:
    """Ball codes of every vertex of a graph at one radius.

    ``labels[x]`` is the block label vector of vertex ``x``; ``reps[x, b]`` is
    the vertex that block ``b`` lands on (padded with -1 past
    ``nblocks[x]``); ``code_id[x]`` indexes the distinct codes in ``codes``.
    """

    r: int
    m: int
    labels: np.ndarray
    nblocks: np.ndarray
    reps: np.ndarray
    code_id: np.ndarray
    codes: tuple[BallCode, ...]

    def code(self, x: int) -> BallCode:
        return self.codes[self.code_id[x]]

    def colored_code(self, x: int, colors: np.ndarray) -> BallCode:
        b = self.nblocks[x]
        return BallCode(self.r, self.m, self.codes[self.code_id[x]].labels,
                        tuple(int(v) for v in colors[self.reps[x, :b]]))


def all_images(g: SchreierGraph, r: int) -> np.ndarray:
    """(|W|, n) array of ``x^w`` for all words and vertices."""
    table = word_table(g.m, r)
    img = np.empty((len(table.words), g.n), dtype=np.int64)
    img[0] = np.arange(g.n)
    lp = g.letter_perms
    for i in range(1, len(table.words)):
        img[i] = lp[table.last[i]][img[table.parent[i]]]
    return img


def ball_table(g: SchreierGraph, r: int) -> BallTable:
    n = g.n
    img = all_images(g, r).T  # (n, W)
    nw = img.shape[1]
    keys = (np.arange(n)[:, None] * n + img).ravel()
    uniq, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    owner = uniq // n
    # order distinct (vertex, endpoint) pairs by vertex, then first occurrence
    order = np.lexsort((first, owner))
    starts = np.searchsorted(owner[order], np.arange(n))
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size) - starts[owner[order]]
    labels = rank[inverse].reshape(n, nw)
    nblocks = np.bincount(owner, minlength=n)
    reps = np.full((n, int(nblocks.max())), -1, dtype=np.int64)
    reps[owner, rank] = uniq % n
    _, first_v, code_id = np.unique(labels, axis=0, return_index=True, return_inverse=True)
    code_id = code_id.ravel()
    codes = tuple(BallCode(r, g.m, tuple(labels[v].tolist())) for v in first_v)
    return BallTable(r, g.m, labels, nblocks, reps, code_id, codes)


def refines(p: BallCode, q: BallCode) -> bool:
    """True iff every block of ``p`` lies inside a block of ``q``."""
    if p.r != q.r or p.m != q.m:
        raise ShapeMismatch(f"codes differ in shape: (r={p.r}, m={p.m}) vs (r={q.r}, m={q.m})")
    if p.colored or q.colored:
        raise ShapeMismatch("refinement is defined for uncolored codes only")
    image: dict[int, int] = {}
    return all(image.setdefault(a, b) == b for a, b in zip(p.labels, q.labels))


@dataclass(frozen=True)
class TypePoset:
    codes: tuple[BallCode, ...]
    le: np.ndarray  # le[i, j] iff codes[i] refines codes[j]
    heights: tuple[int, ...]

    @property
    def order(self) -> list[tuple[int, int]]:
        return [tuple(ij) for ij in np.argwhere(self.le).tolist()]

    def height_of(self, code: BallCode) -> int:
        return self.heights[self.codes.index(code)]

    def levels(self) -> dict[int, list[BallCode]]:
        out: dict[int, list[BallCode]] = {}
        for c, h in zip(self.codes, self.heights):
            out.setdefault(h, []).append(c)
        return out


def height_poset(m: int, r: int, observed: Sequence[BallCode]) -> TypePoset:
    """Heights by repeatedly stripping the finest (minimal) remaining codes."""
    codes = tuple(observed)
    if len(set(codes)) != len(codes):
        raise ShapeMismatch("observed codes must be distinct")
    for c in codes:
        if c.m != m or c.r != r:
            raise ShapeMismatch(f"code {c} is not an (m={m}, r={r}) code")
        if c.colored:
            raise ShapeMismatch("heights are defined for uncolored codes only")
    k = len(codes)
    le = np.array([[refines(a, b) for b in codes] for a in codes], dtype=bool).reshape(k, k)
    heights = [0] * k
    remaining = set(range(k))
    level = 0
    while remaining:
        level += 1
        minimal = [i for i in remaining
                   if not any(le[j, i] for j in remaining if j != i)]
        for i in minimal:
            heights[i] = level
        remaining.difference_update(minimal)
    return TypePoset(codes, le, tuple(heights))
