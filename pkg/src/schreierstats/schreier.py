"""Finite edge-labeled Schreier graphs, i.e. finite actions of F_S.

Only the forward permutation of each generator is stored; the inverse
letter acts by the inverse permutation, so the two labeling conditions
(one s-edge in and out of every vertex, reversed edges carry inverse labels)
hold by construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import LengthMismatch, NotAPermutation, VertexOutOfRange, DataError
from .words import Word


@dataclass(frozen=True, eq=False)
class SchreierGraph:
    n: int
    perms: tuple[np.ndarray, ...]
    # letter_perms[c] is the action of letter code c (generator 2i, inverse 2i+1)
    letter_perms: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return len(self.perms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SchreierGraph)
            and self.n == other.n
            and self.m == other.m
            and all(np.array_equal(p, q) for p, q in zip(self.perms, other.perms))
        )

    def __hash__(self) -> int:
        return hash((self.n, tuple(p.tobytes() for p in self.perms)))

    def check_vertex(self, x: int) -> None:
        if not 0 <= x < self.n:
            raise VertexOutOfRange(f"vertex {x} not in 0..{self.n - 1}")

    def act(self, w: Sequence[int], xs):
        """Image of vertex (or vertex array) ``xs`` under ``w``, letters left to right."""
        out = xs
        for c in w:
            out = self.letter_perms[c][out]
        return out

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines += [" ".join(str(int(v)) for v in p) for p in self.perms]
        return "\n".join(lines) + "\n"


def from_permutations(n: int, perms: Sequence[Sequence[int]]) -> SchreierGraph:
    if n < 1:
        raise LengthMismatch(f"need at least one vertex, got n={n}")
    if len(perms) < 1:
        raise LengthMismatch("need at least one generator")
    arrs = []
    for i, p in enumerate(perms):
        a = np.asarray(p, dtype=np.int64)
        if a.ndim != 1 or a.shape[0] != n:
            raise LengthMismatch(f"generator {i}: expected {n} entries, got {a.size}")
        if a.min() < 0 or a.max() >= n or np.unique(a).size != n:
            raise NotAPermutation(f"generator {i} is not a bijection of 0..{n - 1}")
        a.setflags(write=False)
        arrs.append(a)
    letters = np.empty((2 * len(arrs), n), dtype=np.int64)
    for i, a in enumerate(arrs):
        letters[2 * i] = a
        letters[2 * i + 1][a] = np.arange(n)
    letters.setflags(write=False)
    return SchreierGraph(n, tuple(arrs), letters)


def evaluate(g: SchreierGraph, w: Word, x: int) -> int:
    g.check_vertex(x)
    return int(g.act(w, x))


def gen_cycle(n: int) -> SchreierGraph:
    return from_permutations(n, [np.roll(np.arange(n), -1)])


def gen_torus(p: int, q: int) -> SchreierGraph:
    """Z_p x Z_q with vertex (i, j) stored as i*q + j; a shifts i, b shifts j."""
    i, j = np.divmod(np.arange(p * q), q)
    return from_permutations(p * q, [((i + 1) % p) * q + j, i * q + (j + 1) % q])


def gen_random_action(n: int, m: int, seed: int) -> SchreierGraph:
    rng = np.random.default_rng(seed)
    return from_permutations(n, [rng.permutation(n) for _ in range(m)])


def disjoint_union(*graphs: SchreierGraph) -> SchreierGraph:
    m = graphs[0].m
    if any(g.m != m for g in graphs):
        raise LengthMismatch("all graphs need the same number of generators")
    perms = []
    for i in range(m):
        parts, off = [], 0
        for g in graphs:
            parts.append(g.perms[i] + off)
            off += g.n
        perms.append(np.concatenate(parts))
    return from_permutations(sum(g.n for g in graphs), perms)


@dataclass(frozen=True, eq=False)
class Coloring:
    colors: np.ndarray  # values in 1..k
    k: int

    def __post_init__(self):
        c = np.asarray(self.colors, dtype=np.int64)
        if c.ndim != 1:
            raise DataError("coloring must be one-dimensional")
        if self.k < 1:
            raise DataError(f"need k >= 1, got {self.k}")
        if c.size and (c.min() < 1 or c.max() > self.k):
            raise DataError(f"colors must lie in 1..{self.k}")
        c.setflags(write=False)
        object.__setattr__(self, "colors", c)

    @property
    def n(self) -> int:
        return int(self.colors.size)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Coloring)
            and self.k == other.k
            and np.array_equal(self.colors, other.colors)
        )

    def __hash__(self) -> int:
        return hash((self.k, self.colors.tobytes()))

    def check_graph(self, g: SchreierGraph) -> None:
        if self.n != g.n:
            raise LengthMismatch(f"coloring has {self.n} entries, graph has {g.n} vertices")

    def to_text(self) -> str:
        return " ".join(str(int(v)) for v in self.colors) + "\n"


def make_coloring(colors, k: int | None = None) -> Coloring:
    c = np.asarray(colors, dtype=np.int64)
    return Coloring(c, int(c.max()) if k is None else k)


# --- text files -------------------------------------------------------------

def _content_lines(text: str) -> list[str]:
    # blank lines and '#' comments are ignored
    return [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]


def parse_graph(text: str) -> SchreierGraph:
    rows = [line.split() for line in _content_lines(text)]
    if not rows or len(rows[0]) != 2:
        raise DataError("graph file must start with a line 'n m'")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
        perms = [[int(v) for v in row] for row in rows[1:]]
    except ValueError as exc:
        raise DataError(f"graph file: {exc}") from None
    if len(perms) != m:
        raise LengthMismatch(f"header promises {m} generators, found {len(perms)} lines")
    return from_permutations(n, perms)


def read_graph(path) -> SchreierGraph:
    return parse_graph(Path(path).read_text())


def write_graph(g: SchreierGraph, path) -> None:
    Path(path).write_text(g.to_text())


def parse_coloring(text: str, k: int | None = None) -> Coloring:
    try:
        vals = [int(v) for line in _content_lines(text) for v in line.split()]
    except ValueError as exc:
        raise DataError(f"coloring file: {exc}") from None
    if not vals:
        raise DataError("empty coloring")
    return make_coloring(vals, k)


def read_coloring(path, k: int | None = None) -> Coloring:
    return parse_coloring(Path(path).read_text(), k)


def write_coloring(c: Coloring, path) -> None:
    Path(path).write_text(c.to_text())
