"""Type distributions of finite actions and the metrics between them.

Distributions are kept as integer counts over a common denominator, so
probabilities, truncations and total-variation distances are exact
``Fraction`` values.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .balls import BallCode, ball_table, word_images
from .errors import BadParameter, ShapeMismatch
from .schreier import Coloring, SchreierGraph
from .words import Word, word_table

EXACT_LIMIT = 10**6


@dataclass(frozen=True, eq=False)
class TypeDistribution:
    r: int
    k: int  # 0 = uncolored
    m: int
    counts: Mapping[BallCode, int]
    denominator: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.denominator:
            raise ShapeMismatch("counts must sum to the denominator")

    @classmethod
    def from_codes(cls, codes: Iterable[BallCode], k: int = 0) -> "TypeDistribution":
        cnt = Counter(codes)
        if not cnt:
            raise BadParameter("cannot build a distribution from no samples")
        first = next(iter(cnt))
        for c in cnt:
            if (c.r, c.m) != (first.r, first.m) or c.colored != (k > 0):
                raise ShapeMismatch("all codes must share radius, alphabet and coloring")
        return cls(first.r, k, first.m, dict(cnt), sum(cnt.values()))

    @property
    def support(self) -> list[BallCode]:
        return sorted(self.counts, key=BallCode.sort_key)

    def prob(self, code: BallCode) -> Fraction:
        return Fraction(self.counts.get(code, 0), self.denominator)

    @property
    def weights(self) -> dict[str, Fraction]:
        return {c.serialize(): self.prob(c) for c in self.support}

    def truncate(self, r: int) -> "TypeDistribution":
        cnt: Counter = Counter()
        for code, v in self.counts.items():
            cnt[code.truncate(r)] += v
        return TypeDistribution(r, self.k, self.m, dict(cnt), self.denominator)

    def forget_colors(self) -> "TypeDistribution":
        cnt: Counter = Counter()
        for code, v in self.counts.items():
            cnt[code.uncolored()] += v
        return TypeDistribution(self.r, 0, self.m, dict(cnt), self.denominator)

    def shape(self) -> tuple[int, int, int]:
        return (self.r, self.k, self.m)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TypeDistribution):
            return NotImplemented
        if self.shape() != other.shape():
            return False
        keys = set(self.counts) | set(other.counts)
        return all(self.prob(c) == other.prob(c) for c in keys)

    def __hash__(self):
        return hash((self.shape(), frozenset(self.weights.items())))

    def to_json(self) -> dict:
        exact = self.denominator <= EXACT_LIMIT
        weights = {}
        for c in self.support:
            v = self.counts[c]
            weights[c.serialize()] = v if exact else v / self.denominator
        return {"r": self.r, "k": self.k, "m": self.m, "weights": weights,
                "denominator": self.denominator}

    @classmethod
    def from_json(cls, data: dict) -> "TypeDistribution":
        den = int(data["denominator"])
        m, r = data.get("m"), data["r"]
        counts = {}
        for s, v in data["weights"].items():
            code = BallCode.parse(s, m=m, r=r)
            counts[code] = int(v) if isinstance(v, int) else round(v * den)
        m = m if m is not None else next(iter(counts)).m
        return cls(r, data["k"], m, counts, den)


def type_dist(g: SchreierGraph, r: int) -> TypeDistribution:
    """Uniform average of the uncolored r-ball codes over all vertices."""
    t = ball_table(g, r)
    cnt = np.bincount(t.code_id, minlength=len(t.codes))
    return TypeDistribution(r, 0, g.m, {c: int(v) for c, v in zip(t.codes, cnt) if v},
                            g.n)


def colored_type_dist(g: SchreierGraph, r: int, c: Coloring) -> TypeDistribution:
    c.check_graph(g)
    t = ball_table(g, r)
    cnt = Counter(t.colored_code(x, c.colors) for x in range(g.n))
    return TypeDistribution(r, c.k, g.m, dict(cnt), g.n)


def type_stack(g: SchreierGraph, r_max: int, c: Coloring | None = None) -> list[TypeDistribution]:
    """Distributions for radii 1..r_max."""
    if r_max < 1:
        raise BadParameter("r_max must be at least 1")
    top = type_dist(g, r_max) if c is None else colored_type_dist(g, r_max, c)
    return [top.truncate(r) for r in range(1, r_max)] + [top]


def tv_distance(p: TypeDistribution, q: TypeDistribution) -> Fraction:
    if p.shape() != q.shape():
        raise ShapeMismatch(f"distribution shapes differ: {p.shape()} vs {q.shape()}")
    keys = set(p.counts) | set(q.counts)
    return sum((abs(p.prob(c) - q.prob(c)) for c in keys), Fraction(0)) / 2


def stack_distance(s: Sequence[TypeDistribution], t: Sequence[TypeDistribution]) -> Fraction:
    """sum_r 2^-r TV_r over two stacks of radii 1..r_max."""
    if len(s) != len(t):
        raise ShapeMismatch("stacks have different depths")
    return sum((Fraction(1, 2**p.r) * tv_distance(p, q) for p, q in zip(s, t)), Fraction(0))


def weak_metric_tail(r_max: int) -> Fraction:
    return Fraction(1, 2**r_max)


def weak_metric(g1: SchreierGraph, g2: SchreierGraph, r_max: int,
                c1: Coloring | None = None, c2: Coloring | None = None) -> Fraction:
    """Truncated weak-topology distance between the (colored) types of two actions.

    The neglected tail is at most ``weak_metric_tail(r_max)``.
    """
    if g1.m != g2.m:
        raise ShapeMismatch(f"alphabets differ: {g1.m} vs {g2.m} generators")
    if (c1 is None) != (c2 is None) or (c1 is not None and c1.k != c2.k):
        raise ShapeMismatch("both sides need colorings with the same k, or neither")
    return stack_distance(type_stack(g1, r_max, c1), type_stack(g2, r_max, c2))


@dataclass(frozen=True, eq=False)
class ProfileMatrix:
    """Counts of x with (c[x gamma^-1], c[x]) = (i, j) for each gamma in ``words``."""

    words: tuple[Word, ...]
    k: int
    counts: np.ndarray  # (len(words), k, k), 0-based colors
    denominator: int

    @property
    def entries(self) -> np.ndarray:
        return self.counts / self.denominator

    def entry(self, gamma: int | Word, i: int, j: int) -> Fraction:
        gi = gamma if isinstance(gamma, int) else self.words.index(gamma)
        return Fraction(int(self.counts[gi, i - 1, j - 1]), self.denominator)

    def to_json(self) -> dict:
        return {"words": [str(w) for w in self.words], "k": self.k,
                "counts": self.counts.tolist(), "denominator": self.denominator}

    @classmethod
    def from_json(cls, data: dict) -> "ProfileMatrix":
        from .words import parse_word
        return cls(tuple(parse_word(w) for w in data["words"]), int(data["k"]),
                   np.asarray(data["counts"], dtype=np.int64), int(data["denominator"]))


def correlation_profile(g: SchreierGraph, c: Coloring, F: Sequence[Word]) -> ProfileMatrix:
    c.check_graph(g)
    k, col = c.k, c.colors - 1
    counts = np.zeros((len(F), k, k), dtype=np.int64)
    xs = np.arange(g.n)
    for a, w in enumerate(F):
        src = g.act(w.inverse(), xs)
        np.add.at(counts[a], (col[src], col), 1)
    return ProfileMatrix(tuple(F), k, counts, g.n)


def returning_words(g: SchreierGraph, x: int, r: int) -> list[Word]:
    """Words of length <= r fixing ``x``: the radius-r part of Stab(x)."""
    img = word_images(g, x, r)
    words = word_table(g.m, r).words
    return [words[i] for i in np.flatnonzero(img == x)]


def irs_sample(g: SchreierGraph, r: int, count: int, seed: int) -> list[BallCode]:
    """Ball codes at ``count`` uniformly random vertices."""
    if count < 1:
        raise BadParameter(f"count must be positive, got {count}")
    rng = np.random.default_rng(seed)
    xs = rng.integers(0, g.n, size=count)
    t = ball_table(g, r)
    return [t.code(int(x)) for x in xs]
