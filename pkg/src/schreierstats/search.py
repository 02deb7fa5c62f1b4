"""Coloring search machinery shared by the partition metric and the rules.

Everything here works on colorings stored as int arrays with values 1..k.
Objectives are minimized and support O(ball size) incremental updates for
single-vertex recolorings.  Randomness flows from ``numpy`` generators
spawned off one ``SeedSequence`` per task, and parallel results are merged
in task order, so outputs never depend on the thread count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .balls import BallCode, BallTable, ball_table
from .schreier import SchreierGraph

CHUNK = 1 << 15


def default_threads() -> int:
    return os.cpu_count() or 1


def parallel_map(fn: Callable, items: Sequence, threads: int | None = None) -> list:
    threads = threads or default_threads()
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def child_seeds(seed, count: int) -> list[np.random.SeedSequence]:
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return ss.spawn(count)


def derive_seed(seed: int, *path: int) -> np.random.SeedSequence:
    """A seed that depends only on ``seed`` and the integer ``path``."""
    return np.random.SeedSequence([int(seed), *map(int, path)])


def all_colorings(n: int, k: int) -> Iterator[np.ndarray]:
    """Every coloring of n vertices with colors 1..k, lexicographic, in chunks."""
    total = k**n
    powers = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
        yield ((idx[:, None] // powers[None, :]) % k + 1).astype(np.int64)


def random_coloring(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    return rng.integers(1, k + 1, size=n, dtype=np.int64)


# --- colored ball index -------------------------------------------------------

class ColoredIndex:
    """Ball tables for radii 1..r_max plus the reverse map vertex -> balls containing it."""

    def __init__(self, g: SchreierGraph, r_max: int, radii: Sequence[int] | None = None):
        self.g = g
        self.n = g.n
        self.r_max = r_max
        self.radii = list(radii) if radii is not None else list(range(1, r_max + 1))
        self.tables: dict[int, BallTable] = {r: ball_table(g, r) for r in self.radii}
        top = self.tables[max(self.radii)]
        members: list[list[int]] = [[] for _ in range(g.n)]
        for x in range(g.n):
            for v in top.reps[x, : top.nblocks[x]]:
                members[int(v)].append(x)
        self.affected = [np.asarray(a, dtype=np.int64) for a in members]
        self._codes: dict = {}

    def key(self, r: int, x: int, colors: np.ndarray) -> tuple:
        t = self.tables[r]
        return (r, int(t.code_id[x]), colors[t.reps[x, : t.nblocks[x]]].tobytes())

    def code_of(self, key: tuple) -> BallCode:
        code = self._codes.get(key)
        if code is None:
            r, cid, raw = key
            t = self.tables[r]
            code = BallCode(r, t.m, t.codes[cid].labels,
                            tuple(int(v) for v in np.frombuffer(raw, dtype=np.int64)))
            self._codes[key] = code
        return code

    def colored_code(self, r: int, x: int, colors: np.ndarray) -> BallCode:
        return self.code_of(self.key(r, x, colors))


# --- objectives -----------------------------------------------------------------

class Objective:
    """Minimized objective over colorings with single-vertex moves."""

    value: float

    def reset(self, colors: np.ndarray) -> float:
        raise NotImplementedError

    def delta(self, v: int, color: int) -> float:
        raise NotImplementedError

    def commit(self, v: int, color: int) -> None:
        raise NotImplementedError


class BallObjective(Objective):
    """Sum over vertices of a per-vertex score that depends on the colored balls."""

    def __init__(self, index: ColoredIndex):
        self.index = index
        self.colors = np.ones(index.n, dtype=np.int64)
        self.scores = np.zeros(index.n)
        self.value = 0.0

    def vertex_score(self, x: int) -> float:
        raise NotImplementedError

    def reset(self, colors):
        self.colors = np.array(colors, dtype=np.int64)
        self.scores = np.array([self.vertex_score(x) for x in range(self.index.n)], dtype=float)
        self.value = self.scores.sum()
        return self.value

    def _rescore(self, v, color):
        old = self.colors[v]
        self.colors[v] = color
        xs = self.index.affected[v]
        new = [self.vertex_score(int(x)) for x in xs]
        self.colors[v] = old
        return xs, new

    def delta(self, v, color):
        xs, new = self._rescore(v, color)
        return sum(new) - self.scores[xs].sum()

    def commit(self, v, color):
        xs, new = self._rescore(v, color)
        self.value += sum(new) - self.scores[xs].sum()
        self.scores[xs] = new
        self.colors[v] = color


class LinearFunctionalObjective(BallObjective):
    """Minus a random linear functional of the colored-code weights.

    Coefficients are drawn lazily (standard normal) the first time a code is
    seen; the draw order is deterministic because the search is.
    """

    def __init__(self, index: ColoredIndex, rng: np.random.Generator):
        super().__init__(index)
        self.rng = rng
        self.coef: dict = {}
        self.radius_weight = {r: 2.0**-r for r in index.radii}

    def vertex_score(self, x):
        total = 0.0
        for r in self.index.radii:
            key = self.index.key(r, x, self.colors)
            c = self.coef.get(key)
            if c is None:
                c = self.coef[key] = float(self.rng.standard_normal())
            total -= self.radius_weight[r] * c
        return total


class StatTargetObjective(Objective):
    """Scaled distance sum_r 2^-r TV_r to a target stack, kept in integers.

    ``value`` equals ``2 * 2^R * n * target_n`` times the weak-metric
    distance, where R is the deepest radius.
    """

    def __init__(self, index: ColoredIndex, target: Sequence):
        self.index = index
        self.n = index.n
        self.tn = target[0].denominator
        top = max(index.radii)
        self.w = {r: 2 ** (top - r) for r in index.radii}
        self.target = {r: {c: v * self.n for c, v in t.counts.items()}
                       for r, t in zip(index.radii, target)}
        self.scale = 2 * 2**top * self.n * self.tn

    def _keys(self, x):
        return [(r, self.index.key(r, x, self.colors)) for r in self.index.radii]

    def reset(self, colors):
        self.colors = np.array(colors, dtype=np.int64)
        self.cnt = {r: {} for r in self.index.radii}
        self.vkeys = [self._keys(x) for x in range(self.n)]
        for keys in self.vkeys:
            for r, key in keys:
                code = self.index.code_of(key)
                self.cnt[r][code] = self.cnt[r].get(code, 0) + self.tn
        total = 0
        for r in self.index.radii:
            t, c = self.target[r], self.cnt[r]
            total += self.w[r] * sum(abs(c.get(code, 0) - t.get(code, 0))
                                     for code in set(t) | set(c))
        self.value = total
        return total

    def _changes(self, v, color):
        old = self.colors[v]
        self.colors[v] = color
        xs = self.index.affected[v]
        newkeys = [self._keys(int(x)) for x in xs]
        self.colors[v] = old
        change: dict = {}
        for x, keys in zip(xs, newkeys):
            for (r, ok), (_, nk) in zip(self.vkeys[x], keys):
                if ok != nk:
                    a, b = (r, self.index.code_of(ok)), (r, self.index.code_of(nk))
                    change[a] = change.get(a, 0) - self.tn
                    change[b] = change.get(b, 0) + self.tn
        return xs, newkeys, change

    def _delta_of(self, change):
        d = 0
        for (r, code), dc in change.items():
            if dc:
                c, t = self.cnt[r].get(code, 0), self.target[r].get(code, 0)
                d += self.w[r] * (abs(c + dc - t) - abs(c - t))
        return d

    def delta(self, v, color):
        return self._delta_of(self._changes(v, color)[2])

    def commit(self, v, color):
        xs, newkeys, change = self._changes(v, color)
        self.value += self._delta_of(change)
        for (r, code), dc in change.items():
            self.cnt[r][code] = self.cnt[r].get(code, 0) + dc
        for x, keys in zip(xs, newkeys):
            self.vkeys[x] = keys
        self.colors[v] = color


class ProfileObjective(Objective):
    """Summed (L1) entry deviation from a target correlation profile, in integers.

    ``value`` is ``n * target_n`` times the sum of absolute entry
    deviations.  It is zero exactly when the max deviation is, and unlike
    the max it has no wide plateaus, so it is the quantity local search
    minimizes; callers report the max deviation of the result.
    """

    def __init__(self, g: SchreierGraph, words, k: int, target_counts: np.ndarray, target_n: int):
        self.g, self.k, self.n = g, k, g.n
        xs = np.arange(g.n)
        self.fwd = [g.act(w, xs) for w in words]
        self.back = [g.act(w.inverse(), xs) for w in words]
        self.tn = target_n
        self.target = np.asarray(target_counts, dtype=np.int64) * g.n
        self.scale = g.n * target_n

    def _score(self, cnt) -> int:
        return int(np.abs(cnt - self.target).sum())

    def reset(self, colors):
        self.colors = np.array(colors, dtype=np.int64)
        col = self.colors - 1
        self.cnt = np.zeros_like(self.target)
        for a, f in enumerate(self.fwd):
            np.add.at(self.cnt[a], (col, col[f]), self.tn)
        self.value = self._score(self.cnt)
        return self.value

    def _new_counts(self, v, color):
        cnt = self.cnt.copy()
        for a in range(len(self.fwd)):
            # pairs (y, y^gamma) touching v
            for y in sorted({v, int(self.back[a][v])}):
                z = int(self.fwd[a][y])
                ci, cj = self.colors[y], self.colors[z]
                ni = color if y == v else ci
                nj = color if z == v else cj
                cnt[a, ci - 1, cj - 1] -= self.tn
                cnt[a, ni - 1, nj - 1] += self.tn
        return cnt

    def delta(self, v, color):
        return self._score(self._new_counts(v, color)) - self.value

    def commit(self, v, color):
        self.cnt = self._new_counts(v, color)
        self.colors[v] = color
        self.value = self._score(self.cnt)


# --- local search ---------------------------------------------------------------

@dataclass
class SearchResult:
    colors: np.ndarray
    value: float
    moves: int
    visited: list  # snapshots taken once per sweep, for callers that keep them


def greedy(obj: Objective, n: int, k: int, init: np.ndarray | None = None) -> np.ndarray:
    """One best-response sweep in vertex order (ties go to the smallest color)."""
    colors = np.ones(n, dtype=np.int64) if init is None else np.array(init, dtype=np.int64)
    obj.reset(colors)
    for v in range(n):
        best_c, best_d = colors[v], 0
        for c in range(1, k + 1):
            if c == colors[v]:
                continue
            d = obj.delta(v, c)
            if d < best_d or (d == best_d and c < best_c):
                best_c, best_d = c, d
        if best_c != colors[v]:
            obj.commit(v, best_c)
            colors[v] = best_c
    return colors


def anneal(obj: Objective, n: int, k: int, budget: int, rng: np.random.Generator,
           init: np.ndarray, lower_bound: float | None = None,
           snapshots: bool = False) -> SearchResult:
    """Simulated annealing with single-vertex recolor moves and restarts.

    The initial temperature is the standard deviation of the objective over
    random colorings; it decays geometrically by 0.97 per sweep of n moves.
    Once frozen, a steepest-descent pass either finds an improving (or
    sideways) move or triggers a restart from a random coloring.
    """
    colors = np.array(init, dtype=np.int64)
    best_val = obj.reset(colors)
    best = colors.copy()
    visited = []
    if budget <= 0 or k < 2 or (lower_bound is not None and best_val <= lower_bound):
        return SearchResult(best, best_val, 0, visited)

    calib = min(100, max(2, budget // 10))
    samples = [obj.reset(random_coloring(rng, n, k)) for _ in range(calib)]
    moves = calib
    t0 = float(np.std(samples)) or 1e-9
    value = obj.reset(colors)
    temp = t0
    sideways = 0
    while moves < budget:
        v = int(rng.integers(n))
        c = int(rng.integers(1, k))
        c = c if c < colors[v] else c + 1
        d = obj.delta(v, c)
        moves += 1
        if d <= 0 or rng.random() < math.exp(-d / temp):
            obj.commit(v, c)
            colors[v] = c
            value = obj.value
            if value < best_val:
                best_val, best = value, colors.copy()
                if lower_bound is not None and best_val <= lower_bound:
                    break
        if moves % n == 0:
            temp *= 0.97
            if snapshots:
                visited.append(colors.copy())
        if temp < t0 * 1e-3:
            # frozen: steepest descent with a bounded number of sideways moves
            # ties are broken uniformly at random so sideways moves random-walk
            best_move, best_d, ties = None, None, 0
            for u in range(n):
                for cc in range(1, k + 1):
                    if cc == colors[u] or moves >= budget:
                        continue
                    dd = obj.delta(u, cc)
                    moves += 1
                    if best_d is None or dd < best_d:
                        best_move, best_d, ties = (u, cc), dd, 1
                    elif dd == best_d:
                        ties += 1
                        if rng.random() * ties < 1:
                            best_move = (u, cc)
            if best_move is not None and (best_d < 0 or (best_d == 0 and sideways < n)):
                sideways = sideways + 1 if best_d == 0 else 0
                obj.commit(*best_move)
                colors[best_move[0]] = best_move[1]
                value = obj.value
                if value < best_val:
                    best_val, best = value, colors.copy()
                    if lower_bound is not None and best_val <= lower_bound:
                        break
            else:
                if snapshots:
                    visited.append(colors.copy())
                colors = random_coloring(rng, n, k)
                value = obj.reset(colors)
                temp, sideways = t0, 0
    if snapshots:
        visited.append(colors.copy())
    return SearchResult(best, best_val, moves, visited)


def multi_start(make_objective: Callable[[], Objective], n: int, k: int, budget: int,
                seed, restarts: int, init: np.ndarray | None = None,
                lower_bound: float | None = None, threads: int | None = None) -> SearchResult:
    """Independent annealing runs; the first starts at ``init`` (if given).

    Runs are merged by (objective value, run index).
    """
    restarts = max(1, restarts)
    if init is not None and lower_bound is not None:
        value = make_objective().reset(init)
        if value <= lower_bound:
            return SearchResult(np.array(init, dtype=np.int64), value, 0, [])
    seeds = child_seeds(seed, restarts)
    share = budget // restarts

    def run(i):
        rng = np.random.default_rng(seeds[i])
        start = init if (i == 0 and init is not None) else random_coloring(rng, n, k)
        return anneal(make_objective(), n, k, share, rng, start, lower_bound)

    if (threads or default_threads()) <= 1:
        # later runs cannot win the (value, index) merge once one hits the bound
        results = []
        for i in range(restarts):
            results.append(run(i))
            if lower_bound is not None and results[-1].value <= lower_bound:
                break
    else:
        results = parallel_map(run, list(range(restarts)), threads)
        if lower_bound is not None:
            hit = [i for i, r in enumerate(results) if r.value <= lower_bound]
            if hit:
                results = results[: hit[0] + 1]
    best_i = min(range(len(results)), key=lambda i: (results[i].value, i))
    res = results[best_i]
    return SearchResult(res.colors, res.value, sum(r.moves for r in results), [])
