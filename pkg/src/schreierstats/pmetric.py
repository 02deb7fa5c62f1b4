"""Global k-types, their Hausdorff distances and the partition pseudometric.

A global k-type is approximated by a finite cloud of colored type stacks,
each produced by an actual coloring (kept as its witness).  Point distances
use the weak metric ``sum_r 2^-r TV_r``; since every point is a distribution
with denominator n, all distances are computed in integers and returned as
exact ``Fraction`` values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from numba import njit
from scipy import sparse

from .balls import BallCode
from .errors import BudgetExceeded, BadParameter, ShapeMismatch
from .schreier import Coloring, SchreierGraph
from .search import (
    ColoredIndex,
    LinearFunctionalObjective,
    ProfileObjective,
    StatTargetObjective,
    all_colorings,
    anneal,
    child_seeds,
    derive_seed,
    greedy,
    multi_start,
    parallel_map,
    random_coloring,
)
from .stats import ProfileMatrix, TypeDistribution, type_stack, weak_metric_tail

DISTINCT_LIMIT = 1 << 22

SAMPLED_BIAS = (
    "sampled clouds are subsets of the true global types: under-sampling A biases "
    "d(A->B) down, under-sampling B biases it up; values are estimates"
)


# --- cloud statistics -------------------------------------------------------------

def _colored_columns(index: ColoredIndex, r: int, colorings: np.ndarray, keys: dict):
    """Column id of every (coloring, vertex) colored r-ball code; extends ``keys``."""
    t = index.tables[r]
    P, n = colorings.shape
    cols = np.empty((P, n), dtype=np.int64)
    for cid, code in enumerate(t.codes):
        xs = np.flatnonzero(t.code_id == cid)
        b = int(t.nblocks[xs[0]])
        pats = colorings[:, t.reps[xs, :b]].reshape(-1, b)
        uniq, inv = np.unique(pats, axis=0, return_inverse=True)
        ids = np.empty(len(uniq), dtype=np.int64)
        for u, row in enumerate(uniq):
            c = BallCode(r, t.m, code.labels, tuple(int(v) for v in row))
            ids[u] = keys.setdefault(c, len(keys))
        cols[:, xs] = ids[inv.ravel()].reshape(P, len(xs))
    return cols


@dataclass(eq=False)
class GlobalKType:
    """Finite cloud approximating the set of colored types of one action."""

    n: int
    m: int
    k: int
    r_max: int
    colorings: np.ndarray  # (points, n) witness colorings
    keys: list  # per radius: tuple of colored BallCodes (column labels)
    cols: list  # per radius: (points, n) sorted column ids, one per vertex
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.colorings)

    def witness(self, i: int) -> Coloring:
        return Coloring(self.colorings[i], self.k)

    def stack(self, i: int) -> list[TypeDistribution]:
        out = []
        for r in range(1, self.r_max + 1):
            ids, cnt = np.unique(self.cols[r - 1][i], return_counts=True)
            counts = {self.keys[r - 1][c]: int(v) for c, v in zip(ids, cnt)}
            out.append(TypeDistribution(r, self.k, self.m, counts, self.n))
        return out

    @property
    def points(self) -> list[list[TypeDistribution]]:
        return [self.stack(i) for i in range(len(self))]

    def extended(self, colorings: np.ndarray, index: ColoredIndex) -> "GlobalKType":
        """Cloud with extra witness colorings added (deduplicated)."""
        return _build_cloud(index, self.k, self.r_max,
                            np.vstack([self.colorings, colorings]), self.provenance)


def _build_cloud(index: ColoredIndex, k: int, r_max: int, colorings: np.ndarray,
                 provenance: dict) -> GlobalKType:
    colorings = np.asarray(colorings, dtype=np.int64)
    keys_r, cols_r = [], []
    for r in range(1, r_max + 1):
        keys: dict = {}
        cols = np.sort(_colored_columns(index, r, colorings, keys), axis=1)
        keys_r.append(keys)
        cols_r.append(cols)
    # two colorings give the same point iff their sorted column rows agree
    _, first = np.unique(np.hstack(cols_r), axis=0, return_index=True)
    keep = np.sort(first)
    cols_r = [c[keep] for c in cols_r]
    key_lists = []
    for keys in keys_r:
        lst = [None] * len(keys)
        for c, i in keys.items():
            lst[i] = c
        key_lists.append(tuple(lst))
    return GlobalKType(index.n, index.g.m, k, r_max, colorings[keep].astype(np.int8),
                       key_lists, cols_r, dict(provenance))


def _distinct_colorings(rng: np.random.Generator, n: int, k: int, count: int) -> np.ndarray:
    """``count`` uniform colorings drawn without replacement (all of them if count >= k^n).

    Repeats carry no information, so distinct draws are preferred whenever
    the colorings can be indexed; beyond that, duplicates are negligible.
    """
    total = k**n
    if total <= DISTINCT_LIMIT:
        idx = rng.choice(total, size=count, replace=False) if count < total else np.arange(total)
        powers = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
        return (idx[:, None] // powers[None, :]) % k + 1
    return rng.integers(1, k + 1, size=(count, n), dtype=np.int64)


def global_k_type(g: SchreierGraph, k: int, r_max: int, mode: str = "exhaustive",
                  budget: int = 10_000, seed: int = 0,
                  targets: Sequence[Sequence[TypeDistribution]] = (),
                  threads: int | None = None) -> GlobalKType:
    """Cloud of colored type stacks (radii 1..r_max) over k-colorings of ``g``.

    ``exhaustive`` visits all k^n colorings (refused when k^n > budget).
    ``sampled`` spends ``budget`` coloring evaluations on distinct uniform
    random colorings, on annealing runs that maximize random linear functionals of
    the code weights (probing the cloud's support directions), and on runs
    that approach the caller's ``targets``.
    """
    if k < 1 or r_max < 1:
        raise BadParameter("need k >= 1 and r_max >= 1")
    index = ColoredIndex(g, r_max)
    n = g.n
    if k == 1 or mode == "exhaustive":
        if k**n > budget and k > 1:
            raise BudgetExceeded(f"exhaustive search needs {k}^{n} = {k**n} colorings > budget {budget}")
        colorings = np.vstack(list(all_colorings(n, k)))
        return _build_cloud(index, k, r_max, colorings, {"mode": "exhaustive"})
    if mode != "sampled":
        raise BadParameter(f"unknown mode {mode!r}")
    if budget < 1:
        raise BadParameter("sampled mode needs a positive budget")

    root = np.random.SeedSequence(int(seed))
    s_uniform, s_probe, s_target = root.spawn(3)
    rng = np.random.default_rng(s_uniform)
    n_uniform = max(1, budget // 2)
    target_budget = (budget - n_uniform) // 3 if targets else 0
    probe_budget = budget - n_uniform - target_budget
    chunks = [_distinct_colorings(rng, n, k, n_uniform)]

    n_probes = int(np.clip(probe_budget // (10 * n), 1, 16)) if probe_budget > 0 else 0
    probe_seeds = child_seeds(s_probe, n_probes)

    def probe(i):
        prng = np.random.default_rng(probe_seeds[i])
        obj = LinearFunctionalObjective(index_copy(index), prng)
        res = anneal(obj, n, k, probe_budget // n_probes, prng, random_coloring(prng, n, k),
                     snapshots=True)
        return np.vstack(res.visited + [res.colors])

    chunks += parallel_map(probe, list(range(n_probes)), threads)

    if targets:
        target_seeds = child_seeds(s_target, len(targets))

        def chase(i):
            res = approach_target(index_copy(index), k, targets[i], target_budget // len(targets),
                                  target_seeds[i])
            return res.colors[None, :]

        chunks += parallel_map(chase, list(range(len(targets))), threads)

    prov = {"mode": "sampled", "seed": int(seed), "budget": int(budget),
            "uniform": int(n_uniform), "probes": n_probes, "targets": len(targets)}
    return _build_cloud(index, k, r_max, np.vstack(chunks), prov)


def index_copy(index: ColoredIndex) -> ColoredIndex:
    """Shallow copy with a private code cache, for use from worker threads."""
    new = object.__new__(ColoredIndex)
    new.__dict__.update(index.__dict__)
    new._codes = {}
    return new


def approach_target(index: ColoredIndex, k: int, target: Sequence[TypeDistribution],
                    budget: int, seed):
    """Annealing toward a target stack; returns the best SearchResult."""
    n = index.n
    rng = np.random.default_rng(seed)
    make = lambda: StatTargetObjective(index, target)  # noqa: E731
    init = greedy(make(), n, k, random_coloring(rng, n, k)) if budget > 0 else np.ones(n, np.int64)
    return anneal(make(), n, k, max(0, budget - n * (k - 1)), rng, init, lower_bound=0)


# --- Hausdorff distance ----------------------------------------------------------

@dataclass
class HausdorffResult:
    distance: Fraction
    a_to_b: Fraction
    b_to_a: Fraction
    witness_a_to_b: tuple[int, int]  # (point of A attaining the sup, its nearest in B)
    witness_b_to_a: tuple[int, int]  # (point of B attaining the sup, its nearest in A)


def _scaled_matrix(cloud: GlobalKType, col_of: list[dict], width: int, scale: int, R: int):
    rows, cols, vals = [], [], []
    P = len(cloud)
    for r in range(1, R + 1):
        remap = np.array([col_of[r - 1][c] for c in cloud.keys[r - 1]], dtype=np.int64)
        c = remap[cloud.cols[r - 1]]
        rows.append(np.repeat(np.arange(P), cloud.n))
        cols.append(c.ravel())
        vals.append(np.full(c.size, scale * 2 ** (R - r), dtype=np.int64))
    return sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(P, width), dtype=np.int64)


@njit(cache=True)
def _one_sided_kernel(a_ptr, a_idx, a_val, b_ptr, b_idx, b_val, nb, total):
    best_d, best_i, best_j = -1, 0, 0
    overlap = np.zeros(nb, dtype=np.int64)
    for i in range(a_ptr.size - 1):
        overlap[:] = 0
        for p in range(a_ptr[i], a_ptr[i + 1]):
            col, val = a_idx[p], a_val[p]
            for q in range(b_ptr[col], b_ptr[col + 1]):
                overlap[b_idx[q]] += min(b_val[q], val)
        j = 0
        for t in range(1, nb):
            if overlap[t] > overlap[j]:
                j = t
        d = total - overlap[j]
        if d > best_d:
            best_d, best_i, best_j = d, i, j
    return best_d, best_i, best_j


def _one_sided(A: sparse.csr_matrix, B: sparse.csc_matrix, total: int) -> tuple[int, int, int]:
    """max over rows a of min over rows b of (total - sum_col min(a, b))."""
    A.sort_indices()
    B.sort_indices()
    d, i, j = _one_sided_kernel(A.indptr.astype(np.int64), A.indices.astype(np.int64),
                                A.data.astype(np.int64), B.indptr.astype(np.int64),
                                B.indices.astype(np.int64), B.data.astype(np.int64),
                                B.shape[0], total)
    return int(d), int(i), int(j)


def _shared_matrices(A: GlobalKType, B: GlobalKType):
    """Both clouds as integer matrices over one column space.

    Entries are ``count * (L / n) * 2^(R - r)`` with L = lcm of the vertex
    counts, so that ``total - sum_col min(a, b)`` equals ``2^R * L`` times
    the weak-metric distance of two points.
    """
    R = A.r_max
    L = math.lcm(A.n, B.n)
    col_of, width = [], 0
    for r in range(R):
        union = sorted(set(A.keys[r]) | set(B.keys[r]), key=BallCode.sort_key)
        col_of.append({c: width + i for i, c in enumerate(union)})
        width += len(union)
    Am = _scaled_matrix(A, col_of, width, L // A.n, R)
    Bm = _scaled_matrix(B, col_of, width, L // B.n, R)
    total = L * (2**R - 1)
    return Am, Bm, total, 2**R * L


def hausdorff(A: GlobalKType, B: GlobalKType) -> HausdorffResult:
    if (A.k, A.r_max, A.m) != (B.k, B.r_max, B.m):
        raise ShapeMismatch(f"clouds differ in (k, r_max, m): {(A.k, A.r_max, A.m)} "
                            f"vs {(B.k, B.r_max, B.m)}")
    Am, Bm, total, den = _shared_matrices(A, B)
    dab, ia, jb = _one_sided(Am.tocsr(), Bm.tocsc(), total)
    dba, ib, ja = _one_sided(Bm.tocsr(), Am.tocsc(), total)
    ab, ba = Fraction(dab, den), Fraction(dba, den)
    return HausdorffResult(max(ab, ba), ab, ba, (ia, jb), (ib, ja))


# --- partition metric -----------------------------------------------------------

@dataclass
class PdReport:
    pd: Fraction
    pd_k: dict[int, Fraction]
    one_sided: dict[int, tuple[Fraction, Fraction]]
    tail_bound: Fraction
    r_max: int
    k_max: int
    witnesses: dict[int, dict]
    provenance: dict
    pd_1: Fraction | None = None

    def to_json(self) -> dict:
        out = {
            "pd": float(self.pd),
            "pd_exact": str(self.pd),
            "tail_bound": float(self.tail_bound),
            "k_max": self.k_max,
            "r_max": self.r_max,
            "pd_k": {str(k): float(v) for k, v in self.pd_k.items()},
            "pd_k_exact": {str(k): str(v) for k, v in self.pd_k.items()},
            "one_sided": {str(k): {"a_to_b": float(a), "b_to_a": float(b)}
                          for k, (a, b) in self.one_sided.items()},
            "witnesses": {str(k): w for k, w in self.witnesses.items()},
            "provenance": self.provenance,
        }
        if self.pd_1 is not None:
            out["pd_1"] = float(self.pd_1)
        return out


def _refine_towards(g: SchreierGraph, cloud: GlobalKType, others: GlobalKType,
                    distances_from: list[int], budget: int, seed, threads) -> GlobalKType:
    """Add colorings of ``g`` chasing the given points of ``others``."""
    if not distances_from or budget <= 0:
        return cloud
    index = ColoredIndex(g, cloud.r_max)
    seeds = child_seeds(seed, len(distances_from))

    def chase(t):
        i = distances_from[t]
        res = approach_target(index_copy(index), cloud.k, others.stack(i),
                              budget // len(distances_from), seeds[t])
        return res.colors[None, :]

    extra = parallel_map(chase, list(range(len(distances_from))), threads)
    return cloud.extended(np.vstack(extra), index)


def _far_points(A: GlobalKType, B: GlobalKType, count: int) -> list[int]:
    """Indices of up to ``count`` points of A at positive distance from cloud B, farthest first."""
    Am, Bm, total, _ = _shared_matrices(A, B)
    Am, Bm = Am.tocsr(), Bm.tocsc()
    dists = sorted((-_one_sided(Am[i], Bm, total)[0], i) for i in range(len(A)))
    return [i for d, i in dists[:count] if d < 0]


def partition_distance(g1: SchreierGraph, g2: SchreierGraph, k_max: int, r_max: int,
                       mode: str = "exhaustive", budget: int = 10_000, seed: int = 0,
                       include_pd1: bool = False, refine: int = 4,
                       threads: int | None = None) -> PdReport:
    """pd truncated to k = 2..k_max, with tail bound 2^-k_max.

    In sampled mode each pair of clouds is additionally refined once: the
    ``refine`` points of each cloud farthest from the other are chased in
    the other graph.  The same seeds are used on both sides, so the result
    is symmetric in (g1, g2).
    """
    if k_max < 2:
        raise BadParameter("k_max must be at least 2")
    if g1.m != g2.m:
        raise ShapeMismatch(f"alphabets differ: {g1.m} vs {g2.m} generators")
    pd_k, one_sided, witnesses = {}, {}, {}
    for k in range(2, k_max + 1):
        sk = derive_seed(seed, k)
        cloud_seed = int(sk.generate_state(1)[0])
        A = global_k_type(g1, k, r_max, mode, budget, cloud_seed, threads=threads)
        B = global_k_type(g2, k, r_max, mode, budget, cloud_seed, threads=threads)
        if mode == "sampled" and refine > 0:
            rseed = derive_seed(seed, k, 1)
            fa, fb = _far_points(A, B, refine), _far_points(B, A, refine)
            A, B = (_refine_towards(g1, A, B, fb, budget // 4, rseed, threads),
                    _refine_towards(g2, B, A, fa, budget // 4, rseed, threads))
        h = hausdorff(A, B)
        pd_k[k] = h.distance
        one_sided[k] = (h.a_to_b, h.b_to_a)
        ia, jb = h.witness_a_to_b
        ib, ja = h.witness_b_to_a
        witnesses[k] = {
            "a_to_b": {"a": A.colorings[ia].tolist(), "nearest_b": B.colorings[jb].tolist()},
            "b_to_a": {"b": B.colorings[ib].tolist(), "nearest_a": A.colorings[ja].tolist()},
            "cloud_sizes": [len(A), len(B)],
        }
    pd = sum((Fraction(1, 2**k) * v for k, v in pd_k.items()), Fraction(0))
    prov = {"mode": mode, "budget": int(budget), "seed": int(seed),
            "metric_tail_per_pd_k": float(weak_metric_tail(r_max))}
    if mode == "sampled":
        prov["estimate"] = "sampled; one-sided values are estimates"
        prov["bias"] = SAMPLED_BIAS
    else:
        prov["estimate"] = "exact for the truncated pseudometric"
    pd1 = None
    if include_pd1:
        from .stats import stack_distance
        pd1 = stack_distance(type_stack(g1, r_max), type_stack(g2, r_max))
    return PdReport(pd, pd_k, one_sided, Fraction(1, 2**k_max), r_max, k_max, witnesses,
                    prov, pd1)


# --- statistic matching ------------------------------------------------------------

@dataclass
class SimulationResult:
    coloring: Coloring
    deviation: Fraction
    certified: bool
    method: str
    moves: int = 0


def _profile_devs(g, target: ProfileMatrix, colorings: np.ndarray) -> np.ndarray:
    """Scaled max deviations (n * target_n * dev) for a batch of colorings."""
    k, n, tn = target.k, g.n, target.denominator
    P = len(colorings)
    xs = np.arange(n)
    worst = np.zeros(P, dtype=np.int64)
    col = colorings - 1
    for a, w in enumerate(target.words):
        f = g.act(w, xs)
        pair = col * k + col[:, f]  # (P, n)
        flat = (np.arange(P)[:, None] * (k * k) + pair).ravel()
        cnt = np.bincount(flat, minlength=P * k * k).reshape(P, k * k) * tn
        tgt = target.counts[a].reshape(-1) * n
        worst = np.maximum(worst, np.abs(cnt - tgt[None, :]).max(axis=1))
    return worst


def _stack_devs(index, k, target, colorings):
    cloud = _build_cloud(index, k, len(target), colorings, {})
    # deviation of every coloring, not only distinct points: map back via stacks
    R = len(target)
    L = math.lcm(index.n, target[0].denominator)
    tpoint = {r: {c: v * (L // target[0].denominator) for c, v in target[r - 1].counts.items()}
              for r in range(1, R + 1)}
    devs = np.zeros(len(cloud), dtype=np.int64)
    s = L // index.n
    for i in range(len(cloud)):
        ov = 0
        for r in range(1, R + 1):
            ids, cnt = np.unique(cloud.cols[r - 1][i], return_counts=True)
            t = tpoint[r]
            ov += 2 ** (R - r) * sum(min(int(c) * s, t.get(cloud.keys[r - 1][j], 0))
                                     for j, c in zip(ids, cnt))
        devs[i] = L * (2**R - 1) - ov
    return cloud, devs, Fraction(1, 2**R * L)


def simulate_profile(g: SchreierGraph, target, budget: int, seed: int, k: int | None = None,
                     restarts: int = 4, threads: int | None = None) -> SimulationResult:
    """Search for a coloring of ``g`` whose statistics match ``target``.

    ``target`` is a ProfileMatrix (max-entry deviation) or a colored
    TypeDistribution / stack of them for radii 1..R (weak metric).  Exhaustive
    when k^n <= budget, otherwise greedy plus annealing; only the exhaustive
    optimum is certified.
    """
    n = g.n
    if isinstance(target, ProfileMatrix):
        k = target.k
        scale = n * target.denominator

        def deviation(colors):
            return Fraction(int(_profile_devs(g, target, colors[None, :])[0]), scale)

        def make():
            return ProfileObjective(g, target.words, k, target.counts, target.denominator)

        def exhaustive():
            best = (None, None)
            for chunk in all_colorings(n, k):
                devs = _profile_devs(g, target, chunk)
                i = int(np.argmin(devs))
                if best[0] is None or devs[i] < best[0]:
                    best = (int(devs[i]), chunk[i].copy())
            return best[1], Fraction(best[0], scale)
    else:
        stack = [target] if isinstance(target, TypeDistribution) else list(target)
        if len(stack) == 1 and stack[0].r > 1:
            top = stack[0]
            stack = [top.truncate(r) for r in range(1, top.r)] + [top]
        if [t.r for t in stack] != list(range(1, len(stack) + 1)):
            raise ShapeMismatch("target stack must cover radii 1..R")
        if stack[0].m != g.m or stack[0].k < 1:
            raise ShapeMismatch("target must be a colored distribution over the same alphabet")
        k = stack[0].k
        index = ColoredIndex(g, len(stack))
        probe = StatTargetObjective(index, stack)
        scale = probe.scale

        def deviation(colors):
            return Fraction(int(make().reset(colors)), scale)

        def make():
            return StatTargetObjective(index, stack)

        def exhaustive():
            best = (None, None)
            for chunk in all_colorings(n, k):
                cloud, devs, unit = _stack_devs(index, k, stack, chunk)
                i = int(np.argmin(devs))
                if best[0] is None or devs[i] < best[0]:
                    best = (int(devs[i]), cloud.colorings[i].astype(np.int64))
            return best[1], Fraction(best[0], 2**len(stack) * math.lcm(n, stack[0].denominator))

    if budget > 0 and k**n <= budget:
        colors, dev = exhaustive()
        return SimulationResult(Coloring(colors, k), dev, True, "exhaustive", k**n)
    obj = make()
    init = greedy(obj, n, k)
    init_val = obj.reset(init)
    if budget <= 0:
        return SimulationResult(Coloring(init, k), deviation(init), init_val == 0, "greedy")
    res = multi_start(make, n, k, budget, seed, restarts, init=init, lower_bound=0,
                      threads=threads)
    return SimulationResult(Coloring(res.colors, k), deviation(res.colors),
                            res.value == 0, "anneal" if res.moves else "greedy", res.moves)
