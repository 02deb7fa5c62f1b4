"""Finite-dimensional unitary representations of F_S and their Gram-point clouds.

For a representation alpha, a word list F and an orthonormal n-frame V, the
Gram point collects ``<alpha(gamma) v_i, v_j>`` for gamma in F and
1 <= i, j <= n.  The inner product is linear in the first slot, so the
coordinate is ``v_j^H alpha(gamma) v_i``.  Sets of Gram points are compared
with the max-modulus distance over coordinates.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.linalg import block_diag

from .errors import DataError, DimensionTooSmall, NotOrthonormal
from .search import child_seeds, parallel_map
from .words import Word

UNITARY_TOL = 1e-10
ORTHO_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class FiniteUnitaryRep:
    matrices: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = tuple(np.asarray(a, dtype=complex) for a in self.matrices)
        if not mats:
            raise DataError("a representation needs at least one generator")
        d = mats[0].shape[0]
        for i, a in enumerate(mats):
            if a.shape != (d, d):
                raise DataError(f"generator {i}: expected a {d}x{d} matrix, got {a.shape}")
            if np.abs(a.conj().T @ a - np.eye(d)).max() > UNITARY_TOL:
                raise DataError(f"generator {i} is not unitary")
        object.__setattr__(self, "matrices", mats)

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def m(self) -> int:
        return len(self.matrices)

    def letter(self, c: int) -> np.ndarray:
        a = self.matrices[c >> 1]
        return a.conj().T if c & 1 else a

    def word_matrix(self, w: Word) -> np.ndarray:
        out = np.eye(self.dim, dtype=complex)
        for c in w:
            out = out @ self.letter(c)
        return out

    def direct_sum(self, other: "FiniteUnitaryRep") -> "FiniteUnitaryRep":
        if self.m != other.m:
            raise DataError("direct sum needs the same number of generators")
        return FiniteUnitaryRep(tuple(block_diag(a, b) for a, b in zip(self.matrices, other.matrices)))

    def conjugate(self, u: np.ndarray) -> "FiniteUnitaryRep":
        return FiniteUnitaryRep(tuple(u @ a @ u.conj().T for a in self.matrices))

    def to_json(self) -> dict:
        return {"dim": self.dim,
                "matrices": [[[float(z.real), float(z.imag)] for z in a.ravel()]
                             for a in self.matrices]}

    @classmethod
    def from_json(cls, data: dict) -> "FiniteUnitaryRep":
        d = int(data["dim"])
        mats = []
        for raw in data["matrices"]:
            arr = np.asarray(raw, dtype=float)
            if arr.shape[-1] != 2 or arr.size != 2 * d * d:
                raise DataError(f"each matrix needs {d}x{d} [re, im] pairs")
            pairs = arr.reshape(d * d, 2)
            mats.append((pairs[:, 0] + 1j * pairs[:, 1]).reshape(d, d))
        return cls(tuple(mats))


def read_rep(path) -> FiniteUnitaryRep:
    try:
        return FiniteUnitaryRep.from_json(json.loads(Path(path).read_text()))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise DataError(f"cannot read representation {path}: {exc}") from None


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_rep(d: int, m: int, rng: np.random.Generator) -> FiniteUnitaryRep:
    return FiniteUnitaryRep(tuple(random_unitary(d, rng) for _ in range(m)))


def random_frame(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    return random_unitary(d, rng)[:, :n]


@dataclass(frozen=True, eq=False)
class GramPoint:
    words: tuple[Word, ...]
    coords: np.ndarray  # (len(words), n, n); coords[g, i, j] = <alpha(g) v_i, v_j>

    @property
    def n(self) -> int:
        return self.coords.shape[1]

    def distance(self, other: "GramPoint") -> float:
        return float(np.abs(self.coords - other.coords).max())


def _check_frame(rep: FiniteUnitaryRep, V: np.ndarray) -> np.ndarray:
    V = np.asarray(V, dtype=complex)
    if V.ndim == 1:
        V = V[:, None]
    if V.shape[0] != rep.dim:
        raise DataError(f"frame vectors have length {V.shape[0]}, representation has dim {rep.dim}")
    n = V.shape[1]
    if n > rep.dim:
        raise DimensionTooSmall(f"cannot fit {n} orthonormal vectors in dimension {rep.dim}")
    if np.abs(V.conj().T @ V - np.eye(n)).max() > ORTHO_TOL:
        raise NotOrthonormal("frame vectors are not orthonormal")
    return V


def _coords(mats: np.ndarray, V: np.ndarray, identity_mask: np.ndarray) -> np.ndarray:
    # c[g, i, j] = v_j^H M_g v_i = (V^H M_g V)[j, i]
    c = np.swapaxes(V.conj().T @ mats @ V, 1, 2)
    c[identity_mask] = np.eye(V.shape[1])
    return c


def gram_point(rep: FiniteUnitaryRep, V, F: Sequence[Word]) -> GramPoint:
    """Gram coordinates of an orthonormal frame (columns of ``V``)."""
    V = _check_frame(rep, V)
    mats = np.stack([rep.word_matrix(w) for w in F])
    mask = np.array([len(w) == 0 for w in F], dtype=bool)
    return GramPoint(tuple(F), _coords(mats, V, mask))


class _FrameProblem:
    """Squared coordinate distance to a target, as a function of the frame."""

    def __init__(self, rep: FiniteUnitaryRep, F: Sequence[Word]):
        self.mats = np.stack([rep.word_matrix(w) for w in F])
        self.mats_h = np.swapaxes(self.mats.conj(), 1, 2)
        self.mask = np.array([len(w) == 0 for w in F], dtype=bool)

    def coords(self, V):
        return _coords(self.mats, V, self.mask)

    def loss(self, V, target):
        return float((np.abs(self.coords(V) - target) ** 2).sum())

    def grad(self, V, target):
        """Wirtinger gradient d loss / d conj(V) (identity blocks are constant)."""
        e = self.coords(V) - target
        e[self.mask] = 0
        # from c[g,i,j] = v_j^H M v_i: conj(e[g,i,p]) M v_i ; from conj(c[g,p,l]): e[g,p,l] M^H v_l
        MV = self.mats @ V
        MhV = self.mats_h @ V
        return (MV @ e.conj()).sum(axis=0) + (MhV @ np.swapaxes(e, 1, 2)).sum(axis=0)


def _polar(X: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(X, full_matrices=False)
    return u @ vh


def refine_frame(problem: _FrameProblem, V: np.ndarray, target: np.ndarray,
                 max_iter: int = 500, tol: float = 1e-24) -> np.ndarray:
    """Descent on the frame manifold: step along minus the gradient, re-orthonormalize.

    The step grows by 1.5 after an accepted move and halves after a rejected
    one; stops when the step drops below 1e-10, the loss below ``tol``, an
    accepted move gains less than a 1e-9 fraction of the loss, or after
    ``max_iter`` proposals.
    """
    loss = problem.loss(V, target)
    step = 0.5
    for _ in range(max_iter):
        if loss <= tol or step < 1e-10:
            break
        cand = _polar(V - step * problem.grad(V, target))
        cl = problem.loss(cand, target)
        if cl < loss:
            gain = loss - cl
            V, loss = cand, cl
            if gain < 1e-9 * loss:
                break
            step *= 1.5
        else:
            step *= 0.5
    return V


@dataclass
class KCloud:
    words: tuple[Word, ...]
    n: int
    points: np.ndarray  # (N, |F|, n, n)
    frames: np.ndarray  # (N, d, n)
    provenance: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    def point(self, i: int) -> GramPoint:
        return GramPoint(self.words, self.points[i])

    def to_json(self) -> dict:
        return {
            "words": [str(w) for w in self.words],
            "n": self.n,
            "points": [[[[float(z.real), float(z.imag)] for z in blk.ravel()] for blk in p]
                       for p in self.points],
            "provenance": self.provenance,
        }


def sample_K(rep: FiniteUnitaryRep, F: Sequence[Word], n: int, budget: int, seed: int,
             targets: Sequence[GramPoint] = (), threads: int | None = None) -> KCloud:
    """Sample of Gram points of random orthonormal n-frames.

    With ``targets``, half the budget goes to random frames and the rest to
    descent runs started from the nearest sampled frame toward each target;
    the refined points join the cloud.
    """
    if n > rep.dim:
        raise DimensionTooSmall(f"cannot fit {n} orthonormal vectors in dimension {rep.dim}")
    if budget < 1:
        raise DataError("budget must be positive")
    F = tuple(F)
    problem = _FrameProblem(rep, F)
    s_rand, s_targ = child_seeds(seed, 2)
    rng = np.random.default_rng(s_rand)
    n_rand = budget // 2 if targets else budget
    n_rand = max(1, n_rand)
    frames = [random_frame(rep.dim, n, rng) for _ in range(n_rand)]
    points = [problem.coords(V) for V in frames]
    if targets:
        iters = max(1, (budget - n_rand) // len(targets))
        pts = np.stack(points)

        def chase(t):
            tgt = targets[t].coords
            start = int(np.argmin(np.abs(pts - tgt).reshape(len(pts), -1).max(axis=1)))
            V = refine_frame(problem, frames[start], tgt, max_iter=iters)
            return V, problem.coords(V)

        for V, p in parallel_map(chase, list(range(len(targets))), threads):
            frames.append(V)
            points.append(p)
    prov = {"seed": int(seed), "budget": int(budget), "random_frames": n_rand,
            "targets": len(targets), "closure": "finite sample; no closure claim"}
    return KCloud(F, n, np.stack(points), np.stack(frames), prov)


def cloud_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise max-modulus distances between two stacks of Gram points."""
    fa = a.reshape(len(a), -1)
    fb = b.reshape(len(b), -1)
    return np.abs(fa[:, None, :] - fb[None, :, :]).max(axis=2)


def hausdorff_clouds(a: KCloud, b: KCloud) -> float:
    d = cloud_distance(a.points, b.points)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


@dataclass
class ContainmentResult:
    score: float
    minima: np.ndarray  # achieved deviation per point of A's cloud
    worst: int  # index of the A-point attaining the score
    witness_a: np.ndarray  # frame of that A-point
    witness_b: np.ndarray  # best B-frame found for it
    provenance: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def frame(V):
            return [[[float(z.real), float(z.imag)] for z in row] for row in V]
        return {"score": self.score, "worst_point": self.worst,
                "points": int(len(self.minima)),
                "witness_a": frame(self.witness_a), "witness_b": frame(self.witness_b),
                "provenance": self.provenance}


def _embeddings(V: np.ndarray, d: int) -> list[np.ndarray]:
    """A frame zero-padded into each contiguous coordinate block of a larger space."""
    da = V.shape[0]
    out = []
    for off in range(d - da + 1):
        W = np.zeros((d, V.shape[1]), dtype=complex)
        W[off:off + da] = V
        out.append(W)
    return out


def containment_score(repA: FiniteUnitaryRep, repB: FiniteUnitaryRep, F: Sequence[Word],
                      n: int, budget: int, seed: int, starts: int = 3,
                      max_iter: int = 150, threads: int | None = None) -> ContainmentResult:
    """One-sided estimate of sup over K(A) of the distance to K(B).

    For each sampled A-point the B-frame search starts from the nearest
    sampled B-points and from A's frame padded into B's coordinates; the
    best ``starts`` candidates are refined by frame descent.  The score is
    the largest achieved minimum; ~0 is numerical evidence that B weakly
    contains A at this (F, n).
    """
    for rep in (repA, repB):
        if n > rep.dim:
            raise DimensionTooSmall(f"cannot fit {n} orthonormal vectors in dimension {rep.dim}")
    if repA.m != repB.m:
        raise DataError("representations need the same number of generators")
    F = tuple(F)
    sa, sb = child_seeds(seed, 2)
    cloud_a = sample_K(repA, F, n, budget, int(sa.generate_state(1)[0]))
    cloud_b = sample_K(repB, F, n, budget, int(sb.generate_state(1)[0]))
    problem = _FrameProblem(repB, F)
    near = cloud_distance(cloud_a.points, cloud_b.points)

    def solve(i):
        target = cloud_a.points[i]
        cands = [cloud_b.frames[j] for j in np.argsort(near[i], kind="stable")[:starts]]
        if repB.dim >= repA.dim:
            cands += _embeddings(cloud_a.frames[i], repB.dim)
        devs = [float(np.abs(problem.coords(V) - target).max()) for V in cands]
        order = np.argsort(devs, kind="stable")
        best_dev, best_V = devs[order[0]], cands[order[0]]
        for j in order[:starts]:
            if best_dev <= 1e-12:
                break
            V = refine_frame(problem, cands[j], target, max_iter=max_iter)
            dev = float(np.abs(problem.coords(V) - target).max())
            if dev < best_dev:
                best_dev, best_V = dev, V
        return best_dev, best_V

    results = parallel_map(solve, list(range(len(cloud_a))), threads)
    minima = np.array([r[0] for r in results])
    worst = int(np.argmax(minima))
    prov = {"seed": int(seed), "budget": int(budget), "starts": starts, "max_iter": max_iter,
            "estimate": "one-sided numerical evidence; sampled, not a proof"}
    return ContainmentResult(float(minima[worst]), minima, worst, cloud_a.frames[worst],
                             results[worst][1], prov)
