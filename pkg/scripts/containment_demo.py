"""Weak-containment scores between small random unitary representations.

    python scripts/containment_demo.py --dim 2 --n 1 --words a,b,aB
"""
import argparse
from dataclasses import dataclass

import numpy as np

from schreierstats import containment_score
from schreierstats.repspectra import random_rep
from schreierstats.words import parse_words


@dataclass
class Config:
    dim: int = 2
    m: int = 2
    n: int = 1
    words: str = "a,b,aB"
    budget: int = 200
    seed: int = 0


def run(cfg: Config) -> None:
    rng = np.random.default_rng(cfg.seed)
    F = parse_words(cfg.words)
    alpha, beta = random_rep(cfg.dim, cfg.m, rng), random_rep(cfg.dim, cfg.m, rng)
    cases = {
        "alpha in alpha": (alpha, alpha),
        "alpha in alpha+beta": (alpha, alpha.direct_sum(beta)),
        "alpha in beta": (alpha, beta),
        "alpha+beta in alpha": (alpha.direct_sum(beta), alpha),
    }
    for name, (a, b) in cases.items():
        if cfg.n > min(a.dim, b.dim):
            continue
        res = containment_score(a, b, F, cfg.n, cfg.budget, cfg.seed)
        print(f"{name}\t{res.score:.3e}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(Config()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    run(Config(**vars(p.parse_args())))
