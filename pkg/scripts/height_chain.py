"""Refinement heights of the ball codes observed in a handful of graphs.

    python scripts/height_chain.py --m 1 --r 2
"""
import argparse
from dataclasses import dataclass

import numpy as np

from schreierstats import ball_table, gen_cycle, gen_random_action, height_poset


@dataclass
class Config:
    m: int = 1
    r: int = 1
    samples: int = 20
    seed: int = 0


def run(cfg: Config) -> None:
    gs = [gen_cycle(n) for n in range(1, 2 * cfg.r + 3)] if cfg.m == 1 else []
    rng = np.random.default_rng(cfg.seed)
    gs += [gen_random_action(int(rng.integers(1, 12)), cfg.m, int(rng.integers(1 << 30)))
           for _ in range(cfg.samples)]
    observed = {c for g in gs for c in ball_table(g, cfg.r).codes}
    poset = height_poset(cfg.m, cfg.r, sorted(observed, key=lambda c: c.sort_key()))
    for h, codes in sorted(poset.levels().items()):
        for c in codes:
            print(f"{h}\t{c.num_blocks}\t{c}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--m", type=int, default=Config.m)
    p.add_argument("--r", type=int, default=Config.r)
    p.add_argument("--samples", type=int, default=Config.samples)
    p.add_argument("--seed", type=int, default=Config.seed)
    run(Config(**vars(p.parse_args())))
