"""Best proper 2-coloring of cycles: odd cycles keep a 2/n violating fraction.

    python scripts/rotation_gap.py --sizes 4 5 6 7 101 --budget 100000
"""
import argparse
import time
from dataclasses import dataclass, field

from schreierstats import builtin_rule, gen_cycle, search_rule


@dataclass
class Config:
    sizes: list[int] = field(default_factory=lambda: [4, 5, 6, 7, 8, 9, 101])
    budget: int = 100_000
    seed: int = 0


def run(cfg: Config) -> None:
    rule = builtin_rule("proper_coloring", k=2)
    print("n\tfraction\tcertified\tmethod\tseconds")
    for n in cfg.sizes:
        t = time.perf_counter()
        rep = search_rule(gen_cycle(n), rule, cfg.budget, cfg.seed)
        print(f"{n}\t{rep.violating_fraction}\t{rep.certified}\t{rep.method}\t"
              f"{time.perf_counter() - t:.2f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=Config().sizes)
    p.add_argument("--budget", type=int, default=Config.budget)
    p.add_argument("--seed", type=int, default=Config.seed)
    run(Config(**vars(p.parse_args())))
