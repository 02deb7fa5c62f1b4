"""Pairwise partition pseudometric between small cycles and tori.

    python scripts/pd_table.py --kmax 2 --rmax 2
"""
import argparse
from dataclasses import dataclass

from schreierstats import gen_cycle, gen_torus, partition_distance
from schreierstats.schreier import disjoint_union


@dataclass
class Config:
    kmax: int = 2
    rmax: int = 2
    mode: str = "exhaustive"
    budget: int = 5000
    seed: int = 0


def graphs():
    # m = 1 actions; the torus family would need m = 2
    return {
        "C3": gen_cycle(3),
        "C4": gen_cycle(4),
        "C5": gen_cycle(5),
        "C6": gen_cycle(6),
        "C3+C3": disjoint_union(gen_cycle(3), gen_cycle(3)),
        "C2+C4": disjoint_union(gen_cycle(2), gen_cycle(4)),
    }


def run(cfg: Config) -> None:
    gs = graphs()
    names = list(gs)
    print("\t" + "\t".join(names))
    for a in names:
        row = []
        for b in names:
            rep = partition_distance(gs[a], gs[b], cfg.kmax, cfg.rmax, cfg.mode, cfg.budget, cfg.seed)
            row.append(f"{float(rep.pd):.4f}")
        print(a + "\t" + "\t".join(row))
    print(f"# tail bound per entry: {2.0 ** -cfg.kmax}, torus T(2,3) has m=2: "
          f"pd(T,T) = {float(partition_distance(gen_torus(2, 3), gen_torus(2, 3), 2, 1).pd)}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--kmax", type=int, default=Config.kmax)
    p.add_argument("--rmax", type=int, default=Config.rmax)
    p.add_argument("--mode", choices=["exhaustive", "sampled"], default=Config.mode)
    p.add_argument("--budget", type=int, default=Config.budget)
    p.add_argument("--seed", type=int, default=Config.seed)
    run(Config(**vars(p.parse_args())))
