"""Acceptance criteria, one test each.

Every test records a single ``[PASS]``/``[FAIL]`` line; the lines are
printed together at the end of the pytest run.
"""
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from schreierstats.balls import ball_code, height_poset
from schreierstats.cli import main
from schreierstats.pmetric import global_k_type, hausdorff, partition_distance
from schreierstats.repspectra import FiniteUnitaryRep, containment_score, random_rep, sample_K
from schreierstats.rules import builtin_rule, check_rule, search_rule
from schreierstats.schreier import from_permutations, gen_cycle, make_coloring
from schreierstats.stats import tv_distance, type_dist, weak_metric
from schreierstats.words import parse_words
from conftest import ACCEPTANCE_LINES
from cli_cases import RANDOMIZED, commands, make_inputs
import oracles


def report(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def random_graph(rng, n_lo, n_hi, m):
    n = int(rng.integers(n_lo, n_hi + 1))
    return from_permutations(n, [rng.permutation(n) for _ in range(m)])


def timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def test_criterion_1_rotation_gap():
    rule = builtin_rule("proper_coloring", k=2)
    c5, t5 = timed(lambda: search_rule(gen_cycle(5), rule, 10**5, 0))
    c4, t4 = timed(lambda: search_rule(gen_cycle(4), rule, 10**5, 0))
    brute5 = Fraction(oracles.best_proper([[1, 2, 3, 4, 0]], 2), 5)
    brute4 = Fraction(oracles.best_proper([[1, 2, 3, 0]], 2), 4)
    c101, t101 = timed(lambda: search_rule(gen_cycle(101), rule, 10**5, 0))
    one_defect = check_rule(gen_cycle(101), make_coloring([1, 2] * 50 + [1]), rule)
    ok = (c5.certified and c5.violating_fraction == Fraction(2, 5) == brute5 and t5 < 1
          and c4.certified and c4.violating_fraction == 0 == brute4 and t4 < 1
          and one_defect.violating_fraction == Fraction(2, 101)
          and c101.violating_fraction <= Fraction(2, 101) and t101 < 10)
    report(1, "rotation gap", ok,
           f"C5 {c5.violating_fraction} ({t5:.2f}s), C4 {c4.violating_fraction} ({t4:.2f}s), "
           f"C101 {c101.violating_fraction} ({t101:.2f}s, {c101.method})")


def test_criterion_2_type_distinguishing():
    (d, tv1, tv2), t = timed(lambda: (
        weak_metric(gen_cycle(3), gen_cycle(4), 2),
        tv_distance(type_dist(gen_cycle(3), 1), type_dist(gen_cycle(4), 1)),
        tv_distance(type_dist(gen_cycle(3), 2), type_dist(gen_cycle(4), 2))))
    ok = isinstance(d, Fraction) and d == Fraction(1, 4) and tv1 == 0 and tv2 == 1 and t < 1
    report(2, "C3 vs C4 weak metric", ok, f"d = {d}, TV_1 = {tv1}, TV_2 = {tv2} ({t:.3f}s)")


def test_criterion_3_pseudometric_suite():
    rng = np.random.default_rng(2024)
    worst_slack, asym, self_nonzero = None, 0, 0
    for _ in range(20):
        m = int(rng.integers(1, 3))
        a, b, c = (random_graph(rng, 1, 8, m) for _ in range(3))
        pd = lambda x, y: partition_distance(x, y, 3, 2, mode="exhaustive", budget=3**8).pd  # noqa: E731
        ab, ba, bc, ac = pd(a, b), pd(b, a), pd(b, c), pd(a, c)
        asym += ab != ba
        self_nonzero += pd(a, a) != 0
        slack = ab + bc - ac
        worst_slack = slack if worst_slack is None else min(worst_slack, slack)
    ok = asym == 0 and self_nonzero == 0 and worst_slack >= -1e-9
    report(3, "pseudometric axioms", ok,
           f"20 triples; asymmetric {asym}, pd(g,g)!=0 {self_nonzero}, min slack {float(worst_slack):.4f}")


def test_criterion_4_covering_invariance():
    def run():
        A = global_k_type(gen_cycle(5), 2, 1, mode="exhaustive", budget=2**5)
        B = global_k_type(gen_cycle(10), 2, 1, mode="exhaustive", budget=2**10)
        return hausdorff(A, B).a_to_b
    d, t = timed(run)
    ok = abs(float(d)) <= 1e-12 and t < 30
    report(4, "covering invariance C5 -> C10", ok, f"one-sided = {d} ({t:.2f}s)")


def test_criterion_5_sampled_vs_exhaustive():
    rng = np.random.default_rng(55)
    worst = Fraction(0)
    for _ in range(10):
        g = random_graph(rng, 2, 8, int(rng.integers(1, 3)))
        exact = global_k_type(g, 2, 1, mode="exhaustive", budget=2**8)
        for seed in range(5):
            sampled = global_k_type(g, 2, 1, mode="sampled", budget=2000, seed=seed)
            worst = max(worst, hausdorff(sampled, exact).distance)
    ok = worst <= 0.05
    report(5, "sampled vs exhaustive clouds", ok, f"max Hausdorff over 50 runs = {float(worst):.4f}")


def test_criterion_6_marginal_consistency():
    rng = np.random.default_rng(66)
    bad = 0
    for _ in range(50):
        g = random_graph(rng, 1, 30, int(rng.integers(1, 4)))
        r = int(rng.integers(1, 5))
        bad += type_dist(g, r).truncate(r - 1) != type_dist(g, r - 1)
    report(6, "marginal consistency", bad == 0, f"50 instances, {bad} mismatches")


def test_criterion_7_greedy_ceiling():
    rng = np.random.default_rng(77)
    failures, slowest = 0, 0.0
    for i in range(20):
        m = 1 + i % 3
        g = random_graph(rng, 20, 200, m)
        rep, t = timed(lambda: search_rule(g, builtin_rule("proper_coloring", k=2 * m + 1),
                                           10**5, i))
        slowest = max(slowest, t)
        failures += not (rep.certified and rep.violations == 0 and t < 5)
    report(7, "proper (2m+1)-coloring", failures == 0,
           f"20 graphs, {failures} failures, slowest {slowest:.2f}s")


def test_criterion_8_height_chain():
    # hand enumeration for m = 1, r = 1: words e, a, A
    free = ball_code(gen_cycle(3), 0, 1)    # e | a | A
    invol = ball_code(gen_cycle(2), 0, 1)   # e | a,A
    fixed = ball_code(gen_cycle(1), 0, 1)   # e,a,A
    poset = height_poset(1, 1, [fixed, invol, free])
    heights = tuple(poset.height_of(c) for c in (free, invol, fixed))
    ok = (str(free), str(invol), str(fixed)) == ("e|a|A", "e|a,A", "e,a,A") and heights == (1, 2, 3)
    report(8, "height chain", ok, f"heights {heights}")


def test_criterion_9_repspectra():
    alpha = FiniteUnitaryRep((np.diag([1j, -1j]),))
    F = parse_words("a")
    cloud, t_cloud = timed(lambda: sample_K(alpha, F, 1, 500, 0))
    z = cloud.points[:, 0, 0, 0]
    ys = np.sort(z.imag)
    gap = max(ys[0] + 1, np.diff(ys).max(), 1 - ys[-1])
    on_segment = np.abs(z.real).max() < 1e-12
    self_score, t_self = timed(lambda: containment_score(alpha, alpha, F, 1, 500, 0).score)
    rng = np.random.default_rng(99)
    sums = []
    for d in (1, 2, 3):
        beta = random_rep(d, 1, rng)
        sums.append(timed(lambda: containment_score(alpha, alpha.direct_sum(beta), F, 1, 500, d).score))
    ok = (on_segment and gap <= 0.05 and t_cloud < 5 and self_score <= 1e-6 and t_self < 5
          and all(s <= 1e-6 and t < 5 for s, t in sums))
    report(9, "repspectra", ok,
           f"gap {gap:.4f} ({t_cloud:.2f}s), self {self_score:.1e} ({t_self:.2f}s), "
           f"sums {[f'{s:.1e}' for s, _ in sums]} (max {max(t for _, t in sums):.2f}s)")


def test_criterion_10_determinism(tmp_path, capsys):
    make_inputs(tmp_path)
    cmds = commands(tmp_path)
    differing = []
    for name in RANDOMIZED:
        outs = []
        for threads in ("1", "4", "1", "4"):
            assert main(cmds[name] + ["--threads", threads]) == 0
            outs.append(capsys.readouterr().out)
        if len(set(outs)) != 1:
            differing.append(name)
    report(10, "byte-identical across threads", not differing,
           f"{len(RANDOMIZED)} randomized commands, differing: {differing or 'none'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
