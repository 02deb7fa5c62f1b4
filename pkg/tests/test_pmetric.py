from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schreierstats.errors import BadParameter, BudgetExceeded, ShapeMismatch
from schreierstats.pmetric import global_k_type, hausdorff, partition_distance, simulate_profile
from schreierstats.schreier import disjoint_union, gen_cycle, gen_random_action, make_coloring
from schreierstats.search import ColoredIndex
from schreierstats.stats import correlation_profile, stack_distance, type_stack
from schreierstats.words import parse_words
from conftest import graphs
import oracles

small = graphs(max_n=4, max_m=1)


def test_c3_c4_frozen():
    # brute-force oracle value: pd_2 = 7/12, pd = pd_2 / 4
    rep = partition_distance(gen_cycle(3), gen_cycle(4), 2, 2)
    assert rep.pd_k[2] == Fraction(7, 12) and rep.pd == Fraction(7, 48)
    assert rep.tail_bound == Fraction(1, 4)


@settings(max_examples=15)
@given(small, small)
def test_pd_matches_brute_force(g1, g2):
    p1, p2 = ([p.tolist() for p in g.perms] for g in (g1, g2))
    assert partition_distance(g1, g2, 2, 1).pd == oracles.pd(p1, p2, 2, 1)


def test_cloud_points_match_their_witnesses():
    g = gen_random_action(6, 2, 0)
    A = global_k_type(g, 2, 2)
    for i in range(0, len(A), 7):
        assert A.stack(i) == type_stack(g, 2, A.witness(i))
    assert len(global_k_type(gen_cycle(3), 2, 1)) == 4


def test_covering_c5_into_c10():
    A, B = global_k_type(gen_cycle(5), 2, 1), global_k_type(gen_cycle(10), 2, 1, budget=2**10)
    h = hausdorff(A, B)
    assert h.a_to_b == 0
    assert h.b_to_a == Fraction(1, 5)  # brute-force oracle
    assert h.distance == Fraction(1, 5)


@pytest.mark.parametrize("half,r", [(3, 1), (4, 1), (6, 2)])
def test_covering_invariance(half, r):
    A = global_k_type(gen_cycle(half), 2, r)
    B = global_k_type(gen_cycle(2 * half), 2, r, budget=2 ** (2 * half))
    assert hausdorff(A, B).a_to_b == 0


@settings(max_examples=8)
@given(graphs(max_n=5, max_m=1), graphs(max_n=5, max_m=1), graphs(max_n=5, max_m=1))
def test_pseudometric_axioms(a, b, c):
    pd = lambda x, y: partition_distance(x, y, 3, 2, budget=3**5).pd  # noqa: E731
    ab, ba = pd(a, b), pd(b, a)
    assert ab == ba
    assert pd(a, a) == 0
    assert pd(a, c) <= ab + pd(b, c)


def test_monotone_refinement():
    g1, g2 = gen_random_action(6, 1, 1), gen_random_action(7, 1, 2)
    full_a, full_b = global_k_type(g1, 2, 2), global_k_type(g2, 2, 2)
    rng = np.random.default_rng(0)
    part_a = global_k_type(g1, 2, 1 + 1, mode="sampled", budget=20, seed=1)
    part_b = global_k_type(g2, 2, 2, mode="sampled", budget=20, seed=2)
    more_b = part_b.extended(rng.integers(1, 3, size=(30, 7)), ColoredIndex(g2, 2))
    more_a = part_a.extended(rng.integers(1, 3, size=(30, 6)), ColoredIndex(g1, 2))
    assert hausdorff(part_a, more_b).a_to_b <= hausdorff(part_a, part_b).a_to_b
    assert hausdorff(more_a, part_b).a_to_b >= hausdorff(part_a, part_b).a_to_b
    assert hausdorff(full_a, full_b).a_to_b <= hausdorff(full_a, part_b).a_to_b


def test_sampled_is_deterministic_and_thread_independent():
    g = gen_random_action(14, 2, 3)
    a = global_k_type(g, 3, 2, mode="sampled", budget=3000, seed=5, threads=1)
    b = global_k_type(g, 3, 2, mode="sampled", budget=3000, seed=5, threads=4)
    assert (a.colorings == b.colorings).all() and a.provenance == b.provenance


def test_sampled_points_lie_in_exhaustive_cloud():
    g = gen_random_action(7, 1, 4)
    exact = global_k_type(g, 2, 2)
    sampled = global_k_type(g, 2, 2, mode="sampled", budget=500, seed=0)
    assert hausdorff(sampled, exact).a_to_b == 0


def test_sampled_pd_is_symmetric():
    g1, g2 = gen_cycle(7), gen_cycle(9)
    a = partition_distance(g1, g2, 2, 1, mode="sampled", budget=2000, seed=3)
    b = partition_distance(g2, g1, 2, 1, mode="sampled", budget=2000, seed=3)
    assert a.pd == b.pd
    assert "bias" in a.provenance


def test_errors_and_edge_cases():
    g = gen_cycle(12)
    with pytest.raises(BudgetExceeded):
        global_k_type(g, 3, 1, budget=100)
    with pytest.raises(BadParameter):
        partition_distance(g, g, 1, 1)
    with pytest.raises(BadParameter):
        global_k_type(g, 2, 1, mode="guess", budget=10**6)
    with pytest.raises(ShapeMismatch):
        partition_distance(g, gen_random_action(4, 2, 0), 2, 1)
    assert len(global_k_type(g, 1, 2)) == 1


def test_pd_report_json():
    rep = partition_distance(gen_cycle(3), gen_cycle(4), 2, 1, include_pd1=True)
    out = rep.to_json()
    assert out["pd_exact"] == str(rep.pd)
    assert set(out["witnesses"]["2"]) == {"a_to_b", "b_to_a", "cloud_sizes"}
    assert out["pd_1"] == float(stack_distance(type_stack(gen_cycle(3), 1), type_stack(gen_cycle(4), 1)))


def test_simulate_profile_c5_exhaustive():
    target = correlation_profile(gen_cycle(4), make_coloring([1, 2, 1, 2]), parse_words("a"))
    res = simulate_profile(gen_cycle(5), target, budget=100, seed=0)
    # brute-force oracle: an odd cycle keeps one monochromatic edge
    assert res.certified and res.method == "exhaustive" and res.deviation == Fraction(1, 5)


def test_simulate_profile_heuristic():
    target = correlation_profile(gen_cycle(4), make_coloring([1, 2, 1, 2]), parse_words("a"))
    res = simulate_profile(gen_cycle(30), target, budget=20_000, seed=1)
    assert res.deviation == 0 and res.certified
    # with the e-block the color balance pins domain walls; single flips leave at most one pair
    target = correlation_profile(gen_cycle(4), make_coloring([1, 2, 1, 2]), parse_words("e,a"))
    for seed in range(3):
        res = simulate_profile(gen_cycle(30), target, budget=20_000, seed=seed)
        assert res.deviation <= Fraction(1, 30)
        assert res.certified == (res.deviation == 0)
    stack = type_stack(gen_cycle(6), 2, make_coloring([1, 2] * 3))
    res = simulate_profile(disjoint_union(gen_cycle(8), gen_cycle(10)), stack, budget=20_000, seed=2)
    assert res.deviation == 0 and res.method != "exhaustive"


def test_simulate_stack_exhaustive_matches_brute_force():
    stack = type_stack(gen_cycle(4), 1, make_coloring([1, 2, 1, 2]))
    res = simulate_profile(gen_cycle(5), stack, budget=10**3, seed=0)
    perms = [[1, 2, 3, 4, 0]]
    target = oracles.stack([[1, 2, 3, 0]], 1, {0: 1, 1: 2, 2: 1, 3: 2})
    best = min(oracles.stack_dist(oracles.stack(perms, 1, dict(enumerate(c))), target)
               for c in __import__("itertools").product((1, 2), repeat=5))
    assert res.deviation == best
