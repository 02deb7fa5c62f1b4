import numpy as np
import pytest
from hypothesis import given, strategies as st

from schreierstats.rules import RuleObjective, builtin_rule
from schreierstats.schreier import gen_cycle, make_coloring
from schreierstats.search import (
    ColoredIndex, LinearFunctionalObjective, ProfileObjective, StatTargetObjective,
    all_colorings, anneal, derive_seed, greedy, multi_start, parallel_map,
)
from schreierstats.stats import colored_type_dist, correlation_profile, type_stack
from schreierstats.words import enumerate_words
from conftest import graphs


def test_all_colorings_order_and_count():
    rows = np.vstack(list(all_colorings(3, 2)))
    assert rows.shape == (8, 3)
    assert rows[0].tolist() == [1, 1, 1] and rows[1].tolist() == [1, 1, 2]
    assert rows[-1].tolist() == [2, 2, 2]
    assert len({tuple(r) for r in np.vstack(list(all_colorings(4, 3)))}) == 81


def test_parallel_map_keeps_order():
    assert parallel_map(lambda x: x * x, list(range(20)), threads=4) == [x * x for x in range(20)]


def test_derived_seeds_are_stable():
    a = derive_seed(3, 1, 2).generate_state(2)
    assert (a == derive_seed(3, 1, 2).generate_state(2)).all()
    assert not (a == derive_seed(3, 2, 1).generate_state(2)).all()


def objectives(g, k):
    r = 1
    index = ColoredIndex(g, 2)
    ref = make_coloring((np.arange(g.n) % k) + 1, k)
    stack = type_stack(g, 2, ref)
    F = enumerate_words(g.m, 1)
    prof = correlation_profile(g, ref, F)
    return [
        RuleObjective(ColoredIndex(g, r, radii=[r]), builtin_rule("proper_coloring", k=k)),
        LinearFunctionalObjective(index, np.random.default_rng(0)),
        StatTargetObjective(index, stack),
        ProfileObjective(g, F, k, prof.counts, prof.denominator),
    ]


@given(graphs(max_n=6), st.integers(2, 3), st.data())
def test_delta_matches_recomputation(g, k, data):
    for obj in objectives(g, k):
        colors = np.array(data.draw(st.lists(st.integers(1, k), min_size=g.n, max_size=g.n)))
        base = obj.reset(colors)
        v = data.draw(st.integers(0, g.n - 1))
        c = data.draw(st.integers(1, k))
        d = obj.delta(v, c)
        moved = colors.copy()
        moved[v] = c
        obj.commit(v, c)
        assert obj.value == pytest.approx(base + d, abs=1e-9)
        assert obj.reset(moved) == pytest.approx(base + d, abs=1e-9)


def test_greedy_never_increases():
    g = gen_cycle(9)
    obj = RuleObjective(ColoredIndex(g, 1, radii=[1]), builtin_rule("proper_coloring", k=3))
    start = np.ones(9, dtype=np.int64)
    before = obj.reset(start)
    after = obj.reset(greedy(obj, 9, 3, start))
    assert after <= before and after == 0


def test_anneal_is_deterministic_and_counts_moves():
    g = gen_cycle(11)
    make = lambda: RuleObjective(ColoredIndex(g, 1, radii=[1]), builtin_rule("proper_coloring", k=2))  # noqa: E731
    runs = [anneal(make(), 11, 2, 2000, np.random.default_rng(4), np.ones(11, dtype=np.int64))
            for _ in range(2)]
    assert (runs[0].colors == runs[1].colors).all() and runs[0].moves == runs[1].moves
    assert runs[0].moves <= 2000
    assert runs[0].value == 2  # odd cycle: two endpoints of the one defect edge


def test_multi_start_independent_of_threads():
    g = gen_cycle(13)
    make = lambda: RuleObjective(ColoredIndex(g, 1, radii=[1]), builtin_rule("proper_coloring", k=2))  # noqa: E731
    a = multi_start(make, 13, 2, 4000, 9, 4, threads=1)
    b = multi_start(make, 13, 2, 4000, 9, 4, threads=4)
    assert (a.colors == b.colors).all() and a.value == b.value and a.moves == b.moves
    a = multi_start(make, 13, 2, 4000, 9, 4, lower_bound=2, threads=1)
    b = multi_start(make, 13, 2, 4000, 9, 4, lower_bound=2, threads=4)
    assert (a.colors == b.colors).all() and a.moves == b.moves
