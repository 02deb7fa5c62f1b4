import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from schreierstats.balls import (
    BallCode, ball_code, ball_table, colored_ball_code, height_poset, refines,
)
from schreierstats.errors import BadCode, ShapeMismatch
from schreierstats.schreier import evaluate, from_permutations, gen_cycle, make_coloring
from schreierstats.words import Word
from conftest import graphs
import oracles


def test_small_codes():
    assert str(ball_code(gen_cycle(3), 0, 1)) == "e|a|A"
    assert str(ball_code(gen_cycle(2), 0, 1)) == "e|a,A"
    assert str(ball_code(gen_cycle(1), 0, 1)) == "e,a,A"
    # C_3 closes up at radius 2, C_4 does not
    assert str(ball_code(gen_cycle(3), 0, 2)) == "e|a,AA|A,aa"
    assert str(ball_code(gen_cycle(4), 0, 2)) == "e|a|A|aa,AA"


def test_colored_code_on_c4():
    c = make_coloring([1, 2, 1, 2])
    assert str(colored_ball_code(gen_cycle(4), 0, 1, c)) == "e:1|a:2|A:2"
    assert str(colored_ball_code(gen_cycle(4), 1, 2, c)) == "e:2|a:1|A:1|aa,AA:2"


@given(graphs(max_n=6), st.integers(0, 3), st.data())
def test_matches_brute_force(g, r, data):
    x = data.draw(st.integers(0, g.n - 1))
    colors = data.draw(st.lists(st.integers(1, 3), min_size=g.n, max_size=g.n))
    perms = [p.tolist() for p in g.perms]
    labels, block_colors = oracles.ball(perms, x, r, [None] + colors and dict(enumerate(colors)))
    code = colored_ball_code(g, x, r, make_coloring(colors, 3))
    assert code.labels == labels and code.colors == block_colors


@given(graphs(), st.integers(1, 3))
def test_table_matches_pointwise(g, r):
    t = ball_table(g, r)
    for x in range(g.n):
        assert t.code(x) == ball_code(g, x, r)
        assert evaluate(g, Word(()), int(t.reps[x, 0])) == x


@given(graphs(), st.integers(1, 4), st.data())
def test_truncation_consistency(g, r, data):
    x = data.draw(st.integers(0, g.n - 1))
    code = ball_code(g, x, r)
    for r2 in range(r + 1):
        assert code.truncate(r2) == ball_code(g, x, r2)


@given(graphs(), st.integers(1, 3))
def test_root_move_closure(g, r):
    realized = {ball_code(g, x, r) for x in range(g.n)}
    for x in range(g.n):
        for c in range(2 * g.m):
            assert ball_code(g, evaluate(g, Word([c]), x), r) in realized


@pytest.mark.parametrize("n,r", [(5, 2), (7, 3), (9, 4)])
def test_long_cycles_are_transitive(n, r):
    g = gen_cycle(n)
    assert len({ball_code(g, x, r) for x in range(n)}) == 1


@given(graphs(max_n=5), st.integers(0, 3), st.data())
def test_serialization_roundtrip(g, r, data):
    x = data.draw(st.integers(0, g.n - 1))
    code = ball_code(g, x, r)
    assert BallCode.parse(str(code), m=g.m, r=r) == code
    c = make_coloring(data.draw(st.lists(st.integers(1, 3), min_size=g.n, max_size=g.n)), 3)
    cc = colored_ball_code(g, x, r, c)
    assert BallCode.parse(str(cc), m=g.m, r=r) == cc


def test_parse_rejects_bad_codes():
    with pytest.raises(BadCode):
        BallCode.parse("e|a")  # A missing
    with pytest.raises(BadCode):
        BallCode.parse("e|a|a,A")
    with pytest.raises(BadCode):
        BallCode.parse("e:1|a|A")
    with pytest.raises(BadCode):
        BallCode.parse("e,a|A")  # a ~ e forces A ~ e
    with pytest.raises(BadCode):
        BallCode.parse("e:x|a,A:1")


@given(st.lists(graphs(max_n=5, max_m=1), min_size=1, max_size=4), st.integers(1, 2))
def test_refines_is_partial_order(gs, r):
    codes = sorted({ball_code(g, x, r) for g in gs for x in range(g.n)}, key=BallCode.sort_key)
    for p in codes:
        assert refines(p, p)
    for p, q in itertools.product(codes, repeat=2):
        if p != q:
            assert not (refines(p, q) and refines(q, p))
    for p, q, s in itertools.product(codes, repeat=3):
        if refines(p, q) and refines(q, s):
            assert refines(p, s)


def test_height_chain():
    free, invol, fixed = (ball_code(gen_cycle(n), 0, 1) for n in (3, 2, 1))
    poset = height_poset(1, 1, [fixed, free, invol])
    assert [poset.height_of(c) for c in (free, invol, fixed)] == [1, 2, 3]
    assert poset.levels() == {1: [free], 2: [invol], 3: [fixed]}
    with pytest.raises(ShapeMismatch):
        height_poset(1, 2, [free])
