from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rwopaging.families import gen_I1_copy, gen_In
from rwopaging.graph import complete_graph, cycle_graph, is_walk, path_graph
from rwopaging.paging import FIFO, FWF, LFD, LRU, faults
from rwopaging.worstorder import (
    ENUMERATION_GUARD, InfeasibleMultisetError, RequestMultiset, SearchConfig, SizeGuardError,
    closed_form_worst, enumerate_reorderings, rwor_curve, worst_order_exact,
)


def check_result(g, m, policy, k, res):
    assert is_walk(g, res.witness)
    assert Counter(res.witness) == Counter(m.counts)
    assert faults(policy, res.witness, k) == res.max_faults


def test_multiset_parse_and_str():
    m = RequestMultiset.parse("1:4, 2:2,5")
    assert m.counts == {1: 4, 2: 2, 5: 1} and m.total == 7
    assert str(m) == "1:4,2:2,5:1"
    assert RequestMultiset.of((3, 1, 3)).counts == {1: 1, 3: 2}
    with pytest.raises(ValueError):
        RequestMultiset({1: -2})
    with pytest.raises(ValueError):
        SearchConfig(node_budget=0)


def test_In_examples():
    m = RequestMultiset.of(gen_In(3, 2)[0])
    assert m.counts == {1: 2, 2: 4, 3: 4, 4: 2}
    fifo = worst_order_exact(path_graph(4), m, FIFO, 3)
    lru = worst_order_exact(path_graph(4), m, LRU, 3)
    assert (fifo.max_faults, lru.max_faults) == (8, 6)
    assert fifo.exhausted and lru.exhausted
    check_result(path_graph(4), m, FIFO, 3, fifo)
    check_result(path_graph(4), m, LRU, 3, lru)


def test_I1_on_cycle():
    g = cycle_graph(5)
    m = RequestMultiset.of(gen_I1_copy(1))
    assert worst_order_exact(g, m, FIFO, 4, SearchConfig(start_page=1)).max_faults == 7
    assert worst_order_exact(g, m, LRU, 4, SearchConfig(start_page=1)).max_faults == 8
    free = worst_order_exact(g, m, LRU, 4)
    assert free.max_faults == 8
    assert faults(LRU, (2, 1, 5, 4, 3, 2, 1, 5, 1, 1), 4) == 8
    assert worst_order_exact(g, m, FIFO, 4).max_faults == 8


def test_empty_multiset():
    for pol in (LRU, FIFO, FWF, LFD):
        res = worst_order_exact(path_graph(3), RequestMultiset({}), pol, 2)
        assert res.max_faults == 0 and res.witness == () and res.exhausted


def test_infeasible():
    with pytest.raises(InfeasibleMultisetError):
        worst_order_exact(path_graph(3), RequestMultiset({1: 1, 3: 1}), LRU, 2)
    with pytest.raises(InfeasibleMultisetError):
        list(enumerate_reorderings(path_graph(3), RequestMultiset({1: 1, 3: 1})))
    with pytest.raises(InfeasibleMultisetError):
        worst_order_exact(path_graph(3), RequestMultiset({1: 1, 2: 1}), LRU, 2, SearchConfig(start_page=3))
    with pytest.raises(Exception):
        worst_order_exact(path_graph(3), RequestMultiset({1: 1, 9: 1}), LRU, 2)


def test_enumeration_small():
    assert set(enumerate_reorderings(path_graph(2), RequestMultiset({1: 1, 2: 1}))) == {(1, 2), (2, 1)}
    walks = list(enumerate_reorderings(cycle_graph(4), (2, 1, 2, 3, 4, 1)))
    assert walks == sorted(walks) and len(set(walks)) == len(walks)
    assert (2, 1, 2, 3, 4, 1) in walks
    assert all(is_walk(cycle_graph(4), w) for w in walks)


def test_enumeration_guard():
    with pytest.raises(SizeGuardError):
        list(enumerate_reorderings(path_graph(2), RequestMultiset({1: 7, 2: 6})))
    assert ENUMERATION_GUARD == 12


def test_budget_exhaustion_reports_best_found():
    m = RequestMultiset.of(gen_In(3, 2)[0])
    res = worst_order_exact(path_graph(4), m, FIFO, 3, SearchConfig(node_budget=40))
    assert not res.exhausted
    if res.max_faults >= 0:
        check_result(path_graph(4), m, FIFO, 3, res)
        assert res.max_faults <= 8


def test_parallel_width_matches_serial():
    m = RequestMultiset.of(gen_I1_copy(1))
    g = cycle_graph(5)
    for pol in (LRU, FIFO):
        a = worst_order_exact(g, m, pol, 4)
        b = worst_order_exact(g, m, pol, 4, SearchConfig(parallel_width=3))
        # node counts differ between separate memo tables
        assert (a.max_faults, a.witness, a.exhausted) == (b.max_faults, b.witness, b.exhausted)


walk_inputs = st.builds(
    lambda gk, start, moves: (gk, start, moves),
    st.sampled_from([("path", 4), ("cycle", 4), ("cycle", 5), ("complete", 4)]),
    st.integers(1, 4),
    st.lists(st.integers(0, 3), min_size=0, max_size=8),
)


def _graph(kind, n):
    return {"path": path_graph, "cycle": cycle_graph, "complete": complete_graph}[kind](n)


def _walk_from(g, start, moves):
    w = [start]
    for mv in moves:
        opts = (w[-1],) + g.neighbors(w[-1])
        w.append(opts[mv % len(opts)])
    return tuple(w)


@settings(max_examples=60, deadline=None)
@given(walk_inputs, st.integers(1, 3))
def test_search_equals_enumeration(inp, k):
    (kind, n), start, moves = inp
    g = _graph(kind, n)
    seq = _walk_from(g, start, moves)
    m = RequestMultiset.of(seq)
    walks = list(enumerate_reorderings(g, m))
    assert seq in walks
    for pol in (LRU, FIFO, FWF):
        res = worst_order_exact(g, m, pol, k)
        assert res.max_faults == max(faults(pol, w, k) for w in walks)
        # lexicographically smallest optimal ordering is returned
        assert res.witness == min(w for w in walks if faults(pol, w, k) == res.max_faults)
    lfd = worst_order_exact(g, m, LFD, k)
    assert lfd.max_faults == max(faults(LFD, w, k) for w in walks)


def test_closed_forms_match_search():
    for k in (2, 3):
        for n in (1, 2):
            seq, g = gen_In(k, n)
            m = RequestMultiset.of(seq)
            for pol in (FIFO, LRU, FWF):
                assert closed_form_worst("In", pol, k, n) == worst_order_exact(g, m, pol, k).max_faults
    assert closed_form_worst("Jr", LRU, 4, 2) is None


def test_rwor_curve_points():
    pts = rwor_curve("In", FIFO, LRU, 3, range(1, 5))
    assert [p.a_w for p in pts] == [4, 8, 12, 16]
    assert [p.b_w for p in pts] == [4, 6, 8, 10]
    assert pts[0].slope is None and all(p.slope == 2 for p in pts[1:])
    assert pts[3].ratio == Fraction(16, 10)
    searched = rwor_curve("In", FIFO, LRU, 2, range(1, 3), method="search")
    assert [(p.a_w, p.b_w) for p in searched] == [(3, 3), (6, 5)]
    fwf = rwor_curve("In", FWF, LRU, 3, range(1, 5))
    assert all(p.slope == 3 for p in fwf[1:])
    assert rwor_curve("In", FWF, FIFO, 3, range(4, 5))[0].ratio == Fraction(3, 2)


def test_rwor_curve_flags_budget():
    pts = rwor_curve("Jr", FIFO, LRU, 4, range(2, 3), sc=SearchConfig(node_budget=5))
    assert not pts[0].exhaustive
