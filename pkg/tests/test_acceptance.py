"""Acceptance criteria 1-13, one test each, at the stated tolerances.

Every test prints a single ``criterion N: PASS|FAIL ...`` line to the terminal
(capture is bypassed) and then asserts.
"""

import random
import time
from collections import Counter
from fractions import Fraction
from functools import lru_cache

import pytest

from rwopaging.families import gen_I1_copy, gen_In, gen_Jr, gen_ScriptIn
from rwopaging.graph import cycle_graph, is_walk, parse_graph_spec, path_graph
from rwopaging.harness import iter_walks, random_walk
from rwopaging.paging import (
    FIFO, FWF, LFD_MATCH_LRU, LRU, conservative_violation, faults, offline_optimum, simulate,
)
from rwopaging.walkstruct import (
    classify_turns, decompose_turns, fifo_blocks, find_overlap, lru_hits_closed_form, normalize,
    reorder_blocks,
)
from rwopaging.worstorder import (
    RequestMultiset, SearchConfig, enumerate_reorderings, rwor_curve, worst_order_exact,
)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok
    return emit


@lru_cache(maxsize=None)
def walk_multisets(spec, max_len):
    g = parse_graph_spec(spec)
    return sorted({tuple(sorted(Counter(w).items())) for w in iter_walks(g, max_len)})


@lru_cache(maxsize=None)
def exact_worst(spec, counts, policy, k):
    res = worst_order_exact(parse_graph_spec(spec), RequestMultiset(dict(counts)), policy, k)
    assert res.exhausted
    return res


def test_criterion_01_cycle_example(report):
    cases = [((2, 1, 2, 3, 4, 1), 5, 4), ((1, 2, 2, 3, 4, 1), 5, 5), ((1, 2, 3, 4, 1, 2), 6, 6)]
    got = []
    slowest = 0.0
    for seq, _, _ in cases:
        t0 = time.perf_counter()
        pair = (faults(LRU, seq, 3), faults(FIFO, seq, 3))
        slowest = max(slowest, time.perf_counter() - t0)
        got.append(pair)
    ok = got == [(l, f) for _, l, f in cases] and slowest < 1e-3
    ok &= all(is_walk(cycle_graph(4), s) for s, _, _ in cases)
    report(1, ok, f"LRU/FIFO = {got}, slowest {slowest * 1e6:.0f} us")
    assert ok


def test_criterion_02_fifo_In(report):
    rows, ok = [], True
    for k in (2, 3):
        for n in (1, 2):
            seq, g = gen_In(k, n)
            t0 = time.perf_counter()
            res = worst_order_exact(g, RequestMultiset.of(seq), FIFO, k)
            dt = time.perf_counter() - t0
            ok &= res.exhausted and res.max_faults == (k + 1) * n and dt < 120
            rows.append(f"k={k},n={n}:{res.max_faults}")
    sim_bad = [(k, n) for k in range(2, 7) for n in range(1, 11)
               if faults(FIFO, gen_In(k, n)[0], k) != (k + 1) * n]
    ok &= not sim_bad
    report(2, ok, f"worst {' '.join(rows)}; simulate mismatches {sim_bad}")
    assert ok


def test_criterion_03_lru_In(report):
    rows, ok = [], True
    for k in (2, 3):
        for n in (1, 2):
            seq, g = gen_In(k, n)
            res = worst_order_exact(g, RequestMultiset.of(seq), LRU, k)
            ok &= res.exhausted and res.max_faults == 2 * (n - 1) + k + 1
            rows.append(f"k={k},n={n}:{res.max_faults}")
    report(3, ok, " ".join(rows))
    assert ok


def test_criterion_04_fwf_In(report):
    t0 = time.perf_counter()
    bad = [(k, n) for k in range(2, 7) for n in range(1, 11)
           if faults(FWF, gen_In(k, n)[0], k) != 2 * k * n]
    dt = time.perf_counter() - t0
    ok = not bad and dt < 1
    report(4, ok, f"mismatches {bad}, {dt * 1000:.0f} ms")
    assert ok


def test_criterion_05_fault_2k(report):
    t0 = time.perf_counter()
    walks = worst = 0
    for k in (2, 3):
        for w in iter_walks(path_graph(k + 1), 10):
            walks += 1
            flags = simulate(FIFO, w, k).fault_flags
            for i in range(len(w) - 2 * k + 1):
                worst = max(worst, sum(flags[i:i + 2 * k]) - (k + 1))
    dt = time.perf_counter() - t0
    ok = worst <= 0 and dt < 60
    report(5, ok, f"{walks} walks, max window excess {worst}, {dt:.1f} s")
    assert ok


def test_criterion_06_lru_opt(report):
    t0 = time.perf_counter()
    cases = mismatches = 0
    first = None
    for n in (3, 4, 5):
        for w in iter_walks(path_graph(n), 9):
            for k in (2, 3):
                cases += 1
                trio = (faults(LRU, w, k), faults(LFD_MATCH_LRU, w, k), offline_optimum(w, k))
                if len(set(trio)) > 1:
                    mismatches += 1
                    first = first or (n, k, w, trio)
    dt = time.perf_counter() - t0
    ok = mismatches == 0 and dt < 300
    report(6, ok, f"{cases} (walk, k) cases, {mismatches} mismatches {first or ''}, {dt:.1f} s")
    assert ok


@pytest.mark.parametrize("spec", ["path:5", "cycle:5"])
def test_criterion_07_dominance(report, spec):
    t0 = time.perf_counter()
    bad = []
    ms = walk_multisets(spec, 9)
    for counts in ms:
        lru = exact_worst(spec, counts, "LRU", 3).max_faults
        fifo = exact_worst(spec, counts, "FIFO", 3).max_faults
        if lru > fifo:
            bad.append((counts, lru, fifo))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 600
    report(7, ok, f"{spec}: {len(ms)} multisets, {len(bad)} with LRU_W > FIFO_W, {dt:.1f} s")
    assert ok


def test_criterion_08_not_worst(report):
    g = cycle_graph(5)
    m = RequestMultiset.of(gen_I1_copy(1))
    t0 = time.perf_counter()
    walks = list(enumerate_reorderings(g, m, SearchConfig(start_page=1)))
    lru = [(faults(LRU, w, 4), w) for w in walks]
    fifo_max = max(faults(FIFO, w, 4) for w in walks)
    lru_min, lru_min_walk = min(lru)
    lru_max = max(f for f, _ in lru)
    free_lru = worst_order_exact(g, m, LRU, 4).max_faults
    free_fifo = worst_order_exact(g, m, FIFO, 4).max_faults
    dt = time.perf_counter() - t0
    ok = lru_min == 8 and fifo_max <= 7 and free_lru == 8 and free_fifo == 8 and dt < 60
    report(8, ok, f"{len(walks)} start-1 reorderings: LRU min {lru_min} (e.g. {lru_min_walk}), "
                  f"LRU max {lru_max}, FIFO max {fifo_max}; unconstrained LRU {free_lru}, FIFO {free_fifo}")
    assert ok


def test_criterion_09_incomparability(report):
    k = 4
    parts, ok = [], True
    for n in (1, 2):
        seq, g = gen_ScriptIn(n)
        m = RequestMultiset.of(seq)
        lru = worst_order_exact(g, m, LRU, k)
        fifo = worst_order_exact(g, m, FIFO, k)
        assert lru.exhausted and fifo.exhausted
        ok &= lru.max_faults >= 9 * n and fifo.max_faults <= 8 * n
        parts.append(f"ScriptI_{n}: LRU_W={lru.max_faults} (>= {9 * n}) "
                     f"FIFO_W={fifo.max_faults} (<= {8 * n}; witness {list(fifo.witness)})")
    for r in (2, 3, 4):
        seq, g = gen_Jr(r)
        m = RequestMultiset.of(seq)
        lru = worst_order_exact(g, m, LRU, k).max_faults
        fifo = worst_order_exact(g, m, FIFO, k).max_faults
        bound = Fraction(5, 2) * lru - 3
        ok &= fifo >= bound
        parts.append(f"J_{r}: FIFO_W={fifo} LRU_W={lru} bound {bound}")
    report(9, ok, "; ".join(parts))
    assert ok


def test_criterion_10_normalization(report):
    spec, k = "cycle:5", 3
    g = cycle_graph(5)
    failures, checked = [], 0
    for counts in walk_multisets(spec, 9):
        res = exact_worst(spec, counts, "LRU", k)
        out = normalize(res.witness, g, k)[-1][1]
        t = decompose_turns(out, g)
        checked += 1
        problems = []
        if not is_walk(g, out):
            problems.append("a")
        if "trivial" in classify_turns(t, k) or find_overlap(out, g) is not None:
            problems.append("b")
        if worst_order_exact(g, out, LRU, k).max_faults != faults(LRU, out, k):
            problems.append("c")
        if simulate(LRU, out, k).hits != lru_hits_closed_form(t, k):
            problems.append("d")
        if problems:
            failures.append((res.witness, out, problems))
    ok = not failures
    report(10, ok, f"{checked} worst orderings normalized, failures {failures[:3]}")
    assert ok


def test_criterion_11_blocks(report):
    rng = random.Random(11)
    g = path_graph(6)
    t0 = time.perf_counter()
    bad, blocks = [], 0
    for _ in range(200):
        w = random_walk(g, rng.randint(8, 40), rng)
        for k in (2, 3):
            d = fifo_blocks(w, g, k)
            m = len(d.blocks)
            blocks += m
            out = reorder_blocks(d, g, k)
            if (faults(FIFO, d.concatenated(), k) != m * (k + 1) or not is_walk(g, out)
                    or faults(LRU, out, k) < 2 * m):
                bad.append((w, k))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 60
    report(11, ok, f"200 walks x k in (2,3), {blocks} blocks, failures {bad[:2]}, {dt:.1f} s")
    assert ok


def test_criterion_12_ratio_trends(report):
    k = 3
    t0 = time.perf_counter()
    fifo_lru = rwor_curve("In", FIFO, LRU, k, range(1, 11))
    fwf_lru = rwor_curve("In", FWF, LRU, k, range(1, 11))
    fwf_fifo = rwor_curve("In", FWF, FIFO, k, range(1, 11))
    dt = time.perf_counter() - t0
    s = fifo_lru[-1].slope
    a = abs(s - Fraction(k + 1, 2)) <= Fraction(5, 100) * Fraction(k + 1, 2)
    # the FWF/LRU worst-order ratio is the slope of FWF_W against LRU_W, defined from n=2
    b = all(p.slope == k for p in fwf_lru[1:])
    r = fwf_fifo[-1].ratio
    c = abs(r - Fraction(2 * k, k + 1)) <= Fraction(5, 100) * Fraction(2 * k, k + 1)
    ok = a and b and c and dt < 1
    report(12, ok, f"FIFO/LRU slope {s}; FWF/LRU slopes {[str(p.slope) for p in fwf_lru[1:]]} "
                   f"(raw ratio at n=10 {fwf_lru[-1].ratio}); FWF/FIFO ratio {r}; {dt * 1000:.0f} ms")
    assert ok


def test_criterion_13_conservative(report):
    traces = 0
    violations = []
    for k in (2, 3):
        for w in iter_walks(path_graph(k + 1), 10):
            for pol in (LRU, FIFO):
                traces += 1
                v = conservative_violation(w, simulate(pol, w, k), k)
                if v is not None:
                    violations.append((str(pol), k, w, v))
    seq, _ = gen_In(2, 3)
    fwf = conservative_violation(seq, simulate(FWF, seq, 2), 2)
    ok = not violations and fwf is not None
    report(13, ok, f"{traces} LRU/FIFO traces, {len(violations)} violations; FWF window on I_3 {fwf}")
    assert ok
