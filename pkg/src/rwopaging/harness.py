"""Executable checks, one per quantitative claim, with CSV/JSON reporting.

Each check returns a :class:`CheckReport`. A check never passes on the back of
a search that ran out of budget; such results are reported as ``skipped``.
"""

from __future__ import annotations

import csv
import io
import json
import random
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Optional

from . import families
from .graph import AccessGraph, cycle_graph, is_walk, parse_graph_spec, path_graph
from .paging import (
    FIFO, FWF, LFD_MATCH_LRU, LRU, conservative_violation, faults, offline_optimum, simulate,
)
from .walkstruct import (
    classify_turns, decompose_turns, fifo_blocks, find_overlap, lru_hits_closed_form,
    normalize, reorder_blocks,
)
from .worstorder import (
    RequestMultiset, SearchConfig, enumerate_reorderings, rwor_curve, worst_order_exact,
)

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"
SCALES = ("small", "default")
CSV_COLUMNS = ("check_id", "param_string", "status", "observed", "expected", "millis")


class UnknownCheck(KeyError):
    pass


@dataclass
class CheckReport:
    id: str
    params: dict
    status: str
    observed: object
    expected: object
    millis: float = 0.0
    counterexample: Optional[dict] = None
    claim: str = ""

    @property
    def param_string(self) -> str:
        return ";".join(f"{k}={v}" for k, v in self.params.items())

    def csv_row(self) -> list:
        return [self.id, self.param_string, self.status,
                _fmt(self.observed), _fmt(self.expected), f"{self.millis:.1f}"]

    def to_dict(self) -> dict:
        return json.loads(json.dumps(asdict(self), default=_json_default))


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (set, frozenset, tuple)):
        return list(x)
    return str(x)


def _fmt(x) -> str:
    return x if isinstance(x, str) else json.dumps(x, default=_json_default, separators=(",", ":"))


@dataclass
class _Outcome:
    ok: bool
    observed: object
    expected: object
    counterexample: Optional[dict] = None
    exhaustive: bool = True


@dataclass(frozen=True)
class Check:
    id: str
    claim: str
    func: Callable[..., _Outcome]
    defaults: dict = field(default_factory=dict)
    small: dict = field(default_factory=dict)


# walk and multiset helpers ---------------------------------------------------

def iter_walks(g: AccessGraph, max_len: int) -> Iterator[tuple[int, ...]]:
    """Every walk on ``g`` with 1..max_len requests (repeats allowed)."""
    walk: list[int] = []

    def rec():
        yield tuple(walk)
        if len(walk) == max_len:
            return
        cur = walk[-1]
        for nxt in (cur,) + g.neighbors(cur):
            walk.append(nxt)
            yield from rec()
            walk.pop()

    for s in g.vertices:
        walk.append(s)
        yield from rec()
        walk.pop()


@lru_cache(maxsize=None)
def _walk_multisets(graph_spec: str, max_len: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    g = parse_graph_spec(graph_spec)
    found = {tuple(sorted(Counter(w).items())) for w in iter_walks(g, max_len)}
    return tuple(sorted(found, key=lambda m: (sum(c for _, c in m), m)))


@lru_cache(maxsize=None)
def _worst(graph_spec: str, counts: tuple, policy: str, k: int, start: Optional[int] = None):
    g = parse_graph_spec(graph_spec)
    return worst_order_exact(g, RequestMultiset(dict(counts)), policy, k, SearchConfig(start_page=start))


# checks ----------------------------------------------------------------------

def _check_cycle_example() -> _Outcome:
    cases = [
        ((2, 1, 2, 3, 4, 1), 5, 4),
        ((1, 2, 2, 3, 4, 1), 5, 5),
        ((1, 2, 3, 4, 1, 2), 6, 6),
    ]
    observed, expected = [], []
    for seq, lru, fifo in cases:
        observed.append([faults(LRU, seq, 3), faults(FIFO, seq, 3)])
        expected.append([lru, fifo])
    ok = observed == expected and all(is_walk(cycle_graph(4), s) for s, _, _ in cases)
    cex = None if ok else {"sequences": [c[0] for c in cases], "observed": observed}
    return _Outcome(ok, observed, expected, cex)


def _check_fifo_In(k: Optional[int] = None, n: Optional[int] = None,
                   search_k=(2, 3), search_n=(1, 2), sim_k=range(2, 7), sim_n=range(1, 11)) -> _Outcome:
    if k is not None:
        search_k = sim_k = (k,)
    if n is not None:
        search_n = sim_n = (n,)
    return _family_check(FIFO, lambda k_, n_: (k_ + 1) * n_, search_k, search_n, sim_k, sim_n)


def _check_lru_In(k: Optional[int] = None, n: Optional[int] = None,
                  search_k=(2, 3), search_n=(1, 2)) -> _Outcome:
    if k is not None:
        search_k = (k,)
    if n is not None:
        search_n = (n,)
    return _family_check(LRU, lambda k_, n_: 2 * (n_ - 1) + k_ + 1, search_k, search_n, (), ())


def _family_check(policy, formula, search_k, search_n, sim_k, sim_n) -> _Outcome:
    observed, expected = {}, {}
    exhaustive = True
    for k in search_k:
        for n in search_n:
            seq, g = families.gen_In(k, n)
            res = worst_order_exact(g, RequestMultiset.of(seq), policy, k)
            exhaustive &= res.exhausted
            key = f"worst(k={k},n={n})"
            observed[key], expected[key] = res.max_faults, formula(k, n)
            if res.max_faults != formula(k, n):
                return _Outcome(False, observed[key], expected[key],
                                {"k": k, "n": n, "witness": res.witness, "faults": res.max_faults})
    for k in sim_k:
        for n in sim_n:
            seq, _ = families.gen_In(k, n)
            f = faults(policy, seq, k)
            if f != formula(k, n):
                return _Outcome(False, f, formula(k, n),
                                {"k": k, "n": n, "sequence": seq, "faults": f})
    if len(observed) == 1:
        (key,) = observed
        return _Outcome(True, observed[key], expected[key], exhaustive=exhaustive)
    return _Outcome(True, observed, expected, exhaustive=exhaustive)


def _check_fwf_In(ks=range(2, 7), ns=range(1, 11)) -> _Outcome:
    for k in ks:
        for n in ns:
            seq, _ = families.gen_In(k, n)
            trace = simulate(FWF, seq, k)
            if trace.total_faults != 2 * k * n or trace.hits:
                return _Outcome(False, trace.total_faults, 2 * k * n,
                                {"k": k, "n": n, "sequence": seq, "faults": trace.total_faults})
    return _Outcome(True, "FWF faults on every request", "2kn")


def _check_fault_2k(ks=(2, 3), max_len=10) -> _Outcome:
    worst = 0
    for k in ks:
        g = path_graph(k + 1)
        for w in iter_walks(g, max_len):
            flags = simulate(FIFO, w, k).fault_flags
            for i in range(len(w) - 2 * k + 1):
                c = sum(flags[i:i + 2 * k])
                worst = max(worst, c - (k + 1))
                if c > k + 1:
                    return _Outcome(False, c, k + 1, {"k": k, "walk": w, "window_start": i})
    return _Outcome(True, "max excess 0" if worst <= 0 else worst, "<= k+1 faults per 2k window")


def _check_conservative(ks=(2, 3), max_len=10) -> _Outcome:
    checked = 0
    for k in ks:
        g = path_graph(k + 1)
        for w in iter_walks(g, max_len):
            for pol in (LRU, FIFO):
                v = conservative_violation(w, simulate(pol, w, k), k)
                checked += 1
                if v is not None:
                    return _Outcome(False, f"{pol} violation", "none",
                                    {"policy": str(pol), "k": k, "walk": w, "window": v})
    seq, _ = families.gen_In(2, 3)
    v = conservative_violation(seq, simulate(FWF, seq, 2), 2)
    if v is None:
        return _Outcome(False, "no FWF violation", "FWF violation",
                        {"policy": "FWF", "sequence": seq})
    return _Outcome(True, {"lru_fifo_traces": checked, "violations": 0, "fwf_window": list(v)},
                    {"violations": 0, "fwf_window": "some"})


def _check_lru_opt(Ns=(3, 4, 5), ks=(2, 3), L=9, N=None) -> _Outcome:
    if N is not None:
        Ns = (N,)
    mismatches = 0
    count = 0
    for n_ in Ns:
        g = path_graph(n_)
        for w in iter_walks(g, L):
            for k in ks:
                count += 1
                lru = faults(LRU, w, k)
                lfd = faults(LFD_MATCH_LRU, w, k)
                opt = offline_optimum(w, k)
                if not lru == lfd == opt:
                    return _Outcome(False, {"mismatches": 1}, {"mismatches": 0},
                                    {"N": n_, "k": k, "walk": w, "lru": lru, "lfd": lfd, "opt": opt})
    return _Outcome(True, {"mismatches": mismatches, "cases": count}, {"mismatches": 0})


def _dominance(graph_spec: str, k: int, L: int) -> _Outcome:
    total = 0
    exhaustive = True
    for counts in _walk_multisets(graph_spec, L):
        lru = _worst(graph_spec, counts, "LRU", k)
        fifo = _worst(graph_spec, counts, "FIFO", k)
        exhaustive &= lru.exhausted and fifo.exhausted
        total += 1
        if lru.max_faults > fifo.max_faults:
            return _Outcome(False, {"lru_w": lru.max_faults, "fifo_w": fifo.max_faults},
                            "lru_w <= fifo_w",
                            {"multiset": dict(counts), "lru_witness": lru.witness,
                             "lru_w": lru.max_faults, "fifo_w": fifo.max_faults})
    return _Outcome(True, {"multisets": total, "violations": 0}, "lru_w <= fifo_w", exhaustive=exhaustive)


def _check_paths_leq(N=5, k=3, L=9) -> _Outcome:
    return _dominance(f"path:{N}", k, L)


def _check_cycles_leq(N=5, k=3, L=9) -> _Outcome:
    return _dominance(f"cycle:{N}", k, L)


def _normalized_cases(N: int, k: int, L: int):
    spec = f"cycle:{N}"
    g = cycle_graph(N)
    for counts in _walk_multisets(spec, L):
        res = _worst(spec, counts, "LRU", k)
        yield counts, res, g, normalize(res.witness, g, k)[-1][1]


def _check_normalize(N=5, k=3, L=9) -> _Outcome:
    total = 0
    exhaustive = True
    for counts, res, g, out in _normalized_cases(N, k, L):
        exhaustive &= res.exhausted
        total += 1
        labels = classify_turns(decompose_turns(out, g), k)
        again = worst_order_exact(g, RequestMultiset.of(out), LRU, k)
        exhaustive &= again.exhausted
        problems = []
        if not is_walk(g, out):
            problems.append("not a walk")
        if "trivial" in labels:
            problems.append("trivial turn left")
        if find_overlap(out, g) is not None:
            problems.append("overlap left")
        if again.max_faults != faults(LRU, out, k):
            problems.append("not a worst ordering of its multiset")
        if problems:
            return _Outcome(False, problems, "normal form and worst ordering",
                            {"input": res.witness, "output": out, "labels": labels,
                             "lru": faults(LRU, out, k), "lru_w": again.max_faults})
    return _Outcome(True, {"worst_orderings": total, "failures": 0}, {"failures": 0},
                    exhaustive=exhaustive)


def _check_extreme_hits(N=5, k=3, L=9) -> _Outcome:
    total = 0
    for counts, res, g, out in _normalized_cases(N, k, L):
        total += 1
        t = decompose_turns(out, g)
        hits = simulate(LRU, out, k).hits
        formula = lru_hits_closed_form(t, k)
        if hits != formula:
            return _Outcome(False, hits, formula, {"sequence": out, "z": t.z, "hits": hits})
    return _Outcome(True, {"sequences": total, "mismatches": 0}, "hits = (z-1)(k-1)")


def random_walk(g: AccessGraph, length: int, rng: random.Random) -> tuple[int, ...]:
    w = [rng.choice(list(g.vertices))]
    while len(w) < length:
        cur = w[-1]
        w.append(rng.choice((cur,) + g.neighbors(cur)))
    return tuple(w)


def _check_block_reorder(N=6, ks=(2, 3), walks=200, seed=2024, min_len=8, max_len=40) -> _Outcome:
    rng = random.Random(seed)
    g = path_graph(N)
    blocks_seen = 0
    for _ in range(walks):
        w = random_walk(g, rng.randint(min_len, max_len), rng)
        for k in ks:
            d = fifo_blocks(w, g, k)
            m = len(d.blocks)
            blocks_seen += m
            joined = d.concatenated()
            if joined + d.suffix != w or faults(FIFO, joined, k) != m * (k + 1):
                return _Outcome(False, faults(FIFO, joined, k), m * (k + 1),
                                {"walk": w, "k": k, "blocks": d.blocks})
            out = reorder_blocks(d, g, k)
            lru = faults(LRU, out, k)
            if not is_walk(g, out) or lru < 2 * m or sorted(out) != sorted(joined):
                return _Outcome(False, lru, f">= {2 * m}",
                                {"walk": w, "k": k, "reordered": out, "lru": lru, "m": m})
    return _Outcome(True, {"walks": walks, "blocks": blocks_seen}, "FIFO=m(k+1), LRU>=2m")


def _check_ratio_paths(k=3, n_max=10, tol=0.05) -> _Outcome:
    pts = rwor_curve("In", FIFO, LRU, k, range(1, n_max + 1))
    target = Fraction(k + 1, 2)
    slope = pts[-1].slope
    ok = slope is not None and abs(slope - target) <= tol * target
    return _Outcome(ok, float(slope), float(target),
                    None if ok else {"points": [p.as_row() for p in pts]})


def _check_fwf_lru(k=3, n_max=10) -> _Outcome:
    pts = rwor_curve("In", FWF, LRU, k, range(1, n_max + 1))
    slopes = [p.slope for p in pts[1:]]
    ok = all(s == k for s in slopes)
    return _Outcome(ok, [str(s) for s in slopes], k,
                    None if ok else {"points": [p.as_row() for p in pts]})


def _check_fwf_fifo(k=3, n_max=10, tol=0.05) -> _Outcome:
    pts = rwor_curve("In", FWF, FIFO, k, range(1, n_max + 1))
    target = Fraction(2 * k, k + 1)
    ratio = pts[-1].ratio
    ok = abs(ratio - target) <= tol * target
    return _Outcome(ok, float(ratio), float(target),
                    None if ok else {"points": [p.as_row() for p in pts]})


def _check_not_worst() -> _Outcome:
    seq = families.gen_I1_copy(1)
    g = cycle_graph(5)
    m = RequestMultiset.of(seq)
    from_one = list(enumerate_reorderings(g, m, SearchConfig(start_page=1)))
    lru = [(faults(LRU, w, 4), w) for w in from_one]
    fifo = [(faults(FIFO, w, 4), w) for w in from_one]
    lru_min, lru_min_w = min(lru)
    lru_max = max(f for f, _ in lru)
    fifo_max, fifo_max_w = max(fifo)
    free_lru = worst_order_exact(g, m, LRU, 4)
    free_fifo = worst_order_exact(g, m, FIFO, 4)
    observed = {"lru_min_from_1": lru_min, "lru_max_from_1": lru_max, "fifo_max_from_1": fifo_max,
                "lru_w": free_lru.max_faults, "fifo_w": free_fifo.max_faults,
                "reorderings_from_1": len(from_one)}
    expected = {"lru_min_from_1": ">= 8", "fifo_max_from_1": "<= 7", "lru_w": 8, "fifo_w": 8}
    problems = {}
    if lru_min < 8:
        problems["lru_below_8"] = {"walk": lru_min_w, "faults": lru_min}
    if fifo_max > 7:
        problems["fifo_above_7"] = {"walk": fifo_max_w, "faults": fifo_max}
    if free_lru.max_faults != 8 or free_fifo.max_faults != 8:
        problems["unconstrained"] = {"lru": free_lru.witness, "fifo": free_fifo.witness}
    return _Outcome(not problems, observed, expected, problems or None)


def _check_incomparability(ns=(1, 2), rs=(2, 3, 4), k=4) -> _Outcome:
    observed: dict = {}
    problems: dict = {}
    exhaustive = True
    for n in ns:
        seq, g = families.gen_ScriptIn(n)
        m = RequestMultiset.of(seq)
        lru = worst_order_exact(g, m, LRU, k)
        fifo = worst_order_exact(g, m, FIFO, k)
        exhaustive &= lru.exhausted and fifo.exhausted
        observed[f"ScriptI_{n}"] = {"lru_w": lru.max_faults, "fifo_w": fifo.max_faults}
        if lru.max_faults < 9 * n:
            problems[f"lru_ScriptI_{n}"] = {"witness": lru.witness, "lru_w": lru.max_faults, "bound": 9 * n}
        if fifo.max_faults > 8 * n:
            problems[f"fifo_ScriptI_{n}"] = {"witness": fifo.witness, "fifo_w": fifo.max_faults,
                                             "bound": 8 * n}
    for r in rs:
        seq, g = families.gen_Jr(r)
        m = RequestMultiset.of(seq)
        lru = worst_order_exact(g, m, LRU, k)
        fifo = worst_order_exact(g, m, FIFO, k)
        exhaustive &= lru.exhausted and fifo.exhausted
        bound = Fraction(k + 1, 2) * lru.max_faults - (k - 1)
        observed[f"J_{r}"] = {"lru_w": lru.max_faults, "fifo_w": fifo.max_faults, "bound": str(bound)}
        if fifo.max_faults < bound:
            problems[f"J_{r}"] = {"fifo_witness": fifo.witness, "fifo_w": fifo.max_faults,
                                  "lru_w": lru.max_faults, "bound": str(bound)}
    expected = {"ScriptI_n": "lru_w >= 9n and fifo_w <= 8n", "J_r": "fifo_w >= (5/2) lru_w - 3"}
    return _Outcome(not problems, observed, expected, problems or None, exhaustive)


CHECKS: dict[str, Check] = {c.id: c for c in [
    Check("cycle-example", "worked LRU/FIFO example on C_4 with k=3", _check_cycle_example),
    Check("lru-opt", "LRU is optimal on path access graphs", _check_lru_opt,
          small={"Ns": (3, 4), "L": 7}),
    Check("paths-leq", "LRU_W <= FIFO_W on paths", _check_paths_leq, small={"L": 7}),
    Check("cycles-leq", "LRU_W <= FIFO_W on cycles", _check_cycles_leq, small={"L": 7}),
    Check("normalize-preserves-worst", "cycle reductions keep a worst ordering",
          _check_normalize, small={"L": 7}),
    Check("extreme-hits", "LRU has (z-1)(k-1) hits on normalized cycle walks",
          _check_extreme_hits, small={"L": 7}),
    Check("fault-2k", "FIFO faults at most k+1 times in 2k consecutive requests on P_{k+1}",
          _check_fault_2k, small={"max_len": 8}),
    Check("fifo-In", "FIFO_W(I_n) = (k+1)n", _check_fifo_In,
          small={"search_k": (2,), "sim_k": range(2, 4), "sim_n": range(1, 6)}),
    Check("lru-In", "LRU_W(I_n) = 2(n-1)+k+1", _check_lru_In, small={"search_k": (2,)}),
    Check("fwf-In", "FWF(I_n) = 2kn", _check_fwf_In, small={"ks": range(2, 4), "ns": range(1, 6)}),
    Check("block-reorder", "FIFO block reversal gives LRU >= 2 faults per block",
          _check_block_reorder, small={"walks": 40}),
    Check("ratio-paths", "RWOR(FIFO, LRU) on paths is (k+1)/2", _check_ratio_paths),
    Check("fwf-lru", "RWOR(FWF, LRU) on paths is k", _check_fwf_lru),
    Check("fwf-fifo", "RWOR(FWF, FIFO) >= 2k/(k+1)", _check_fwf_fifo),
    Check("conservative", "LRU and FIFO are conservative, FWF is not", _check_conservative,
          small={"max_len": 8}),
    Check("not-worst", "start-1 reorderings of I_1: LRU >= 8, FIFO <= 7", _check_not_worst),
    Check("incomparability", "LRU and FIFO are incomparable on chained cycles",
          _check_incomparability, small={"ns": (1,), "rs": (2,)}),
]}


def run_check(check_id: str, scale: str = "default", **params) -> CheckReport:
    try:
        check = CHECKS[check_id]
    except KeyError:
        raise UnknownCheck(f"unknown check {check_id!r}; known: {', '.join(CHECKS)}") from None
    if scale not in SCALES:
        raise ValueError(f"scale must be one of {SCALES}")
    kwargs = dict(check.small) if scale == "small" else {}
    kwargs.update(params)
    t0 = time.perf_counter()
    out = check.func(**kwargs)
    millis = (time.perf_counter() - t0) * 1000
    if not out.ok:
        status = FAIL
    elif not out.exhaustive:
        status = SKIPPED
    else:
        status = PASS
    shown = {k: (list(v) if isinstance(v, range) else v) for k, v in kwargs.items()}
    shown.setdefault("scale", scale)
    return CheckReport(check_id, shown, status, out.observed, out.expected, millis,
                       out.counterexample, check.claim)


def _run_one(args):
    check_id, scale = args
    return run_check(check_id, scale)


def run_all(scale: str = "default", jobs: int = 1, only: Optional[list[str]] = None) -> list[CheckReport]:
    ids = only or list(CHECKS)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_one, [(i, scale) for i in ids]))
    return [run_check(i, scale) for i in ids]


def exit_code(reports: list[CheckReport]) -> int:
    if any(r.status == FAIL for r in reports):
        return 1
    if any(r.status == SKIPPED for r in reports):
        return 3
    return 0


def reports_csv(reports: list[CheckReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def reports_json(reports: list[CheckReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)


def summary_table(reports: list[CheckReport]) -> str:
    width = max(len(r.id) for r in reports) if reports else 10
    lines = [f"{'check':<{width}}  status   millis  observed"]
    for r in reports:
        obs = _fmt(r.observed)
        if len(obs) > 70:
            obs = obs[:67] + "..."
        lines.append(f"{r.id:<{width}}  {r.status:<7} {r.millis:>8.0f}  {obs}")
    passed = sum(r.status == PASS for r in reports)
    lines.append(f"{passed}/{len(reports)} checks passed")
    return "\n".join(lines)
