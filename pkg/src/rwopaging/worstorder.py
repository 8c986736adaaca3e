"""Exact worst-ordering search over graph-respecting reorderings of a multiset.

The search is a memoized depth-first enumeration of walks that consume the
multiset exactly. A state is (current page, remaining counts, cache state);
the best number of future faults depends only on that triple, so each state
is expanded once. Children are tried in ascending page order and a state stops
early once every remaining request is a fault, which keeps the returned witness
the lexicographically smallest optimal walk.
"""

from __future__ import annotations

import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Optional, Sequence

from .graph import AccessGraph, GraphError
from .paging import as_policy, simulate

ENUMERATION_GUARD = 12
DEFAULT_BUDGET = 10**7


class InfeasibleMultisetError(ValueError):
    pass


class SizeGuardError(ValueError):
    pass


@dataclass(frozen=True)
class RequestMultiset:
    counts: Mapping[int, int]

    def __post_init__(self):
        clean = {int(p): int(c) for p, c in self.counts.items() if c}
        if any(c < 0 for c in clean.values()):
            raise ValueError("multiset counts must be positive")
        object.__setattr__(self, "counts", dict(sorted(clean.items())))

    @classmethod
    def of(cls, seq: Sequence[int]) -> "RequestMultiset":
        return cls(Counter(seq))

    @classmethod
    def parse(cls, text: str) -> "RequestMultiset":
        counts: dict[int, int] = {}
        for item in filter(None, (t.strip() for t in text.split(","))):
            page, _, count = item.partition(":")
            counts[int(page)] = counts.get(int(page), 0) + int(count or 1)
        return cls(counts)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __str__(self):
        return ",".join(f"{p}:{c}" for p, c in self.counts.items())


@dataclass(frozen=True)
class SearchConfig:
    start_page: Optional[int] = None
    node_budget: int = DEFAULT_BUDGET
    parallel_width: int = 1

    def __post_init__(self):
        if self.node_budget < 1:
            raise ValueError("node_budget must be >= 1")


@dataclass(frozen=True)
class WorstOrderResult:
    max_faults: int
    witness: tuple[int, ...]
    exhausted: bool
    nodes: int = 0


# Tuple-state transition functions. These are deliberately independent of the
# simulators in ``paging`` so that each route can check the other.

def _lru_step(k):
    def step(state, page):
        if page in state:
            i = state.index(page)
            return state[:i] + state[i + 1:] + (page,), 0
        if len(state) == k:
            state = state[1:]
        return state + (page,), 1
    return step


def _fifo_step(k):
    def step(state, page):
        if page in state:
            return state, 0
        if len(state) == k:
            state = state[1:]
        return state + (page,), 1
    return step


def _fwf_step(k):
    def step(state, page):
        if page in state:
            return state, 0
        if len(state) == k:
            return (page,), 1
        return tuple(sorted(state + (page,))), 1
    return step


_STEPS: dict[str, Callable] = {"LRU": _lru_step, "FIFO": _fifo_step, "FWF": _fwf_step}


def _validate(g: AccessGraph, m: RequestMultiset) -> None:
    for p in m.counts:
        if not 1 <= p <= g.vertex_count:
            raise GraphError(f"page {p} outside 1..{g.vertex_count}")
    support = set(m.counts)
    if not support:
        return
    # a walk only ever visits the multiset's own pages, so they must be connected
    first = min(support)
    seen, stack = {first}, [first]
    while stack:
        x = stack.pop()
        for y in g.neighbors(x):
            if y in support and y not in seen:
                seen.add(y)
                stack.append(y)
    if seen != support:
        raise InfeasibleMultisetError(
            f"pages {sorted(support - seen)} cannot be reached from {first} "
            "without requesting pages outside the multiset"
        )


class _BudgetExhausted(Exception):
    pass


class _Search:
    def __init__(self, g, m, step, budget):
        self.pages = list(m.counts)
        self.index = {p: i for i, p in enumerate(self.pages)}
        self.moves = {
            p: tuple(sorted({p} | {q for q in g.neighbors(p) if q in self.index}))
            for p in self.pages
        }
        self.step = step
        self.budget = budget
        self.nodes = 0
        self.memo: dict = {}
        self.best_found = -1
        self.best_walk: tuple[int, ...] = ()
        self._path: list[int] = []

    def value(self, cur, counts, cache, remaining, so_far):
        """Max future faults from this state, or None if no completion exists."""
        if remaining == 0:
            if so_far > self.best_found:
                self.best_found = so_far
                self.best_walk = tuple(self._path)
            return 0
        key = (cur, counts, cache)
        if key in self.memo:
            return self.memo[key]
        self.nodes += 1
        if self.nodes > self.budget:
            raise _BudgetExhausted
        best = None
        for nxt in self.moves[cur]:
            i = self.index[nxt]
            if counts[i] == 0:
                continue
            new_cache, fault = self.step(cache, nxt)
            new_counts = counts[:i] + (counts[i] - 1,) + counts[i + 1:]
            self._path.append(nxt)
            sub = self.value(nxt, new_counts, new_cache, remaining - 1, so_far + fault)
            self._path.pop()
            if sub is None:
                continue
            if best is None or fault + sub > best:
                best = fault + sub
                if best == remaining:
                    break
        self.memo[key] = best
        return best

    def run_start(self, start, counts0):
        i = self.index[start]
        counts = counts0[:i] + (counts0[i] - 1,) + counts0[i + 1:]
        cache, fault = self.step((), start)
        remaining = sum(counts)
        self._path = [start]
        sub = self.value(start, counts, cache, remaining, fault)
        if sub is None:
            return None
        return fault + sub, self.witness(start, counts, cache, remaining, sub)

    def witness(self, cur, counts, cache, remaining, target):
        walk = [cur]
        while remaining:
            for nxt in self.moves[cur]:
                i = self.index[nxt]
                if counts[i] == 0:
                    continue
                new_cache, fault = self.step(cache, nxt)
                new_counts = counts[:i] + (counts[i] - 1,) + counts[i + 1:]
                sub = self.value(nxt, new_counts, new_cache, remaining - 1, 0)
                if sub is not None and fault + sub == target:
                    break
            else:  # pragma: no cover - memo is exact, so a child must match
                raise RuntimeError("witness reconstruction failed")
            walk.append(nxt)
            cur, counts, cache, remaining, target = nxt, new_counts, new_cache, remaining - 1, sub
        return tuple(walk)


def _search_starts(args):
    g, m, kind, k, starts, budget = args
    search = _Search(g, m, _STEPS[kind](k), budget)
    counts0 = tuple(m.counts.values())
    best = None
    exhausted = True
    for s in starts:
        try:
            res = search.run_start(s, counts0)
        except _BudgetExhausted:
            exhausted = False
            break
        if res is not None and (best is None or res[0] > best[0]):
            best = res
    if not exhausted:
        if best is None or search.best_found > best[0]:
            best = (search.best_found, search.best_walk) if search.best_found >= 0 else None
    return best, exhausted, search.nodes


def worst_order_exact(
    g: AccessGraph,
    m: RequestMultiset | Sequence[int],
    policy,
    k: int,
    sc: SearchConfig = SearchConfig(),
) -> WorstOrderResult:
    """Maximum faults of ``policy`` over walks on ``g`` that use exactly ``m``."""
    if not isinstance(m, RequestMultiset):
        m = RequestMultiset.of(m)
    policy = as_policy(policy)
    _validate(g, m)
    if m.total == 0:
        return WorstOrderResult(0, (), True)
    if policy.kind == "LFD":
        return _worst_by_enumeration(g, m, policy, k, sc)
    if sc.start_page is not None:
        if m.counts.get(sc.start_page, 0) == 0:
            raise InfeasibleMultisetError(f"start page {sc.start_page} is not in the multiset")
        starts = [sc.start_page]
    else:
        starts = list(m.counts)

    needed = m.total + 100
    if sys.getrecursionlimit() < needed:
        sys.setrecursionlimit(needed)

    if sc.parallel_width > 1 and len(starts) > 1:
        jobs = [(g, m, policy.kind, k, [s], sc.node_budget) for s in starts]
        with ProcessPoolExecutor(max_workers=sc.parallel_width) as pool:
            parts = list(pool.map(_search_starts, jobs))
    else:
        parts = [_search_starts((g, m, policy.kind, k, starts, sc.node_budget))]

    best = None
    exhausted = True
    nodes = 0
    # parts are in ascending start order, so strict > keeps the smallest witness
    for res, done, n in parts:
        exhausted &= done
        nodes += n
        if res is not None and (best is None or res[0] > best[0]):
            best = res
    if best is None:
        if not exhausted:
            return WorstOrderResult(-1, (), False, nodes)
        raise InfeasibleMultisetError(
            f"no walk on {g.name or 'the graph'} realizes multiset {m}"
            + (f" starting at {sc.start_page}" if sc.start_page is not None else "")
        )
    return WorstOrderResult(best[0], best[1], exhausted, nodes)


def enumerate_reorderings(
    g: AccessGraph, m: RequestMultiset | Sequence[int], sc: SearchConfig = SearchConfig()
) -> Iterator[tuple[int, ...]]:
    """Yield every walk on ``g`` consuming ``m`` exactly, in lexicographic order."""
    if not isinstance(m, RequestMultiset):
        m = RequestMultiset.of(m)
    if m.total > ENUMERATION_GUARD:
        raise SizeGuardError(
            f"refusing to enumerate {m.total} requests (guard is {ENUMERATION_GUARD})"
        )
    _validate(g, m)
    if m.total == 0:
        yield ()
        return
    counts = dict(m.counts)
    walk: list[int] = []
    found = False

    def rec():
        if len(walk) == m.total:
            yield tuple(walk)
            return
        cur = walk[-1]
        for nxt in sorted({cur} | set(g.neighbors(cur))):
            if counts.get(nxt, 0):
                counts[nxt] -= 1
                walk.append(nxt)
                yield from rec()
                walk.pop()
                counts[nxt] += 1

    starts = [sc.start_page] if sc.start_page is not None else list(counts)
    for s in starts:
        if not counts.get(s, 0):
            continue
        counts[s] -= 1
        walk.append(s)
        for w in rec():
            found = True
            yield w
        walk.pop()
        counts[s] += 1
    if not found:
        raise InfeasibleMultisetError(f"no walk on {g.name or 'the graph'} realizes multiset {m}")


def _worst_by_enumeration(g, m, policy, k, sc) -> WorstOrderResult:
    best, witness = -1, ()
    for w in enumerate_reorderings(g, m, sc):
        f = simulate(policy, w, k).total_faults
        if f > best:
            best, witness = f, w
    return WorstOrderResult(best, witness, True)


@dataclass(frozen=True)
class RatioPoint:
    n: int
    a_w: int
    b_w: int
    ratio: Optional[Fraction]
    slope: Optional[Fraction]
    exhaustive: bool = True

    def as_row(self) -> list:
        fmt = lambda x: "" if x is None else f"{float(x):.6f}"  # noqa: E731
        return [self.n, self.a_w, self.b_w, fmt(self.ratio), fmt(self.slope), self.exhaustive]

    def as_dict(self) -> dict:
        exact = lambda x: None if x is None else str(x)  # noqa: E731
        return {"n": self.n, "a_w": self.a_w, "b_w": self.b_w, "ratio": exact(self.ratio),
                "slope": exact(self.slope), "exhaustive": self.exhaustive}


def closed_form_worst(kind: str, policy, k: int, n: int) -> Optional[int]:
    """Certified worst-order costs for the ``In`` family on P_{k+1}."""
    policy = as_policy(policy)
    if kind != "In":
        return None
    if policy.kind == "FIFO":
        return (k + 1) * n
    if policy.kind == "LRU" or policy.kind == "LFD":
        return 2 * (n - 1) + k + 1
    if policy.kind == "FWF":
        # FWF faults on every request of I_n, the most any ordering can cost
        return 2 * k * n
    return None


def rwor_curve(
    family: str,
    a,
    b,
    k: int,
    n_range: Sequence[int],
    method: str = "closed",
    sc: SearchConfig = SearchConfig(),
) -> list[RatioPoint]:
    """Worst-order costs of two policies along a family, with difference quotients.

    ``method="closed"`` uses certified closed forms where known and falls back
    to exact search; ``method="search"`` always searches.
    """
    from .families import FamilyId

    points: list[RatioPoint] = []
    prev = None
    for n in n_range:
        seq, g = FamilyId(family, k, n).generate()
        vals = []
        exhaustive = True
        for pol in (a, b):
            cf = closed_form_worst(family, pol, k, n) if method == "closed" else None
            if cf is None:
                res = worst_order_exact(g, RequestMultiset.of(seq), pol, k, sc)
                exhaustive &= res.exhausted
                cf = res.max_faults
            vals.append(cf)
        a_w, b_w = vals
        ratio = Fraction(a_w, b_w) if b_w > 0 else None
        slope = None
        if prev is not None and vals[1] != prev[1]:
            slope = Fraction(a_w - prev[0], b_w - prev[1])
        points.append(RatioPoint(n, a_w, b_w, ratio, slope, exhaustive))
        prev = vals
    return points
