"""Paging simulators (LRU, FIFO, FWF, offline LFD) and trace utilities.

Every run starts from an empty cache and counts cold-start faults.
"""

from __future__ import annotations

import json
from collections import OrderedDict, deque
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

HIT = "hit"
FAULT = "fault"
POLICY_NAMES = ("LRU", "FIFO", "FWF", "LFD")


class ContractError(ValueError):
    pass


@dataclass(frozen=True)
class PolicyId:
    kind: str
    tiebreak: str = "lowest_id"

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in POLICY_NAMES:
            raise ValueError(f"unknown policy {self.kind!r}")
        if self.tiebreak not in ("lowest_id", "match_lru"):
            raise ValueError(f"unknown LFD tiebreak {self.tiebreak!r}")
        object.__setattr__(self, "kind", kind)

    def __str__(self):
        if self.kind == "LFD":
            return f"LFD({self.tiebreak})"
        return self.kind


LRU = PolicyId("LRU")
FIFO = PolicyId("FIFO")
FWF = PolicyId("FWF")
LFD = PolicyId("LFD")
LFD_MATCH_LRU = PolicyId("LFD", "match_lru")


def as_policy(p) -> PolicyId:
    return p if isinstance(p, PolicyId) else PolicyId(str(p))


@dataclass(frozen=True)
class TraceEvent:
    index: int
    page: int
    outcome: str
    evicted: Optional[int] = None
    flushed: bool = False

    @property
    def fault(self) -> bool:
        return self.outcome == FAULT


@dataclass
class SimulationTrace:
    policy: str
    k: int
    events: list[TraceEvent] = field(default_factory=list)

    @property
    def total_faults(self) -> int:
        return sum(e.fault for e in self.events)

    @property
    def hits(self) -> int:
        return len(self.events) - self.total_faults

    @property
    def fault_flags(self) -> list[bool]:
        return [e.fault for e in self.events]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(asdict(e)) + "\n" for e in self.events)

    @classmethod
    def from_jsonl(cls, text: str, policy: str = "", k: int = 0) -> "SimulationTrace":
        events = [TraceEvent(**json.loads(line)) for line in text.splitlines() if line.strip()]
        return cls(policy, k, events)

    def replay(self) -> list[frozenset[int]]:
        """Cache contents after each event, rebuilt from the event log alone."""
        cache: set[int] = set()
        states = []
        for e in self.events:
            if e.fault:
                if e.flushed:
                    cache.clear()
                elif e.evicted is not None:
                    cache.discard(e.evicted)
                cache.add(e.page)
            states.append(frozenset(cache))
        return states


class _Policy:
    def __init__(self, k: int):
        self.k = k


class _LRU(_Policy):
    def __init__(self, k):
        super().__init__(k)
        self.cache: OrderedDict[int, None] = OrderedDict()

    def request(self, i, page):
        if page in self.cache:
            self.cache.move_to_end(page)
            return TraceEvent(i, page, HIT)
        evicted = None
        if len(self.cache) == self.k:
            evicted, _ = self.cache.popitem(last=False)
        self.cache[page] = None
        return TraceEvent(i, page, FAULT, evicted)


class _FIFO(_Policy):
    def __init__(self, k):
        super().__init__(k)
        self.queue: deque[int] = deque()
        self.members: set[int] = set()

    def request(self, i, page):
        if page in self.members:
            return TraceEvent(i, page, HIT)
        evicted = None
        if len(self.queue) == self.k:
            evicted = self.queue.popleft()
            self.members.discard(evicted)
        self.queue.append(page)
        self.members.add(page)
        return TraceEvent(i, page, FAULT, evicted)


class _FWF(_Policy):
    def __init__(self, k):
        super().__init__(k)
        self.cache: set[int] = set()

    def request(self, i, page):
        if page in self.cache:
            return TraceEvent(i, page, HIT)
        flushed = len(self.cache) == self.k
        if flushed:
            self.cache.clear()
        self.cache.add(page)
        return TraceEvent(i, page, FAULT, None, flushed)


ONLINE_POLICIES = {"LRU": _LRU, "FIFO": _FIFO, "FWF": _FWF}


def _next_use(seq: Sequence[int]) -> list[float]:
    nxt = [float("inf")] * len(seq)
    last: dict[int, int] = {}
    for i in range(len(seq) - 1, -1, -1):
        nxt[i] = last.get(seq[i], float("inf"))
        last[seq[i]] = i
    return nxt


def _simulate_lfd(seq: Sequence[int], k: int, tiebreak: str) -> SimulationTrace:
    trace = SimulationTrace(str(PolicyId("LFD", tiebreak)), k)
    nxt = _next_use(seq)
    # page -> position of its next request; recency kept for the match_lru rule
    upcoming: dict[int, float] = {}
    recency: OrderedDict[int, None] = OrderedDict()
    for i, page in enumerate(seq):
        if page in upcoming:
            upcoming[page] = nxt[i]
            recency.move_to_end(page)
            trace.events.append(TraceEvent(i, page, HIT))
            continue
        evicted = None
        if len(upcoming) == k:
            far = max(upcoming.values())
            candidates = [p for p, t in upcoming.items() if t == far]
            if tiebreak == "match_lru":
                lru_victim = next(iter(recency))
                evicted = lru_victim if upcoming[lru_victim] == float("inf") else min(candidates)
            else:
                evicted = min(candidates)
            del upcoming[evicted]
            del recency[evicted]
        upcoming[page] = nxt[i]
        recency[page] = None
        trace.events.append(TraceEvent(i, page, FAULT, evicted))
    return trace


def simulate(policy, seq: Sequence[int], k: int) -> SimulationTrace:
    """Run ``policy`` over ``seq`` with a cache of ``k`` pages."""
    policy = as_policy(policy)
    if k < 1:
        raise ValueError("cache size k must be >= 1")
    if policy.kind == "LFD":
        return _simulate_lfd(seq, k, policy.tiebreak)
    sim = ONLINE_POLICIES[policy.kind](k)
    trace = SimulationTrace(str(policy), k)
    for i, page in enumerate(seq):
        trace.events.append(sim.request(i, page))
    return trace


def faults(policy, seq: Sequence[int], k: int) -> int:
    return simulate(policy, seq, k).total_faults


def offline_optimum(seq: Sequence[int], k: int) -> int:
    """Minimum faults over every demand-paging eviction schedule.

    Exhaustive dynamic program over (position, cache set); only for tiny inputs.
    """
    seq = tuple(seq)

    @lru_cache(maxsize=None)
    def best(i: int, cache: frozenset) -> int:
        if i == len(seq):
            return 0
        page = seq[i]
        if page in cache:
            return best(i + 1, cache)
        if len(cache) < k:
            return 1 + best(i + 1, cache | {page})
        return 1 + min(best(i + 1, (cache - {q}) | {page}) for q in cache)

    return best(0, frozenset())


def conservative_violation(
    seq: Sequence[int], trace: SimulationTrace, k: int
) -> Optional[tuple[int, int]]:
    """Find a window with at most ``k`` distinct pages but more than ``k`` faults.

    Returns inclusive indices ``(i, j)`` of the first such maximal window, or None.
    """
    if len(seq) != len(trace.events):
        raise ContractError(
            f"sequence has {len(seq)} requests but trace has {len(trace.events)} events"
        )
    flags = trace.fault_flags
    n = len(seq)
    j = 0
    counts: dict[int, int] = {}
    window_faults = 0
    # two-pointer sweep over maximal windows [i, j)
    for i in range(n):
        while j < n and (seq[j] in counts or len(counts) < k):
            counts[seq[j]] = counts.get(seq[j], 0) + 1
            window_faults += flags[j]
            j += 1
        if window_faults > k:
            return (i, j - 1)
        counts[seq[i]] -= 1
        if counts[seq[i]] == 0:
            del counts[seq[i]]
        window_faults -= flags[i]
    return None


def k_phase_decompose(seq: Sequence[int], k: int) -> list[tuple[int, ...]]:
    phases: list[tuple[int, ...]] = []
    current: list[int] = []
    distinct: set[int] = set()
    for page in seq:
        if page not in distinct and len(distinct) == k:
            phases.append(tuple(current))
            current, distinct = [], set()
        current.append(page)
        distinct.add(page)
    if current:
        phases.append(tuple(current))
    return phases
