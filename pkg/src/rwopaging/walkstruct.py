"""Turn structure of cycle walks, LRU-preserving rewrites, and FIFO blocks.

The rewrites implement the reductions used to bring an LRU worst ordering on a
cycle into normal form. Each rewrite replaces a middle part of the sequence and
is only accepted if it keeps the walk valid, keeps every page requested, does
not lower LRU's fault count on the replaced part, and leaves LRU's full cache
state (including recency order) unchanged right after it. Those conditions are
checked by simulation on every step; a failure raises ``RewriteError``.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import Optional, Sequence

from .graph import AccessGraph, GraphError, cycle_graph, cycle_next, cycle_step, is_walk
from .paging import FIFO, LRU, simulate

DEFAULT_STEP_BUDGET = 10**6

Seq = tuple[int, ...]


class NormalizationRequired(ValueError):
    """The input has consecutive duplicate requests."""


class RewriteError(RuntimeError):
    """A rewrite violated its own preconditions; indicates a bug or bad input."""


@dataclass(frozen=True)
class TurnSequence:
    segments: tuple[Seq, ...]
    turns: tuple[int, ...]
    directions: tuple[int, ...]  # +1 clockwise, -1 anticlockwise, 0 undetermined
    positions: tuple[int, ...]  # index of each v_i in the source sequence
    n: int

    @property
    def z(self) -> int:
        return len(self.turns)

    def reassemble(self) -> Seq:
        out: list[int] = []
        for seg, v in zip(self.segments, self.turns):
            out += seg
            out.append(v)
        return tuple(out)

    def format(self, labels: Optional[Sequence[str]] = None) -> str:
        parts = []
        for i, (seg, v) in enumerate(zip(self.segments, self.turns), start=1):
            tag = f"({labels[i - 1]})" if labels else ""
            parts.append(f"A{i}=[{','.join(map(str, seg))}] v{i}={v}{tag}")
        return " ".join(parts)


@dataclass(frozen=True)
class OverlapWitness:
    u: int
    v: int
    w: int
    start: int  # index of the first u in <u, v, u, B, w, v>
    end: int  # index of the second v


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple[Seq, ...]
    suffix: Seq

    def concatenated(self) -> Seq:
        return tuple(p for b in self.blocks for p in b)


def _cycle_n(g: AccessGraph) -> int:
    n = g.vertex_count
    if n < 3 or g != cycle_graph(n):
        raise GraphError("expected a cycle graph")
    return n


def _require_walk(g: AccessGraph, seq: Sequence[int]) -> None:
    if not is_walk(g, seq):
        raise GraphError("sequence is not a walk on the graph")


def remove_consecutive_duplicates(seq: Sequence[int]) -> Seq:
    out: list[int] = []
    for p in seq:
        if not out or out[-1] != p:
            out.append(p)
    return tuple(out)


def decompose_turns(seq: Sequence[int], g: AccessGraph) -> TurnSequence:
    n = _cycle_n(g)
    seq = tuple(seq)
    _require_walk(g, seq)
    if any(a == b for a, b in zip(seq, seq[1:])):
        raise NormalizationRequired("remove consecutive duplicates before decomposing")
    if not seq:
        return TurnSequence((), (), (), (), n)
    cuts = [i for i in range(1, len(seq) - 1) if seq[i - 1] == seq[i + 1]]
    cuts.append(len(seq) - 1)
    segments, dirs = [], []
    prev = -1
    for c in cuts:
        segments.append(seq[prev + 1:c])
        dirs.append(cycle_step(n, seq[c - 1], seq[c]) if c > 0 else 0)
        prev = c
    return TurnSequence(tuple(segments), tuple(seq[c] for c in cuts), tuple(dirs), tuple(cuts), n)


def classify_turns(t: TurnSequence, k: int) -> list[str]:
    labels = []
    for i in range(t.z - 1):
        span = set(t.segments[i + 1]) | {t.turns[i + 1]}
        labels.append("extreme" if len(span) >= k else "trivial")
    if t.z:
        labels.append("last")
    return labels


def format_turns(seq: Sequence[int], g: AccessGraph, k: int) -> str:
    t = decompose_turns(seq, g)
    return t.format(classify_turns(t, k))


def _lru_after(seq: Sequence[int], k: int) -> tuple[int, tuple[int, ...]]:
    """Faults and LRU recency order (least recent first) after ``seq``."""
    cache: OrderedDict[int, None] = OrderedDict()
    f = 0
    for p in seq:
        if p in cache:
            cache.move_to_end(p)
        else:
            f += 1
            if len(cache) == k:
                cache.popitem(last=False)
            cache[p] = None
    return f, tuple(cache)


def _replace_middle(
    seq: Seq, lo: int, hi: int, middle: Sequence[int], g: AccessGraph, k: int,
    sync: Optional[int] = None,
) -> Seq:
    """Replace ``seq[lo:hi]`` by ``middle`` after checking the reduction conditions.

    ``sync`` is the index (in ``seq``, at or after ``hi``) of the first request
    whose LRU state must be unchanged; None means the rewrite reaches the end.
    """
    new = seq[:lo] + tuple(middle) + seq[hi:]
    if not is_walk(g, new):
        raise RewriteError(f"rewrite produced a non-walk: {new}")
    if set(new) != set(seq):
        raise RewriteError("rewrite dropped every request to some page")
    until = len(seq) if sync is None else sync
    shift = len(middle) - (hi - lo)
    f_old, state_old = _lru_after(seq[:until], k)
    f_new, state_new = _lru_after(new[: until + shift], k)
    if sync is not None and state_old != state_new:
        raise RewriteError(f"rewrite changed the LRU state: {state_old} vs {state_new}")
    if f_new < f_old:
        raise RewriteError("rewrite removed faults")
    return new


def _first_fault_after(seq: Seq, k: int, pos: int) -> Optional[int]:
    flags = simulate(LRU, seq, k).fault_flags
    for i in range(pos + 1, len(seq)):
        if flags[i]:
            return i
    return None


def _long_first_walk_step(seq: Seq, g: AccessGraph, k: int) -> Optional[Seq]:
    n = g.vertex_count
    t = decompose_turns(seq, g)
    if t.z <= 1 or len(t.segments[0]) >= k - 1:
        return None
    v1 = t.positions[0]
    w = _first_fault_after(seq, k, v1)
    if w is None:
        # every later request is a hit; the rest collapses to a single u-walk
        return _replace_middle(seq, v1 + 1, len(seq), (), g, k)
    first = seq[0]
    beyond_start = cycle_next(n, first, -t.directions[0])
    if seq[w] == beyond_start and seq[w - 1] == first:
        return _replace_middle(seq, 0, v1, (), g, k, sync=w)
    return _replace_middle(seq, v1 + 1, w, (), g, k, sync=w)


def _trivial_turn_step(seq: Seq, g: AccessGraph, k: int) -> Optional[Seq]:
    n = g.vertex_count
    t = decompose_turns(seq, g)
    labels = classify_turns(t, k)
    try:
        i = labels.index("trivial")
    except ValueError:
        return None
    pi, pnext = t.positions[i], t.positions[i + 1]
    vi = seq[pi]
    d = t.directions[i]
    w = _first_fault_after(seq, k, pnext)
    if w is None:
        return _replace_middle(seq, pi + 1, len(seq), (), g, k)
    if seq[w] == cycle_next(n, vi, d) and seq[w - 1] == vi:
        # leave the earlier visit to v_{i+1} on the way in and continue from there
        mirror = 2 * pi - pnext
        if mirror < 0 or seq[mirror] != seq[pnext]:
            raise RewriteError("no earlier request mirrors the trivial excursion")
        return _replace_middle(seq, mirror + 1, pnext + 1, (), g, k, sync=w)
    # w is entered moving against d: replace the wandering by one straight arc
    arc = []
    x = cycle_next(n, vi, -d)
    stop = cycle_next(n, seq[w], d)
    while True:
        arc.append(x)
        if x == stop:
            break
        x = cycle_next(n, x, -d)
        if len(arc) > n:
            raise RewriteError("arc construction did not terminate")
    return _replace_middle(seq, pi + 1, w, arc, g, k, sync=w)


def find_overlap(seq: Sequence[int], g: AccessGraph) -> Optional[OverlapWitness]:
    n = _cycle_n(g)
    seq = tuple(seq)
    for a in range(len(seq) - 3):
        u, v = seq[a], seq[a + 1]
        if seq[a + 2] != u or u == v:
            continue
        w = cycle_next(n, v, -cycle_step(n, v, u))
        if w == u:
            continue
        for b in range(a + 3, len(seq) - 1):
            if seq[b] == w and seq[b + 1] == v:
                return OverlapWitness(u, v, w, a, b + 1)
    return None


def _overlap_step(seq: Seq, g: AccessGraph) -> Optional[Seq]:
    wit = find_overlap(seq, g)
    if wit is None:
        return None
    lo, hi = wit.start + 2, wit.end  # <u, B, w> becomes <w, B^R, u>
    new = seq[:lo] + seq[lo:hi][::-1] + seq[hi:]
    if not is_walk(g, new):
        raise RewriteError("overlap reversal produced a non-walk")
    return new


def _fixed_point(seq, step, budget):
    for _ in range(budget):
        nxt = step(seq)
        if nxt is None:
            return seq
        seq = nxt
    raise RewriteError(f"rewrite budget of {budget} steps exhausted")


def enforce_long_first_walk(
    seq: Sequence[int], g: AccessGraph, k: int, budget: int = DEFAULT_STEP_BUDGET
) -> Seq:
    """Rewrite until the first u-walk has at least ``k-1`` requests or no turn remains."""
    _cycle_n(g)
    return _fixed_point(tuple(seq), lambda s: _long_first_walk_step(s, g, k), budget)


def remove_trivial_turns(
    seq: Sequence[int], g: AccessGraph, k: int, budget: int = DEFAULT_STEP_BUDGET
) -> Seq:
    _cycle_n(g)
    return _fixed_point(tuple(seq), lambda s: _trivial_turn_step(s, g, k), budget)


def remove_overlaps(
    seq: Sequence[int], g: AccessGraph, k: int, budget: int = DEFAULT_STEP_BUDGET
) -> Seq:
    """Reverse ``<u, B, w>`` to ``<w, B^R, u>`` at the first overlap until none is left.

    ``k`` is accepted for symmetry with the other rewrites; the reversal itself
    does not depend on the cache size.
    """
    _cycle_n(g)
    return _fixed_point(tuple(seq), lambda s: _overlap_step(s, g), budget)


def normalize(
    seq: Sequence[int], g: AccessGraph, k: int, budget: int = DEFAULT_STEP_BUDGET
) -> list[tuple[str, Seq]]:
    """Run the whole reduction pipeline; returns each stage's output in order.

    Overlap reversal can leave a short u-walk after the turn it creates, so the
    later stages are repeated until the sequence stops changing.
    """
    stages = [("input", tuple(seq))]
    cur = remove_consecutive_duplicates(seq)
    stages.append(("no-duplicates", cur))
    for _ in range(budget):
        before = cur
        cur = enforce_long_first_walk(cur, g, k, budget)
        stages.append(("long-first-walk", cur))
        cur = remove_trivial_turns(cur, g, k, budget)
        stages.append(("no-trivial-turns", cur))
        cur = remove_overlaps(cur, g, k, budget)
        stages.append(("overlap-free", cur))
        if cur == before:
            return stages
    raise RewriteError("normalization did not reach a fixed point")


def lru_hits_closed_form(t: TurnSequence, k: int) -> int:
    """LRU hits on a duplicate-free walk whose u-walks all span at least ``k-1`` pages."""
    if t.z > 1 and any(len(set(seg)) < k - 1 for seg in t.segments):
        raise ValueError("every u-walk must contain at least k-1 distinct pages")
    return max(t.z - 1, 0) * (k - 1)


def fifo_blocks(seq: Sequence[int], g: AccessGraph, k: int) -> BlockDecomposition:
    seq = tuple(seq)
    _require_walk(g, seq)
    flags = simulate(FIFO, seq, k).fault_flags
    blocks = []
    start = 0
    count = 0
    for i, f in enumerate(flags):
        count += f
        if count == k + 1:
            blocks.append(seq[start:i + 1])
            start, count = i + 1, 0
    return BlockDecomposition(tuple(blocks), seq[start:])


def reorder_blocks(d: BlockDecomposition, g: AccessGraph, k: int) -> Seq:
    """Keep a block if LRU already faults twice in it, else reverse all but its last request."""
    out: list[int] = []
    for i, block in enumerate(d.blocks):
        if i > 0:
            trace = simulate(LRU, out + list(block), k)
            if sum(trace.fault_flags[len(out):]) < 2:
                block = block[:-1][::-1] + block[-1:]
        out += block
    if not is_walk(g, out):
        raise RewriteError("block reversal produced a non-walk")
    return tuple(out)
