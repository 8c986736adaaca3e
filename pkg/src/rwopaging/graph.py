"""Access graphs: construction, standard families, and walk validation.

Vertices are the pages ``1..N``. On cycles, "clockwise" means increasing
label modulo ``N``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence


class GraphError(ValueError):
    """Invalid graph parameters or an out-of-range page."""


class ParseError(GraphError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class AccessGraph:
    vertex_count: int
    edges: frozenset[tuple[int, int]]
    name: str = ""
    _adj: tuple[tuple[int, ...], ...] = field(
        default=(), init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if self.vertex_count < 1:
            raise GraphError("graph needs at least one vertex")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            for x in (u, v):
                if not 1 <= x <= self.vertex_count:
                    raise GraphError(f"edge endpoint {x} outside 1..{self.vertex_count}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))
        adj: list[set[int]] = [set() for _ in range(self.vertex_count + 1)]
        for u, v in norm:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    @property
    def vertices(self) -> range:
        return range(1, self.vertex_count + 1)

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check_page(v)
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def _check_page(self, v: int) -> None:
        if not 1 <= v <= self.vertex_count:
            raise GraphError(f"page {v} outside 1..{self.vertex_count}")

    def is_connected(self) -> bool:
        seen = {1}
        stack = [1]
        while stack:
            x = stack.pop()
            for y in self._adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.vertex_count

    def to_edge_list(self) -> str:
        lines = [f"{self.vertex_count} {len(self.edges)}"]
        lines += [f"{u} {v}" for u, v in sorted(self.edges)]
        return "\n".join(lines) + "\n"


def path_graph(n: int) -> AccessGraph:
    _positive("path", n)
    return AccessGraph(n, frozenset((i, i + 1) for i in range(1, n)), f"path:{n}")


def cycle_graph(n: int) -> AccessGraph:
    _positive("cycle", n)
    if n < 3:
        # C_1 is a self-loop and C_2 a doubled edge; neither is a simple graph
        raise GraphError(f"cycle needs at least 3 vertices, got {n}")
    edges = {(i, i + 1) for i in range(1, n)} | {(n, 1)}
    return AccessGraph(n, frozenset(edges), f"cycle:{n}")


def complete_graph(n: int) -> AccessGraph:
    _positive("complete", n)
    edges = {(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
    return AccessGraph(n, frozenset(edges), f"complete:{n}")


def chain_x(i: int, j: int) -> int:
    """Label of vertex ``X_{i,j}`` (copy ``i``, position ``j`` in 1..5)."""
    return 5 * (i - 1) + j


def chain_u(i: int, n: int) -> int:
    """Label of the separator ``u_i`` in the chain of ``n`` cycles."""
    return 5 * n + i


def chained_cycles(n: int) -> AccessGraph:
    """``n`` five-cycles linked through separator vertices ``u_1..u_n``."""
    _positive("chain", n)
    edges = set()
    for i in range(1, n + 1):
        for j in range(1, 6):
            edges.add((chain_x(i, j), chain_x(i, j % 5 + 1)))
        edges.add((chain_x(i, 1), chain_u(i, n)))
        if i < n:
            edges.add((chain_u(i, n), chain_x(i + 1, 1)))
    return AccessGraph(6 * n, frozenset(edges), f"chain:{n}")


_FAMILIES = {
    "path": path_graph,
    "cycle": cycle_graph,
    "complete": complete_graph,
    "chain": chained_cycles,
    "chained_cycles": chained_cycles,
}


def build_family(kind: str, n: int) -> AccessGraph:
    try:
        ctor = _FAMILIES[kind]
    except KeyError:
        raise GraphError(f"unknown graph family {kind!r}") from None
    return ctor(n)


def parse_graph_spec(spec: str) -> AccessGraph:
    """Parse CLI shorthand such as ``cycle:5`` or ``chain:2``."""
    kind, sep, arg = spec.partition(":")
    if not sep:
        raise GraphError(f"graph spec must look like kind:N, got {spec!r}")
    try:
        n = int(arg)
    except ValueError:
        raise GraphError(f"bad graph parameter in {spec!r}") from None
    return build_family(kind.strip(), n)


def parse_edge_list(text: str) -> AccessGraph:
    lines = text.split("\n")
    header = None
    edges: set[tuple[int, int]] = set()
    declared = 0
    n = 0
    for lineno, raw in enumerate(lines, start=1):
        parts = raw.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise ParseError(f"expected two integers, got {raw!r}", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer field in {raw!r}", lineno) from None
        if header is None:
            header = lineno
            n, declared = a, b
            if n < 1 or declared < 0:
                raise ParseError("header needs N >= 1 and M >= 0", lineno)
            continue
        if a == b:
            raise ParseError(f"self-loop at {a}", lineno)
        if not (1 <= a <= n and 1 <= b <= n):
            raise ParseError(f"endpoint out of range 1..{n}", lineno)
        key = (min(a, b), max(a, b))
        if key in edges:
            raise ParseError(f"duplicate edge {a} {b}", lineno)
        edges.add(key)
    if header is None:
        raise ParseError("missing header line", 1)
    if len(edges) != declared:
        raise ParseError(f"header declares {declared} edges, found {len(edges)}", len(lines))
    return AccessGraph(n, frozenset(edges))


def is_walk(g: AccessGraph, seq: Sequence[int]) -> bool:
    for p in seq:
        g._check_page(p)
    return all(a == b or g.has_edge(a, b) for a, b in zip(seq, seq[1:]))


def parse_sequence(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(x) for x in text.split(","))


def _positive(kind: str, n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise GraphError(f"{kind} parameter must be a positive integer, got {n!r}")


def cycle_step(n: int, a: int, b: int) -> int:
    """+1 for a clockwise step a->b on C_n, -1 for anticlockwise."""
    d = (b - a) % n
    if d == 1:
        return 1
    if d == n - 1:
        return -1
    raise GraphError(f"{a} and {b} are not adjacent on cycle:{n}")


def cycle_next(n: int, v: int, direction: int) -> int:
    return (v - 1 + direction) % n + 1

