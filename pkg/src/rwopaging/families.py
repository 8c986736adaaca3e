"""Request-sequence families, each returned with its canonical access graph."""

from __future__ import annotations

from dataclasses import dataclass

from .graph import AccessGraph, chain_u, chain_x, chained_cycles, path_graph


@dataclass(frozen=True)
class FamilyId:
    kind: str
    k: int = 0
    n: int = 1

    def generate(self) -> tuple[tuple[int, ...], AccessGraph]:
        kind = self.kind
        if kind == "In":
            return gen_In(self.k, self.n)
        if kind == "Is":
            return gen_Is(self.k, self.n)
        if kind == "Jr":
            return gen_Jr(self.n)
        if kind == "ScriptIn":
            return gen_ScriptIn(self.n)
        if kind == "I1":
            return gen_I1_copy(1), chained_cycles(1)
        raise ValueError(f"unknown family {kind!r}")


FAMILY_KINDS = ("In", "Is", "Jr", "ScriptIn", "I1")


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def gen_In(k: int, n: int) -> tuple[tuple[int, ...], AccessGraph]:
    """``<1, 2, ..., k, k+1, k, ..., 2>`` repeated ``n`` times on P_{k+1}."""
    _require(k >= 2 and n >= 1, "In needs k >= 2 and n >= 1")
    block = tuple(range(1, k + 2)) + tuple(range(k, 1, -1))
    return block * n, path_graph(k + 1)


def gen_Is(k: int, s: int) -> tuple[tuple[int, ...], AccessGraph]:
    """Blocks ``S_0..S_s`` where ``S_i`` descends from ``i+k`` to ``i+1`` and back."""
    _require(k >= 2 and s >= 0, "Is needs k >= 2 and s >= 0")
    seq: list[int] = []
    for i in range(s + 1):
        seq += list(range(i + k, i, -1)) + list(range(i + 2, i + k + 1))
    return tuple(seq), path_graph(k + s)


def gen_I1_copy(i: int) -> tuple[int, ...]:
    """The ten-request gadget on the ``i``-th five-cycle of the chain."""
    _require(i >= 1, "copy index must be >= 1")
    return tuple(chain_x(i, j) for j in (1, 5, 1, 2, 3, 4, 5, 1, 2, 1))


def gen_ScriptIn(n: int) -> tuple[tuple[int, ...], AccessGraph]:
    _require(n >= 1, "ScriptIn needs n >= 1")
    seq: list[int] = []
    for i in range(1, n + 1):
        seq += gen_I1_copy(i)
        seq.append(chain_u(i, n))
    return tuple(seq), chained_cycles(n)


def gen_Jr(r: int) -> tuple[tuple[int, ...], AccessGraph]:
    _require(r >= 1, "Jr needs r >= 1")
    x = lambda j: chain_x(1, j)  # noqa: E731
    block = (x(4), x(3), x(2), x(1), chain_u(1, 1), x(1), x(2), x(3))
    return block * r, chained_cycles(1)
