"""Non-adaptive Builders: every vertex walks down a fixed list.

The block-structured families are stored lazily, one partition plus a rule
for the list order, since explicit lists cost ``n^2`` entries.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph_core import Graph


@dataclass
class BlockPartition:
    """Consecutive index ranges ``V_1..V_k`` covering ``0..n-1``."""

    starts: list[int]
    n: int

    @classmethod
    def balanced(cls, n: int, k: int, unit: int = 1) -> "BlockPartition":
        """``k`` blocks made of ``n // unit`` units, the first few one unit larger."""
        units = n // unit
        if k < 1 or k > units or units * unit != n:
            raise ValueError(f"cannot split {n} into {k} blocks of {unit}-multiples")
        base, extra = divmod(units, k)
        starts, pos = [], 0
        for i in range(k):
            starts.append(pos)
            pos += (base + (i < extra)) * unit
        return cls(starts, n)

    @property
    def k(self) -> int:
        return len(self.starts)

    def bounds(self, i: int) -> tuple[int, int]:
        hi = self.starts[i + 1] if i + 1 < self.k else self.n
        return self.starts[i], hi

    def block(self, i: int) -> range:
        return range(*self.bounds(i))

    @property
    def blocks(self) -> list[list[int]]:
        return [list(self.block(i)) for i in range(self.k)]

    def sizes(self) -> list[int]:
        return [hi - lo for lo, hi in map(self.bounds, range(self.k))]

    @property
    def s_min(self) -> int:
        return min(self.sizes())

    @property
    def s_max(self) -> int:
        return max(self.sizes())

    def block_of(self, v: int) -> int:
        return bisect.bisect_right(self.starts, v) - 1


class ListFamily:
    """Explicit lists ``L^w`` plus the per-vertex cursor."""

    def __init__(self, n: int, lists: Sequence[Sequence[int]] | None = None):
        self.n = n
        self._lists = [list(x) for x in lists] if lists is not None else None
        self.cursor = np.zeros(n, dtype=np.int64)

    def entry(self, w: int, i: int) -> int:
        """``L^w(i)`` with 1-based ``i``."""
        return self._lists[w][i - 1]

    def list_of(self, w: int) -> list[int]:
        return [self.entry(w, i) for i in range(1, self.n)]

    def reset(self) -> None:
        self.cursor[:] = 0

    def to_dict(self) -> dict:
        return {"kind": "explicit", "n": self.n, "lists": self._lists}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


class BlockListFamily(ListFamily):
    """``L^v``: own block minus ``v``, then (optionally) the next block, then the rest.

    Every segment is in ascending order.
    """

    def __init__(self, partition: BlockPartition, with_next: bool, kind: str, r: int | None = None):
        super().__init__(partition.n)
        self.partition = partition
        self.with_next = with_next
        self.kind = kind
        self.r = r

    def _segments(self, w: int) -> list[tuple[int, int]]:
        p = self.partition
        i = p.block_of(w)
        own = p.bounds(i)
        segs = [own]
        if self.with_next and p.k > 1:
            segs.append(p.bounds((i + 1) % p.k))
        return segs

    def entry(self, w: int, i: int) -> int:
        segs = self._segments(w)
        lo, hi = segs[0]
        j = i - 1
        # own block without w
        if j < hi - lo - 1:
            v = lo + j
            return v if v < w else v + 1
        j -= hi - lo - 1
        for lo2, hi2 in segs[1:]:
            if j < hi2 - lo2:
                return lo2 + j
            j -= hi2 - lo2
        # the rest, ascending, skipping the ranges already listed
        v = j
        for lo2, hi2 in sorted(segs):
            if v >= lo2:
                v += hi2 - lo2
        if v >= self.n:
            raise IndexError(f"list of {w} has no entry {i}")
        return v

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n, "k": self.partition.k, "r": self.r}


def list_step(family: ListFamily, offered: int) -> int:
    """Advance ``offered``'s cursor and return that list entry (the last one once exhausted)."""
    c = int(family.cursor[offered]) + 1
    family.cursor[offered] = c
    return family.entry(offered, min(c, family.n - 1))


def default_blocks(n: int) -> int:
    return min(n, max(1, round(n / math.sqrt(math.log(n))))) if n > 1 else 1


def hamilton_lists(n: int, k: int | None = None) -> tuple[BlockListFamily, BlockPartition]:
    if n < 3:
        raise ValueError("need n >= 3")
    k = default_blocks(n) if k is None else k
    part = BlockPartition.balanced(n, k)
    return BlockListFamily(part, with_next=True, kind="hamilton"), part


def kr_factor_lists(n: int, r: int, k: int | None = None) -> tuple[BlockListFamily, BlockPartition]:
    if r < 1 or n % r:
        raise ValueError(f"r={r} does not divide n={n}")
    if k is None:
        k = min(n // r, default_blocks(n))
    part = BlockPartition.balanced(n, k, unit=r)
    return BlockListFamily(part, with_next=False, kind="kr_factor", r=r), part


def isolated_lists(n: int) -> tuple[BlockListFamily, BlockPartition]:
    """Hamilton block lists, also usable at ``n = 2``."""
    if n < 2:
        raise ValueError("need n >= 2")
    part = BlockPartition.balanced(n, default_blocks(n))
    return BlockListFamily(part, with_next=True, kind="hamilton"), part


def family_from_dict(d: dict) -> ListFamily:
    kind = d["kind"]
    if kind == "explicit":
        return ListFamily(d["n"], d["lists"])
    if kind == "hamilton":
        fam, _ = (hamilton_lists(d["n"], d["k"]) if d["n"] >= 3 else isolated_lists(d["n"]))
        return fam
    if kind == "kr_factor":
        return kr_factor_lists(d["n"], d["r"], d["k"])[0]
    raise ValueError(f"unknown list family {kind!r}")


def recommended_budget(kind: str, n: int, r: int | None = None) -> int:
    root = math.sqrt(math.log(n))
    if kind in ("hamilton", "isolated"):
        return math.ceil(8 * n * root)
    if kind == "kr_factor":
        if r is None:
            raise ValueError("kr_factor budget needs r")
        return math.ceil(9 * r * n * root)
    raise ValueError(f"unknown budget kind {kind!r}")


@dataclass
class NonAdaptiveBuilder:
    """Runs a list family.  ``goal`` picks the stopping rule.

    ``isolated``: stop when no vertex is isolated (tracked incrementally).
    ``none``: never stop early; verification happens after the run.
    """

    family: ListFamily
    goal: str = "none"
    phase: str = "lists"
    isolated: int = field(init=False)

    def __post_init__(self):
        self.isolated = self.family.n

    def on_offer(self, offered: int, round: int, g: Graph) -> int:
        u = list_step(self.family, offered)
        if u != offered:
            # an edge touching an isolated vertex is always new
            self.isolated -= (not g.adj[offered]) + (not g.adj[u])
        return u

    def is_done(self, g: Graph) -> bool:
        return self.goal == "isolated" and self.isolated == 0
