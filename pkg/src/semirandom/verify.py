"""Independent checkers and extractors.

Nothing here depends on the strategy code; these functions are the second
entry of every double-entry check in the test suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graph_core import Graph, balanced_orientation

DP_CAP = 24
BRUTE_FORCE_CAP = 8


class VerificationError(ValueError):
    pass


@dataclass
class HamiltonCertificate:
    cycle: list[int]

    def check(self, g: Graph) -> bool:
        n = g.n
        c = self.cycle
        if n < 3 or len(c) != n or sorted(c) != list(range(n)):
            return False
        return all(c[(i + 1) % n] in g.adj[c[i]] for i in range(n))

    def to_dict(self) -> dict:
        return {"type": "hamilton", "cycle": list(self.cycle)}


@dataclass
class FactorCertificate:
    parts: list[list[int]]

    def check(self, g: Graph, r: int | None = None) -> bool:
        seen = [p for part in self.parts for p in part]
        if sorted(seen) != list(range(g.n)):
            return False
        for part in self.parts:
            if r is not None and len(part) != r:
                return False
            for a, b in itertools.combinations(part, 2):
                if b not in g.adj[a]:
                    return False
        return True

    def to_dict(self) -> dict:
        return {"type": "kr_factor", "parts": [list(p) for p in self.parts]}


def is_good_set(g: Graph, phi: Sequence[int], good: Iterable[int], h: Graph) -> bool:
    """True iff every edge of ``h`` inside ``good`` maps under ``phi`` into ``g``."""
    inside = bytearray(h.n)
    for x in good:
        inside[x] = 1
    gadj = g.adj
    for x in range(h.n):
        if not inside[x]:
            continue
        px = phi[x]
        for y in h.adj[x]:
            if y > x and inside[y] and phi[y] not in gadj[px]:
                return False
    return True


def is_embedding(g: Graph, phi: Sequence[int], h: Graph) -> bool:
    if len(phi) != h.n or sorted(phi) != list(range(g.n)):
        return False
    return is_good_set(g, phi, range(h.n), h)


def count_isolated(g: Graph) -> int:
    return sum(1 for a in g.adj if not a)


# ---------------------------------------------------------------------------
# Hamilton cycles through a block partition


def _block_path_pairs(g: Graph, block: Sequence[int]) -> set[tuple[int, int]]:
    """All ordered (start, end) pairs joined by a Hamilton path of ``g[block]``."""
    s = len(block)
    if s > DP_CAP:
        raise VerificationError(f"block of size {s} exceeds the DP cap {DP_CAP}")
    if s == 1:
        return {(block[0], block[0])}
    local = {v: i for i, v in enumerate(block)}
    nb = [0] * s
    for i, v in enumerate(block):
        for u in g.adj[v]:
            j = local.get(u)
            if j is not None:
                nb[i] |= 1 << j
    full = (1 << s) - 1
    pairs = set()
    for start in range(s):
        # reach[mask] = bitset of endpoints of paths from start covering mask
        reach = [0] * (full + 1)
        reach[1 << start] = 1 << start
        for mask in range(1 << s):
            ends = reach[mask]
            if not ends or not (mask >> start) & 1:
                continue
            e = ends
            while e:
                low = e & -e
                v = low.bit_length() - 1
                e ^= low
                ext = nb[v] & ~mask
                while ext:
                    lb = ext & -ext
                    reach[mask | lb] |= lb
                    ext ^= lb
        ends = reach[full]
        while ends:
            low = ends & -ends
            pairs.add((block[start], block[low.bit_length() - 1]))
            ends ^= low
    return pairs


def _block_path(g: Graph, block: Sequence[int], x: int, y: int) -> list[int]:
    """One Hamilton path of ``g[block]`` from ``x`` to ``y`` (assumed to exist)."""
    if x == y:
        return [x]
    s = len(block)
    local = {v: i for i, v in enumerate(block)}
    nb = [0] * s
    for i, v in enumerate(block):
        for u in g.adj[v]:
            j = local.get(u)
            if j is not None:
                nb[i] |= 1 << j
    full = (1 << s) - 1
    sx, sy = local[x], local[y]
    reach = [0] * (full + 1)
    reach[1 << sx] = 1 << sx
    for mask in range(1 << s):
        ends = reach[mask]
        if not ends:
            continue
        e = ends
        while e:
            low = e & -e
            v = low.bit_length() - 1
            e ^= low
            ext = nb[v] & ~mask
            while ext:
                lb = ext & -ext
                reach[mask | lb] |= lb
                ext ^= lb
    # walk back from y
    path = [sy]
    mask, v = full, sy
    while mask != 1 << sx:
        prev_mask = mask & ~(1 << v)
        cand = reach[prev_mask] & nb[v]
        if not cand:
            raise VerificationError("inconsistent DP table")
        low = cand & -cand
        v = low.bit_length() - 1
        mask = prev_mask
        path.append(v)
    path.reverse()
    return [block[i] for i in path]


def extract_hamilton(g: Graph, blocks: Sequence[Sequence[int]]) -> HamiltonCertificate | None:
    """Hamilton cycle of the form P_1, {y_1,x_2}, P_2, ..., P_k, {y_k,x_1}.

    ``P_i`` is a Hamilton path of ``g[V_i]`` from ``x_i`` to ``y_i``.  The
    connector choice is searched exhaustively (a layered reachability pass per
    choice of ``x_1``), so ``None`` means no cycle of this form exists.
    """
    k = len(blocks)
    if k == 0:
        return None
    pairs = [_block_path_pairs(g, b) for b in blocks]
    if any(not p for p in pairs):
        return None
    if k == 1:
        for x, y in sorted(pairs[0]):
            if x != y and y in g.adj[x] and len(blocks[0]) >= 3:
                return HamiltonCertificate(_block_path(g, blocks[0], x, y))
        return None
    # exits[i][x] = sorted ends y with (x, y) a path pair of block i
    exits: list[dict[int, list[int]]] = []
    for p in pairs:
        d: dict[int, list[int]] = {}
        for x, y in p:
            d.setdefault(x, []).append(y)
        for ys in d.values():
            ys.sort()
        exits.append(d)
    adj = g.adj
    for x1 in sorted(exits[0]):
        # layer i: map y_i -> (x_i, y_{i-1}) back-pointer
        back: list[dict[int, tuple[int, int]]] = [{y: (x1, -1) for y in exits[0][x1]}]
        ok = True
        for i in range(1, k):
            layer: dict[int, tuple[int, int]] = {}
            prev = back[-1]
            for xi, ys in sorted(exits[i].items()):
                link = next((yp for yp in sorted(prev) if xi in adj[yp]), None)
                if link is None:
                    continue
                for y in ys:
                    if y not in layer:
                        layer[y] = (xi, link)
            if not layer:
                ok = False
                break
            back.append(layer)
        if not ok:
            continue
        closing = next((y for y in sorted(back[-1]) if x1 in adj[y]), None)
        if closing is None:
            continue
        ends = [0] * k
        starts = [0] * k
        y = closing
        for i in range(k - 1, -1, -1):
            xi, yprev = back[i][y]
            starts[i], ends[i] = xi, y
            y = yprev
        cycle: list[int] = []
        for i in range(k):
            cycle.extend(_block_path(g, blocks[i], starts[i], ends[i]))
        cert = HamiltonCertificate(cycle)
        if not cert.check(g):
            raise VerificationError("stitched cycle failed its own check")
        return cert
    return None


# ---------------------------------------------------------------------------
# K_r-factors inside blocks


def _block_factor(g: Graph, block: Sequence[int], r: int) -> list[list[int]] | None:
    if len(block) > DP_CAP:
        raise VerificationError(f"block of size {len(block)} exceeds the cap {DP_CAP}")
    if len(block) % r:
        return None
    members = sorted(block)
    adj = g.adj

    def solve(rest: list[int]) -> list[list[int]] | None:
        if not rest:
            return []
        v = rest[0]
        others = [u for u in rest[1:] if u in adj[v]]
        for combo in itertools.combinations(others, r - 1):
            if all(b in adj[a] for a, b in itertools.combinations(combo, 2)):
                taken = set(combo)
                sub = solve([u for u in rest[1:] if u not in taken])
                if sub is not None:
                    return [[v, *combo], *sub]
        return None

    return solve(members)


def extract_kr_factor(g: Graph, blocks: Sequence[Sequence[int]], r: int) -> FactorCertificate | None:
    """Exact per-block clique partition; ``None`` if some block has none."""
    parts: list[list[int]] = []
    for b in blocks:
        if len(b) > DP_CAP:
            raise VerificationError(f"block of size {len(b)} exceeds the cap {DP_CAP}")
        sub = _block_factor(g, b, r)
        if sub is None:
            return None
        parts.extend(sub)
    cert = FactorCertificate(parts)
    if not cert.check(g, r):
        raise VerificationError("factor failed its own check")
    return cert


# ---------------------------------------------------------------------------
# offline oracle


def brute_force_offline(h: Graph, sequence: Sequence[int]) -> int | None:
    """Least prefix length over all bijections, by full enumeration (n <= 8).

    Demands are the out-degrees of ``balanced_orientation(h)``.  For a fixed
    bijection the least prefix is the latest round at which some vertex gets
    its last required appearance.  ``None`` means infeasible.
    """
    n = h.n
    if n > BRUTE_FORCE_CAP:
        raise VerificationError(f"brute force limited to n <= {BRUTE_FORCE_CAP}")
    demand = balanced_orientation(h)[0].out_degrees()
    # nth[v][j] = 1-based round of the (j+1)-th appearance of v
    nth: list[list[int]] = [[] for _ in range(n)]
    for t, w in enumerate(sequence, start=1):
        nth[w].append(t)
    best: int | None = None
    for perm in itertools.permutations(range(n)):
        worst = 0
        for u in range(n):
            d = demand[u]
            if d == 0:
                continue
            rounds = nth[perm[u]]
            if len(rounds) < d:
                worst = -1
                break
            worst = max(worst, rounds[d - 1])
        if worst >= 0 and (best is None or worst < best):
            best = worst
    return best
