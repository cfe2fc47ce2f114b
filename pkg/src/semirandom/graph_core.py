"""Graphs, target generators and the balanced orientation.

Vertices are always ``0..n-1``.  A :class:`Graph` doubles as the target ``H``
and as Builder's growing graph ``G``; the engine mutates it through
:meth:`Graph.add_edge` only.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np


class GraphError(ValueError):
    pass


class Graph:
    """Simple undirected graph stored as adjacency sets."""

    __slots__ = ("n", "adj", "edge_count")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        self.n = n
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self.edge_count = 0
        for u, v in edges:
            if not self.add_edge(u, v):
                raise GraphError(f"duplicate edge {{{u}, {v}}}")

    def add_edge(self, u: int, v: int) -> bool:
        """Insert ``{u, v}``; return False if it was already present."""
        if u == v:
            raise GraphError(f"self-loop at {u}")
        au = self.adj[u]
        if v in au:
            return False
        au.add(v)
        self.adj[v].add(u)
        self.edge_count += 1
        return True

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def neighbors(self, v: int) -> list[int]:
        return sorted(self.adj[v])

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in sorted(self.adj[u]):
                if u < v:
                    yield u, v

    def copy(self) -> "Graph":
        g = Graph(self.n)
        g.adj = [set(a) for a in self.adj]
        g.edge_count = self.edge_count
        return g

    def subgraph_edges(self, keep: Sequence[bool]) -> list[tuple[int, int]]:
        return [(u, v) for u, v in self.edges() if keep[u] and keep[v]]

    def check(self) -> None:
        """Raise if symmetry, loop-freeness or the edge count is broken."""
        total = 0
        for u, nbrs in enumerate(self.adj):
            if u in nbrs:
                raise GraphError(f"self-loop at {u}")
            for v in nbrs:
                if not 0 <= v < self.n or u not in self.adj[v]:
                    raise GraphError(f"asymmetric adjacency {u}->{v}")
            total += len(nbrs)
        if total != 2 * self.edge_count:
            raise GraphError("edge_count out of sync with adjacency")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count})"


@dataclass
class Orientation:
    """Direction for every edge of ``base``; ``out[u]`` is sorted ascending."""

    base: Graph
    out: list[list[int]]

    def out_degree(self, u: int) -> int:
        return len(self.out[u])

    def out_degrees(self) -> list[int]:
        return [len(o) for o in self.out]

    def in_neighbors(self) -> list[list[int]]:
        inn: list[list[int]] = [[] for _ in range(self.base.n)]
        for u, outs in enumerate(self.out):
            for v in outs:
                inn[v].append(u)
        return inn

    def arcs(self) -> list[tuple[int, int]]:
        return [(u, v) for u, outs in enumerate(self.out) for v in outs]


# ---------------------------------------------------------------------------
# structural operations


def square(h: Graph) -> Graph:
    """Graph on the same vertices joining every pair at distance 1 or 2."""
    sq = Graph(h.n)
    for u in range(h.n):
        reach = set(h.adj[u])
        for v in h.adj[u]:
            reach |= h.adj[v]
        reach.discard(u)
        for v in reach:
            if u < v:
                sq.add_edge(u, v)
    return sq


def greedy_independent_set(g: Graph) -> set[int]:
    """Maximal independent set, scanning by ascending degree then index.

    Any maximal independent set has at least ``n / (max_degree + 1)`` vertices.
    """
    order = sorted(range(g.n), key=lambda v: (len(g.adj[v]), v))
    blocked = bytearray(g.n)
    chosen = set()
    for v in order:
        if blocked[v]:
            continue
        chosen.add(v)
        blocked[v] = 1
        for u in g.adj[v]:
            blocked[u] = 1
    return chosen


def _euler_orient(n_total: int, edge_list: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Orient every edge of an all-even-degree multigraph along Euler circuits.

    Hierholzer, iterative; components are started from their lowest vertex and
    incident edges are consumed in ascending neighbour order.
    """
    inc: list[list[tuple[int, int]]] = [[] for _ in range(n_total)]
    for eid, (u, v) in enumerate(edge_list):
        inc[u].append((v, eid))
        inc[v].append((u, eid))
    for lst in inc:
        lst.sort()
    used = bytearray(len(edge_list))
    ptr = [0] * n_total
    arcs: list[tuple[int, int]] = []
    for start in range(n_total):
        if ptr[start] >= len(inc[start]):
            continue
        # stack of (vertex, edge id used to enter it)
        stack = [(start, -1)]
        while stack:
            v, _ = stack[-1]
            lst = inc[v]
            p = ptr[v]
            while p < len(lst) and used[lst[p][1]]:
                p += 1
            ptr[v] = p
            if p == len(lst):
                _, eid = stack.pop()
                if stack and eid >= 0:
                    # edge eid was traversed from stack[-1] to v
                    arcs.append((stack[-1][0], v))
                continue
            w, eid = lst[p]
            used[eid] = 1
            stack.append((w, eid))
    return arcs


def balanced_orientation(h: Graph) -> tuple[Orientation, set[int]]:
    """Orientation with out-degree <= floor(D/2)+1 and a large sink set.

    The sink set is a maximal independent set of ``square(h)``.  The rest of
    the graph, padded with an auxiliary vertex (index ``n``) joined to every
    odd-degree vertex, is oriented along Euler circuits; edges into the sink
    set point towards it.  The auxiliary vertex is dropped afterwards.
    """
    n = h.n
    sinks = greedy_independent_set(square(h))
    in_sink = bytearray(n)
    for v in sinks:
        in_sink[v] = 1

    inner: list[tuple[int, int]] = []
    towards_sink: list[tuple[int, int]] = []
    deg0 = [0] * n
    for u, v in h.edges():
        if in_sink[u] and in_sink[v]:
            raise AssertionError("sink set is not independent")
        if in_sink[v]:
            towards_sink.append((u, v))
        elif in_sink[u]:
            towards_sink.append((v, u))
        else:
            inner.append((u, v))
            deg0[u] += 1
            deg0[v] += 1

    aux = n
    padded = list(inner)
    padded.extend((u, aux) for u in range(n) if deg0[u] % 2 == 1)

    out: list[list[int]] = [[] for _ in range(n)]
    for u, v in _euler_orient(n + 1, padded):
        if u != aux and v != aux:
            out[u].append(v)
    for u, v in towards_sink:
        out[u].append(v)
    for o in out:
        o.sort()
    return Orientation(h, out), sinks


def scattered_candidates(h: Graph, allowed: Iterable[int], count: int, deg_cap: int) -> list[int]:
    """Greedily pick up to ``count`` vertices pairwise at distance >= 3.

    Scans ``allowed`` in ascending order and skips vertices of degree above
    ``deg_cap``.  Each pick blocks its closed 2-ball.
    """
    if count <= 0:
        return []
    blocked = bytearray(h.n)
    picked: list[int] = []
    adj = h.adj
    for v in sorted(allowed):
        if blocked[v] or len(adj[v]) > deg_cap:
            continue
        picked.append(v)
        if len(picked) == count:
            break
        blocked[v] = 1
        for u in adj[v]:
            blocked[u] = 1
            for w in adj[u]:
                blocked[w] = 1
    return picked


def degeneracy(h: Graph) -> int:
    """Smallest D such that every subgraph has a vertex of degree <= D."""
    deg = [len(a) for a in h.adj]
    if not deg:
        return 0
    maxd = max(deg)
    buckets: list[set[int]] = [set() for _ in range(maxd + 1)]
    for v, d in enumerate(deg):
        buckets[d].add(v)
    removed = bytearray(h.n)
    best = 0
    lo = 0
    for _ in range(h.n):
        lo = 0
        while not buckets[lo]:
            lo += 1
        v = min(buckets[lo])
        buckets[lo].remove(v)
        removed[v] = 1
        best = max(best, lo)
        for u in h.adj[v]:
            if not removed[u]:
                buckets[deg[u]].remove(u)
                deg[u] -= 1
                buckets[deg[u]].add(u)
    return best


def bfs_distances(h: Graph, source: int) -> list[int]:
    dist = [-1] * h.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u in h.adj[v]:
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


# ---------------------------------------------------------------------------
# targets

KINDS = (
    "cycle",
    "path",
    "perfect_matching",
    "kr_factor",
    "star_forest",
    "random_regular",
    "random_forest",
    "from_file",
)

REGULAR_ATTEMPTS = 200


@dataclass(frozen=True)
class TargetSpec:
    kind: str
    n: int = 0
    delta: int | None = None
    r: int | None = None
    path: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GraphError(f"unknown target kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "TargetSpec":
        return cls(
            kind=d["kind"],
            n=int(d.get("n", 0)),
            delta=d.get("delta"),
            r=d.get("r"),
            path=d.get("path"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TargetSpec":
        return cls.from_dict(json.loads(text))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def _random_regular(n: int, d: int, rng: np.random.Generator) -> Graph:
    """Configuration model: pair shuffled stubs, re-pair only the rejects.

    A single attempt fails when the leftover stubs cannot form any new simple
    edge; up to ``REGULAR_ATTEMPTS`` attempts are made.
    """
    for _ in range(REGULAR_ATTEMPTS):
        edges: set[tuple[int, int]] = set()
        stubs = np.repeat(np.arange(n), d)
        ok = True
        while stubs.size:
            rng.shuffle(stubs)
            leftover: list[int] = []
            for s1, s2 in zip(stubs[0::2].tolist(), stubs[1::2].tolist()):
                if s1 > s2:
                    s1, s2 = s2, s1
                if s1 != s2 and (s1, s2) not in edges:
                    edges.add((s1, s2))
                else:
                    leftover.append(s1)
                    leftover.append(s2)
            if leftover:
                pool = sorted(set(leftover))
                if not any(
                    a < b and (a, b) not in edges for a in pool for b in pool
                ):
                    ok = False
                    break
            stubs = np.array(leftover, dtype=np.int64)
        if ok:
            return Graph(n, sorted(edges))
    raise GraphError(f"random_regular(n={n}, d={d}) failed after {REGULAR_ATTEMPTS} attempts")


def _random_forest(n: int, delta: int, rng: np.random.Generator) -> Graph:
    g = Graph(n)
    open_: list[int] = []
    for v in range(n):
        if open_:
            j = int(rng.integers(0, len(open_)))
            u = open_[j]
            g.add_edge(u, v)
            if len(g.adj[u]) >= delta:
                open_[j] = open_[-1]
                open_.pop()
        if len(g.adj[v]) < delta:
            open_.append(v)
    return g


def generate(spec: TargetSpec, seed=0) -> Graph:
    """Build the target graph described by ``spec``; deterministic in ``seed``."""
    n, kind = spec.n, spec.kind
    if kind == "from_file":
        if not spec.path:
            raise GraphError("from_file needs a path")
        return read_edge_list(spec.path)
    if n < 0:
        raise GraphError("n must be non-negative")
    if kind == "cycle":
        if n < 3:
            raise GraphError("cycle needs n >= 3")
        return Graph(n, [(i, (i + 1) % n) for i in range(n)])
    if kind == "path":
        return Graph(n, [(i, i + 1) for i in range(n - 1)])
    if kind == "perfect_matching":
        if n % 2:
            raise GraphError("perfect_matching needs even n")
        return Graph(n, [(2 * i, 2 * i + 1) for i in range(n // 2)])
    if kind == "kr_factor":
        r = spec.r
        if r is None or r < 1 or n % r:
            raise GraphError(f"kr_factor needs r | n (n={n}, r={r})")
        edges = []
        for base in range(0, n, r):
            edges.extend((base + i, base + j) for i in range(r) for j in range(i + 1, r))
        return Graph(n, edges)
    delta = spec.delta
    if delta is None or delta < 0:
        raise GraphError(f"{kind} needs a non-negative delta")
    if kind == "star_forest":
        edges = []
        for s in range(n // (delta + 1)):
            c = s * (delta + 1)
            edges.extend((c, c + j) for j in range(1, delta + 1))
        return Graph(n, edges)
    rng = _rng(seed)
    if kind == "random_regular":
        if (n * delta) % 2 or delta >= max(n, 1):
            raise GraphError(f"random_regular needs delta*n even and delta < n (n={n}, delta={delta})")
        return _random_regular(n, delta, rng)
    if kind == "random_forest":
        if delta < 1:
            return Graph(n)
        return _random_forest(n, delta, rng)
    raise GraphError(f"unhandled kind {kind}")


# ---------------------------------------------------------------------------
# edge-list files: "n m" then m lines "u v", 0-indexed


def write_edge_list(g: Graph, path) -> None:
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def parse_edge_list(text: str) -> Graph:
    tokens = text.split()
    if len(tokens) < 2:
        raise GraphError("edge list needs a header 'n m'")
    n, m = int(tokens[0]), int(tokens[1])
    body = tokens[2:]
    if len(body) != 2 * m:
        raise GraphError(f"expected {m} edges, found {len(body) / 2:g}")
    g = Graph(n)
    for i in range(m):
        u, v = int(body[2 * i]), int(body[2 * i + 1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge {u} {v} out of range")
        if not g.add_edge(u, v):
            raise GraphError(f"duplicate edge {u} {v}")
    return g


def read_edge_list(path) -> Graph:
    return parse_edge_list(Path(path).read_text(encoding="utf-8"))
