"""Adaptive Builder strategies.

* the initial embedding step (orientation driven) and good-set extraction,
* the role-switching step with its candidate table,
* the phased spanning strategy and the high-degree direct strategy,
* greedy forest embedding and the two-stage forest strategy,
* the offline minimum and a Builder that realises it.

Process vertices are ``0..n-1``; target vertices are ``0..n-1`` too, and
``phi[x]`` is the process vertex playing target vertex ``x``.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .graph_core import Graph, Orientation, balanced_orientation, scattered_candidates

log = logging.getLogger(__name__)


class SetupError(RuntimeError):
    """The switching setup could not be satisfied."""


def fallback_vertex(offered: int, g: Graph) -> int:
    """Lowest vertex other than ``offered`` not adjacent to it (else lowest other)."""
    nbrs = g.adj[offered]
    for v in range(g.n):
        if v != offered and v not in nbrs:
            return v
    return 1 if offered == 0 else 0


# ---------------------------------------------------------------------------
# parameters


def default_alpha(delta: int, n: int) -> float:
    return max(1.0 / (16 * max(delta, 1) ** 3), 1.0 / max(n, 1))


def strict_alpha(delta: int) -> float:
    return 1e-8 * max(delta, 1) ** -5


def appearance_budget(d: int, alpha: float, n: int) -> int:
    """Rounds after which fewer than ``alpha*n`` vertices are offered <= d times (whp)."""
    return math.ceil((d + math.sqrt(6 * d * math.log(1 / alpha))) * n)


@dataclass
class PhaseSchedule:
    n: int
    d: int
    alpha: float
    ell0: int
    ell1: int
    max_phase2_iterations: int = 40

    def __post_init__(self):
        if self.ell0 < 0 or self.ell1 < 0:
            raise ValueError("phase lengths must be non-negative")

    def ell2_of(self, m: int) -> int:
        return max(1, math.ceil(self.n * m ** (-1.0 / (4 * self.d))))

    @staticmethod
    def switching_length(d: int, n: int) -> int:
        return math.ceil((math.log(2 * d) + d + 3 * math.sqrt(d)) * n)

    @classmethod
    def for_target(
        cls,
        h: Graph,
        degeneracy: int | None = None,
        alpha: float | str | None = None,
        ell0: int | None = None,
        ell1: int | None = None,
        max_phase2_iterations: int = 40,
    ) -> "PhaseSchedule":
        n = h.n
        delta = max(h.max_degree(), 1)
        D = delta if degeneracy is None else degeneracy
        d = max(1, min(2 * D, delta))
        if alpha is None:
            alpha = default_alpha(delta, n)
        elif alpha == "strict":
            alpha = strict_alpha(delta)
        alpha = float(alpha)
        if ell0 is None:
            half = delta // 2
            a_prime = alpha / (2 * delta)
            # floor at the coupon-collector length, which is what half == 0 needs
            ell0 = max(appearance_budget(half, a_prime, n), math.ceil(math.log(1 / a_prime) * n))
        if ell1 is None:
            ell1 = cls.switching_length(d, n)
        return cls(n, d, alpha, int(ell0), int(ell1), max_phase2_iterations)


# ---------------------------------------------------------------------------
# initial embedding


def initial_strategy_step(phi: Sequence[int], phi_inv: Sequence[int], orientation: Orientation,
                          offered: int, g: Graph) -> int:
    """Join ``offered`` to the lowest image of an out-neighbour it still misses."""
    x = phi_inv[offered]
    nbrs = g.adj[offered]
    best = -1
    for y in orientation.out[x]:
        u = phi[y]
        if u not in nbrs and (best < 0 or u < best):
            best = u
    return best if best >= 0 else fallback_vertex(offered, g)


def extract_good_set(h: Graph, orientation: Orientation, phi: Sequence[int],
                     counts: Sequence[int], threshold: int | None = None) -> tuple[set[int], set[int]]:
    """Split V(H) after the initial phase into a good part and the rest.

    ``A'`` holds the target vertices whose image was offered at least
    ``threshold`` times; vertices with an in-neighbour outside ``A'`` are
    removed from it.
    """
    if threshold is None:
        threshold = h.max_degree() // 2 + 1
    n = h.n
    heavy = [counts[phi[x]] >= threshold for x in range(n)]
    fed_from_outside = bytearray(n)
    for x in range(n):
        if not heavy[x]:
            for y in orientation.out[x]:
                fed_from_outside[y] = 1
    good = {x for x in range(n) if heavy[x] and not fed_from_outside[x]}
    return good, set(range(n)) - good


# ---------------------------------------------------------------------------
# role switching


@dataclass
class EmbeddingState:
    """Mutable embedding used during one switching phase."""

    phi: list[int]
    phi_inv: list[int]
    good: bytearray
    bad: list[int]
    candidates: list[list[int]] = field(default_factory=list)
    owner: dict[int, tuple[int, int]] = field(default_factory=dict)
    switched: list[bool] = field(default_factory=list)
    m: int = 0
    good_count: int = 0
    switch_log: list[tuple[int, int, int]] = field(default_factory=list)  # (round, i, k)

    @classmethod
    def from_phi(cls, phi: Sequence[int], good: set[int] | Sequence[int]) -> "EmbeddingState":
        n = len(phi)
        inv = [0] * n
        for x, p in enumerate(phi):
            inv[p] = x
        flags = bytearray(n)
        for x in good:
            flags[x] = 1
        bad = [x for x in range(n) if not flags[x]]
        return cls(list(phi), inv, flags, bad, good_count=n - len(bad))

    def current_bad(self) -> list[int]:
        return [b for i, b in enumerate(self.bad) if not self.switched[i]] if self.switched else list(self.bad)

    def good_set(self) -> set[int]:
        return {x for x in range(len(self.phi)) if self.good[x]}

    @property
    def complete(self) -> bool:
        return self.good_count == len(self.phi)

    def check(self, h: Graph) -> None:
        """Assert the structural invariants (bijection, partition, candidate table)."""
        n = len(self.phi)
        assert sorted(self.phi) == list(range(n))
        assert all(self.phi_inv[self.phi[x]] == x for x in range(n))
        assert self.good_count == sum(self.good)
        seen: set[int] = set()
        bad_now = set(self.current_bad())
        for i, row in enumerate(self.candidates):
            if self.switched[i]:
                continue
            for a in row:
                ball = {a, *h.adj[a]}
                assert not ball & seen, "candidate neighbourhoods overlap"
                assert not ball & bad_now, "candidate touches a bad vertex"
                seen |= ball


def promote_free_bad(h: Graph, g: Graph, phi: Sequence[int], good: set[int], bad: set[int]) -> int:
    """Move bad vertices whose edges into the good set are already built."""
    moved = 0
    for b in sorted(bad):
        pb = phi[b]
        if all(phi[y] in g.adj[pb] for y in h.adj[b] if y in good):
            good.add(b)
            bad.discard(b)
            moved += 1
    return moved


def switch_multiplicity(good_size: int, bad_size: int, delta: int) -> int:
    """Candidates per bad vertex: ``ceil(|A| / (8 D^2 |B|))``."""
    return math.ceil(good_size / (8 * delta * delta * bad_size))


def setup_switching(h: Graph, phi: Sequence[int], good: set[int], bad: set[int],
                    degeneracy_cap: int, m: int | None = None,
                    delta: int | None = None) -> EmbeddingState:
    """Pick the candidate table ``a[i][k]`` for a switching phase.

    ``m`` defaults to ``ceil(|A| / (8 D^2 |B|))``.  When the scattered packing
    is too small, ``m`` is halved until it fits; below 1 a SetupError is raised.
    """
    if not bad:
        raise SetupError("no bad vertices to switch")
    if delta is None:
        delta = max(h.max_degree(), 1)
    r = len(bad)
    if len(good) < 4 * delta * r:
        raise SetupError(f"|A|={len(good)} < 4*{delta}*|B|={4 * delta * r}")
    if m is None:
        m = switch_multiplicity(len(good), r, delta)
    m = max(1, m)
    cap = min(2 * degeneracy_cap, delta)
    bad_flags = bytearray(h.n)
    for b in bad:
        bad_flags[b] = 1
    eligible = [a for a in good
                if len(h.adj[a]) <= cap and not any(bad_flags[y] for y in h.adj[a])]
    while True:
        cands = scattered_candidates(h, eligible, r * m, cap)
        if len(cands) >= r * m:
            break
        if m == 1:
            raise SetupError(f"only {len(cands)} scattered candidates for {r} bad vertices")
        log.info("setup_switching: %d candidates < r*m = %d, halving m", len(cands), r * m)
        m //= 2

    state = EmbeddingState.from_phi(phi, good)
    state.bad = sorted(bad)
    state.m = m
    state.switched = [False] * r
    state.candidates = [cands[i * m:(i + 1) * m] for i in range(r)]
    owner = state.owner
    for i, row in enumerate(state.candidates):
        for k, a in enumerate(row):
            owner[phi[a]] = (i, k)
            for y in h.adj[a]:
                owner[phi[y]] = (i, k)
    return state


def switching_step(state: EmbeddingState, h: Graph, offered: int, round: int, g: Graph) -> int:
    """One round of the role-switching strategy; may switch ``a[i][k]`` and ``b_i``.

    The switch test is evaluated on the graph *after* the chosen edge is added.
    """
    hit = state.owner.get(offered)
    if hit is None or state.switched[hit[0]]:
        return fallback_vertex(offered, g)
    i, k = hit
    phi, good, gadj = state.phi, state.good, g.adj
    b = state.bad[i]
    a = state.candidates[i][k]
    pa, pb = phi[a], phi[b]
    # images of N_H(b) inside A, under the current embedding
    target = [phi[y] for y in h.adj[b] if good[y]]

    if offered == pa:
        nbrs = gadj[pa]
        missing = [u for u in target if u not in nbrs]
        chosen = min(missing) if missing else fallback_vertex(offered, g)
    else:
        chosen = pb

    def linked(x: int, y: int) -> bool:
        return y in gadj[x] or (x == offered and y == chosen) or (y == offered and x == chosen)

    if all(linked(pb, phi[y]) for y in h.adj[a]) and all(linked(pa, u) for u in target):
        phi[a], phi[b] = pb, pa
        state.phi_inv[pa], state.phi_inv[pb] = b, a
        good[b] = 1
        state.good_count += 1
        state.switched[i] = True
        state.switch_log.append((round, i, k))
    return chosen


# ---------------------------------------------------------------------------
# spanning strategy


class SpanningBuilder:
    """Initial embedding, then role-switching phases until V(H) is good.

    Phases: ``initial`` for ``ell0`` rounds (finishing early if every target
    vertex already has all its out-edges), ``switch1`` for ``ell1`` rounds and
    ``switch2.<t>`` for ``ell2_of(m_t)`` rounds each.  ``observer`` (if given)
    is called as ``observer(builder, offered, chosen, round)`` after every
    decision.
    """

    def __init__(self, h: Graph, schedule: PhaseSchedule | None = None, degeneracy: int | None = None,
                 debug: bool = False, observer: Callable | None = None):
        self.h = h
        self.n = h.n
        self.delta = max(h.max_degree(), 1)
        self.degeneracy = self.delta if degeneracy is None else degeneracy
        self.schedule = schedule or PhaseSchedule.for_target(h, degeneracy)
        self.debug = debug
        self.observer = observer
        self.orientation, _ = balanced_orientation(h)
        self.phi = list(range(self.n))
        self.phi_inv = list(range(self.n))
        self.counts = [0] * self.n
        self.outdeg = self.orientation.out_degrees()
        self.deficient = sum(1 for d in self.outdeg if d > 0)
        self.state: EmbeddingState | None = None
        self.phase = "initial"
        self.phase_index = 0
        self.phase_left = self.schedule.ell0
        self.done = h.edge_count == 0
        self.gave_up: str | None = None
        self.version = 0

    # -- phase bookkeeping
    def _fail(self, reason: str) -> None:
        self.gave_up = reason
        self.phase = "failed"
        log.info("spanning strategy gave up: %s", reason)

    def _start_switching(self, g: Graph, good: set[int], bad: set[int]) -> None:
        promote_free_bad(self.h, g, self.phi, good, bad)
        if not bad:
            self.done = True
            self.state = EmbeddingState.from_phi(self.phi, good)
            self.version += 1
            return
        m = switch_multiplicity(self.n, len(bad), self.delta)
        try:
            self.state = setup_switching(self.h, self.phi, good, bad, self.degeneracy, m=m, delta=self.delta)
        except SetupError as exc:
            self._fail(str(exc))
            return
        self.version += 1
        if self.phase_index == 0:
            self.phase = "switch1"
            self.phase_left = self.schedule.ell1
        else:
            self.phase = f"switch2.{self.phase_index}"
            self.phase_left = self.schedule.ell2_of(self.state.m)
        self.phase_index += 1

    def _advance(self, g: Graph) -> None:
        if self.phase == "initial":
            good, bad = extract_good_set(self.h, self.orientation, self.phi, self.counts)
            self._start_switching(g, good, bad)
            return
        st = self.state
        assert st is not None
        self.phi = st.phi
        self.phi_inv = st.phi_inv
        if self.phase_index > self.schedule.max_phase2_iterations:
            self._fail("phase-2 iteration cap reached")
            return
        good = st.good_set()
        bad = set(st.current_bad())
        self._start_switching(g, good, bad)

    # -- Builder interface
    def prepare(self, g: Graph) -> None:
        """Enter the next phase if the current one is used up."""
        while not self.done and not self.gave_up and self.phase_left <= 0:
            self._advance(g)

    def on_offer(self, offered: int, round: int, g: Graph) -> int:
        self.prepare(g)
        if self.done or self.gave_up:
            chosen = fallback_vertex(offered, g)
        elif self.phase == "initial":
            chosen = initial_strategy_step(self.phi, self.phi_inv, self.orientation, offered, g)
            c = self.counts[offered] + 1
            self.counts[offered] = c
            if c == self.outdeg[self.phi_inv[offered]]:
                self.deficient -= 1
                if self.deficient == 0:
                    self.done = True
                    self.state = EmbeddingState.from_phi(self.phi, range(self.n))
            self.phase_left -= 1
        else:
            st = self.state
            before = st.good_count
            chosen = switching_step(st, self.h, offered, round, g)
            if st.good_count != before:
                self.version += 1
                if st.complete:
                    self.done = True
            if self.debug:
                st.check(self.h)
            self.phase_left -= 1
        if self.observer is not None:
            self.observer(self, offered, chosen, round)
        return chosen

    def is_done(self, g: Graph) -> bool:
        return self.done

    def embedding(self) -> list[int]:
        return list(self.state.phi) if self.state is not None else list(self.phi)


def spanning_strategy(h: Graph, schedule: PhaseSchedule | None = None, degeneracy: int | None = None,
                      **kw) -> SpanningBuilder:
    return SpanningBuilder(h, schedule, degeneracy, **kw)


class HighDegreeBuilder:
    """Initial embedding alone, with budget ``(1 + eps) * D * n / 2``."""

    def __init__(self, h: Graph, epsilon: float):
        if not 0 < epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        self.h = h
        self.n = h.n
        self.epsilon = epsilon
        self.budget = math.ceil((1 + epsilon) * h.max_degree() * h.n / 2)
        self.orientation, _ = balanced_orientation(h)
        self.phi = list(range(h.n))
        self.phi_inv = list(range(h.n))
        self.outdeg = self.orientation.out_degrees()
        self.counts = [0] * h.n
        self.deficient = sum(1 for d in self.outdeg if d > 0)
        self.phase = "initial"

    def on_offer(self, offered: int, round: int, g: Graph) -> int:
        chosen = initial_strategy_step(self.phi, self.phi_inv, self.orientation, offered, g)
        c = self.counts[offered] + 1
        self.counts[offered] = c
        if c == self.outdeg[self.phi_inv[offered]]:
            self.deficient -= 1
        return chosen

    def is_done(self, g: Graph) -> bool:
        return self.deficient == 0

    def embedding(self) -> list[int]:
        return list(self.phi)


def high_delta_strategy(h: Graph, epsilon: float) -> HighDegreeBuilder:
    return HighDegreeBuilder(h, epsilon)


# ---------------------------------------------------------------------------
# forests


def forest_order(t: Graph, vertices: Sequence[int]) -> tuple[list[int], dict[int, int]]:
    """BFS order of ``t[vertices]`` (components by lowest vertex) and parent map.

    Every vertex has at most one earlier neighbour: its parent, or -1 for roots.
    """
    inside = set(vertices)
    seen: set[int] = set()
    order: list[int] = []
    parent: dict[int, int] = {}
    for root in sorted(inside):
        if root in seen:
            continue
        seen.add(root)
        parent[root] = -1
        queue = deque([root])
        while queue:
            v = queue.popleft()
            order.append(v)
            for u in sorted(t.adj[v]):
                if u in inside and u not in seen:
                    seen.add(u)
                    parent[u] = v
                    queue.append(u)
    return order, parent


@dataclass
class GreedyForestState:
    order: list[int]
    parent: dict[int, int]
    phi: dict[int, int] = field(default_factory=dict)
    used: set[int] = field(default_factory=set)
    embedded: int = 0
    first_chosen: int | None = None

    @classmethod
    def for_forest(cls, t: Graph, vertices: Sequence[int] | None = None) -> "GreedyForestState":
        order, parent = forest_order(t, range(t.n) if vertices is None else vertices)
        return cls(order, parent)

    @property
    def complete(self) -> bool:
        return self.embedded == len(self.order)


def greedy_forest_step(state: GreedyForestState, offered: int, round: int, g: Graph) -> int:
    """Embed the next forest vertex at ``offered`` if it is still unused."""
    order = state.order
    if state.complete or offered in state.used:
        return fallback_vertex(offered, g)
    if state.embedded == 0:
        chosen = fallback_vertex(offered, g)
        state.phi[order[0]] = offered
        state.used.add(offered)
        state.embedded = 1
        state.first_chosen = chosen
        if len(order) > 1:
            state.phi[order[1]] = chosen
            state.used.add(chosen)
            state.embedded = 2
        return chosen
    v = order[state.embedded]
    p = state.parent[v]
    chosen = state.phi[p] if p >= 0 else fallback_vertex(offered, g)
    state.phi[v] = offered
    state.used.add(offered)
    state.embedded += 1
    return chosen


class GreedyForestBuilder:
    """Greedy embedding of a whole forest (budget ``2 n ln n`` by default)."""

    def __init__(self, t: Graph):
        self.t = t
        self.state = GreedyForestState.for_forest(t)
        self.phase = "greedy"
        self.budget = math.ceil(2 * t.n * math.log(max(t.n, 2)))

    def on_offer(self, offered: int, round: int, g: Graph) -> int:
        return greedy_forest_step(self.state, offered, round, g)

    def is_done(self, g: Graph) -> bool:
        return self.t.edge_count == 0 or self.state.complete

    def embedding(self) -> list[int]:
        return [self.state.phi[x] for x in range(self.t.n)]


class ForestBuilder(SpanningBuilder):
    """Greedy embedding of ``T - B``, then role switching with ``d = min(2, D)``.

    ``B`` is the ``ceil(alpha n)`` lowest-index vertices of degree <= 2.  The
    greedy phase hands over as soon as ``T - B`` is embedded and fails if that
    has not happened within ``ln(2/alpha) n`` rounds.
    """

    def __init__(self, t: Graph, alpha: float | None = None, schedule: PhaseSchedule | None = None,
                 debug: bool = False, observer: Callable | None = None):
        n = t.n
        delta = max(t.max_degree(), 1)
        if alpha is None:
            alpha = default_alpha(delta, n)
        self.alpha = alpha
        sched = schedule or PhaseSchedule.for_target(t, degeneracy=1, alpha=alpha)
        super().__init__(t, sched, degeneracy=1, debug=debug, observer=observer)
        size = max(1, math.ceil(alpha * n)) if n else 0
        low = [v for v in range(n) if len(t.adj[v]) <= 2]
        if len(low) < size:
            raise SetupError(f"only {len(low)} vertices of degree <= 2, need {size}")
        self.reserved = low[:size]
        reserved = set(self.reserved)
        self.greedy = GreedyForestState.for_forest(t, [v for v in range(n) if v not in reserved])
        self.greedy_budget = math.ceil(math.log(2 / alpha) * n)
        self.phase = "greedy"
        self.phase_left = self.greedy_budget
        self.done = t.edge_count == 0

    def _advance(self, g: Graph) -> None:
        if self.phase == "greedy":
            if not self.greedy.complete:
                self._fail("greedy phase did not embed T - B in time")
                return
            self._finish_greedy(g)
            return
        super()._advance(g)

    def _finish_greedy(self, g: Graph) -> None:
        phi = [-1] * self.n
        for x, p in self.greedy.phi.items():
            phi[x] = p
        spare = iter(v for v in range(self.n) if v not in self.greedy.used)
        for b in self.reserved:
            phi[b] = next(spare)
        self.phi = phi
        self.phi_inv = [0] * self.n
        for x, p in enumerate(phi):
            self.phi_inv[p] = x
        good = set(range(self.n)) - set(self.reserved)
        self._start_switching(g, good, set(self.reserved))

    def prepare(self, g: Graph) -> None:
        if self.phase == "greedy" and self.greedy.complete:
            self.phase_left = 0
        super().prepare(g)

    def on_offer(self, offered: int, round: int, g: Graph) -> int:
        self.prepare(g)
        if self.phase == "greedy" and not self.done and not self.gave_up:
            chosen = greedy_forest_step(self.greedy, offered, round, g)
            self.phase_left -= 1
            if self.observer is not None:
                self.observer(self, offered, chosen, round)
            return chosen
        return super().on_offer(offered, round, g)


def forest_strategy(t: Graph, alpha: float | None = None, schedule: PhaseSchedule | None = None,
                    auto_direct: bool = False, **kw):
    """Forest Builder; with ``auto_direct`` and ``D >= n**(1/11)`` plain greedy is used."""
    if auto_direct and t.max_degree() >= t.n ** (1 / 11):
        return GreedyForestBuilder(t)
    return ForestBuilder(t, alpha, schedule, **kw)


# ---------------------------------------------------------------------------
# offline


def _prefix_feasible(counts: np.ndarray, demand_sorted: np.ndarray) -> bool:
    top = np.sort(counts)[::-1][: demand_sorted.size]
    return bool(np.all(top >= demand_sorted))


def offline_min_rounds(h: Graph, sequence: Sequence[int], orientation: Orientation | None = None) -> int | None:
    """Least prefix admitting a bijection meeting every out-degree demand.

    Sorted demands against sorted prefix counts decide a fixed prefix; the
    answer is found by binary search.  ``None`` if the full sequence fails.
    """
    if orientation is None:
        orientation, _ = balanced_orientation(h)
    demand = np.sort(np.array(orientation.out_degrees(), dtype=np.int64))[::-1]
    demand = demand[demand > 0]
    if demand.size == 0:
        return 0
    seq = np.asarray(sequence, dtype=np.int64)
    n = h.n
    if not _prefix_feasible(np.bincount(seq, minlength=n), demand):
        return None
    lo, hi = int(demand.sum()) - 1, seq.size  # lo infeasible (fewer rounds than edges), hi feasible
    lo = max(lo, 0)
    if lo > 0 and _prefix_feasible(np.bincount(seq[:lo], minlength=n), demand):
        hi = lo
        lo = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _prefix_feasible(np.bincount(seq[:mid], minlength=n), demand):
            hi = mid
        else:
            lo = mid
    return hi


def offline_assignment(h: Graph, sequence: Sequence[int], m: int,
                       orientation: Orientation) -> list[int]:
    """Bijection pairing largest demands with the most-offered process vertices."""
    counts = np.bincount(np.asarray(sequence[:m], dtype=np.int64), minlength=h.n)
    demand = orientation.out_degrees()
    targets = sorted(range(h.n), key=lambda x: (-demand[x], x))
    procs = sorted(range(h.n), key=lambda v: (-int(counts[v]), v))
    phi = [0] * h.n
    for x, v in zip(targets, procs):
        phi[x] = v
    return phi


class OfflineBuilder:
    """Builder that knows the whole offer sequence and finishes at its minimum."""

    def __init__(self, h: Graph, sequence: Sequence[int]):
        self.h = h
        self.orientation, _ = balanced_orientation(h)
        self.m = offline_min_rounds(h, sequence, self.orientation)
        self.phase = "offline"
        self.gave_up = "infeasible" if self.m is None else None
        m = self.m if self.m is not None else 0
        self.phi = offline_assignment(h, sequence, m, self.orientation)
        self.phi_inv = [0] * h.n
        for x, p in enumerate(self.phi):
            self.phi_inv[p] = x
        self.outdeg = self.orientation.out_degrees()
        self.counts = [0] * h.n
        self.deficient = sum(1 for d in self.outdeg if d > 0)

    def on_offer(self, offered: int, round: int, g: Graph) -> int:
        chosen = initial_strategy_step(self.phi, self.phi_inv, self.orientation, offered, g)
        c = self.counts[offered] + 1
        self.counts[offered] = c
        if c == self.outdeg[self.phi_inv[offered]]:
            self.deficient -= 1
        return chosen

    def is_done(self, g: Graph) -> bool:
        return self.deficient == 0

    def embedding(self) -> list[int]:
        return list(self.phi)
