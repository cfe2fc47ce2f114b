"""Round-by-round invariant monitor for the switching Builders.

The monitor wraps a builder, mirrors Builder's graph in a dense matrix and
re-checks the good-set property independently after every insertion.
"""

from __future__ import annotations

import numpy as np


class InvariantMonitor:
    def __init__(self, builder, h):
        self.b = builder
        self.h = h
        n = h.n
        self.adj = np.zeros((n, n), dtype=bool)
        self.edges = np.array(list(h.edges()), dtype=np.int64).reshape(-1, 2)
        self.nbrs = [sorted(h.adj[x]) for x in range(n)]
        self.last = None
        self.violations: list[str] = []
        self.switches = 0
        self.phases = 0
        self.event_checks = 0
        self.rounds_checked = 0
        self._state = None

    @property
    def phase(self):
        return self.b.phase

    @property
    def gave_up(self):
        return self.b.gave_up

    def on_offer(self, w, t, g):
        self.b.prepare(g)
        st = getattr(self.b, "state", None)
        if st is not None and st.candidates and st is not self._state:
            if self._state is not None:
                self._end()
            self._begin(st)
            self._check_good(st)
        u = self.b.on_offer(w, t, g)
        self.last = (w, u, t)
        return u

    # -- per-phase bookkeeping
    def _begin(self, st):
        self._state = st
        self.phases += 1
        self.phi0 = list(st.phi)
        self.prev_phi = np.array(st.phi)
        self.changed = np.zeros(len(st.phi), dtype=np.int64)
        self.prev_good = np.frombuffer(bytes(st.good), dtype=np.uint8).astype(bool)
        self.seen_i: set[int] = set()
        self.prev_targets = {i: self._targets(st, i) for i in range(len(st.bad)) if not st.switched[i]}
        # event scan: per (i,k), which neighbour images were offered and the
        # number of offers of phi(a) after they all were
        self.pending = {}
        self.after = {}
        for i, row in enumerate(st.candidates):
            for k, a in enumerate(row):
                imgs = {st.phi[y] for y in self.nbrs[a]}
                self.pending[(i, k)] = imgs
                self.after[(i, k)] = 0
        self.snap_phi_a = {st.phi[a]: (i, k) for i, row in enumerate(st.candidates) for k, a in enumerate(row)}
        self.nb_imgs = {}
        for i, row in enumerate(st.candidates):
            for k, a in enumerate(row):
                for y in self.nbrs[a]:
                    self.nb_imgs[st.phi[y]] = (i, k)

    def _targets(self, st, i):
        return {st.phi[y] for y in self.nbrs[st.bad[i]] if st.good[y]}

    def _end(self):
        st = self._state
        d = self.b.schedule.d
        for (i, k), cnt in self.after.items():
            if not self.pending[(i, k)] and cnt >= d:
                self.event_checks += 1
                if not st.good[st.bad[i]]:
                    self.violations.append(f"event for ({i},{k}) but b_{i} still bad")

    def _scan_event(self, w):
        key = self.snap_phi_a.get(w)
        if key is not None and not self.pending[key]:
            self.after[key] += 1
        key = self.nb_imgs.get(w)
        if key is not None:
            self.pending[key].discard(w)

    def _fail(self, msg):
        self.violations.append(f"round {self.last[2] if self.last else 0}: {msg}")

    def is_done(self, g):
        w = -1
        if self.last is not None:
            w, u, _ = self.last
            self.adj[w, u] = self.adj[u, w] = True
        st = getattr(self.b, "state", None)
        if st is not None and st is self._state:
            self._check_round(st, w)
        done = self.b.is_done(g)
        if (done or self.b.gave_up) and self._state is not None and not getattr(self, "_closed", False):
            self._end()
            self._closed = True
        return done

    def _check_good(self, st):
        self.rounds_checked += 1
        phi = np.asarray(st.phi)
        good = np.frombuffer(bytes(st.good), dtype=np.uint8).astype(bool)
        e = self.edges
        inside = good[e[:, 0]] & good[e[:, 1]]
        ok = self.adj[phi[e[inside, 0]], phi[e[inside, 1]]]
        if not ok.all():
            self._fail(f"good set broken on {int((~ok).sum())} edges")
        return phi, good

    def _check_round(self, st, w):
        self._scan_event(w)
        phi, good = self._check_good(st)
        diff = np.nonzero(phi != self.prev_phi)[0]
        if np.any(self.prev_good & ~good):
            self._fail("a good vertex turned bad")
        new_good = np.nonzero(good & ~self.prev_good)[0]
        if diff.size or new_good.size:
            log = st.switch_log
            if not log or log[-1][0] != self.last[2]:
                self._fail("phi or A changed without a switch")
            else:
                _, i, k = log[-1]
                if i in self.seen_i:
                    self._fail(f"b_{i} switched twice")
                self.seen_i.add(i)
                self.switches += 1
                pair = {st.bad[i], st.candidates[i][k]}
                if set(diff.tolist()) - pair:
                    self._fail("phi changed outside the switched pair")
                if new_good.tolist() != [st.bad[i]]:
                    self._fail("A grew by something other than b_i")
            self.changed[diff] += 1
            if np.any(self.changed > 1):
                self._fail("a vertex changed image twice in one phase")
        # monotone target sets for still-bad b_i
        for i, prev in list(self.prev_targets.items()):
            if st.switched[i]:
                del self.prev_targets[i]
                continue
            cur = self._targets(st, i)
            if not prev <= cur:
                self._fail(f"target set of b_{i} shrank")
            self.prev_targets[i] = cur
        self.prev_phi = phi
        self.prev_good = good
