"""Round loop of the semi-random process, transcripts and replay.

Randomness comes from numpy's counter-based Philox generator keyed through a
``SeedSequence``.  Offers are drawn in fixed blocks of ``BLOCK`` integers with
``Generator.integers`` (integer-only rejection sampling), so a given
``(n, seed)`` produces the same offer stream on every platform.
"""

from __future__ import annotations

import json
from array import array
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Protocol

import numpy as np

from .graph_core import Graph

BLOCK = 8192


class BuilderContractError(RuntimeError):
    """Raised when a Builder answers an offer with the offered vertex itself."""


def derive_seed(base: int, *keys: int) -> int:
    """Child seed of ``base`` addressed by ``keys`` (independent of siblings)."""
    ss = np.random.SeedSequence(int(base), spawn_key=tuple(int(k) for k in keys))
    lo, hi = ss.generate_state(2, dtype=np.uint32).tolist()
    return (hi << 32) | lo


def make_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


class VertexStream:
    """Uniform offers on ``0..n-1``; ``round`` is the 1-based index of the last draw."""

    def __init__(self, n: int, seed: int):
        if n < 1:
            raise ValueError("need at least one vertex")
        self.n = n
        self.seed = seed
        self.round = 0
        self._gen = make_generator(seed)
        self._buf: list[int] = []
        self._pos = 0

    def _refill(self) -> None:
        self._buf = self._gen.integers(0, self.n, size=BLOCK, dtype=np.int64).tolist()
        self._pos = 0

    def draw(self) -> int:
        if self._pos == len(self._buf):
            self._refill()
        w = self._buf[self._pos]
        self._pos += 1
        self.round += 1
        return w

    def __iter__(self) -> Iterator[int]:
        while True:
            yield self.draw()

    def take(self, length: int) -> np.ndarray:
        """Next ``length`` offers as an int64 array (advances the stream)."""
        out = np.empty(length, dtype=np.int64)
        filled = 0
        while filled < length:
            if self._pos == len(self._buf):
                self._refill()
            chunk = min(length - filled, len(self._buf) - self._pos)
            out[filled:filled + chunk] = self._buf[self._pos:self._pos + chunk]
            self._pos += chunk
            filled += chunk
        self.round += length
        return out


def draw_sequence(n: int, length: int, seed: int) -> np.ndarray:
    """Exactly the offers :func:`run` would see for this ``(n, seed)``."""
    if length < 0:
        raise ValueError("length must be non-negative")
    return VertexStream(n, seed).take(length)


class Builder(Protocol):
    """What the engine needs from a strategy.

    ``on_offer`` must return a vertex different from ``offered``.  ``is_done``
    is evaluated before the first round and after every edge insertion.  A
    builder may expose ``phase`` (a short tag recorded per round) and
    ``gave_up`` (truthy once it has failed, which stops the run).
    """

    def on_offer(self, offered: int, round: int, g: Graph) -> int: ...

    def is_done(self, g: Graph) -> bool: ...


@dataclass
class Transcript:
    seed: int | None
    n: int
    config: dict = field(default_factory=dict)
    offered: array = field(default_factory=lambda: array("l"))
    chosen: array = field(default_factory=lambda: array("l"))
    effective: bytearray = field(default_factory=bytearray)
    phase_ids: bytearray = field(default_factory=bytearray)
    phase_names: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.offered)

    def append(self, offered: int, chosen: int, phase: str, effective: bool) -> None:
        try:
            pid = self.phase_names.index(phase)
        except ValueError:
            pid = len(self.phase_names)
            self.phase_names.append(phase)
        self.offered.append(offered)
        self.chosen.append(chosen)
        self.effective.append(1 if effective else 0)
        self.phase_ids.append(pid)

    def records(self) -> Iterator[tuple[int, int, str, bool]]:
        names = self.phase_names
        for w, u, e, p in zip(self.offered, self.chosen, self.effective, self.phase_ids):
            yield w, u, names[p], bool(e)

    def header(self) -> dict:
        return {"seed": self.seed, "n": self.n, "strategy_config": self.config}

    def dumps(self) -> str:
        lines = [json.dumps(self.header(), sort_keys=True, separators=(",", ":"))]
        for w, u, p, e in self.records():
            lines.append(
                json.dumps({"chosen": u, "effective": e, "offered": w, "phase": p},
                           sort_keys=True, separators=(",", ":"))
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Transcript":
        lines = text.splitlines()
        if not lines:
            raise ValueError("empty transcript")
        head = json.loads(lines[0])
        t = cls(seed=head["seed"], n=int(head["n"]), config=head.get("strategy_config") or {})
        for line in lines[1:]:
            if not line:
                continue
            rec = json.loads(line)
            t.append(int(rec["offered"]), int(rec["chosen"]), rec["phase"], bool(rec["effective"]))
        return t

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Transcript":
        return cls.loads(Path(path).read_text(encoding="utf-8"))


@dataclass
class RunResult:
    graph: Graph
    transcript: Transcript | None
    rounds_used: int
    success: bool
    first_success_round: int | None
    phase_rounds: dict[str, int]


def run(
    builder: Builder,
    n: int,
    budget: int,
    seed: int | None = None,
    *,
    offers: Iterable[int] | None = None,
    record: bool = True,
    stop_on_success: bool = True,
    config: dict | None = None,
) -> RunResult:
    """Play up to ``budget`` rounds.

    Offers come from ``VertexStream(n, seed)`` unless an explicit ``offers``
    iterable is given (replay / offline use).  A chosen edge that is already
    present is recorded with ``effective=False`` and not inserted.  With
    ``stop_on_success=False`` the run continues to the budget and the first
    round at which ``is_done`` held is still reported.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    g = Graph(n)
    transcript = Transcript(seed=seed, n=n, config=dict(config or {})) if record else None
    phases: Counter[str] = Counter()
    source = iter(offers) if offers is not None else iter(VertexStream(n, seed if seed is not None else 0))

    first = 0 if builder.is_done(g) else None
    rounds = 0
    if not (first is not None and stop_on_success):
        adj = g.adj
        for t in range(1, budget + 1):
            try:
                w = next(source)
            except StopIteration:
                break
            u = builder.on_offer(w, t, g)
            if u == w or not 0 <= u < n:
                raise BuilderContractError(f"round {t}: builder answered {u} to offer {w}")
            if u in adj[w]:
                effective = False
            else:
                adj[w].add(u)
                adj[u].add(w)
                g.edge_count += 1
                effective = True
            phase = getattr(builder, "phase", "main")
            phases[phase] += 1
            if transcript is not None:
                transcript.append(w, u, phase, effective)
            rounds = t
            if first is None and builder.is_done(g):
                first = t
                if stop_on_success:
                    break
            if getattr(builder, "gave_up", None):
                break
    success = first is not None
    return RunResult(g, transcript, rounds, success, first, dict(phases))


def graph_from_transcript(t: Transcript) -> Graph:
    """Rebuild Builder's graph and check every ``effective`` flag on the way."""
    g = Graph(t.n)
    for i, (w, u, _, eff) in enumerate(t.records()):
        if w == u:
            raise ValueError(f"record {i}: chosen equals offered")
        if g.add_edge(w, u) != eff:
            raise ValueError(f"record {i}: effective flag disagrees with the graph")
    return g


def replay(t: Transcript, builder: Builder | None = None) -> RunResult:
    """Re-derive the run recorded in ``t``.

    Without a builder the graph is rebuilt from the records alone.  With one,
    the builder is fed the recorded offers and must reproduce every choice.
    """
    if builder is None:
        g = graph_from_transcript(t)
        phases = Counter(name for _, _, name, _ in t.records())
        return RunResult(g, t, len(t), False, None, dict(phases))
    res = run(builder, t.n, len(t), t.seed, offers=list(t.offered), config=t.config,
              stop_on_success=False)
    if res.transcript is None or list(res.transcript.chosen) != list(t.chosen[: len(res.transcript)]):
        raise ValueError("replayed builder diverged from the transcript")
    return res
