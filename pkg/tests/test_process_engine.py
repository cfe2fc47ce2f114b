import numpy as np
import pytest
from hypothesis import given, strategies as st

from semirandom.graph_core import Graph
from semirandom.process_engine import (
    BLOCK,
    BuilderContractError,
    Transcript,
    VertexStream,
    derive_seed,
    draw_sequence,
    graph_from_transcript,
    replay,
    run,
)


class Lowest:
    """Always the lowest vertex other than the offered one."""

    phase = "main"

    def on_offer(self, w, t, g):
        return 1 if w == 0 else 0

    def is_done(self, g):
        return False


class UntilEdges:
    def __init__(self, m):
        self.m = m

    def on_offer(self, w, t, g):
        return (w + 1) % g.n

    def is_done(self, g):
        return g.edge_count >= self.m


class Cheat:
    def on_offer(self, w, t, g):
        return w

    def is_done(self, g):
        return False


def test_frozen_offer_stream():
    # frozen from the first run; the independent check below re-derives it
    assert draw_sequence(10, 12, 42).tolist() == [9, 0, 1, 1, 4, 2, 2, 8, 2, 1, 5, 5]


def test_stream_equals_direct_philox_blocks():
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(42)))
    direct = np.concatenate([gen.integers(0, 37, size=BLOCK, dtype=np.int64) for _ in range(3)])
    assert np.array_equal(draw_sequence(37, 3 * BLOCK - 5, 42), direct[: 3 * BLOCK - 5])


@given(st.integers(1, 50), st.integers(0, 20000), st.integers(0, 2**63))
def test_stream_in_range_and_prefix_stable(n, length, seed):
    s = draw_sequence(n, length, seed)
    assert s.shape == (length,)
    assert length == 0 or (s.min() >= 0 and s.max() < n)
    assert np.array_equal(draw_sequence(n, length // 2, seed), s[: length // 2])


def test_take_and_draw_agree():
    a = VertexStream(13, 5)
    b = VertexStream(13, 5)
    first = [a.draw() for _ in range(BLOCK + 17)]
    assert b.take(BLOCK + 17).tolist() == first
    assert a.round == b.round == BLOCK + 17


def test_derive_seed_frozen_and_distinct():
    assert derive_seed(42, 0) == 16138347438539916964
    assert derive_seed(42, 1) == 134183728835869882
    assert derive_seed(7, 3, 5) == 2996089601602301123
    seeds = {derive_seed(1, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert derive_seed(1, 2, 3) != derive_seed(1, 3, 2)


def test_run_marks_duplicates_ineffective():
    res = run(Lowest(), 4, 50, seed=1)
    t = res.transcript
    assert len(t) == 50 == res.rounds_used
    g = Graph(4)
    for w, u, _, eff in t.records():
        assert eff == g.add_edge(w, u)
    assert g == res.graph
    assert sum(t.effective) == res.graph.edge_count
    assert not res.success and res.first_success_round is None


def test_run_stops_on_success_and_counts_phases():
    res = run(UntilEdges(3), 10, 1000, seed=2)
    assert res.success and res.rounds_used == res.first_success_round
    assert res.graph.edge_count == 3
    assert sum(res.phase_rounds.values()) == res.rounds_used


def test_run_done_before_first_round():
    res = run(UntilEdges(0), 10, 1000, seed=2)
    assert res.success and res.first_success_round == 0 and res.rounds_used == 0


def test_run_continues_past_success_when_asked():
    res = run(UntilEdges(2), 10, 100, seed=2, stop_on_success=False)
    assert res.rounds_used == 100
    assert res.first_success_round is not None and res.first_success_round < 100


def test_contract_violation_raises():
    with pytest.raises(BuilderContractError):
        run(Cheat(), 5, 10, seed=0)


def test_explicit_offers_override_stream():
    res = run(Lowest(), 5, 10, offers=[3, 3, 4])
    assert list(res.transcript.offered) == [3, 3, 4]
    assert list(res.transcript.effective) == [1, 0, 1]


def test_transcript_jsonl_round_trip(tmp_path):
    res = run(Lowest(), 6, 40, seed=9, config={"target": {"kind": "cycle", "n": 6}})
    text = res.transcript.dumps()
    first = text.splitlines()[0]
    assert first == '{"n":6,"seed":9,"strategy_config":{"target":{"kind":"cycle","n":6}}}'
    assert text.splitlines()[1].startswith('{"chosen":')
    p = tmp_path / "t.jsonl"
    res.transcript.save(p)
    back = Transcript.load(p)
    assert back.dumps() == text
    assert graph_from_transcript(back) == res.graph


def test_graph_from_transcript_rejects_bad_flags():
    t = Transcript(seed=0, n=3)
    t.append(0, 1, "main", True)
    t.append(1, 0, "main", True)
    with pytest.raises(ValueError):
        graph_from_transcript(t)


def test_replay_with_builder_reproduces_and_detects_divergence():
    res = run(Lowest(), 7, 30, seed=4)
    again = replay(res.transcript, Lowest())
    assert again.graph == res.graph
    with pytest.raises(ValueError):
        replay(res.transcript, UntilEdges(10**9))
