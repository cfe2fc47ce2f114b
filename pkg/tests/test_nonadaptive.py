import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from semirandom.nonadaptive import (
    BlockPartition,
    ListFamily,
    NonAdaptiveBuilder,
    family_from_dict,
    hamilton_lists,
    isolated_lists,
    kr_factor_lists,
    list_step,
    recommended_budget,
)
from semirandom.process_engine import derive_seed, run
from semirandom.verify import extract_hamilton


def explicit_block_list(blocks, v, with_next):
    """Oracle: the list written out segment by segment."""
    i = next(j for j, b in enumerate(blocks) if v in b)
    head = [u for u in blocks[i] if u != v]
    nxt = list(blocks[(i + 1) % len(blocks)]) if with_next and len(blocks) > 1 else []
    used = set(head) | set(nxt) | {v}
    n = sum(len(b) for b in blocks)
    return head + nxt + [u for u in range(n) if u not in used]


# -- partitions


def test_balanced_partition():
    p = BlockPartition.balanced(10, 3)
    assert p.blocks == [[0, 1, 2, 3], [4, 5, 6], [7, 8, 9]]
    assert (p.s_min, p.s_max, p.k) == (3, 4, 3)
    assert [p.block_of(v) for v in (0, 3, 4, 9)] == [0, 0, 1, 2]
    with pytest.raises(ValueError):
        BlockPartition.balanced(10, 11)


@given(st.integers(3, 400), st.data())
def test_hamilton_partition_sizes(n, data):
    k = data.draw(st.integers(1, n))
    _, p = hamilton_lists(n, k)
    assert sorted(v for b in p.blocks for v in b) == list(range(n))
    assert set(p.sizes()) <= {n // k, -(-n // k)}


def test_hamilton_k_examples():
    assert hamilton_lists(4096)[1].k == round(4096 / math.sqrt(math.log(4096))) == 1420
    assert hamilton_lists(3)[1].k == 3


@given(st.integers(1, 6).flatmap(lambda r: st.tuples(st.just(r), st.integers(1, 300))))
def test_kr_partition_sizes(case):
    r, q = case
    n = r * q
    _, p = kr_factor_lists(n, r)
    assert all(s % r == 0 for s in p.sizes())
    assert p.s_max - p.s_min <= r
    assert sorted(v for b in p.blocks for v in b) == list(range(n))


@pytest.mark.parametrize("n,r", [(65536, 4), (4095, 3), (10000, 5)])
def test_kr_block_sizes_track_sqrt_log(n, r):
    _, p = kr_factor_lists(n, r)
    target = max(math.sqrt(math.log(n)), r)
    assert p.s_min >= r
    assert p.s_max - p.s_min <= r
    assert target / 2 <= p.s_min and p.s_max <= 2 * target


def test_kr_examples_and_errors():
    assert kr_factor_lists(6, 3, k=2)[1].blocks == [[0, 1, 2], [3, 4, 5]]
    fam, _ = kr_factor_lists(4, 2, k=1)
    assert all(fam.list_of(v)[:3] == [u for u in range(4) if u != v] for v in range(4))
    with pytest.raises(ValueError):
        kr_factor_lists(4096, 3)


# -- lists


def test_hamilton_list_example():
    fam, p = hamilton_lists(8, 4)
    assert p.blocks == [[0, 1], [2, 3], [4, 5], [6, 7]]
    assert fam.list_of(0)[:3] == [1, 2, 3]
    assert fam.list_of(7) == [6, 0, 1, 2, 3, 4, 5]


@given(st.integers(3, 60), st.data())
def test_lazy_lists_match_explicit_oracle(n, data):
    k = data.draw(st.integers(1, n))
    fam, p = hamilton_lists(n, k)
    for v in range(n):
        lst = fam.list_of(v)
        assert lst == explicit_block_list(p.blocks, v, True)
        assert sorted(lst) == [u for u in range(n) if u != v]
    r = data.draw(st.integers(1, 4))
    m = r * max(1, n // r)
    kfam, kp = kr_factor_lists(m, r)
    for v in range(m):
        assert kfam.list_of(v) == explicit_block_list(kp.blocks, v, False)


def test_list_step_order_and_exhaustion():
    fam, _ = hamilton_lists(5, 5)
    expect = fam.list_of(2)
    assert [list_step(fam, 2) for _ in range(4)] == expect
    assert list_step(fam, 2) == expect[-1]
    assert fam.cursor[2] == 5


def test_skip_marks_record_ineffective():
    # hand-built: L^0 = (1, 2, 3), L^2 = (0, 1, 3); offers 2 then 0 twice
    fam = ListFamily(4, [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])
    r = run(NonAdaptiveBuilder(fam), 4, 3, offers=[2, 0, 0])
    assert list(r.transcript.chosen) == [0, 1, 2]
    assert list(r.transcript.effective) == [1, 1, 0]


@given(st.integers(3, 40), st.integers(0, 2**32), st.integers(0, 400))
def test_effective_edges_follow_the_list(n, seed, rounds):
    fam, _ = hamilton_lists(n)
    r = run(NonAdaptiveBuilder(fam), n, rounds, seed)
    pos = [0] * n
    for w, u, _, _ in r.transcript.records():
        pos[w] += 1
        assert u == fam.entry(w, min(pos[w], n - 1))


def test_family_serialization():
    fam, _ = kr_factor_lists(12, 3, k=2)
    back = family_from_dict(fam.to_dict())
    assert all(back.list_of(v) == fam.list_of(v) for v in range(12))
    ex = ListFamily(3, [[1, 2], [0, 2], [0, 1]])
    assert family_from_dict(ex.to_dict()).list_of(1) == [0, 2]


# -- budgets


def test_recommended_budgets():
    # 8 * 4096 * sqrt(ln 4096) = 94504.67
    assert recommended_budget("hamilton", 4096) == 94505
    assert recommended_budget("kr_factor", 4095, 3) == math.ceil(27 * 4095 * math.sqrt(math.log(4095)))
    assert recommended_budget("isolated", 1000) == recommended_budget("hamilton", 1000)
    assert recommended_budget("hamilton", 100) == math.ceil(800 * math.sqrt(math.log(100)))
    with pytest.raises(ValueError):
        recommended_budget("kr_factor", 12)


# -- isolated tracking


@given(st.integers(2, 80), st.integers(0, 2**32))
def test_isolated_counter_matches_graph(n, seed):
    fam, _ = isolated_lists(n)
    b = NonAdaptiveBuilder(fam, "isolated")
    r = run(b, n, 20 * n, seed)
    assert b.isolated == sum(1 for a in r.graph.adj if not a)
    assert r.success == (b.isolated == 0)


def test_two_vertices_finish_in_one_round():
    fam, _ = isolated_lists(2)
    assert run(NonAdaptiveBuilder(fam, "isolated"), 2, 5, seed=0).rounds_used == 1


# -- the conditional Hamilton property


def heavy_condition(counts, blocks, n, k):
    """Every block has more than |V_i|/2 + 1 vertices offered more than ceil(n/k) times."""
    cap = -(-n // k)
    return all(sum(counts[v] > cap for v in b) > len(b) / 2 + 1 for b in blocks)


def test_hamilton_extracted_whenever_heavy_condition_holds():
    n, k = 600, 60
    checked = 0
    for i in range(12):
        fam, p = hamilton_lists(n, k)
        r = run(NonAdaptiveBuilder(fam), n, 20 * n, derive_seed(77, i))
        counts = np.bincount(list(r.transcript.offered), minlength=n)
        if heavy_condition(counts, p.blocks, n, k):
            checked += 1
            cert = extract_hamilton(r.graph, p.blocks)
            assert cert is not None and cert.check(r.graph)
    assert checked >= 6
