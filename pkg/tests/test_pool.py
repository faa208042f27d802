import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperslice.ndvec import VecN
from hyperslice.simplicial import VertexPool


def test_exact_duplicate_merges():
    pool = VertexPool()
    p = VecN(1, 2, 3, 4)
    i = pool.put_vertex(p)
    j = pool.put_vertex(p)
    assert i == j == 0
    assert len(pool) == 1


def test_within_tolerance_merges():
    pool = VertexPool(fclose=1e-6)
    p = VecN(x=1.0, y=2.0)
    i = pool.put_vertex(p)
    j = pool.put_vertex(VecN(x=1.0 + 5e-7, y=2.0))
    assert i == j
    assert len(pool) == 1


def test_beyond_tolerance_distinct():
    pool = VertexPool(fclose=1e-6)
    i = pool.put_vertex(VecN(x=1.0))
    j = pool.put_vertex(VecN(x=1.0 + 1e-5))
    assert i != j
    assert len(pool) == 2


def test_merge_picks_nearest_candidate():
    pool = VertexPool(fclose=1.0)
    a = pool.put_vertex(VecN(x=0.0))
    b = pool.put_vertex(VecN(x=1.9))
    probe = pool.put_vertex(VecN(x=1.0))  # within fclose of both, nearer b
    assert probe == b
    assert len(pool) == 2
    assert a == 0


def test_index_stability():
    pool = VertexPool(fclose=0.1)
    idx = [pool.put_vertex(VecN(x=float(i))) for i in range(10)]
    assert idx == list(range(10))
    assert pool[3] == VecN(x=3.0)
    again = [pool.put_vertex(VecN(x=float(i))) for i in range(10)]
    assert again == idx


def test_extend_unchecked_then_merge():
    pool = VertexPool(fclose=1e-6)
    rows = np.zeros((3, 7))
    rows[:, 1] = [0.0, 1.0, 2.0]
    start = pool.extend_unchecked(rows)
    assert start == 0 and len(pool) == 3
    # a later put_vertex merges against bulk-loaded rows
    assert pool.put_vertex(VecN(x=1.0 + 1e-8)) == 1
    assert pool.put_vertex(VecN(x=5.0)) == 3


def test_frozen_pool_rejects_writes():
    pool = VertexPool()
    pool.put_vertex(VecN())
    pool.freeze()
    with pytest.raises(RuntimeError):
        pool.put_vertex(VecN(x=1.0))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)),
                min_size=1, max_size=60))
def test_stored_vertices_pairwise_separated(xy):
    fclose = 0.5
    pool = VertexPool(fclose=fclose)
    for x, y in xy:
        pool.put_vertex(VecN(x=x, y=y))
    arr = pool.as_array()
    for i in range(len(arr)):
        for j in range(i + 1, len(arr)):
            assert np.abs(arr[i] - arr[j]).max() > fclose


def test_as_array_caches_and_tracks_growth():
    pool = VertexPool()
    pool.put_vertex(VecN(x=1.0))
    a1 = pool.as_array()
    pool.put_vertex(VecN(x=2.0))
    a2 = pool.as_array()
    assert len(a1) == 1 and len(a2) == 2
