from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rfxy.errors import ParameterError
from rfxy.lattice import build_lattice, neighbors

small_lattices = st.tuples(st.integers(1, 3), st.integers(2, 6))


def test_ring_of_four():
    lat = build_lattice(1, 4)
    assert sorted(neighbors(lat, 0)) == [1, 3]
    assert neighbors(lat, 2) == (3, 1)


def test_square_corner_neighbors():
    lat = build_lattice(2, 4)
    assert lat.n_sites == 16
    assert all(len(neighbors(lat, i)) == 4 for i in range(16))
    got = [lat.coords(j) for j in neighbors(lat, lat.index((0, 0)))]
    assert got == [(1, 0), (3, 0), (0, 1), (0, 3)]


def test_l2_multiplicity():
    lat = build_lattice(1, 2)
    assert neighbors(lat, 0) == (1, 1)
    assert lat.adjacency[0, 1] == 2


def test_cubic_site_has_six_neighbors():
    assert len(neighbors(build_lattice(3, 10), 0)) == 6


def test_interior_site_of_3x3():
    lat = build_lattice(2, 3)
    center = lat.index((1, 1))
    assert center == 4
    got = sorted(lat.coords(j) for j in neighbors(lat, center))
    assert got == [(0, 1), (1, 0), (1, 2), (2, 1)]


def test_index_ordering_axis0_fastest():
    lat = build_lattice(3, 5)
    assert lat.index((1, 0, 0)) == 1
    assert lat.index((0, 1, 0)) == 5
    assert lat.index((0, 0, 1)) == 25
    assert lat.coords(1 + 2 * 5 + 3 * 25) == (1, 2, 3)


@pytest.mark.parametrize("d, L", [(0, 4), (1, 1), (2, 0), (-1, 3), (1.5, 4)])
def test_rejects_bad_parameters(d, L):
    with pytest.raises(ParameterError):
        build_lattice(d, L)


def test_out_of_range_index():
    lat = build_lattice(2, 3)
    with pytest.raises(IndexError):
        neighbors(lat, 9)
    with pytest.raises(IndexError):
        neighbors(lat, -1)


@settings(max_examples=30, deadline=None)
@given(small_lattices)
def test_degree_sum_and_range(dl):
    d, L = dl
    lat = build_lattice(d, L)
    table = lat.neighbor_table
    assert table.shape == (L**d, 2 * d)
    assert table.size == 2 * d * L**d
    assert table.min() >= 0 and table.max() < L**d


@settings(max_examples=30, deadline=None)
@given(small_lattices)
def test_symmetric_with_multiplicity(dl):
    lat = build_lattice(*dl)
    counts = Counter()
    for i in range(lat.n_sites):
        for j in neighbors(lat, i):
            counts[(i, j)] += 1
    assert all(counts[(i, j)] == counts[(j, i)] for i, j in counts)
    assert (lat.adjacency != lat.adjacency.T).nnz == 0


@settings(max_examples=30, deadline=None)
@given(small_lattices)
def test_neighbors_differ_by_one_step_on_one_axis(dl):
    d, L = dl
    lat = build_lattice(d, L)
    for i in range(lat.n_sites):
        ci = np.array(lat.coords(i))
        for axis, j in enumerate(neighbors(lat, i)):
            diff = (np.array(lat.coords(j)) - ci) % L
            nz = np.nonzero(diff)[0]
            assert list(nz) == [axis // 2]
            assert diff[nz[0]] in (1, L - 1)
