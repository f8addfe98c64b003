"""Geometry primitives: boxes, shells, parity, spacing."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticelab import lattice
from latticelab.lattice import (Region, box_B, box_F, is_box_spaced,
                                is_K_spaced, parity, rectangle, shell_F)

sites_2d = st.tuples(st.integers(-6, 6), st.integers(-6, 6))
sites_3d = st.tuples(st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4))


def test_box_F_sizes():
    assert len(box_F(0, 1)) == 1
    assert len(box_F(2, 1)) == 5
    assert len(box_F(1, 2)) == 9
    assert len(box_F(2, 2)) == 25
    assert len(box_F(1, 3)) == 27


def test_box_F_is_centered():
    r = box_F(2, 2)
    assert (0, 0) in r
    assert (-2, 2) in r
    assert (3, 0) not in r
    lo, hi = r.bounds()
    assert lo == (-2, -2) and hi == (2, 2)


def test_box_B_is_positive_corner():
    r = box_B(2, 2)
    assert len(r) == 4
    assert (1, 1) in r and (2, 2) in r
    assert (0, 0) not in r


def test_box_B_rejects_n_zero():
    with pytest.raises(ValueError):
        box_B(0, 2)


def test_rectangle_with_offset():
    r = rectangle((2, 3), (5, -1))
    assert len(r) == 6
    assert (6, 0) in r
    assert (5, -1) not in r  # offset is exclusive: sites start at offset+1
    assert (7, 2) in r and (8, 2) not in r


def test_sites_are_lexicographically_sorted():
    r = box_F(1, 2)
    assert list(r.sites) == sorted(r.sites)
    assert r.sites[0] == (-1, -1)
    assert r.sites[-1] == (1, 1)


def test_region_index_roundtrip():
    r = box_F(2, 2)
    for i, s in enumerate(r.sites):
        assert r.index(s) == i


def test_shell_is_box_difference():
    for n, d in [(1, 1), (2, 1), (1, 2), (2, 2), (1, 3)]:
        shell = set(shell_F(n, d))
        expect = set(box_F(n, d).sites) - set(box_F(n - 1, d).sites)
        assert shell == expect


def test_shell_at_zero_is_origin():
    assert list(shell_F(0, 2)) == [(0, 0)]


def test_parity_alternates_on_neighbors():
    for s in box_F(2, 2).sites:
        for nb in lattice.neighbors(s):
            assert parity(s) != parity(nb)


def test_dimension_cap():
    with pytest.raises(ValueError):
        box_F(1, 5)


@given(st.lists(sites_2d, min_size=1, max_size=5, unique=True),
       st.integers(0, 3))
@settings(max_examples=200, deadline=None)
def test_box_spacing_routes_agree(points, n):
    """Occupied-set disjointness and pairwise sup-distance give the same answer."""
    K = box_F(n, 2)
    assert is_K_spaced(points, K) == is_box_spaced(points, n)


def test_box_spacing_threshold():
    # two sites i, j with ||i-j||_inf = 2n+1 have disjoint i+F_n, j+F_n
    assert is_box_spaced([(0, 0), (3, 0)], 1)
    assert not is_box_spaced([(0, 0), (2, 0)], 1)
    assert not is_box_spaced([(0, 0), (2, 2)], 1)
    assert is_box_spaced([(0, 0), (3, 1)], 1)


def test_spacing_of_singleton_and_empty():
    assert is_box_spaced([], 3)
    assert is_box_spaced([(1, 1)], 3)


def test_general_K_spacing():
    # a non-box translate set: the two-site domino footprint
    K = Region([(0, 0), (1, 0)])
    assert is_K_spaced([(0, 0), (3, 0)], K)
    assert not is_K_spaced([(0, 0), (1, 0)], K)
    assert is_K_spaced([(0, 0), (0, 1)], K)  # disjoint columns


@given(sites_3d)
def test_parity_is_sum_mod_two(s):
    assert parity(s) == sum(s) % 2


def test_translate_preserves_order_and_size():
    r = box_F(1, 2)
    t = r.translate((3, -2))
    assert len(t) == len(r)
    assert (2, -3) in t
    assert list(t.sites) == sorted(t.sites)


def test_region_equality_is_by_sites():
    assert box_F(1, 2) == Region(box_F(1, 2).sites)
    assert box_F(1, 2) != box_F(1, 1)


def test_is_box_detects_holes():
    assert box_F(1, 2).is_box()
    holey = Region([s for s in box_F(1, 2).sites if s != (0, 0)])
    assert not holey.is_box()


def test_neighbors_count():
    assert len(lattice.neighbors((0, 0))) == 4
    assert len(lattice.neighbors((1,))) == 2
    assert set(lattice.neighbors((0, 0))) == {(1, 0), (-1, 0), (0, 1), (0, -1)}


def test_unit_vectors_are_one_based():
    assert lattice.unit(1, 3) == (1, 0, 0)
    assert lattice.unit(3, 3) == (0, 0, 1)


def test_mixed_dimension_rejected():
    with pytest.raises(ValueError):
        Region([(0, 0), (1, 2, 3)])
