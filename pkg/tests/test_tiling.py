"""Rectangular tilings: Frobenius splitting, certified rectangles, box
complements, simultaneous block realization, counting, and the two-ring
marker family.

Oracles: reachable-sum search for Frobenius questions, exact-cover set
arithmetic for every constructed tiling.
"""

import itertools
import json

import pytest

from latticelab import homshift as hs
from latticelab import lattice
from latticelab import tiling as tl
from latticelab.lattice import Region, box_B, rectangle
from latticelab.util import BudgetError

DOM = tl.dominoes()


def oracle_representable(lengths, L):
    """Breadth-first reachable sums, counting summands; independent of the DP."""
    frontier = {0}
    seen = {0: 0}
    k = 0
    while frontier:
        k += 1
        nxt = set()
        for s in frontier:
            for x in lengths:
                v = s + x
                if v <= L and v not in seen:
                    seen[v] = k
                    nxt.add(v)
        frontier = nxt
    return seen.get(L)  # minimal summand count, or None


# ---------------------------------------------------------------------------
# tile sets


def test_is_coprime_examples():
    assert tl.is_coprime(DOM)
    assert not tl.is_coprime(tl.TileSet([(2, 2), (4, 2)]))
    assert tl.is_coprime(tl.TileSet([(3, 1), (5, 1)]))


def test_tileset_M_is_product_of_all_sides():
    assert DOM.M == 4
    assert tl.TileSet([(2, 3)]).M == 6
    assert tl.TileSet([(2, 1), (3, 1), (5, 1)]).M == 30


def test_tileset_rejects_bad_input():
    with pytest.raises(ValueError):
        tl.TileSet([])
    with pytest.raises(ValueError):
        tl.TileSet([(1, 2), (2,)])
    with pytest.raises(ValueError):
        tl.TileSet([(0, 2)])
    with pytest.raises(ValueError):
        tl.TileSet([(1, 2), (1, 2)])


# ---------------------------------------------------------------------------
# Frobenius decomposition


@pytest.mark.parametrize("lengths", [(2, 3), (3, 5), (2, 5), (1, 2)],
                         ids=["2-3", "3-5", "2-5", "1-2"])
def test_frobenius_matches_oracle_up_to_200(lengths):
    product = 1
    for x in lengths:
        product *= x
    for L in range(1, 201):
        combo = tl.frobenius_decompose(lengths, L)
        want = oracle_representable(lengths, L)
        if want is None:
            assert combo is None
        else:
            assert combo is not None
            assert sum(x * c for x, c in combo.items()) == L
            assert all(c >= 0 for c in combo.values())
            assert sum(combo.values()) == want  # minimal summand count
        if L >= product:
            assert combo is not None


def test_frobenius_examples():
    assert tl.frobenius_decompose((2, 3), 7) == {2: 2, 3: 1}
    assert tl.frobenius_decompose((2, 3), 1) is None
    combo = tl.frobenius_decompose((1, 5), 13)
    assert sum(x * c for x, c in combo.items()) == 13


def test_frobenius_rejects_non_coprime():
    with pytest.raises(ValueError):
        tl.frobenius_decompose((4, 6), 10)


def test_frobenius_canonical_tie_break():
    # 10 = 2*5 = 5+5 over {2,5}: two summands beats five
    assert tl.frobenius_decompose((2, 5), 10) == {5: 2}
    # 6 over {2,3}: both 2+2+2 and 3+3; fewer summands wins
    assert tl.frobenius_decompose((2, 3), 6) == {3: 2}


# ---------------------------------------------------------------------------
# rectangles


def test_tile_rectangle_grid_condition():
    t = tl.tile_rectangle(DOM, (4, 4))
    assert t.validate()
    assert t.region == rectangle((4, 4))


def test_tile_rectangle_frobenius_condition():
    t = tl.tile_rectangle(DOM, (5, 4))
    assert t.validate()
    t2 = tl.tile_rectangle(DOM, (4, 7))
    assert t2.validate()


def test_tile_rectangle_longer_cases():
    bars = tl.TileSet([(2, 1), (3, 1), (5, 1)])
    t = tl.tile_rectangle(bars, (31, 30))
    assert t.validate()


def test_tile_rectangle_rejects_uncertified():
    with pytest.raises(ValueError):
        tl.tile_rectangle(DOM, (3, 3))
    with pytest.raises(ValueError):
        tl.tile_rectangle(DOM, (5, 5))  # two non-multiples of M


def test_tile_rectangle_is_deterministic():
    a = tl.tile_rectangle(DOM, (5, 4))
    b = tl.tile_rectangle(DOM, (5, 4))
    assert a.placements == b.placements


def test_grid_variants_count_and_distinctness():
    variants = list(tl.grid_tiling_variants(DOM, (4, 4)))
    assert len(variants) == 2  # |F| ** 1 cube
    assert len(set(v.placements for v in variants)) == 2
    for v in variants:
        assert v.validate()
    variants = list(tl.grid_tiling_variants(DOM, (8, 4)))
    assert len(variants) == 2 ** 2
    assert len(set(v.placements for v in variants)) == 4


def test_grid_variants_needs_multiples():
    with pytest.raises(ValueError):
        list(tl.grid_tiling_variants(DOM, (5, 4)))


# ---------------------------------------------------------------------------
# box complement partition


def region_sites(rects):
    out = set()
    for r in rects:
        for s in r.sites:
            assert s not in out, "pieces overlap"
            out.add(s)
    return out


def test_partition_complement_d1():
    pieces = tl.partition_complement(1, 2, 2, 4, (4,))
    big = set(box_B(12, 1).sites)
    inner = set((4 + x,) for x in range(1, 5))
    assert region_sites(pieces) == big - inner
    for r in pieces:
        lo, hi = r.bounds()
        assert hi[0] - lo[0] + 1 >= 2


def test_partition_complement_d2_centered():
    pieces = tl.partition_complement(1, 2, 4, 4, (4, 4))
    big = set(box_B(12, 2).sites)
    inner = set((4 + x, 4 + y) for x in range(1, 5) for y in range(1, 5))
    assert region_sites(pieces) == big - inner
    assert len(pieces) <= 4
    for r in pieces:
        lo, hi = r.bounds()
        dims = tuple(hi[t] - lo[t] + 1 for t in range(2))
        assert any(dims[a] >= 4 and dims[1 - a] % 4 == 0 for a in range(2))


def test_partition_complement_d2_off_center():
    pieces = tl.partition_complement(1, 3, 4, 4, (5, 7))
    big = set(box_B(16, 2).sites)
    inner = set((5 + x, 7 + y) for x in range(1, 5) for y in range(1, 5))
    assert region_sites(pieces) == big - inner


def test_partition_complement_rejects_bad_offset():
    with pytest.raises(ValueError):
        tl.partition_complement(1, 2, 4, 4, (0, 4))
    with pytest.raises(ValueError):
        tl.partition_complement(1, 2, 4, 4, (4, 9))


def test_partition_complement_d3():
    pieces = tl.partition_complement(1, 2, 2, 2, (2, 2, 2))
    big = set(box_B(6, 3).sites)
    inner = set((2 + x, 2 + y, 2 + z)
                for x in range(1, 3) for y in range(1, 3) for z in range(1, 3))
    assert region_sites(pieces) == big - inner
    assert len(pieces) <= 6


# ---------------------------------------------------------------------------
# flexible fill


def test_flexible_fill_empty_prescription():
    t = tl.flexible_tile_fill(DOM, 3, 1, [], {})
    assert t.validate()
    assert t.region == box_B(12, 2)


def test_flexible_fill_single_block_aligned():
    w = list(tl.grid_tiling_variants(DOM, (4, 4)))[1]
    t = tl.flexible_tile_fill(DOM, 3, 1, [(4, 4)], {(4, 4): w})
    assert t.validate()
    assert t.restrict_equals((4, 4), w)


def test_flexible_fill_single_block_unaligned():
    w = list(tl.grid_tiling_variants(DOM, (4, 4)))[1]
    t = tl.flexible_tile_fill(DOM, 4, 1, [(5, 6)], {(5, 6): w})
    assert t.validate()
    assert t.restrict_equals((5, 6), w)


def test_flexible_fill_two_blocks():
    va, vb = list(tl.grid_tiling_variants(DOM, (4, 4)))
    t = tl.flexible_tile_fill(DOM, 7, 1, [(4, 4), (16, 16)],
                              {(4, 4): va, (16, 16): vb})
    assert t.validate()
    assert t.restrict_equals((4, 4), va)
    assert t.restrict_equals((16, 16), vb)


def test_flexible_fill_rejects_close_blocks():
    va, vb = list(tl.grid_tiling_variants(DOM, (4, 4)))
    with pytest.raises(ValueError):
        tl.flexible_tile_fill(DOM, 7, 1, [(4, 4), (8, 4)],
                              {(4, 4): va, (8, 4): vb})


def test_flexible_fill_rejects_block_near_face():
    w = list(tl.grid_tiling_variants(DOM, (4, 4)))[0]
    with pytest.raises(ValueError):
        tl.flexible_tile_fill(DOM, 3, 1, [(2, 4)], {(2, 4): w})
    with pytest.raises(ValueError):
        tl.flexible_tile_fill(DOM, 3, 1, [(8, 4)], {(8, 4): w})


def test_flexible_fill_rejects_wrong_block_region():
    w = tl.tile_rectangle(DOM, (4, 8))
    with pytest.raises(ValueError):
        tl.flexible_tile_fill(DOM, 4, 1, [(4, 4)], {(4, 4): w})


# ---------------------------------------------------------------------------
# counting


def test_count_tilings_goldens():
    assert tl.count_tilings(DOM, box_B(2, 2)) == 2
    assert tl.count_tilings(DOM, rectangle((2, 3))) == 3
    assert tl.count_tilings(DOM, rectangle((3, 2))) == 3
    assert tl.count_tilings(DOM, box_B(4, 2)) == 36


def test_count_tilings_odd_region_is_zero():
    assert tl.count_tilings(DOM, rectangle((3, 3))) == 0


def test_count_tilings_non_rectangular_region():
    # 2x3 with two opposite corners removed: count by hand = 1
    sites = [s for s in rectangle((3, 2)).sites if s not in ((1, 1), (3, 2))]
    assert tl.count_tilings(DOM, Region(sites)) == 1


def test_count_tilings_empty_region_is_one():
    assert tl.count_tilings(DOM, Region([])) == 1


def test_count_tilings_workers_agree():
    seq = tl.count_tilings(DOM, box_B(4, 2))
    par = tl.count_tilings(DOM, box_B(4, 2), workers=2)
    assert seq == par == 36


def test_count_tilings_budget():
    with pytest.raises(BudgetError):
        tl.count_tilings(DOM, rectangle((6, 6)), budget=10)


def test_count_matches_exhaustive_placement_oracle():
    """Independent oracle: enumerate all placement subsets on a tiny region."""
    region = rectangle((2, 2))
    placements = []
    for idx, proto in enumerate(DOM.protos):
        for off in itertools.product(range(0, 3), repeat=2):
            cells = [tuple(off[t] + x[t] for t in range(2))
                     for x in itertools.product(*(range(1, c + 1) for c in proto))]
            if all(c in region for c in cells):
                placements.append(frozenset(cells))
    target = frozenset(region.sites)
    count = 0
    for r in range(1, len(placements) + 1):
        for subset in itertools.combinations(placements, r):
            union = frozenset().union(*subset)
            if union == target and sum(len(s) for s in subset) == len(target):
                count += 1
    assert tl.count_tilings(DOM, region) == count == 2


# ---------------------------------------------------------------------------
# the marker tiling family


def test_marker_tiling_dominoes_n4():
    fam = tl.marker_tiling_set(DOM, 4)
    assert len(fam) == 2
    for member in fam:
        assert member.validate()
    # rings are single-type: outer ring sites all carry one prototile,
    # the next ring a different one
    for member, (i1, i2) in zip(fam, fam.meta["ring_pairs"]):
        assert i1 != i2
        labels = member.mapping()
        outer = [s for s in member.region.sites
                 if not (-1 <= s[0] <= 2 and -1 <= s[1] <= 2)]
        inner = [s for s in member.region.sites
                 if (-1 <= s[0] <= 2 and -1 <= s[1] <= 2)]
        assert set(labels[s][0] for s in outer) == {i1}
        assert set(labels[s][0] for s in inner) == {i2}


def test_marker_tiling_overlap_check():
    fam = tl.marker_tiling_set(DOM, 4)
    assert hs.verify_marker_spacing(fam, fam.meta["spacing"]) is None


def test_marker_tiling_overlap_has_limit():
    # far enough out there are genuinely consistent shifted pairs, so the
    # refutation radius cannot be pushed arbitrarily: document the frontier
    fam = tl.marker_tiling_set(DOM, 4)
    assert hs.verify_marker_spacing(fam, 3) is not None


def test_marker_tiling_rejects_singleton():
    with pytest.raises(ValueError):
        tl.marker_tiling_set(tl.TileSet([(1, 2)]), 4)


def test_marker_tiling_rejects_small_box():
    with pytest.raises(ValueError):
        tl.marker_tiling_set(DOM, 3)


def test_marker_tiling_larger_box():
    fam = tl.marker_tiling_set(DOM, 6)  # c = 12, interior side 4
    assert len(fam) == 2
    for member in fam:
        assert member.validate()


# ---------------------------------------------------------------------------
# serialization


def test_tiling_json_round_trip():
    t = tl.tile_rectangle(DOM, (5, 4))
    back = tl.tiling_from_json(json.loads(json.dumps(tl.tiling_to_json(t))))
    assert back == t


def test_tiling_json_validates_on_load():
    t = tl.tile_rectangle(DOM, (4, 4))
    obj = tl.tiling_to_json(t)
    obj["placements"] = obj["placements"][1:]  # drop a tile
    with pytest.raises(ValueError):
        tl.tiling_from_json(obj)
    assert tl.tiling_from_json(obj, validate=False) is not None
