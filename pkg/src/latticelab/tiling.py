"""Perfect tilings of boxes by rectangular prototiles.

A tile set is a finite list of d-dimensional rectangular prototiles.  With
coprime side projections, rectangles whose sides are multiples of M (the
product of all side lengths) or have one long side are always tileable; box
complements split into such rectangles; prescribed sub-tilings can be
realized simultaneously inside a larger box; and for tile sets with at
least two prototiles there is a marker family of box tilings recognizable
by two single-tile boundary rings.
"""

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor

from . import lattice
from .lattice import Region, box_B, rectangle
from .util import BudgetCounter


class TileSet:
    """A finite list of rectangular prototiles, in declaration order."""

    def __init__(self, protos):
        protos = tuple(tuple(int(c) for c in p) for p in protos)
        if not protos:
            raise ValueError("empty tile set")
        d = len(protos[0])
        lattice.check_dim(d)
        for p in protos:
            if len(p) != d:
                raise ValueError("mixed prototile dimensions")
            if any(c < 1 for c in p):
                raise ValueError("prototile sides must be positive")
        if len(set(protos)) != len(protos):
            raise ValueError("duplicate prototiles")
        self.protos = protos
        self.d = d
        m = 1
        for p in protos:
            for c in p:
                m *= c
        self.M = m
        self.coord_gcds = tuple(math.gcd(*(p[t] for p in protos)) if len(protos) > 1
                                else protos[0][t]
                                for t in range(d))

    def __len__(self):
        return len(self.protos)

    def __eq__(self, other):
        return isinstance(other, TileSet) and self.protos == other.protos

    def __repr__(self):
        return "TileSet(%s)" % (self.protos,)


def dominoes():
    return TileSet([(1, 2), (2, 1)])


TILE_PRESETS = {
    "dominoes": lambda: dominoes(),
    "dominoes3": lambda: TileSet([(1, 1, 2), (1, 2, 1), (2, 1, 1)]),
    "squares23": lambda: TileSet([(2, 2), (3, 3)]),
    "bars235": lambda: TileSet([(2, 1), (3, 1), (5, 1)]),
}


def tile_preset(name):
    if name not in TILE_PRESETS:
        raise ValueError("unknown tile preset %r (have %s)"
                         % (name, ", ".join(sorted(TILE_PRESETS))))
    return TILE_PRESETS[name]()


def is_coprime(F):
    """True iff every coordinate projection of the tile set has gcd 1."""
    return all(g == 1 for g in F.coord_gcds)


class Tiling:
    """Placements (proto index, offset); each tile occupies offset + {1..dims}."""

    def __init__(self, tiles, region, placements):
        self.tiles = tiles
        self.region = region
        self.placements = tuple(sorted((int(p), tuple(o)) for p, o in placements))

    def tile_sites(self, placement):
        p, o = placement
        dims = self.tiles.protos[p]
        return [tuple(o[t] + x[t] for t in range(len(dims)))
                for x in itertools.product(*(range(1, c + 1) for c in dims))]

    def validate(self):
        """Exact cover: placements disjoint, union equals the region."""
        seen = {}
        for pl in self.placements:
            for s in self.tile_sites(pl):
                if s in seen:
                    raise ValueError("tiles %r and %r overlap at %r"
                                     % (seen[s], pl, s))
                if s not in self.region:
                    raise ValueError("tile %r leaves the region at %r" % (pl, s))
                seen[s] = pl
        if len(seen) != len(self.region):
            missing = next(s for s in self.region.sites if s not in seen)
            raise ValueError("site %r is uncovered" % (missing,))
        return True

    def mapping(self):
        """site -> (proto index, position within the tile); the overlap label."""
        out = {}
        for pl in self.placements:
            p, o = pl
            for s in self.tile_sites(pl):
                out[s] = (p, lattice.sub(s, o))
        return out

    def restrict_equals(self, offset, other):
        """True iff this tiling, shifted back by offset, equals `other` on its region."""
        own = self.mapping()
        for s, label in other.mapping().items():
            if own.get(lattice.add(s, offset)) != (label[0], label[1]):
                return False
        # tile boundaries must match too: every tile of `other` must be a
        # whole tile here, which the label comparison already enforces.
        return True

    def __eq__(self, other):
        return (isinstance(other, Tiling) and self.region == other.region
                and self.placements == other.placements
                and self.tiles == other.tiles)

    def __hash__(self):
        return hash((self.region.sites, self.placements))

    def __repr__(self):
        return "Tiling(%d tiles on %s)" % (len(self.placements), self.region.kind)


# ---------------------------------------------------------------------------
# Frobenius decomposition


def frobenius_decompose(lengths, L):
    """Write L as a nonnegative combination of the given lengths.

    Canonical output: minimize the number of summands, then take the
    lexicographically least count vector (lengths ascending).  Returns
    {length: count} or None when L is not representable.  Representable is
    guaranteed for L >= the product of all lengths when their gcd is 1.
    """
    uniq = sorted(set(int(x) for x in lengths))
    if not uniq or any(x < 1 for x in uniq):
        raise ValueError("lengths must be positive")
    if L < 0:
        raise ValueError("target must be nonnegative")
    g = uniq[0]
    for x in uniq[1:]:
        g = math.gcd(g, x)
    if g != 1:
        raise ValueError("tile set not coprime in this coordinate (gcd %d)" % g)
    NONE = None
    best = [NONE] * (L + 1)
    best[0] = (0, (0,) * len(uniq))
    for total in range(1, L + 1):
        cand = NONE
        for pos, x in enumerate(uniq):
            if total - x >= 0 and best[total - x] is not NONE:
                cnt, vec = best[total - x]
                new = list(vec)
                new[pos] += 1
                entry = (cnt + 1, tuple(new))
                if cand is NONE or entry < cand:
                    cand = entry
        best[total] = cand
    if best[L] is NONE:
        return None
    _, vec = best[L]
    return {x: c for x, c in zip(uniq, vec) if c > 0}


# ---------------------------------------------------------------------------
# rectangle tiling


def _grid_placements(proto_idx, proto, lo, hi):
    """Grid-tile the box [lo, hi] by one prototile; sides must divide spans."""
    d = len(proto)
    for t in range(d):
        span = hi[t] - lo[t] + 1
        if span % proto[t] != 0:
            raise ValueError("prototile %r does not divide span %d on axis %d"
                             % (proto, span, t + 1))
    steps = [range(lo[t] - 1, hi[t], proto[t]) for t in range(d)]
    return [(proto_idx, o) for o in itertools.product(*steps)]


def _proto_fits_grid(proto, lo, hi):
    return all((hi[t] - lo[t] + 1) % proto[t] == 0 for t in range(len(proto)))


def _rect_condition(F, dims):
    """Which tileability condition the rectangle satisfies: 1, 2 or None."""
    M = F.M
    if all(c % M == 0 for c in dims):
        return 1, None
    for axis in range(len(dims)):
        if dims[axis] >= M and all(dims[t] % M == 0
                                   for t in range(len(dims)) if t != axis):
            return 2, axis
    return None, None


def tile_rectangle(F, dims):
    """A perfect tiling of the box {1..dims[0]} x ... x {1..dims[d]}.

    Certified when either every side is a multiple of M, or one side is
    >= M and the rest are multiples of M.  The first case is tiled as a
    grid of M-cubes; the second by slabs along the long axis, with the long
    side split by Frobenius decomposition over the tile projections.
    """
    dims = tuple(int(c) for c in dims)
    if len(dims) != F.d:
        raise ValueError("dimension mismatch")
    if any(c < 1 for c in dims):
        raise ValueError("sides must be positive")
    region = rectangle(dims)
    cond, axis = _rect_condition(F, dims)
    if cond is None:
        raise ValueError("rectangle %r not certified tileable: needs all sides "
                         "multiples of %d, or one side >= %d and the rest "
                         "multiples of %d" % (dims, F.M, F.M, F.M))
    if cond == 1:
        placements = _grid_placements(0, F.protos[0], (1,) * F.d, dims)
        return Tiling(F, region, placements)
    lengths = sorted(set(p[axis] for p in F.protos))
    combo = frobenius_decompose(lengths, dims[axis])
    if combo is None:
        raise AssertionError("long side %d >= M=%d not representable"
                             % (dims[axis], F.M))
    by_length = {}
    for idx, p in enumerate(F.protos):
        by_length.setdefault(p[axis], idx)
    placements = []
    pos = 0
    for length in sorted(combo):
        idx = by_length[length]
        proto = F.protos[idx]
        for _ in range(combo[length]):
            lo = tuple(pos + 1 if t == axis else 1 for t in range(F.d))
            hi = tuple(pos + length if t == axis else dims[t] for t in range(F.d))
            placements.extend(_grid_placements(idx, proto, lo, hi))
            pos += length
    return Tiling(F, region, placements)


def grid_tiling_variants(F, dims):
    """All tilings made of M-cubes, each grid-tiled by one prototile.

    Needs every side a multiple of M; yields |F| ** (number of cubes)
    distinct tilings in lexicographic cube-assignment order.
    """
    dims = tuple(int(c) for c in dims)
    M = F.M
    if any(c % M != 0 for c in dims):
        raise ValueError("all sides must be multiples of M=%d" % M)
    region = rectangle(dims)
    cubes = list(itertools.product(*(range(c // M) for c in dims)))
    for assignment in itertools.product(range(len(F.protos)), repeat=len(cubes)):
        placements = []
        for cube, idx in zip(cubes, assignment):
            lo = tuple(cube[t] * M + 1 for t in range(F.d))
            hi = tuple((cube[t] + 1) * M for t in range(F.d))
            placements.extend(_grid_placements(idx, F.protos[idx], lo, hi))
        yield Tiling(F, region, placements)


# ---------------------------------------------------------------------------
# partitioning box complements


def _split_annulus(outer_lo, outer_hi, inner_lo, inner_hi):
    """Partition outer \\ inner into rectangles, two slabs per axis.

    Splits along the last axis first, then recurses inward, so each slab is
    full-width in the axes not yet processed and inner-width in the
    processed ones.  Returns a list of (lo, hi) inclusive bounds.
    """
    d = len(outer_lo)
    if any(inner_hi[t] < inner_lo[t] for t in range(d)):
        return [(tuple(outer_lo), tuple(outer_hi))] \
            if all(outer_hi[t] >= outer_lo[t] for t in range(d)) else []
    pieces = []
    cur_lo = list(outer_lo)
    cur_hi = list(outer_hi)
    for t in reversed(range(d)):
        if inner_hi[t] < cur_hi[t]:
            lo = list(cur_lo)
            lo[t] = inner_hi[t] + 1
            pieces.append((tuple(lo), tuple(cur_hi)))
        if cur_lo[t] < inner_lo[t]:
            hi = list(cur_hi)
            hi[t] = inner_lo[t] - 1
            pieces.append((tuple(cur_lo), tuple(hi)))
        cur_lo[t] = inner_lo[t]
        cur_hi[t] = inner_hi[t]
    return pieces


def partition_complement(n, n_prime, N, M, offset):
    """Split B_{(n+n')M} minus a well-separated translate of B_{nM} into slabs.

    The translate offset + B_{nM}, padded by F_N, must stay inside the big
    box.  Each returned rectangle has one side >= N and all other sides
    multiples of M.
    """
    d = len(offset)
    big = (n + n_prime) * M
    inner_lo = tuple(offset[t] + 1 for t in range(d))
    inner_hi = tuple(offset[t] + n * M for t in range(d))
    for t in range(d):
        if inner_lo[t] - N < 1:
            raise ValueError("padded block crosses the lower face on axis %d"
                             % (t + 1))
        if inner_hi[t] + N > big:
            raise ValueError("padded block crosses the upper face on axis %d"
                             % (t + 1))
    pieces = _split_annulus((1,) * d, (big,) * d, inner_lo, inner_hi)
    out = []
    volume = 0
    for lo, hi in pieces:
        dims = tuple(hi[t] - lo[t] + 1 for t in range(d))
        off = tuple(lo[t] - 1 for t in range(d))
        if not _slab_side_condition(dims, N, M):
            raise AssertionError("piece %r at %r violates the side condition"
                                 % (dims, off))
        vol = 1
        for c in dims:
            vol *= c
        volume += vol
        out.append(rectangle(dims, off))
    if volume != big ** d - (n * M) ** d:
        raise AssertionError("partition volume mismatch")
    return out


def _slab_side_condition(dims, N, M):
    """One side >= N, the rest multiples of M."""
    for axis in range(len(dims)):
        if dims[axis] >= N and all(dims[t] % M == 0
                                   for t in range(len(dims)) if t != axis):
            return True
    return False


# ---------------------------------------------------------------------------
# flexible fill


def flexible_tile_fill(F, n, k, K, W):
    """A perfect tiling of B_{nM} with prescribed sub-tilings of B_{kM}.

    Each site i in K receives the tiling W[i] on i + B_{kM}; the blocks,
    padded by F_M, must be pairwise far enough apart that no two touch a
    common cell of the M-grid, and must stay inside B_{nM}.  Everything
    else is tiled canonically.
    """
    M = F.M
    d = F.d
    region = box_B(n * M, d)
    K = sorted(tuple(i) for i in K)
    for i in K:
        if i not in W:
            raise ValueError("no block tiling prescribed at %r" % (i,))
        w = W[i]
        if w.region != box_B(k * M, d):
            raise ValueError("block at %r does not live on the %d-box"
                             % (i, k * M))
        w.validate()
    for i in K:
        for t in range(d):
            if i[t] + 1 - M < 1 or i[t] + k * M + M > n * M:
                raise ValueError("padded block at %r leaves the box on axis %d"
                                 % (i, t + 1))
    # Cells of the M-grid touched by each padded block.
    def cell_range(i):
        return [(max(0, (i[t] - M) // M), (i[t] + k * M + M - 1) // M)
                for t in range(d)]

    ranges = {i: cell_range(i) for i in K}
    owner = {}
    for i in K:
        for cell in itertools.product(*(range(a, b + 1) for a, b in ranges[i])):
            if cell in owner:
                raise ValueError("blocks at %r and %r are too close: both "
                                 "touch grid cell %r" % (owner[cell], i, cell))
            owner[cell] = i
    placements = []
    # Ambient cells: canonical single-prototile grid.
    all_cells = itertools.product(*(range(n) for _ in range(d)))
    for cell in all_cells:
        if cell in owner:
            continue
        lo = tuple(cell[t] * M + 1 for t in range(d))
        hi = tuple((cell[t] + 1) * M for t in range(d))
        placements.extend(_grid_placements(0, F.protos[0], lo, hi))
    for i in K:
        # the prescribed block, translated into place
        for p, o in W[i].placements:
            placements.append((p, lattice.add(o, i)))
        # complement of the block within its enlarged cell-aligned box
        enl_lo = tuple(ranges[i][t][0] * M + 1 for t in range(d))
        enl_hi = tuple((ranges[i][t][1] + 1) * M for t in range(d))
        blk_lo = tuple(i[t] + 1 for t in range(d))
        blk_hi = tuple(i[t] + k * M for t in range(d))
        for lo, hi in _split_annulus(enl_lo, enl_hi, blk_lo, blk_hi):
            dims = tuple(hi[t] - lo[t] + 1 for t in range(d))
            sub = tile_rectangle(F, dims)
            off = tuple(lo[t] - 1 for t in range(d))
            for p, o in sub.placements:
                placements.append((p, lattice.add(o, off)))
    out = Tiling(F, region, placements)
    out.validate()
    return out


# ---------------------------------------------------------------------------
# counting


def _first_uncovered(region, covered):
    for s in region.sites:
        if s not in covered:
            return s
    return None


def _count_rec(F, region, covered, counter):
    site = _first_uncovered(region, covered)
    if site is None:
        return 1
    counter.tick()
    total = 0
    d = F.d
    for proto in F.protos:
        cells = [tuple(site[t] + x[t] for t in range(d))
                 for x in itertools.product(*(range(c) for c in proto))]
        if all(c in region and c not in covered for c in cells):
            covered.update(cells)
            total += _count_rec(F, region, covered, counter)
            covered.difference_update(cells)
    return total


def _count_branch(args):
    F, region_sites, first_cells, budget = args
    region = Region(region_sites)
    counter = BudgetCounter(budget)
    covered = set(first_cells)
    return _count_rec(F, region, covered, counter)


def count_tilings(F, region, workers=1, budget=None):
    """Exact number of perfect tilings of the region (backtracking search).

    The tile covering the first uncovered site always has that site as its
    lexicographically least cell, so each tiling is counted once.
    """
    counter = BudgetCounter(budget)
    site = _first_uncovered(region, set())
    if site is None:
        return 1
    if workers <= 1:
        return _count_rec(F, region, set(), counter)
    jobs = []
    d = F.d
    for proto in F.protos:
        cells = [tuple(site[t] + x[t] for t in range(d))
                 for x in itertools.product(*(range(c) for c in proto))]
        if all(c in region for c in cells):
            jobs.append((F, region.sites, tuple(cells), counter.budget))
    if not jobs:
        return 0
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(_count_branch, jobs))


# ---------------------------------------------------------------------------
# the marker tiling family


def _centered_bounds(side, d):
    """Bounds of the side-length box placed around the origin (floor center)."""
    lo = -((side + 1) // 2) + 1
    hi = side // 2
    return (lo,) * d, (hi,) * d


def _single_proto_ring(F, proto_idx, outer, inner):
    """Grid-tile every rectangle of the ring by one prototile, or None."""
    proto = F.protos[proto_idx]
    placements = []
    for lo, hi in _split_annulus(outer[0], outer[1], inner[0], inner[1]):
        if not _proto_fits_grid(proto, lo, hi):
            return None
        placements.extend(_grid_placements(proto_idx, proto, lo, hi))
    return placements


class TilingFamily:
    """A canonically ordered family of tilings of one region."""

    def __init__(self, region, members, meta=None):
        members = sorted(members, key=lambda t: t.placements)
        self.region = region
        self.members = tuple(members)
        self.meta = dict(meta or {})

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]


def marker_tiling_set(F, n):
    """Marker tilings of the largest M-multiple box centered in F_n.

    Members tile the centered box of side M*floor((2n+1)/M); their two
    outermost rings of side-difference M are each tiled by a single
    prototile, with different prototiles for the two rings, and the
    interior is the canonical flexible fill.  Every member is checked to
    extend to the centered box of side M*ceil((2n+1)/M).
    """
    if len(F.protos) < 2:
        raise ValueError("a single-prototile set admits exactly one tiling "
                         "and carries no marker structure")
    if not is_coprime(F):
        raise ValueError("tile set must have coprime side projections")
    M = F.M
    d = F.d
    side = 2 * n + 1
    c = M * (side // M)
    C = M * (-(-side // M))
    if c < 2 * M:
        raise ValueError("box too small for two single-prototile rings: "
                         "need floor((2n+1)/M) >= 2, got n = %d, M = %d" % (n, M))
    b_outer = _centered_bounds(c, d)
    b_mid = _centered_bounds(c - M, d)
    b_core = _centered_bounds(c - 2 * M, d)
    region = rectangle((c,) * d, tuple(b_outer[0][t] - 1 for t in range(d)))

    interior = []
    if c - 2 * M > 0:
        core = flexible_tile_fill(F, (c - 2 * M) // M, 1, [], {})
        shift = tuple(b_core[0][t] - 1 for t in range(d))
        interior = [(p, lattice.add(o, shift)) for p, o in core.placements]

    members = []
    pairs = []
    for i1, i2 in itertools.permutations(range(len(F.protos)), 2):
        ring1 = _single_proto_ring(F, i1, b_outer, b_mid)
        if ring1 is None:
            continue
        if c - 2 * M > 0:
            ring2 = _single_proto_ring(F, i2, b_mid, b_core)
        else:
            ring2 = _single_proto_ring(
                F, i2, b_mid, ((1,) * d, (0,) * d))  # empty inner: whole box
        if ring2 is None:
            continue
        t = Tiling(F, region, ring1 + ring2 + interior)
        t.validate()
        members.append(t)
        pairs.append((i1, i2))
    if not members:
        raise ValueError("no ordered prototile pair tiles the two rings; "
                         "marker family not constructible for this tile set")
    # Extension certificate: the ring between side c and side C must be
    # tileable so that members extend to the bigger box.
    if C > c:
        ext_outer = _centered_bounds(C, d)
        ext_pieces = []
        for lo, hi in _split_annulus(ext_outer[0], ext_outer[1],
                                     b_outer[0], b_outer[1]):
            for idx in range(len(F.protos)):
                if _proto_fits_grid(F.protos[idx], lo, hi):
                    ext_pieces.extend(_grid_placements(idx, F.protos[idx], lo, hi))
                    break
            else:
                raise ValueError("extension ring piece %r-%r not tileable by a "
                                 "single prototile" % (lo, hi))
        ext_region = rectangle((C,) * d, tuple(ext_outer[0][t] - 1 for t in range(d)))
        for t in members:
            extended = Tiling(F, ext_region, t.placements + tuple(ext_pieces))
            extended.validate()
    order = sorted(range(len(members)), key=lambda j: members[j].placements)
    fam = TilingFamily(region, members,
                       meta={"family": "tiling_marker", "n": n, "side": c,
                             "ext_side": C, "spacing": (c - 3) // 2,
                             "ring_pairs": [pairs[j] for j in order]})
    return fam


# ---------------------------------------------------------------------------
# serialization


def tiling_to_json(t):
    return {
        "tileset": [list(p) for p in t.tiles.protos],
        "region": t.region.kind_descriptor(),
        "placements": [[p, list(o)] for p, o in t.placements],
    }


def tiling_from_json(obj, validate=True):
    from .homshift import region_from_descriptor
    tiles = TileSet([tuple(p) for p in obj["tileset"]])
    region = region_from_descriptor(obj["region"])
    t = Tiling(tiles, region, [(p, tuple(o)) for p, o in obj["placements"]])
    if validate:
        t.validate()
    return t
