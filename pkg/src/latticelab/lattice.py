"""Geometry primitives on Z^d: boxes, shells, spacing, parity.

Sites are plain tuples of ints.  Regions keep their sites in lexicographic
order so that every enumeration downstream is byte-reproducible.
"""

import itertools

MAX_DIM = 4


def check_dim(d):
    if not isinstance(d, int) or d < 1:
        raise ValueError("dimension must be a positive integer, got %r" % (d,))
    if d > MAX_DIM:
        raise ValueError("dimension %d exceeds the supported cap %d" % (d, MAX_DIM))


def parity(site):
    """Parity of the coordinate sum, 0 or 1."""
    return sum(site) % 2


def add(i, j):
    return tuple(a + b for a, b in zip(i, j))


def sub(i, j):
    return tuple(a - b for a, b in zip(i, j))


def neg(i):
    return tuple(-a for a in i)


def norm_inf(i):
    return max(abs(a) for a in i)


def norm_1(i):
    return sum(abs(a) for a in i)


def unit(t, d):
    """The t-th standard basis vector (1-based t) in dimension d."""
    return tuple(1 if s == t - 1 else 0 for s in range(d))


def neighbors(site):
    """The 2d lattice neighbors of a site."""
    d = len(site)
    out = []
    for t in range(d):
        for delta in (-1, 1):
            out.append(tuple(c + delta if s == t else c for s, c in enumerate(site)))
    return out


class Region:
    """A finite set of sites in fixed lexicographic order.

    kind is a tag: ("F", n), ("B", n), ("rect", dims, offset) or ("general",).
    A bounding box is kept for fast membership tests.
    """

    def __init__(self, sites, kind=("general",)):
        sites = sorted(set(sites))
        if not sites:
            self.d = None
            self.sites = ()
            self.kind = kind
            self._index = {}
            self._lo = self._hi = None
            self._set = frozenset()
            return
        d = len(sites[0])
        check_dim(d)
        for s in sites:
            if len(s) != d:
                raise ValueError("mixed dimensions in region")
        self.d = d
        self.sites = tuple(sites)
        self.kind = kind
        self._index = {s: i for i, s in enumerate(self.sites)}
        self._lo = tuple(min(s[t] for s in sites) for t in range(d))
        self._hi = tuple(max(s[t] for s in sites) for t in range(d))
        self._set = frozenset(sites)

    def __len__(self):
        return len(self.sites)

    def __iter__(self):
        return iter(self.sites)

    def __contains__(self, site):
        if self._lo is None or len(site) != self.d:
            return False
        for t in range(self.d):
            if not self._lo[t] <= site[t] <= self._hi[t]:
                return False
        return site in self._set

    def __eq__(self, other):
        return isinstance(other, Region) and self.sites == other.sites

    def __hash__(self):
        return hash(self.sites)

    def index(self, site):
        return self._index[site]

    def translate(self, offset):
        return Region([add(s, offset) for s in self.sites], kind=("general",))

    def is_box(self):
        """True when the region is exactly its bounding box."""
        if self._lo is None:
            return False
        vol = 1
        for t in range(self.d):
            vol *= self._hi[t] - self._lo[t] + 1
        return vol == len(self.sites)

    def bounds(self):
        return self._lo, self._hi

    def kind_descriptor(self):
        """JSON-friendly description of the region."""
        tag = self.kind[0]
        if tag == "F":
            return {"kind": "F", "n": self.kind[1], "d": self.d}
        if tag == "B":
            return {"kind": "B", "n": self.kind[1], "d": self.d}
        if tag == "rect":
            return {"kind": "rect", "dims": list(self.kind[1]),
                    "offset": list(self.kind[2]), "d": self.d}
        return {"kind": "general", "sites": [list(s) for s in self.sites],
                "d": self.d}


def box_F(n, d):
    """The centered box {-n..n}^d."""
    if not isinstance(n, int) or n < 0:
        raise ValueError("box_F needs n >= 0, got %r" % (n,))
    check_dim(d)
    sites = itertools.product(range(-n, n + 1), repeat=d)
    return Region(sites, kind=("F", n))


def box_B(n, d):
    """The corner box {1..n}^d."""
    if not isinstance(n, int) or n < 1:
        raise ValueError("box_B needs n >= 1, got %r" % (n,))
    check_dim(d)
    sites = itertools.product(range(1, n + 1), repeat=d)
    return Region(sites, kind=("B", n))


def rectangle(dims, offset=None):
    """The box offset + {1..dims[0]} x ... x {1..dims[d-1]}."""
    d = len(dims)
    check_dim(d)
    if offset is None:
        offset = (0,) * d
    if any(not isinstance(a, int) or a < 1 for a in dims):
        raise ValueError("rectangle dims must be positive ints, got %r" % (dims,))
    sites = itertools.product(*[range(offset[t] + 1, offset[t] + dims[t] + 1)
                                for t in range(d)])
    return Region(sites, kind=("rect", tuple(dims), tuple(offset)))


def shell_F(n, d):
    """The outer shell F_n \\ F_{n-1} (all of F_0 when n = 0)."""
    if n == 0:
        return list(box_F(0, d))
    return [s for s in box_F(n, d) if norm_inf(s) == n]


def is_K_spaced(points, K):
    """True iff the K-translates of the points are pairwise disjoint."""
    points = list(points)
    ksites = list(K)
    occupied = set()
    for p in points:
        for k in ksites:
            site = add(p, k)
            if site in occupied:
                return False
            occupied.add(site)
    return True


def is_box_spaced(points, n):
    """is_K_spaced with K = F_n, via the pairwise sup-norm criterion."""
    points = list(points)
    for a in range(len(points)):
        for b in range(a + 1, len(points)):
            if norm_inf(sub(points[a], points[b])) <= 2 * n:
                return False
    return True
