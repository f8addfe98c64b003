"""Graph-homomorphism patterns on boxes of Z^d.

A hom-shift is the space of graph homomorphisms from the Cayley graph of
Z^d to a fixed finite graph H (proper q-colorings when H = K_q).  This
module enumerates such patterns on boxes, builds the checkerboard-boundary
families and their marker refinements, and implements the constructive
extension operations between families: exact-length path extension,
full-support embedding, simultaneous block filling, and extension of
periodic-shell patterns to checkerboard-shell ones.  Every operation's
output can be re-validated from scratch.
"""

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor

from . import lattice
from .lattice import (add, box_F, neg, norm_1, norm_inf, parity, shell_F, sub,
                      unit)
from .util import BudgetCounter


# ---------------------------------------------------------------------------
# target graphs


class TargetGraph:
    """A finite undirected graph H (self-loops allowed)."""

    def __init__(self, labels, edges):
        self.labels = tuple(str(x) for x in labels)
        self.n = len(self.labels)
        index = {lab: i for i, lab in enumerate(self.labels)}
        if len(index) != self.n:
            raise ValueError("duplicate vertex labels")
        adj = [set() for _ in range(self.n)]
        for u, v in edges:
            iu = index[str(u)] if not isinstance(u, int) else u
            iv = index[str(v)] if not isinstance(v, int) else v
            adj[iu].add(iv)
            adj[iv].add(iu)
        self.adj = tuple(tuple(sorted(s)) for s in adj)
        self.adj_sets = tuple(frozenset(s) for s in adj)
        self._connected = None
        self._bipartite = None
        self._np_matrix = None

    def has_edge(self, u, v):
        return v in self.adj_sets[u]

    def edge_list(self):
        """Unordered edges (u <= v), sorted."""
        out = set()
        for u in range(self.n):
            for v in self.adj[u]:
                out.add((min(u, v), max(u, v)))
        return sorted(out)

    def ordered_edges(self):
        """All ordered pairs (u, v) with an edge, sorted."""
        return sorted((u, v) for u in range(self.n) for v in self.adj[u])

    def is_connected(self):
        if self._connected is None:
            if self.n == 0:
                self._connected = True
            else:
                seen = {0}
                stack = [0]
                while stack:
                    u = stack.pop()
                    for v in self.adj[u]:
                        if v not in seen:
                            seen.add(v)
                            stack.append(v)
                self._connected = len(seen) == self.n
        return self._connected

    def is_bipartite(self):
        if self._bipartite is None:
            color = {}
            ok = True
            for start in range(self.n):
                if start in color:
                    continue
                color[start] = 0
                stack = [start]
                while stack and ok:
                    u = stack.pop()
                    for v in self.adj[u]:
                        if v == u:
                            ok = False
                            break
                        if v not in color:
                            color[v] = 1 - color[u]
                            stack.append(v)
                        elif color[v] == color[u]:
                            ok = False
                            break
            self._bipartite = ok
        return self._bipartite

    def matrix(self):
        """Boolean adjacency matrix as a numpy array."""
        if self._np_matrix is None:
            import numpy as np
            m = np.zeros((self.n, self.n), dtype=bool)
            for u in range(self.n):
                for v in self.adj[u]:
                    m[u, v] = True
            self._np_matrix = m
        return self._np_matrix

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_np_matrix"] = None
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)

    def __repr__(self):
        return "TargetGraph(%d vertices, %d edges)" % (self.n, len(self.edge_list()))


def complete_graph(q):
    labels = [str(i) for i in range(q)]
    edges = [(u, v) for u in range(q) for v in range(u + 1, q)]
    return TargetGraph(labels, edges)


def cycle_graph(q):
    labels = [str(i) for i in range(q)]
    edges = [(i, (i + 1) % q) for i in range(q)]
    return TargetGraph(labels, edges)


def path_graph(q):
    labels = [str(i) for i in range(q)]
    edges = [(i, i + 1) for i in range(q - 1)]
    return TargetGraph(labels, edges)


def full_shift_graph(q):
    """All pairs adjacent, self-loops included: no constraints at all."""
    labels = [str(i) for i in range(q)]
    edges = [(u, v) for u in range(q) for v in range(u, q)]
    return TargetGraph(labels, edges)


def petersen_graph():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, 5 + i) for i in range(5)]
    return TargetGraph([str(i) for i in range(10)], outer + inner + spokes)


GRAPH_PRESETS = {
    "K3": lambda: complete_graph(3),
    "K4": lambda: complete_graph(4),
    "K5": lambda: complete_graph(5),
    "C4": lambda: cycle_graph(4),
    "C5": lambda: cycle_graph(5),
    "C7": lambda: cycle_graph(7),
    "petersen": petersen_graph,
    "full2": lambda: full_shift_graph(2),
    "full3": lambda: full_shift_graph(3),
}


def graph_preset(name):
    if name not in GRAPH_PRESETS:
        raise ValueError("unknown graph preset %r (have %s)"
                         % (name, ", ".join(sorted(GRAPH_PRESETS))))
    return GRAPH_PRESETS[name]()


# ---------------------------------------------------------------------------
# patterns


class Pattern:
    """A total assignment region -> vertex index, one byte per site."""

    __slots__ = ("region", "values")

    def __init__(self, region, values):
        if len(values) != len(region):
            raise ValueError("value array length %d != region size %d"
                             % (len(values), len(region)))
        self.region = region
        self.values = bytes(values)

    def value(self, site):
        return self.values[self.region.index(site)]

    def mapping(self):
        return dict(zip(self.region.sites, self.values))

    def restrict(self, subregion):
        vals = bytes(self.value(s) for s in subregion.sites)
        return Pattern(subregion, vals)

    def __eq__(self, other):
        return (isinstance(other, Pattern) and self.region == other.region
                and self.values == other.values)

    def __hash__(self):
        return hash((self.region.sites, self.values))

    def __repr__(self):
        return "Pattern(%s, %s)" % (self.region.kind, list(self.values))


def pattern_from_mapping(region, mapping):
    return Pattern(region, bytes(mapping[s] for s in region.sites))


class PatternSet:
    """A canonically ordered set of patterns sharing one region."""

    def __init__(self, region, patterns, meta=None):
        for p in patterns:
            if p.region != region:
                raise ValueError("pattern region mismatch")
        uniq = sorted(set(p.values for p in patterns))
        self.region = region
        self.patterns = tuple(Pattern(region, v) for v in uniq)
        self.meta = dict(meta or {})

    def __len__(self):
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def __getitem__(self, i):
        return self.patterns[i]


def is_hom(H, pattern):
    """True iff every edge internal to the region maps to an edge of H."""
    region = pattern.region
    if region.d is not None and region.is_box() and region.d <= 3:
        import numpy as np
        lo, hi = region.bounds()
        dims = tuple(hi[t] - lo[t] + 1 for t in range(region.d))
        grid = np.frombuffer(pattern.values, dtype=np.uint8).reshape(dims)
        A = H.matrix()
        for axis in range(region.d):
            if dims[axis] < 2:
                continue
            head = [slice(None)] * region.d
            tail = [slice(None)] * region.d
            head[axis] = slice(0, -1)
            tail[axis] = slice(1, None)
            if not A[grid[tuple(head)], grid[tuple(tail)]].all():
                return False
        return True
    values = pattern.values
    for pos, site in enumerate(region.sites):
        u = values[pos]
        for t in range(region.d):
            nb = tuple(c + 1 if s == t else c for s, c in enumerate(site))
            if nb in region:
                if not H.has_edge(u, values[region.index(nb)]):
                    return False
    return True


# ---------------------------------------------------------------------------
# enumeration


def _prev_neighbor_positions(region):
    """For each position, the positions of already-assigned lattice neighbors."""
    out = []
    for pos, site in enumerate(region.sites):
        prevs = []
        for nb in lattice.neighbors(site):
            if nb in region:
                j = region.index(nb)
                if j < pos:
                    prevs.append(j)
        out.append(tuple(prevs))
    return out


def _dfs_collect(H, region, fixed, counter, sink):
    """Depth-first fill in canonical site order with forward checking."""
    sites = region.sites
    m = len(sites)
    if m == 0:
        sink(b"")
        return
    prevs = _prev_neighbor_positions(region)
    fixed_vals = [fixed.get(s) for s in sites]
    adj_sets = H.adj_sets
    values = bytearray(m)
    all_vertices = range(H.n)

    def rec(pos):
        if pos == m:
            sink(bytes(values))
            return
        counter.tick()
        forced = fixed_vals[pos]
        candidates = (forced,) if forced is not None else all_vertices
        pn = prevs[pos]
        for v in candidates:
            ok = True
            for j in pn:
                if v not in adj_sets[values[j]]:
                    ok = False
                    break
            if ok:
                values[pos] = v
                rec(pos + 1)

    rec(0)


def _enumerate_branch(args):
    """Worker entry: enumerate one branch of the first free site."""
    H, region, fixed, budget = args
    counter = BudgetCounter(budget)
    found = []
    _dfs_collect(H, region, fixed, counter, found.append)
    return found


def enumerate_hom(H, region, boundary=None, workers=1, budget=None):
    """All graph homomorphisms region -> H consistent with the boundary.

    The boundary is a partial assignment {site: vertex}.  An assignment that
    violates an internal edge simply yields the empty set.  Results are in
    canonical order regardless of worker count.
    """
    fixed = dict(boundary or {})
    for site in fixed:
        if site not in region:
            raise ValueError("boundary site %r outside region" % (site,))
    counter = BudgetCounter(budget)
    first_free = None
    for site in region.sites:
        if site not in fixed:
            first_free = site
            break
    if workers <= 1 or first_free is None or H.n < 2:
        found = []
        _dfs_collect(H, region, fixed, counter, found.append)
        return PatternSet(region, [Pattern(region, v) for v in found])
    jobs = []
    for v in range(H.n):
        branch_fixed = dict(fixed)
        branch_fixed[first_free] = v
        jobs.append((H, region, branch_fixed, counter.budget))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_enumerate_branch, jobs))
    found = [vals for branch in results for vals in branch]
    return PatternSet(region, [Pattern(region, v) for v in found])


def count_hom_dfs(H, region, boundary=None, budget=None):
    """Count homomorphisms without materializing them."""
    fixed = dict(boundary or {})
    counter = BudgetCounter(budget)
    total = [0]

    def sink(_):
        total[0] += 1

    _dfs_collect(H, region, fixed, counter, sink)
    return total[0]


# ---------------------------------------------------------------------------
# checkerboard, marker and periodic-shell families


def _require_edge(H, v0, v1, what):
    if not (0 <= v0 < H.n and 0 <= v1 < H.n and H.has_edge(v0, v1)):
        raise ValueError("%s (%r, %r) is not an edge of H" % (what, v0, v1))


def checkerboard_shell(v0, v1, n, d):
    """The forced shell assignment of C_n^(v0,v1): v_parity on F_n \\ F_{n-1}."""
    return {s: (v0 if parity(s) == 0 else v1) for s in shell_F(n, d)}


def checkerboard_set(H, v0, v1, n, d, workers=1, budget=None):
    """C_n^(v0,v1): homomorphisms on F_n with a (v0,v1)-checkerboard shell."""
    _require_edge(H, v0, v1, "checkerboard edge")
    if n < 1:
        raise ValueError("checkerboard family needs n >= 1")
    region = box_F(n, d)
    boundary = checkerboard_shell(v0, v1, n, d)
    ps = enumerate_hom(H, region, boundary, workers=workers, budget=budget)
    ps.meta.update({"family": "checkerboard", "edge": (v0, v1), "n": n, "d": d})
    return ps


def in_checkerboard(H, pattern, v0, v1):
    """Validator: pattern is a homomorphism with the (v0,v1) shell."""
    _require_edge(H, v0, v1, "checkerboard edge")
    region = pattern.region
    if region.kind[0] != "F":
        return False
    n = region.kind[1]
    if not is_hom(H, pattern):
        return False
    want = checkerboard_shell(v0, v1, n, region.d)
    return all(pattern.value(s) == w for s, w in want.items())


def pure_checkerboard(H, v0, v1, n, d):
    """The two-color pattern a_i = v_parity(i) on all of F_n."""
    _require_edge(H, v0, v1, "checkerboard edge")
    region = box_F(n, d)
    vals = bytes((v0 if parity(s) == 0 else v1) for s in region.sites)
    return Pattern(region, vals)


def marker_set(H, v0, v1, v2, n, d, workers=1, budget=None):
    """The marker family on F_{n+1}: (v0,v1) shell outside, (v0,v2) shell on F_n.

    Restriction to F_n is a bijection onto C_n^(v0,v2).
    """
    _require_edge(H, v0, v1, "outer checkerboard edge")
    _require_edge(H, v0, v2, "inner checkerboard edge")
    if v1 == v2:
        raise ValueError("marker family needs two distinct companion colors")
    if n < 0:
        raise ValueError("marker family needs n >= 0")
    region = box_F(n + 1, d)
    boundary = checkerboard_shell(v0, v1, n + 1, d)
    boundary.update(checkerboard_shell(v0, v2, n, d))
    ps = enumerate_hom(H, region, boundary, workers=workers, budget=budget)
    ps.meta.update({"family": "marker", "edge": (v0, v1), "inner_edge": (v0, v2),
                    "n": n + 1, "d": d})
    return ps


def missing_shell_residue(n, d):
    """The one residue class mod 2 absent from the shell of F_n (n >= 1)."""
    return ((n + 1) % 2,) * d


def hat_set(H, n, d, budget=None):
    """Patterns on F_n whose shell is (2Z)^d-periodic."""
    if n < 1:
        raise ValueError("periodic-shell family needs n >= 1")
    region = box_F(n, d)
    shell = shell_F(n, d)
    absent = missing_shell_residue(n, d)
    residues = [r for r in itertools.product((0, 1), repeat=d) if r != absent]
    found = []
    counter = BudgetCounter(budget)
    for assignment in itertools.product(range(H.n), repeat=len(residues)):
        q = dict(zip(residues, assignment))
        boundary = {s: q[tuple(c % 2 for c in s)] for s in shell}
        _dfs_collect(H, region, boundary, counter, found.append)
    ps = PatternSet(region, [Pattern(region, v) for v in found])
    ps.meta.update({"family": "periodic_shell", "n": n, "d": d})
    return ps


def in_hat(H, pattern):
    """Validator: homomorphism whose shell values depend only on site mod 2."""
    region = pattern.region
    if region.kind[0] != "F":
        return False
    n = region.kind[1]
    if n < 1 or not is_hom(H, pattern):
        return False
    by_residue = {}
    for s in shell_F(n, region.d):
        r = tuple(c % 2 for c in s)
        v = pattern.value(s)
        if by_residue.setdefault(r, v) != v:
            return False
    return True


# ---------------------------------------------------------------------------
# the contraction tau and the retraction tau_n


def tau(site):
    """One contraction step toward the origin (the origin maps to e_1)."""
    d = len(site)
    if all(c == 0 for c in site):
        return unit(1, d)
    m = norm_inf(site)
    for t in range(d):
        if abs(site[t]) == m:
            step = -1 if site[t] > 0 else 1
            return tuple(c + step if s == t else c for s, c in enumerate(site))
    raise AssertionError("unreachable")


def tau_n(site, n):
    """Retraction of Z^d onto F_n: tau applied 2k times, k the entry time."""
    if n < 1:
        raise ValueError("the retraction onto F_n needs n >= 1 "
                         "(F_0 admits no retraction: the Cayley graph has no loops)")
    if norm_inf(site) <= n:
        return site
    k = 0
    cur = site
    while norm_inf(cur) > n:
        cur = tau(cur)
        k += 1
    for _ in range(k):
        cur = tau(cur)
    return cur


# ---------------------------------------------------------------------------
# walks in H of exact lengths


def min_universal_path_length(H):
    """Smallest N with a walk of every length >= N between any two vertices."""
    if not H.is_connected() or H.is_bipartite():
        raise ValueError("no such N exists: H must be connected and non-bipartite")
    reach = [[u == v for v in range(H.n)] for u in range(H.n)]
    bound = 4 * H.n * H.n + 4
    for length in range(1, bound + 1):
        nxt = [[False] * H.n for _ in range(H.n)]
        for u in range(H.n):
            row = reach[u]
            out = nxt[u]
            for mid in range(H.n):
                if row[mid]:
                    for v in H.adj[mid]:
                        out[v] = True
        reach = nxt
        if all(all(row) for row in reach):
            return length
    raise AssertionError("universal walk length not found below %d" % bound)


def _walk_tables(H, max_len):
    """reach[L][u][v] = a walk of length L from u to v exists."""
    tables = [[[u == v for v in range(H.n)] for u in range(H.n)]]
    for _ in range(max_len):
        prev = tables[-1]
        nxt = [[False] * H.n for _ in range(H.n)]
        for u in range(H.n):
            for mid in range(H.n):
                if prev[u][mid]:
                    for v in H.adj[mid]:
                        nxt[u][v] = True
        tables.append(nxt)
    return tables


def lex_walk(H, u, v, length):
    """The lexicographically least walk u -> v of exactly this length, or None."""
    tables = _walk_tables(H, length)
    if not tables[length][u][v]:
        return None
    walk = [u]
    cur = u
    for remaining in range(length, 0, -1):
        for w in H.adj[cur]:
            if tables[remaining - 1][w][v]:
                walk.append(w)
                cur = w
                break
        else:
            raise AssertionError("walk table inconsistent")
    return walk


# ---------------------------------------------------------------------------
# extension operations


def _family_n(pattern, what):
    region = pattern.region
    if region.kind[0] != "F":
        raise ValueError("%s must live on a centered box F_n" % what)
    return region.kind[1]


def path_extend(H, a, source, target, k):
    """Extend a checkerboard-shell pattern by k rings to a new shell edge.

    a must lie in the (source) checkerboard family on F_n; the result lies in
    the (target) family on F_{n+k} and restricts to a on F_n.  Each
    intermediate ring is a checkerboard of two consecutive vertices of a walk
    in H; the walk is the lexicographically least one, for reproducibility.
    """
    v0, v1 = source
    w0, w1 = target
    _require_edge(H, v0, v1, "source edge")
    _require_edge(H, w0, w1, "target edge")
    n = _family_n(a, "path_extend input")
    d = a.region.d
    N = min_universal_path_length(H)
    if k < N + 1:
        raise ValueError("extension length too short: k = %d but k >= %d needed"
                         % (k, N + 1))
    if not in_checkerboard(H, a, v0, v1):
        raise ValueError("input does not lie in the stated checkerboard family")
    # Walk w[0..k+1]: starts along the source edge, ends along the target
    # edge in the orientation matching the parity of k.
    end = (w0, w1) if k % 2 == 0 else (w1, w0)
    middle = lex_walk(H, v1, end[0], k - 1)
    if middle is None:
        raise AssertionError("no walk of length %d from %d to %d" % (k - 1, v1, end[0]))
    walk = [v0] + middle + [end[1]]
    region = box_F(n + k, d)
    values = bytearray(len(region))
    amap = a.mapping()
    for pos, site in enumerate(region.sites):
        r = norm_inf(site)
        if r <= n:
            values[pos] = amap[site]
        else:
            t = r - n
            values[pos] = walk[t] if parity(site) == t % 2 else walk[t + 1]
    return Pattern(region, bytes(values))


def embed_in_marker(H, a, target, k):
    """Embed an arbitrary box pattern into a checkerboard family.

    a in Hom(F_n, H) is spread over F_{2dn} by the retraction tau_n (so the
    result restricts to a on F_n and has a checkerboard shell), then extended
    k more rings to the requested target edge.  Needs k >= N + d.
    """
    n = _family_n(a, "embed_in_marker input")
    if n < 1:
        raise ValueError("embedding needs n >= 1")
    d = a.region.d
    if not is_hom(H, a):
        raise ValueError("input not a homomorphism")
    N = min_universal_path_length(H)
    if k < N + d:
        raise ValueError("extension length too short: k = %d but k >= %d needed"
                         % (k, N + d))
    big = box_F(2 * d * n, d)
    amap = a.mapping()
    cache = {}
    values = bytearray(len(big))
    for pos, site in enumerate(big.sites):
        tgt = cache.get(site)
        if tgt is None:
            tgt = tau_n(site, n)
            cache[site] = tgt
        values[pos] = amap[tgt]
    spread = Pattern(big, bytes(values))
    origin = (0,) * d
    source = (amap[origin], amap[unit(1, d)])
    return path_extend(H, spread, source, target, k)


def flexible_fill(H, target, n, K, W, base, d=None):
    """One pattern realizing prescribed blocks inside a checkerboard.

    K is a set of sites, W maps each i in K to a pattern of the common
    checkerboard family with edge `base` on F_k.  The output is a pattern of
    the (target) family on F_n whose shift by i restricted to F_k equals W(i)
    for every i in K; all sites outside the padded blocks carry the plain
    target checkerboard.  K must be F_{k+N+1}-spaced with every padded block
    inside F_{n-1}.
    """
    w0, w1 = target
    _require_edge(H, w0, w1, "target edge")
    K = sorted(K)
    if d is None:
        if K:
            d = len(K[0])
        else:
            raise ValueError("dimension required when K is empty")
    if not K:
        return pure_checkerboard(H, w0, w1, n, d)
    v0, v1 = base
    _require_edge(H, v0, v1, "block edge")
    k = None
    for i in K:
        if i not in W:
            raise ValueError("no block prescribed at %r" % (i,))
        ki = _family_n(W[i], "block at %r" % (i,))
        if k is None:
            k = ki
        elif ki != k:
            raise ValueError("blocks live on different boxes")
        if not in_checkerboard(H, W[i], v0, v1):
            raise ValueError("block at %r is not in the stated family" % (i,))
    N = min_universal_path_length(H)
    pad = k + N + 1
    for a_pos in range(len(K)):
        for b_pos in range(a_pos + 1, len(K)):
            if norm_inf(sub(K[a_pos], K[b_pos])) <= 2 * pad:
                raise ValueError("blocks at %r and %r are too close: need "
                                 "sup-distance > %d"
                                 % (K[a_pos], K[b_pos], 2 * pad))
    limit = n - N - k - 2
    for i in K:
        if norm_inf(i) > limit:
            raise ValueError("block at %r does not fit: need sup-norm <= %d"
                             % (i, limit))
    region = box_F(n, d)
    values = bytearray(w0 if parity(s) == 0 else w1 for s in region.sites)
    for i in K:
        # Pad the block so its own boundary ring agrees with the ambient
        # checkerboard: the padding target depends on the parity of i.
        block_target = (w0, w1) if parity(i) == 0 else (w1, w0)
        padded = path_extend(H, W[i], (v0, v1), block_target, N + 1)
        for site, val in zip(padded.region.sites, padded.values):
            values[region.index(add(site, i))] = val
    return Pattern(region, bytes(values))


def _hypercube_homs(H, d):
    """All maps {0,1}^d -> H preserving hypercube adjacency, in lex order."""
    residues = list(itertools.product((0, 1), repeat=d))
    index = {r: i for i, r in enumerate(residues)}
    prev_edges = []
    for i, r in enumerate(residues):
        prevs = []
        for t in range(d):
            o = tuple(c ^ (1 if s == t else 0) for s, c in enumerate(r))
            if index[o] < i:
                prevs.append(index[o])
        prev_edges.append(tuple(prevs))
    out = []
    assignment = [0] * len(residues)

    def rec(pos):
        if pos == len(residues):
            out.append(tuple(assignment))
            return
        for v in range(H.n):
            if all(H.has_edge(v, assignment[j]) for j in prev_edges[pos]):
                assignment[pos] = v
                rec(pos + 1)

    rec(0)
    return residues, out


def hat_extend(H, a, k):
    """Extend a periodic-shell pattern to a checkerboard-shell one.

    Searches for a chain of 2-periodic ring layers from the input shell to a
    plain checkerboard, each consecutive pair compatible across lattice edges.
    Returns the checkerboard edge together with the extended pattern; the
    preferred edge follows the input's residue values at 0 and e_1, in the
    orientation given by the parity of k.
    """
    n = _family_n(a, "hat_extend input")
    d = a.region.d
    if not in_hat(H, a):
        raise ValueError("input shell is not 2-periodic (or not a homomorphism)")
    if k < 2 * d:
        raise ValueError("extension length too short: k = %d but k >= %d needed"
                         % (k, 2 * d))
    residues, layer_pool = _hypercube_homs(H, d)
    index = {r: i for i, r in enumerate(residues)}
    absent = missing_shell_residue(n, d)
    q0 = [None] * len(residues)
    for s in shell_F(n, d):
        q0[index[tuple(c % 2 for c in s)]] = a.value(s)
    q0[index[absent]] = a.value((n - 1,) * d)
    q0 = tuple(q0)

    flips = []
    for i, r in enumerate(residues):
        flips.append(tuple(index[tuple(c ^ (1 if s == t else 0)
                                       for s, c in enumerate(r))]
                           for t in range(d)))

    def cross_ok(lower, upper, skip=None):
        # Lattice edges between consecutive rings shift the residue by one
        # coordinate: every upper value must be adjacent to all its shifted
        # lower values (the absent class of the inner shell is exempt).
        for i in range(len(residues)):
            if skip is not None and i == skip:
                continue
            for j in flips[i]:
                if not H.has_edge(lower[i], upper[j]):
                    return False
        return True

    zero = index[(0,) * d]
    e1 = index[(1,) + (0,) * (d - 1)]
    preferred = (q0[zero], q0[e1]) if k % 2 == 0 else (q0[e1], q0[zero])
    candidates = []
    if H.has_edge(*preferred):
        candidates.append(preferred)
    for e in H.ordered_edges():
        if e not in candidates:
            candidates.append(e)

    skip0 = index[absent]
    par = [parity(r) for r in residues]

    for v0, v1 in candidates:
        goal = tuple(v0 if par[i] == 0 else v1 for i in range(len(residues)))

        def search(chain):
            depth = len(chain) - 1
            if depth == k - 1:
                return chain + [goal] if cross_ok(chain[-1], goal) else None
            skip = skip0 if depth == 0 else None
            for layer in layer_pool:
                if cross_ok(chain[-1], layer, skip=skip):
                    res = search(chain + [layer])
                    if res is not None:
                        return res
            return None

        chain = search([q0]) if k > 1 else ([q0, goal] if cross_ok(q0, goal, skip=skip0) else None)
        if chain is None:
            continue
        region = box_F(n + k, d)
        amap = a.mapping()
        values = bytearray(len(region))
        for pos, site in enumerate(region.sites):
            r = norm_inf(site)
            if r <= n:
                values[pos] = amap[site]
            else:
                values[pos] = chain[r - n][index[tuple(c % 2 for c in site)]]
        out = Pattern(region, bytes(values))
        return (v0, v1), out
    raise RuntimeError("no 2-periodic layer chain of length %d extends this "
                       "pattern to a checkerboard shell" % k)


# ---------------------------------------------------------------------------
# the marker overlap check


def overlap_refutation(maps, spacing, d):
    """Pairwise shifted-overlap check for a family of site->value maps.

    Verifies that for all members a, b and every nonzero offset t with
    sup-norm <= 2*spacing, a and the t-shift of b disagree somewhere on the
    overlap of their domains.  Returns None when every pair is refuted, else
    the first (a_index, b_index, t) whose overlap is consistent (an empty
    overlap counts as consistent).
    """
    offsets = [t for t in itertools.product(range(-2 * spacing, 2 * spacing + 1),
                                            repeat=d)
               if any(c != 0 for c in t)]
    for ai, amap in enumerate(maps):
        for bi, bmap in enumerate(maps):
            for t in offsets:
                consistent = True
                for site, bval in bmap.items():
                    shifted = add(site, t)
                    aval = amap.get(shifted)
                    if aval is not None and aval != bval:
                        consistent = False
                        break
                if consistent:
                    return ai, bi, t
    return None


def verify_marker_spacing(family, spacing_n):
    """Overlap-exclusion check for a pattern family on a common box.

    Returns None when no two members (including a member against its own
    shift) can agree on the overlap at any nonzero offset of sup-norm
    <= 2*spacing_n; otherwise the first consistent (a, b, offset) triple.
    A returned triple is inconclusive as a disproof: it only means this
    pairwise test cannot certify the spacing.
    """
    if len(family) == 0:
        return None
    d = family.region.d
    if d < 2:
        raise ValueError("the overlap-exclusion argument needs d >= 2")
    maps = [p.mapping() for p in family]
    hit = overlap_refutation(maps, spacing_n, d)
    if hit is None:
        return None
    ai, bi, t = hit
    return family[ai], family[bi], t


# ---------------------------------------------------------------------------
# flexible families and entropy per site


class FlexibleFamily:
    """A finite range of pattern families indexed by n, with a gap function."""

    def __init__(self, sets, gap, marker=False):
        self.sets = dict(sets)
        self.gap = gap
        self.marker = marker

    def gap_ratio_nonincreasing(self):
        """Check g(n)/n is nonincreasing over the stored range."""
        ns = sorted(self.sets)
        ratios = [self.gap(n) / n for n in ns if n > 0]
        return all(ratios[i + 1] <= ratios[i] + 1e-12 for i in range(len(ratios) - 1))


def finite_entropy_estimate(family, n):
    """log |C_n| / |F_n| in nats; -inf for an empty family."""
    if isinstance(family, FlexibleFamily):
        if n not in family.sets:
            raise ValueError("family has no patterns stored at n = %d" % n)
        ps = family.sets[n]
    else:
        ps = family
    if len(ps) == 0:
        return float("-inf")
    return math.log(len(ps)) / len(ps.region)


# ---------------------------------------------------------------------------
# serialization


def pattern_set_to_jsonl(ps, H, seed=None):
    """Line-delimited JSON: one header record, then one record per pattern."""
    header = {
        "alphabet": list(H.labels),
        "count": len(ps),
        "region": ps.region.kind_descriptor(),
    }
    if ps.meta:
        header["meta"] = {k: (list(v) if isinstance(v, tuple) else v)
                          for k, v in ps.meta.items()}
    if seed is not None:
        header["seed"] = seed
    lines = [json.dumps(header, sort_keys=True, separators=(",", ":"))]
    for p in ps:
        lines.append(json.dumps({"values": list(p.values)},
                                separators=(",", ":")))
    return "\n".join(lines) + "\n"


def region_from_descriptor(desc):
    kind = desc["kind"]
    if kind == "F":
        return box_F(desc["n"], desc["d"])
    if kind == "B":
        return box_B_from_desc(desc)
    if kind == "rect":
        return lattice.rectangle(tuple(desc["dims"]), tuple(desc["offset"]))
    return lattice.Region([tuple(s) for s in desc["sites"]])


def box_B_from_desc(desc):
    return lattice.box_B(desc["n"], desc["d"])


def pattern_set_from_jsonl(text):
    """Inverse of pattern_set_to_jsonl; returns (PatternSet, header dict)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty pattern file")
    header = json.loads(lines[0])
    region = region_from_descriptor(header["region"])
    patterns = [Pattern(region, bytes(json.loads(ln)["values"]))
                for ln in lines[1:]]
    ps = PatternSet(region, patterns)
    return ps, header
