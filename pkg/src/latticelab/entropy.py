"""Exact counting and entropy estimation for patterns on strips, boxes, tori.

Transfer operators over valid column states give exact integer counts for
two-dimensional boxes and tori and numerical per-site entropies for strips;
domino counts come from both a profile dynamic program (exact integers) and
the classical Kasteleyn double product (extended-precision floats, rounded
under an integrality guard).
"""

import itertools
import math

import numpy as np

from .lattice import box_F, rectangle
from .homshift import (Pattern, PatternSet, count_hom_dfs, hat_set,
                       marker_set)
from .util import BudgetCounter

MAX_TRANSFER_STATES = 200_000


def _column_states(H, width, periodic):
    """All vertical colorings of one column, as value tuples in lex order."""
    if width < 1:
        raise ValueError("width must be positive")
    states = []
    stack = [(v,) for v in range(H.n)]
    out = []
    for prefix in stack:
        _extend_column(H, prefix, width, out)
    if periodic and width > 1:
        out = [s for s in out if H.has_edge(s[-1], s[0])]
    elif periodic and width == 1:
        out = [s for s in out if H.has_edge(s[0], s[0])]
    return out


def _extend_column(H, prefix, width, out):
    if len(prefix) == width:
        out.append(prefix)
        return
    for v in H.adj[prefix[-1]]:
        _extend_column(H, prefix + (v,), width, out)


class TransferOperator:
    """Column-to-column transfer matrix of a width-w strip.

    States are the valid single-column colorings (a path for free vertical
    boundary, a cycle for periodic); the matrix entry is 1 when two columns
    may sit side by side.  All arithmetic on the integer matrix is exact.
    """

    def __init__(self, H, width, boundary="free"):
        if boundary not in ("free", "periodic"):
            raise ValueError("boundary must be 'free' or 'periodic'")
        self.H = H
        self.width = width
        self.boundary = boundary
        states = _column_states(H, width, boundary == "periodic")
        if not states:
            raise ValueError("no valid column states for width %d (%s)"
                             % (width, boundary))
        if len(states) > MAX_TRANSFER_STATES:
            raise ValueError("transfer state space too large: %d states"
                             % len(states))
        self.state_values = states
        column = rectangle((1, width))
        self.states = PatternSet(column, [Pattern(column, bytes(s))
                                          for s in states])
        adj = H.adj_sets
        self.matrix = [[1 if all(a[i] in adj[b[i]] for i in range(width)) else 0
                        for b in states] for a in states]

    def size(self):
        return len(self.state_values)

    def apply(self, vec):
        """Exact integer matrix-vector product."""
        return [sum(row[j] * vec[j] for j in range(len(vec)) if vec[j])
                for row in self.matrix]

    def count_strip(self, length):
        """Number of colorings of the width x length strip."""
        if length < 1:
            raise ValueError("length must be positive")
        vec = [1] * self.size()
        for _ in range(length - 1):
            vec = self.apply(vec)
        return sum(vec)

    def trace_power(self, length):
        """trace(T^length): colorings with periodic horizontal boundary."""
        if length < 1:
            raise ValueError("length must be positive")
        power = [row[:] for row in self.matrix]
        for _ in range(length - 1):
            power = [self.apply_t(row) for row in power]
        return sum(power[i][i] for i in range(self.size()))

    def apply_t(self, vec):
        # matrix is symmetric for undirected H, so row and column action agree
        return self.apply(vec)

    def float_matrix(self):
        return np.array(self.matrix, dtype=np.float64)


# ---------------------------------------------------------------------------
# box and torus counts


def count_hom_box(H, n, d, budget=None):
    """|Hom(F_n, H)|, exact.

    Transfer matrices along one axis for d <= 2; guarded depth-first
    search for d = 3.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    L = 2 * n + 1
    if d == 1:
        op = TransferOperator(H, 1, "free")
        return op.count_strip(L)
    if d == 2:
        op = TransferOperator(H, L, "free")
        return op.count_strip(L)
    if d == 3:
        return count_hom_dfs(H, box_F(n, 3), budget=budget)
    raise ValueError("box counting supports d in {1, 2, 3}")


def count_hom_torus(H, n, d=2):
    """|Hom(T_n, H)| for the Cayley graph of (Z/2nZ)^d, exact.

    The side-2 torus has doubled edges; each unordered neighbor pair is
    constrained once, which imposes the same requirement.
    """
    if n < 1:
        raise ValueError("torus needs n >= 1")
    side = 2 * n
    if d == 1:
        op = TransferOperator(H, 1, "free")
        power = [row[:] for row in op.matrix]
        for _ in range(side - 1):
            power = [op.apply(row) for row in power]
        return sum(power[i][i] for i in range(op.size()))
    if d == 2:
        op = TransferOperator(H, side, "periodic")
        return op.trace_power(side)
    raise ValueError("torus counting supports d in {1, 2}")


# ---------------------------------------------------------------------------
# dimer counts


def _even_runs(mask, m):
    """Every maximal run of set bits has even length (vertical dominoes fit)."""
    run = 0
    for r in range(m):
        if mask & (1 << r):
            run += 1
        else:
            if run % 2:
                return False
            run = 0
    return run % 2 == 0


def count_dimer_tilings_dp(m, n):
    """Exact domino tilings of the m x n rectangle, column by column.

    The state is the set of rows protruding horizontally into the next
    column; a column step is valid when incoming and outgoing protrusions
    are disjoint and the remaining rows split into vertical dominoes.
    Integer arithmetic throughout.
    """
    if m < 0 or n < 0:
        raise ValueError("sides must be nonnegative")
    if m == 0 or n == 0:
        return 1
    if (m * n) % 2 == 1:
        return 0
    if m > n:
        m, n = n, m
    if m > 16:
        raise ValueError("profile too wide: %d rows" % m)
    full = (1 << m) - 1
    compatible = []
    for s_in in range(1 << m):
        room = full & ~s_in
        outs = []
        s_out = room
        while True:  # all submasks of room, descending
            if _even_runs(room & ~s_out, m):
                outs.append(s_out)
            if s_out == 0:
                break
            s_out = (s_out - 1) & room
        compatible.append(outs)
    dp = {0: 1}
    for _col in range(n):
        nxt = {}
        for s_in, ways in dp.items():
            for s_out in compatible[s_in]:
                nxt[s_out] = nxt.get(s_out, 0) + ways
        dp = nxt
    return dp.get(0, 0)


def count_dimer_tilings_kasteleyn(m, n):
    """Domino tilings of the m x n rectangle by the Kasteleyn double product.

    Evaluated in extended precision and rounded; raises when the value is
    too far from an integer to round safely (large sides lose precision).
    An odd-area rectangle has no tilings: returns 0.
    """
    if m < 1 or n < 1:
        raise ValueError("sides must be positive")
    if (m * n) % 2 == 1:
        return 0
    pi = np.longdouble(np.pi)
    total = np.longdouble(1.0)
    for j in range(1, m // 2 + m % 2 + 1):
        a = 4 * np.cos(pi * j / (m + 1)) ** 2
        for k in range(1, n // 2 + n % 2 + 1):
            b = 4 * np.cos(pi * k / (n + 1)) ** 2
            total *= a + b
    value = float(total)
    nearest = round(value)
    tol = max(1e-6, abs(value) * 1e-14)
    if abs(value - nearest) > tol:
        raise ArithmeticError("product formula value %r too far from an "
                              "integer to round safely" % value)
    return int(nearest)


# ---------------------------------------------------------------------------
# strip entropy


def strip_entropy(H, width, boundary="free", tol=1e-12, max_iter=100_000):
    """Per-site entropy (nats) of the width-w strip: log(lambda_max)/width.

    Dominant eigenvalue by power iteration on the shifted operator T + I
    (the shift makes the iteration aperiodic; Perron-Frobenius gives
    convergence for the connected case).
    """
    op = TransferOperator(H, width, boundary)
    T = op.float_matrix()
    size = T.shape[0]
    vec = np.full(size, 1.0 / math.sqrt(size))
    lam = 0.0
    for _ in range(max_iter):
        nxt = T @ vec + vec  # (T + I) v
        norm = float(np.linalg.norm(nxt))
        if norm == 0.0:
            raise ArithmeticError("transfer operator annihilated the iterate")
        nxt /= norm
        new_lam = float(nxt @ (T @ nxt + nxt))
        if abs(new_lam - lam) <= tol * max(1.0, abs(new_lam)):
            lam = new_lam
            break
        lam = new_lam
        vec = nxt
    lam -= 1.0  # undo the shift
    if lam <= 0:
        raise ArithmeticError("dominant eigenvalue not positive")
    return math.log(lam) / width


# ---------------------------------------------------------------------------
# entropy ratio report


def canonical_marker_triple(H):
    """The least (v0, v1, v2) with v1 < v2 both adjacent to v0."""
    for v0 in range(H.n):
        others = [u for u in H.adj[v0] if u != v0]
        if len(others) >= 2:
            return v0, others[0], others[1]
    raise ValueError("graph has no vertex with two distinct neighbors")


class EntropyReport:
    """Per-n counts and exponents for the nested pattern families."""

    COLUMNS = ("n", "|F_n|", "count_box", "count_hat", "count_tilde",
               "count_torus", "h_box", "h_hat", "c_hat", "c_torus")

    def __init__(self, H, d, rows):
        self.H = H
        self.d = d
        self.rows = list(rows)

    def empirical_c(self):
        return max(row["c_hat"] for row in self.rows)

    def to_csv(self):
        lines = [",".join(self.COLUMNS)]
        for row in self.rows:
            cells = []
            for col in self.COLUMNS:
                v = row[col]
                cells.append("%.12g" % v if isinstance(v, float) else str(v))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def entropy_ratio_report(H, n_max, d=2, budget=None):
    """Counts of Hom(F_n, H), the periodic-shell and marker subfamilies and
    the torus, with per-site entropies and ratio exponents, for n <= n_max."""
    if d != 2:
        raise ValueError("the ratio report is implemented for d = 2")
    v0, v1, v2 = canonical_marker_triple(H)
    rows = []
    for n in range(1, n_max + 1):
        size = (2 * n + 1) ** d
        box = count_hom_box(H, n, d)
        hat = len(hat_set(H, n, d, budget=budget))
        tilde = len(marker_set(H, v0, v1, v2, n - 1, d, budget=budget))
        torus = count_hom_torus(H, n, d)
        row = {
            "n": n,
            "|F_n|": size,
            "count_box": box,
            "count_hat": hat,
            "count_tilde": tilde,
            "count_torus": torus,
            "h_box": math.log(box) / size,
            "h_hat": math.log(hat) / size if hat else float("-inf"),
            "c_hat": ((math.log(box) - math.log(hat)) / n ** (d - 1)
                      if hat else float("inf")),
            "c_torus": (math.log(box) - math.log(torus)) / n ** (d - 1),
        }
        rows.append(row)
    return EntropyReport(H, d, rows)
