"""Linear algebra over Z and Z/n for finitely generated abelian quotients.

Subgroups of (Z/n)^w are handled as integer lattices L with n*Z^w <= L <=
Z^w, represented by an upper-triangular Hermite basis whose diagonal
entries divide n.  Because n*I always lies in the lattice, every
intermediate entry can be reduced mod n, so plain int64 arithmetic is
exact throughout.
"""

from __future__ import annotations

import numpy as np

from .errors import InternalInvariantViolation


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """g, x, y with x*a + y*b = g = gcd(a, b)."""
    old_r, r = int(a), int(b)
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def unit_scaling_to_gcd(a: int, n: int) -> tuple[int, int]:
    """A unit u mod n with u*a = gcd(a, n) mod n; returns (g, u)."""
    a %= n
    if a == 0:
        return n, 1
    g = np.gcd(a, n)
    b, m = a // g, n // g
    # gcd(b, m) = 1, so b is invertible mod m; lift to a unit mod n
    _, binv, _ = xgcd(b % m, m)
    u = binv % m if m > 1 else 1
    while np.gcd(u, n) != 1:
        u += m
    return int(g), int(u % n)


# ---------------------------------------------------------------------------
# Hermite basis of a lattice containing n*Z^w
# ---------------------------------------------------------------------------

class Lattice:
    """Lattice n*Z^w <= L <= Z^w via an upper-triangular basis matrix."""

    def __init__(self, w: int, n: int):
        self.w = int(w)
        self.n = int(n)
        self.basis = np.zeros((w, w), dtype=np.int64)
        np.fill_diagonal(self.basis, n)

    def copy(self) -> "Lattice":
        out = Lattice(self.w, self.n)
        out.basis = self.basis.copy()
        return out

    # -- insertion ----------------------------------------------------------

    def _insert_row(self, r: np.ndarray) -> None:
        B, n = self.basis, self.n
        r = r % n
        nz = np.nonzero(r)[0]
        while len(nz):
            j = int(nz[0])
            p = int(B[j, j])
            v = int(r[j])
            if v % p == 0:
                r = (r - (v // p) * B[j]) % n
            else:
                g, x, y = xgcd(p, v)
                newrow = (x * B[j] + y * r) % n
                r = ((p // g) * r - (v // g) * B[j]) % n
                B[j] = newrow
            nz = np.nonzero(r)[0]

    def add_rows(self, rows) -> None:
        n = self.n
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, self.w) % n
        while True:
            rows = rows[np.any(rows, axis=1)]
            if not len(rows):
                return
            # bulk-reduce against unit-pivot columns (float matmul is exact here)
            for _ in range(self.w):
                unit = np.nonzero(np.diagonal(self.basis) == 1)[0]
                if not len(unit):
                    break
                coef = rows[:, unit]
                if not coef.any():
                    break
                delta = coef.astype(np.float64) @ self.basis[unit].astype(np.float64)
                rows = (rows - np.rint(delta).astype(np.int64)) % n
            rows = rows[np.any(rows, axis=1)]
            if not len(rows):
                return
            self._insert_row(rows[0])
            rows = rows[1:]

    def normalize(self) -> None:
        """Reduce above-diagonal entries into [0, pivot).

        Reducing a row mod n may zero a stored diagonal equal to n; putting
        the n back only changes the row by n*e_i, which lies in the span of
        the later rows, so the lattice is unchanged.
        """
        B = self.basis
        for j in range(self.w):
            p = int(B[j, j])
            if p == 0:
                raise InternalInvariantViolation("lattice lost full rank")
            col = B[:j, j]
            q = col // p
            if q.any():
                B[:j] = (B[:j] - q[:, None] * B[j]) % self.n
                for i in range(j):
                    if B[i, i] == 0:
                        B[i, i] = self.n

    # -- queries --------------------------------------------------------------

    def solve(self, v) -> np.ndarray | None:
        """x (mod n) with x @ basis = v in L, or None when v is not in L."""
        B, n = self.basis, self.n
        r = np.asarray(v, dtype=np.int64) % n
        x = np.zeros(self.w, dtype=np.int64)
        for j in range(self.w):
            rj = int(r[j])
            if rj == 0:
                continue
            p = int(B[j, j])
            if rj % p:
                return None
            q = rj // p
            x[j] = q % n
            r = (r - q * B[j]) % n
        if r.any():
            raise InternalInvariantViolation("triangular solve left a residue")
        return x

    def contains(self, v) -> bool:
        return self.solve(v) is not None

    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.basis).copy()


def lattice_from_rows(rows, w: int, n: int) -> Lattice:
    lat = Lattice(w, n)
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, w)
    if len(rows):
        lat.add_rows(rows)
    lat.normalize()
    return lat


# ---------------------------------------------------------------------------
# Smith normal form mod n (for quotients of exponent dividing n)
# ---------------------------------------------------------------------------

def smith_mod(C, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Diagonalize the Z/n-module presented by the rows of C.

    Returns (s, V, Vinv) where s is the divisibility chain of invariant
    factors of Z^w / (rowspan(C) + n*Z^w), each dividing n, and V is the
    column transform: for x in Z^w the quotient coordinates are
    (x @ V)_i mod s_i, and the i-th quotient generator is Vinv[i].
    Row operations are discarded; n*I rows are implicit.
    """
    A = np.asarray(C, dtype=np.int64).copy() % n
    h, w = A.shape
    V = np.eye(w, dtype=np.int64)
    Vi = np.eye(w, dtype=np.int64)

    def colop_add(src: int, dst: int, c: int) -> None:
        # col_dst += c * col_src
        A[:, dst] = (A[:, dst] + c * A[:, src]) % n
        V[:, dst] = (V[:, dst] + c * V[:, src]) % n
        Vi[src] = (Vi[src] - c * Vi[dst]) % n

    def colswap(i: int, j: int) -> None:
        A[:, [i, j]] = A[:, [j, i]]
        V[:, [i, j]] = V[:, [j, i]]
        Vi[[i, j]] = Vi[[j, i]]

    s = np.full(w, 0, dtype=np.int64)
    t = 0
    while t < w:
        block = A[t:, t:] if t < h else np.zeros((0, w - t), dtype=np.int64)
        if block.size == 0 or not block.any():
            s[t:] = n
            break
        # pivot: entry with the smallest gcd with n
        g_all = np.gcd(block, n)
        g_all[block == 0] = n + 1
        i, j = np.unravel_index(np.argmin(g_all), block.shape)
        i, j = int(i) + t, int(j) + t
        if i != t:
            A[[t, i]] = A[[i, t]]
        if j != t:
            colswap(t, j)
        fuel = 10000
        while True:
            fuel -= 1
            if fuel < 0:
                raise InternalInvariantViolation("smith_mod failed to converge")
            g, u = unit_scaling_to_gcd(int(A[t, t]), n)
            A[t] = (A[t] * u) % n          # row scaling by a unit, untracked
            p = int(A[t, t])
            if p != g:
                raise InternalInvariantViolation("pivot normalization failed")
            # clear column t below the pivot with row ops
            col = A[t + 1:, t]
            bad = np.nonzero(col % p)[0]
            if len(bad):
                r = int(bad[0]) + t + 1
                gg, x, y = xgcd(p, int(A[r, t]))
                At = (x * A[t] + y * A[r]) % n
                A[r] = ((p // gg) * A[r] - (int(A[r, t]) // gg) * A[t]) % n
                A[t] = At
                continue
            if col.any():
                q = col // p
                A[t + 1:] = (A[t + 1:] - q[:, None] * A[t]) % n
            # clear row t right of the pivot with column ops
            row = A[t, t + 1:]
            bad = np.nonzero(row % p)[0]
            if len(bad):
                c = int(bad[0]) + t + 1
                gg, x, y = xgcd(p, int(A[t, c]))
                # build a column whose pivot entry is gg, then swap it in
                vc = int(A[t, c]) // gg
                pc = p // gg
                # col_t' = x*col_t + y*col_c ; col_c' = pc*col_c - vc*col_t
                oldAt, oldVt, oldVit = A[:, t].copy(), V[:, t].copy(), Vi[t].copy()
                A[:, t] = (x * A[:, t] + y * A[:, c]) % n
                V[:, t] = (x * V[:, t] + y * V[:, c]) % n
                A[:, c] = (pc * A[:, c] - vc * oldAt) % n
                V[:, c] = (pc * V[:, c] - vc * oldVt) % n
                # update Vinv for the 2x2 unimodular column transform
                # E = [[x, -vc], [y, pc]] acting on columns (t, c); E^-1 = [[pc, vc], [-y, x]]
                oldVic = Vi[c].copy()
                Vi[t] = (pc * oldVit + vc * oldVic) % n
                Vi[c] = (-y * oldVit + x * oldVic) % n
                continue
            if row.any():
                q = row // p
                for c, qc in zip(range(t + 1, w), q):
                    if qc:
                        colop_add(t, c, -int(qc))
            # pivot must divide the rest of the block
            if t + 1 < min(h, w):
                rest = A[t + 1:, t + 1:]
                bad = np.nonzero((np.gcd(rest, n) % p != 0) & (rest != 0))
                if len(bad[0]):
                    r = int(bad[0][0]) + t + 1
                    A[t] = (A[t] + A[r]) % n
                    continue
            break
        s[t] = np.gcd(int(A[t, t]), n)
        t += 1
    s[s == 0] = n
    # sanity: divisibility chain
    for a, b in zip(s, s[1:]):
        if b % a:
            raise InternalInvariantViolation(f"invariant factors out of order: {s}")
    return s, V % n, Vi % n


# ---------------------------------------------------------------------------
# integer Smith normal form (small exact matrices)
# ---------------------------------------------------------------------------

def smith_with_transform_int(rows) -> tuple[list, None, list]:
    """Diagonal of the Smith form of an integer matrix plus the column
    transform V (with A_final = U A V for some unimodular U that is not
    tracked).  Pure-Python exact arithmetic; intended for small matrices."""
    A = [[int(x) for x in row] for row in rows]
    m = len(A)
    k = len(A[0]) if m else 0
    V = [[int(i == j) for j in range(k)] for i in range(k)]

    def colswap(i, j):
        for r in range(m):
            A[r][i], A[r][j] = A[r][j], A[r][i]
        for r in range(k):
            V[r][i], V[r][j] = V[r][j], V[r][i]

    def coladd(src, dst, c):
        for r in range(m):
            A[r][dst] += c * A[r][src]
        for r in range(k):
            V[r][dst] += c * V[r][src]

    t = 0
    while t < min(m, k):
        # locate a pivot of least absolute value
        best = None
        for i in range(t, m):
            for j in range(t, k):
                if A[i][j] and (best is None or abs(A[i][j]) < best[0]):
                    best = (abs(A[i][j]), i, j)
        if best is None:
            break
        _, i, j = best
        A[t], A[i] = A[i], A[t]
        if j != t:
            colswap(t, j)
        again = False
        for r in range(t + 1, m):
            if A[r][t]:
                q = A[r][t] // A[t][t]
                A[r] = [a - q * b for a, b in zip(A[r], A[t])]
                if A[r][t]:
                    again = True
        for c in range(t + 1, k):
            if A[t][c]:
                q = A[t][c] // A[t][t]
                coladd(t, c, -q)
                if A[t][c]:
                    again = True
        if again:
            continue
        # pivot must divide the remaining block
        ok = True
        for r in range(t + 1, m):
            for c in range(t + 1, k):
                if A[r][c] % A[t][t]:
                    A[t] = [a + b for a, b in zip(A[t], A[r])]
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
        t += 1
    diag = [A[i][i] for i in range(min(m, k))]
    return diag, None, V


def smith_diagonal_int(rows) -> list:
    diag, _, _ = smith_with_transform_int(rows)
    return [abs(d) for d in diag]


def invariant_factors_from_cyclic(orders) -> tuple:
    """Invariant factor chain of a direct product of cyclic groups."""
    primary: dict[int, list[int]] = {}
    for d in orders:
        d = int(d)
        p = 2
        while d > 1:
            if d % p == 0:
                e = 0
                while d % p == 0:
                    d //= p
                    e += 1
                primary.setdefault(p, []).append(p ** e)
            p += 1 if p == 2 else 2
    for p in primary:
        primary[p].sort(reverse=True)
    depth = max((len(v) for v in primary.values()), default=0)
    factors = []
    for i in range(depth):
        f = 1
        for p, powers in primary.items():
            if i < len(powers):
                f *= powers[i]
        factors.append(f)
    return tuple(sorted(factors))
