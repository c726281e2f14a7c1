"""Schur multipliers M(G) = H^2(G, C*) with representative cocycles.

Cocycles take values in Z/m, standing for roots of unity via
k |-> exp(2*pi*i*k/m).  Since |G| annihilates H^2(G, C*) and C* is
divisible, M(G) is the quotient of H^2(G, Z/n) (n = |G|, trivial action)
by the transgression classes coming from Hom(G, C*); the direct method
below computes exactly that with sparse elimination over Z/n.

A normalized cocycle is determined by its values f(s, -) on a generating
set S through f(s*g, h) = f(g, h) + f(s, g*h) - f(s, g), so the solve
runs in k*(n-1) coordinates instead of all n^2 table entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import (
    InternalInvariantViolation,
    NotACocycle,
    NotAbelian,
    NotCoprime,
    NotCyclic,
    SizeBound,
)
from .groups import (
    FiniteGroup,
    GroupHom,
    _greedy_generators,
    abelian_basis,
    abelian_invariants,
    close_action,
    direct_product,
    group_from_mul,
    make_cyclic,
    quotient,
    semidirect_product,
)
from .modlinalg import Lattice, lattice_from_rows, smith_mod, xgcd

DEFAULT_DIRECT_BOUND = 96


def check_cocycle_values(G: FiniteGroup, values, modulus: int) -> np.ndarray:
    """Validate an additive normalized 2-cocycle table; returns it as int64."""
    m = max(int(modulus), 1)
    v = np.asarray(values, dtype=np.int64) % m
    n = G.order
    if v.shape != (n, n):
        raise NotACocycle(f"cocycle table must be {n}x{n}, got {v.shape}")
    if v[0].any() or v[:, 0].any():
        raise NotACocycle("cocycle is not normalized")
    T = G.table
    step = max(1, (1 << 21) // max(n * n, 1))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        lhs = v[lo:hi, :, None] + v[T[lo:hi], :]
        rhs = v[None, :, :] + v[lo:hi][:, T]
        if ((lhs - rhs) % m).any():
            raise NotACocycle("cocycle identity fails")
    return v


@dataclass
class CocycleTable:
    """Normalized 2-cocycle with values in Z/modulus."""

    group: FiniteGroup
    modulus: int
    values: np.ndarray

    def __post_init__(self):
        self.modulus = max(int(self.modulus), 1)
        n = self.group.order
        if self.modulus == 1:
            self.values = np.zeros((n, n), dtype=np.int64)
        else:
            self.values = np.asarray(self.values, dtype=np.int64) % self.modulus

    def check(self) -> "CocycleTable":
        check_cocycle_values(self.group, self.values, self.modulus)
        return self

    def scaled_to(self, new_modulus: int) -> "CocycleTable":
        if new_modulus % self.modulus:
            raise NotACocycle(f"cannot embed Z/{self.modulus} values into Z/{new_modulus}")
        return CocycleTable(self.group, new_modulus,
                            self.values * (new_modulus // self.modulus))

    def times(self, k: int) -> "CocycleTable":
        return CocycleTable(self.group, self.modulus, (self.values * int(k)) % self.modulus)

    def plus(self, other: "CocycleTable") -> "CocycleTable":
        if other.group is not self.group:
            raise NotACocycle("cocycles live on different groups")
        m = int(np.lcm(self.modulus, other.modulus))
        return CocycleTable(self.group, m,
                            self.scaled_to(m).values + other.scaled_to(m).values)

    def complex_values(self) -> np.ndarray:
        return np.exp(2j * np.pi * self.values / self.modulus)

    def is_symmetric(self) -> bool:
        return bool(((self.values - self.values.T) % self.modulus == 0).all())

    def restrict(self, members: np.ndarray, sub: FiniteGroup) -> "CocycleTable":
        """Restriction to a subgroup given by its member indices (in order)."""
        vals = self.values[np.ix_(members, members)]
        return CocycleTable(sub, self.modulus, vals)


def trivial_cocycle(G: FiniteGroup, modulus: Optional[int] = None) -> CocycleTable:
    return CocycleTable(G, modulus or max(G.order, 1),
                        np.zeros((G.order, G.order), dtype=np.int64))


# ---------------------------------------------------------------------------
# Hom(G, Z/n) and transgressions
# ---------------------------------------------------------------------------

def character_value_tables(G: FiniteGroup, n: int) -> list:
    """Value tables a_i(g) in [0, n) of generators of Hom(G, Z/n)."""
    der = G.derived_subgroup()
    Q, proj = quotient(G, der)
    basis, factors, coord = abelian_basis(Q)
    out = []
    for i, d in enumerate(factors):
        a = (coord[proj.images, i] * (n // int(d))) % n
        out.append(a.astype(np.int64))
    return out


def transgression_table(G: FiniteGroup, a: np.ndarray, n: int) -> np.ndarray:
    """Connecting-map cocycle of the character with value table a (mod n)."""
    s = a[:, None] + a[None, :] - a[G.table]
    if (s % n).any():
        raise InternalInvariantViolation("character table is not a homomorphism mod n")
    return (s // n) % n


# ---------------------------------------------------------------------------
# cohomology group container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CohClass:
    """An element of M(G) in generator coordinates."""

    parent: "CohomologyGroup"
    coeffs: tuple

    @property
    def order(self) -> int:
        return self.parent.order_of(self.coeffs)

    def representative(self) -> CocycleTable:
        return self.parent.representative(self.coeffs)

    def minimized(self) -> CocycleTable:
        return self.parent.minimized(self.coeffs)

    @property
    def is_trivial(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __str__(self):
        return "[" + ",".join(str(c) for c in self.coeffs) + "]"


class CohomologyGroup:
    """M(G) presented by generator cocycles with invariant-factor orders."""

    def __init__(self, group: FiniteGroup, orders: Sequence[int],
                 generators: Sequence[CocycleTable], backend):
        self.group = group
        self.orders = tuple(int(d) for d in orders)
        self.generators = list(generators)
        self._backend = backend
        for a, b in zip(self.orders, self.orders[1:]):
            if b % a:
                raise InternalInvariantViolation(f"orders {self.orders} not a chain")
        n = group.order
        if self.orders and n % self.orders[-1]:
            raise InternalInvariantViolation("multiplier exponent must divide |G|")
        self._verify_generators()

    # -- public surface -----------------------------------------------------

    @property
    def invariants(self) -> tuple:
        return self.orders

    @property
    def size(self) -> int:
        out = 1
        for d in self.orders:
            out *= d
        return out

    def classes(self) -> Iterator[CohClass]:
        for coeffs in np.ndindex(*self.orders):
            yield CohClass(self, tuple(int(c) for c in coeffs))

    def trivial_class(self) -> CohClass:
        return CohClass(self, (0,) * len(self.orders))

    def class_of(self, cocycle: CocycleTable) -> CohClass:
        cocycle.check()
        return CohClass(self, self._backend.class_coords(cocycle))

    def representative(self, coeffs) -> CocycleTable:
        coeffs = self._norm(coeffs)
        n = max(self.group.order, 1)
        acc = trivial_cocycle(self.group, n)
        for c, g in zip(coeffs, self.generators):
            if c:
                acc = acc.plus(g.scaled_to(n).times(c))
        return acc

    def order_of(self, coeffs) -> int:
        coeffs = self._norm(coeffs)
        o = 1
        for c, d in zip(coeffs, self.orders):
            if c:
                o = int(np.lcm(o, d // np.gcd(d, c)))
        return o

    def minimized(self, coeffs) -> CocycleTable:
        coeffs = self._norm(coeffs)
        d = self.order_of(coeffs)
        if d == 1:
            return trivial_cocycle(self.group, 1)
        out = self._backend.minimized(coeffs, d)
        out.check()
        if out.modulus != d:
            raise InternalInvariantViolation("minimized modulus is not the class order")
        n = max(self.group.order, 1)
        if self.class_of(out.scaled_to(n)).coeffs != tuple(coeffs):
            raise InternalInvariantViolation("minimized cocycle left its class")
        return out

    def is_coboundary(self, cocycle: CocycleTable) -> bool:
        return self.class_of(cocycle).is_trivial

    def _norm(self, coeffs) -> tuple:
        if isinstance(coeffs, CohClass):
            coeffs = coeffs.coeffs
        return tuple(int(c) % d for c, d in zip(coeffs, self.orders))

    def _verify_generators(self) -> None:
        k = len(self.orders)
        for i, (d, g) in enumerate(zip(self.orders, self.generators)):
            g.check()
            unit = tuple(int(i == j) for j in range(k))
            if self.class_of(g).coeffs != unit:
                raise InternalInvariantViolation("generator does not reduce to a unit vector")
            if not self.class_of(g.times(d)).is_trivial:
                raise InternalInvariantViolation("generator order too large")
            for p in _prime_divisors(d):
                if self.class_of(g.times(d // p)).is_trivial:
                    raise InternalInvariantViolation("generator order too small")

    def __repr__(self):
        desc = " x ".join(f"C{d}" for d in self.orders) or "1"
        return f"<M({self.group.name}) = {desc}>"


def _prime_divisors(d: int) -> list:
    out = []
    p = 2
    while d > 1:
        if d % p == 0:
            out.append(p)
            while d % p == 0:
                d //= p
        p += 1 if p == 2 else 2
    return out


class _TrivialBackend:
    def class_coords(self, cocycle):
        return ()

    def minimized(self, coeffs, d):
        raise InternalInvariantViolation("trivial multiplier has no nontrivial class")


def _trivial_cohomology(G: FiniteGroup) -> CohomologyGroup:
    return CohomologyGroup(G, (), [], _TrivialBackend())


# ---------------------------------------------------------------------------
# the direct method
# ---------------------------------------------------------------------------

class _DirectBackend:
    def __init__(self, G, gens, E, Zlat, V2, s2, kept, BTlat, sB, VB, ViB):
        self.G = G
        self.n = G.order
        self.gens = gens
        self.E = E                    # (n, n, w) expansion tensor
        self.w = E.shape[2]
        self.Zlat: Lattice = Zlat
        self.V2, self.s2, self.kept = V2, s2, kept
        self.BTlat: Lattice = BTlat
        self.sB, self.VB, self.ViB = sB, VB, ViB

    def vcoords(self, cocycle: CocycleTable) -> np.ndarray:
        vals = cocycle.scaled_to(self.n).values
        parts = [vals[s, 1:] for s in self.gens]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def table_from_v(self, v: np.ndarray) -> np.ndarray:
        n = self.n
        flat = self.E.reshape(n * n, self.w) @ v.astype(np.int64)
        return (flat % n).reshape(n, n)

    def class_coords(self, cocycle: CocycleTable) -> tuple:
        x = self.Zlat.solve(self.vcoords(cocycle))
        if x is None:
            raise NotACocycle("table is outside the cocycle lattice")
        z = (x @ self.V2) % self.n
        return tuple(int(z[i] % self.s2[i]) for i in self.kept)

    def minimized(self, coeffs, d: int) -> CocycleTable:
        n = self.n
        m = n // d
        rep_v = np.zeros(self.w, dtype=np.int64)
        for c, i in zip(coeffs, self.kept):
            if c:
                rep_v = (rep_v + c * ((self._gen_v(i)) % n)) % n
        # coordinates of rep_v in Z^w / (coboundary + transgression lattice)
        z = (rep_v @ self.VB) % n
        wcoef = np.zeros(self.w, dtype=np.int64)
        for i in range(self.w):
            si = int(self.sB[i])
            zi = int(z[i] % si)
            if si == 1:
                continue
            g = int(np.gcd(m, si))
            if zi % g:
                raise InternalInvariantViolation("class cannot be realized at its order")
            mm, target, si_g = m // g, zi // g, si // g
            if si_g == 1:
                continue
            _, inv, _ = xgcd(mm % si_g, si_g)
            wcoef[i] = (target * (inv % si_g)) % si_g
        u = (m * (wcoef @ self.ViB)) % n
        table = self.table_from_v(u)
        if (table % m).any():
            raise InternalInvariantViolation("minimization failed to clear values")
        return CocycleTable(self.G, d, table // m)

    def _gen_v(self, kept_index: int) -> np.ndarray:
        return self._gen_vs[kept_index]


def schur_multiplier_direct(G: FiniteGroup,
                            bound: int = DEFAULT_DIRECT_BOUND) -> CohomologyGroup:
    """M(G) by sparse elimination over Z/|G| (no structural shortcuts)."""
    n = G.order
    if n == 1:
        return _trivial_cohomology(G)
    if n > bound:
        raise SizeBound(f"direct method bound {bound} exceeded by |G| = {n}")
    gens = _greedy_generators(G)
    k = len(gens)
    w = k * (n - 1)
    T = G.table

    # BFS spanning tree: every g != 1 is s * parent(g) with the parent placed first
    parent = np.full(n, -1, dtype=np.int64)
    letter = np.full(n, -1, dtype=np.int64)
    order_bfs = [0]
    placed = np.zeros(n, dtype=bool)
    placed[0] = True
    qi = 0
    while qi < len(order_bfs):
        gp = order_bfs[qi]
        qi += 1
        for si, s in enumerate(gens):
            g = int(T[s, gp])
            if not placed[g]:
                placed[g] = True
                parent[g] = gp
                letter[g] = si
                order_bfs.append(g)
    if not placed.all():
        raise InternalInvariantViolation("generators do not generate the group")

    # E[g, h] = coefficient vector of f(g, h) in the variables f(s, h), h != 1
    E = np.zeros((n, n, w), dtype=np.int64)
    cols = np.arange(1, n)
    for si, s in enumerate(gens):
        E[s, cols, si * (n - 1) + cols - 1] = 1
    for g in order_bfs[1:]:
        gp = int(parent[g])
        if gp == 0:
            continue
        s = gens[int(letter[g])]
        E[g] = (E[gp] + E[s][T[gp]] - E[s][gp][None, :]) % n

    # cocycle identity rows C(s, h, k); rows with h = 1 or k = 1 vanish
    lat = Lattice(w, n)
    for s in gens:
        rows = (E[s][:, None, :] + E[T[s]] - E - E[s][T]) % n
        lat.add_rows(rows.reshape(n * n, w))
    lat.normalize()
    sH, VH, _ = smith_mod(lat.basis, n)
    ker_rows = ((n // sH)[:, None] * VH.T) % n
    Zlat = lattice_from_rows(ker_rows, w, n)

    # coboundaries and transgressions in the same coordinates
    def eval_at_vars(table_vals):
        return np.concatenate([table_vals[s, 1:] for s in gens])

    bt_rows = []
    for u in range(1, n):
        ind = np.zeros(n, dtype=np.int64)
        ind[u] = 1
        bt_rows.append(eval_at_vars((ind[:, None] + ind[None, :] - ind[T]) % n))
    for a in character_value_tables(G, n):
        bt_rows.append(eval_at_vars(transgression_table(G, a, n)))
    BTlat = lattice_from_rows(np.array(bt_rows, dtype=np.int64), w, n)

    coords = [Zlat.solve(row) for row in BTlat.basis]
    if any(c is None for c in coords):
        raise InternalInvariantViolation("coboundary escaped the cocycle lattice")
    s2, V2, Vi2 = smith_mod(np.stack(coords), n)
    kept = [i for i in range(w) if s2[i] > 1]
    sB, VB, ViB = smith_mod(BTlat.basis, n)

    backend = _DirectBackend(G, gens, E, Zlat, V2, s2, kept, BTlat, sB, VB, ViB)
    backend._gen_vs = {}
    gen_tables = []
    for i in kept:
        v = (Vi2[i] @ Zlat.basis) % n
        backend._gen_vs[i] = v
        gen_tables.append(CocycleTable(G, n, backend.table_from_v(v)))
    orders = [int(s2[i]) for i in kept]
    return CohomologyGroup(G, orders, gen_tables, backend)


# ---------------------------------------------------------------------------
# abelian shortcut: M(A) = prod_{i<j} C_{n_i} via bilinear pairing cocycles
# ---------------------------------------------------------------------------

class _AbelianBackend:
    def __init__(self, G, basis, factors, coord, pairs):
        self.G = G
        self.n = G.order
        self.basis, self.factors, self.coord = basis, factors, coord
        self.pairs = pairs              # ordered (i, j) with i < j

    def pairing(self, cocycle: CocycleTable) -> np.ndarray:
        vals = cocycle.scaled_to(self.n).values
        k = len(self.basis)
        P = np.zeros((k, k), dtype=np.int64)
        for a in range(k):
            for b in range(k):
                x, y = self.basis[a], self.basis[b]
                P[a, b] = (vals[x, y] - vals[y, x]) % self.n
        return P

    def class_coords(self, cocycle: CocycleTable) -> tuple:
        P = self.pairing(cocycle)
        out = []
        for (i, j) in self.pairs:
            unit = self.n // int(self.factors[i])
            if P[i, j] % unit:
                raise InternalInvariantViolation("pairing value outside expected roots")
            out.append(int((P[i, j] // unit) % self.factors[i]))
        return tuple(out)

    def minimized(self, coeffs, d: int) -> CocycleTable:
        n0 = self.G.order
        vals = np.zeros((n0, n0), dtype=np.int64)
        for c, (i, j) in zip(coeffs, self.pairs):
            if c:
                scale = (int(c) * d // int(self.factors[i])) % d
                vals = (vals + scale * np.outer(self.coord[:, i], self.coord[:, j])) % d
        return CocycleTable(self.G, d, vals)


def abelian_multiplier(A: FiniteGroup) -> CohomologyGroup:
    """M(A) for abelian A, presented by the bilinear pairing cocycles."""
    if not A.is_abelian:
        raise NotAbelian("abelian_multiplier needs an abelian group")
    if A.order == 1:
        return _trivial_cohomology(A)
    basis, factors, coord = abelian_basis(A)
    k = len(basis)
    n = A.order
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    pairs.sort(key=lambda ij: (factors[ij[0]], ij))
    backend = _AbelianBackend(A, basis, factors, coord, pairs)
    gens, orders = [], []
    for (i, j) in pairs:
        scale = n // int(factors[i])
        vals = (scale * np.outer(coord[:, i], coord[:, j])) % n
        gens.append(CocycleTable(A, n, vals))
        orders.append(int(factors[i]))
    return CohomologyGroup(A, orders, gens, backend)


def abelian_pairing(A: FiniteGroup, cocycle: CocycleTable) -> np.ndarray:
    """Antisymmetrized commutator matrix on a fixed basis; a complete class
    invariant for abelian groups."""
    if not A.is_abelian:
        raise NotAbelian("abelian_pairing needs an abelian group")
    coh = abelian_multiplier(A)
    if isinstance(coh._backend, _AbelianBackend):
        return coh._backend.pairing(cocycle.check())
    return np.zeros((0, 0), dtype=np.int64)


def schur_multiplier(G: FiniteGroup, bound: int = DEFAULT_DIRECT_BOUND) -> CohomologyGroup:
    """M(G): abelian shortcut when available, else the direct method."""
    if G.order == 1:
        return _trivial_cohomology(G)
    if G.is_abelian:
        return abelian_multiplier(G)
    return schur_multiplier_direct(G, bound)


# ---------------------------------------------------------------------------
# dual groups, complements, traces
# ---------------------------------------------------------------------------

class DualGroup:
    """One-dimensional characters of N (through N^ab when N is not abelian).

    Characters are value arrays over Z/exponent, indexed by the row-major
    rank of their coordinate tuples; the optional T-action is the diagonal
    one, chi^t(n) = chi(n^{t^-1}).
    """

    def __init__(self, N: FiniteGroup, action: Optional[dict] = None):
        self.base = N
        der = N.derived_subgroup()
        if der.order == 1:
            self.ab, self.proj = N, GroupHom(N, N, np.arange(N.order), check=False)
        else:
            self.ab, self.proj = quotient(N, der)
        basis, factors, coord = abelian_basis(self.ab)
        self.factors = tuple(int(f) for f in factors)
        self.exponent = int(factors[-1]) if factors else 1
        self.size = self.ab.order
        k = len(self.factors)
        ranks = np.array(list(np.ndindex(*self.factors)), dtype=np.int64).reshape(self.size, k)
        scale = np.array([self.exponent // f for f in self.factors], dtype=np.int64)
        self.char_coords = ranks
        gh = coord[self.proj.images]                     # (|N|, k)
        self.values = ((ranks * scale) @ gh.T) % self.exponent   # (|N*|, |N|)
        self.action = None
        if action is not None:
            self.action = {int(t): self._permutation(np.asarray(a, dtype=np.int64))
                           for t, a in action.items()}

    def _permutation(self, aut: np.ndarray) -> np.ndarray:
        """Index permutation chi -> chi o phi_t (phi_t = conjugation by t)."""
        moved = self.values[:, aut]
        lookup = {tuple(v): i for i, v in enumerate(self.values)}
        return np.array([lookup[tuple(v)] for v in moved], dtype=np.int64)

    def as_group(self) -> FiniteGroup:
        if not self.factors:
            return make_cyclic(1)
        return reduce(direct_product, [make_cyclic(m) for m in self.factors])

    def orbits(self, perms: Sequence[np.ndarray]) -> list:
        seen = np.zeros(self.size, dtype=bool)
        out = []
        for i in range(self.size):
            if seen[i]:
                continue
            orb, stack = [i], [i]
            seen[i] = True
            while stack:
                x = stack.pop()
                for p in perms:
                    y = int(p[x])
                    if not seen[y]:
                        seen[y] = True
                        orb.append(y)
                        stack.append(y)
            out.append(sorted(orb))
        return out


def dual_group(N: FiniteGroup, action: Optional[dict] = None) -> DualGroup:
    return DualGroup(N, action)


def h1_complements(T: FiniteGroup, Nstar: DualGroup) -> int:
    """|H^1(T, N*)| as the number of conjugacy classes of complements of N*
    in N* x| T, enumerated on the honest table."""
    if Nstar.action is None:
        raise InternalInvariantViolation("dual group carries no T-action")
    NG = Nstar.as_group()
    gens = _greedy_generators(T)
    gen_action = {t: Nstar.action[t] for t in gens}
    W = semidirect_product(NG, T, gen_action)
    nt = T.order
    complements = set()
    shape = tuple([NG.order] * len(gens))
    for pick in np.ndindex(*shape):
        seeds = [int(f) * nt + int(t) for f, t in zip(pick, gens)]
        K = W.generated_subgroup(seeds)
        if K.order != nt:
            continue
        if any(int(x) % nt == 0 and int(x) != 0 for x in K.members):
            continue
        complements.add(tuple(int(x) for x in K.members))
    classes = 0
    done = set()
    for K in sorted(complements):
        if K in done:
            continue
        orbit = {tuple(sorted(W.conj(x, w) for x in K)) for w in range(W.order)}
        done |= orbit
        classes += 1
    return classes


def h2_cyclic_trace(T: FiniteGroup, Nstar: DualGroup):
    """Invariant factors of (N*)^T / Im(Tr) for cyclic T."""
    orders = T.element_orders()
    gens_t = [g for g in range(T.order) if orders[g] == T.order]
    if not gens_t:
        raise NotCyclic("trace formula needs a cyclic acting group")
    if Nstar.action is None:
        raise InternalInvariantViolation("dual group carries no T-action")
    perm = Nstar.action[gens_t[0]]
    size = Nstar.size
    coords = Nstar.char_coords
    factors = np.array(Nstar.factors, dtype=np.int64)
    rank = {tuple(c): i for i, c in enumerate(coords)}

    def add_idx(i, j):
        return rank[tuple((coords[i] + coords[j]) % factors)] if len(factors) else 0

    fixed = [i for i in range(size) if int(perm[i]) == i]
    traces = set()
    for i in range(size):
        acc, x = 0, i
        for _ in range(T.order):
            acc = add_idx(acc, x)
            x = int(perm[x])
        traces.add(acc)
    if not traces <= set(fixed):
        raise InternalInvariantViolation("trace image escaped the invariants")

    def cls_of(i):
        return min(add_idx(i, j) for j in traces)

    reps = sorted({cls_of(i) for i in fixed})
    e = cls_of(0)
    elements = [e] + [r for r in reps if r != e]
    Q = group_from_mul(elements, lambda a, b: cls_of(add_idx(a, b)), name="h2quot")
    return abelian_invariants(Q)


# ---------------------------------------------------------------------------
# corestriction (transfer) and the coprime semidirect multiplier
# ---------------------------------------------------------------------------

def corestriction_table(G: FiniteGroup, t_order: int, alpha_vals: np.ndarray,
                        modulus: int) -> np.ndarray:
    """Transfer of a cocycle on the normal part N (elements n*|T|) to G.

    Requires G to come from ``semidirect_product`` so that 0..|T|-1 is a
    transversal; the value at (g1, g2) sums alpha over the transversal.
    """
    n = G.order
    nt = int(t_order)
    T, inv = G.table, G.inverse
    tpart = np.arange(n) % nt
    rg = np.arange(n)
    out = np.zeros((n, n), dtype=np.int64)
    for t in range(nt):
        tg = T[t, rg]
        t_g = tpart[tg]
        n1 = T[tg, inv[t_g]]
        tg2 = T[t_g[:, None], rg[None, :]]
        t_g2 = tpart[tg2]
        n2 = T[tg2, inv[t_g2]]
        if (n1 % nt).any() or (n2 % nt).any():
            raise InternalInvariantViolation("transfer left the normal subgroup")
        out = (out + alpha_vals[(n1 // nt)[:, None], n2 // nt]) % modulus
    return out


def multiplier_action(T: FiniteGroup, MN: CohomologyGroup, acts: dict):
    """Coordinate action of each T-generator on M(N) plus the fixed classes.

    ``acts`` is the closed action dict (element of T -> automorphism array
    of N).  The action is (t . f)(x, y) = f(x^t, y^t); returns per-generator
    coordinate matrices and the list of fixed coordinate tuples.
    """
    N = MN.group
    gens_t = _greedy_generators(T)
    orders = np.array(MN.orders, dtype=np.int64)
    maps = {}
    for t in gens_t:
        aut = acts[T.inv(t)]          # x -> x^t = phi_{t^{-1}}(x)
        rows = []
        for g in MN.generators:
            moved = CocycleTable(N, g.modulus, g.values[np.ix_(aut, aut)])
            rows.append(np.array(MN.class_of(moved).coeffs, dtype=np.int64))
        maps[t] = np.stack(rows) if rows else np.zeros((0, 0), dtype=np.int64)
    fixed = []
    for cls in MN.classes():
        c = np.array(cls.coeffs, dtype=np.int64)
        ok = all(np.array_equal((c @ maps[t]) % orders, c) if len(orders) else True
                 for t in gens_t)
        if ok:
            fixed.append(tuple(int(x) for x in c))
    return maps, fixed


def _tuple_group_basis(elements, orders):
    """Basis, invariant factors, and coordinates of a subgroup of prod Z/d_i,
    computed on an honest little Cayley table."""
    orders = tuple(int(d) for d in orders)
    elems = sorted(set(tuple(int(x) for x in e) for e in elements))
    zero = tuple([0] * len(orders))
    if elems == [zero] or not orders:
        return [], [], {zero: ()}

    def add(a, b):
        return tuple((x + y) % d for x, y, d in zip(a, b, orders))

    ordered = [zero] + [e for e in elems if e != zero]
    G = group_from_mul(ordered, add, name="fixed-subgroup")
    basis_idx, factors, coord = abelian_basis(G)
    basis = [ordered[i] for i in basis_idx]
    lookup = {e: tuple(int(x) for x in coord[i]) for i, e in enumerate(ordered)}
    return basis, [int(f) for f in factors], lookup


class _SemidirectBackend:
    def __init__(self, G, nt, MN, MT, fixed_lookup, fixed_basis, fixed_orders, merged):
        self.G, self.nt = G, nt
        self.MN, self.MT = MN, MT
        self.fixed_lookup = fixed_lookup
        self.fixed_basis = fixed_basis
        self.fixed_orders = fixed_orders
        self.merged = merged            # ascending list of (fixed_i|None, mt_i|None, order)

    def restrict_to_N(self, cocycle: CocycleTable) -> CocycleTable:
        members = np.arange(self.G.order // self.nt) * self.nt
        return cocycle.restrict(members, self.MN.group)

    def restrict_to_T(self, cocycle: CocycleTable) -> CocycleTable:
        return cocycle.restrict(np.arange(self.nt), self.MT.group)

    def class_coords(self, cocycle: CocycleTable) -> tuple:
        zN = self.MN.class_of(self.restrict_to_N(cocycle)).coeffs
        zF = self.fixed_lookup.get(tuple(zN))
        if zF is None:
            raise InternalInvariantViolation("restriction is not T-invariant")
        zT = self.MT.class_of(self.restrict_to_T(cocycle)).coeffs
        out = []
        for (fi, ti, order) in self.merged:
            cf = zF[fi] if fi is not None else 0
            df = self.fixed_orders[fi] if fi is not None else 1
            ct = zT[ti] if ti is not None else 0
            dt = self.MT.orders[ti] if ti is not None else 1
            out.append(_crt(cf, df, ct, dt))
        return tuple(out)

    def minimized(self, coeffs, d: int) -> CocycleTable:
        G, nt = self.G, self.nt
        acc = trivial_cocycle(G, 1)
        for c, (fi, ti, order) in zip(coeffs, self.merged):
            if not c:
                continue
            df = self.fixed_orders[fi] if fi is not None else 1
            dt = self.MT.orders[ti] if ti is not None else 1
            if fi is not None and c % df:
                mn_orders = np.array(self.MN.orders, dtype=np.int64)
                base = tuple((c * np.array(self.fixed_basis[fi], dtype=np.int64)) % mn_orders)
                mn_min = self.MN.minimized(base)
                dN = mn_min.modulus
                u = pow(nt, -1, dN)
                vals = corestriction_table(G, nt, (mn_min.values * u) % dN, dN)
                acc = acc.plus(CocycleTable(G, dN, vals))
            if ti is not None and c % dt:
                unit = [0] * len(self.MT.orders)
                unit[ti] = c
                mt_min = self.MT.minimized(tuple(unit))
                dT = mt_min.modulus
                tpart = np.arange(G.order) % nt
                vals = mt_min.values[tpart[:, None], tpart[None, :]]
                acc = acc.plus(CocycleTable(G, dT, vals))
        if d % acc.modulus:
            raise InternalInvariantViolation("semidirect minimization modulus mismatch")
        return acc.scaled_to(d)


def _crt(a: int, m: int, b: int, n: int) -> int:
    if m == 1:
        return b % max(n, 1)
    if n == 1:
        return a % m
    g, x, _ = xgcd(m, n)
    if g != 1:
        raise InternalInvariantViolation("crt needs coprime moduli")
    return (a + m * ((x * (b - a)) % n)) % (m * n)


def semidirect_multiplier_coprime(N: FiniteGroup, T: FiniteGroup, gen_action: dict,
                                  G: Optional[FiniteGroup] = None,
                                  bound: int = DEFAULT_DIRECT_BOUND) -> CohomologyGroup:
    """M(N x| T) = M(N)^T x M(T) for gcd(|N|, |T|) = 1, with lifted cocycles.

    The invariant part lifts through the transfer map scaled by |T|^-1;
    M(T) lifts by inflation.
    """
    if np.gcd(N.order, T.order) != 1:
        raise NotCoprime("semidirect shortcut needs coprime orders")
    acts = close_action(N, T, gen_action)
    if G is None:
        G = semidirect_product(N, T, gen_action)
    n = G.order
    MN = schur_multiplier(N, bound)
    MT = schur_multiplier(T, bound)
    if MN.size > (1 << 20):
        raise SizeBound("M(N) too large to enumerate for the invariant part")
    maps, fixed = multiplier_action(T, MN, acts)
    fbasis, forders, flookup = _tuple_group_basis(fixed, MN.orders)

    fi_sorted = sorted(range(len(fbasis)), key=lambda i: -forders[i])
    ti_sorted = sorted(range(len(MT.orders)), key=lambda i: -MT.orders[i])
    merged = []
    for j in range(max(len(fi_sorted), len(ti_sorted))):
        fi = fi_sorted[j] if j < len(fi_sorted) else None
        ti = ti_sorted[j] if j < len(ti_sorted) else None
        order = (forders[fi] if fi is not None else 1) * \
                (MT.orders[ti] if ti is not None else 1)
        merged.append((fi, ti, order))
    merged.reverse()

    backend = _SemidirectBackend(G, T.order, MN, MT, flookup, fbasis, forders, merged)
    gens, orders = [], []
    for (fi, ti, order) in merged:
        acc = trivial_cocycle(G, n)
        if fi is not None:
            base = MN.representative(fbasis[fi])
            dN = N.order
            u = pow(T.order, -1, dN) if dN > 1 else 0
            vals = corestriction_table(G, T.order, (base.values * u) % dN, dN)
            acc = acc.plus(CocycleTable(G, dN, vals).check().scaled_to(n))
        if ti is not None:
            unit = [0] * len(MT.orders)
            unit[ti] = 1
            base = MT.representative(tuple(unit))
            tpart = np.arange(n) % T.order
            vals = base.values[tpart[:, None], tpart[None, :]]
            acc = acc.plus(CocycleTable(G, base.modulus, vals).check().scaled_to(n))
        gens.append(acc)
        orders.append(order)
    return CohomologyGroup(G, orders, gens, backend)
