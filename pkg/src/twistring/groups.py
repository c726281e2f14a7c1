"""Finite groups as Cayley tables over 0-based element indices.

Groups are immutable after construction; structural data (conjugacy
classes, center, derived subgroup) is computed once and cached.  The
identity always has index 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import (
    ActionNotHomomorphism,
    GroupConstructionError,
    InternalInvariantViolation,
    NotAbelian,
    NotNormal,
    Timeout,
)

ASSOC_EXHAUSTIVE_BOUND = 256


def _as_table(table) -> np.ndarray:
    t = np.asarray(table, dtype=np.int32)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise GroupConstructionError(f"multiplication table must be square, got {t.shape}")
    return t


class FiniteGroup:
    """A finite group given by its full multiplication table.

    ``table[g, h]`` is the index of g*h; index 0 is the identity.
    """

    def __init__(self, table, labels: Optional[Sequence[str]] = None,
                 name: Optional[str] = None, check: bool = True, rng_seed: int = 0):
        self.table = _as_table(table)
        self.order = int(self.table.shape[0])
        self.name = name or f"group{self.order}"
        self.labels = list(labels) if labels is not None else None
        if self.labels is not None and len(self.labels) != self.order:
            raise GroupConstructionError("labels length does not match order")
        self.inverse = self._compute_inverses()
        if check:
            self._check_axioms(rng_seed)
        self._cache: dict = {}

    # -- construction checks -------------------------------------------------

    def _compute_inverses(self) -> np.ndarray:
        n = self.order
        T = self.table
        if np.any(T < 0) or np.any(T >= n):
            raise GroupConstructionError("table entries out of range")
        inv = np.full(n, -1, dtype=np.int32)
        rows, cols = np.nonzero(T == 0)
        inv[rows] = cols
        if np.any(inv < 0):
            raise GroupConstructionError("some element has no inverse")
        return inv

    def _check_axioms(self, rng_seed: int) -> None:
        n = self.order
        T = self.table
        idx = np.arange(n)
        if not (np.array_equal(T[0], idx) and np.array_equal(T[:, 0], idx)):
            raise GroupConstructionError("identity law fails")
        if np.any(T[idx, self.inverse] != 0):
            raise GroupConstructionError("inverse law fails")
        # each row/column must be a permutation (Latin square)
        if np.any(np.sort(T, axis=1) != idx) or np.any(np.sort(T, axis=0) != idx[:, None]):
            raise GroupConstructionError("table rows/columns are not permutations")
        if n <= ASSOC_EXHAUSTIVE_BOUND:
            # slab over the first axis to bound peak memory
            step = max(1, (1 << 22) // max(n * n, 1))
            for lo in range(0, n, step):
                hi = min(n, lo + step)
                lhs = T[T[lo:hi], :]          # (g*h)*k
                rhs = T[lo:hi][:, T]          # g*(h*k)
                if not np.array_equal(lhs, rhs):
                    raise GroupConstructionError("associativity fails")
        else:
            rng = np.random.default_rng(rng_seed)
            m = n * n
            g = rng.integers(0, n, m)
            h = rng.integers(0, n, m)
            k = rng.integers(0, n, m)
            if not np.array_equal(T[T[g, h], k], T[g, T[h, k]]):
                raise GroupConstructionError("associativity fails on sampled triples")

    # -- basic arithmetic ----------------------------------------------------

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def inv(self, g: int) -> int:
        return int(self.inverse[g])

    def conj(self, g: int, t: int) -> int:
        """t g t^-1."""
        return int(self.table[self.table[t, g], self.inverse[t]])

    def power(self, g: int, k: int) -> int:
        k = int(k)
        if k < 0:
            return self.power(self.inv(g), -k)
        r, b = 0, g
        while k:
            if k & 1:
                r = self.mul(r, b)
            b = self.mul(b, b)
            k >>= 1
        return r

    def element_order(self, g: int) -> int:
        return int(self.element_orders()[g])

    def element_orders(self) -> np.ndarray:
        if "orders" not in self._cache:
            n = self.order
            orders = np.zeros(n, dtype=np.int64)
            cur = np.arange(n)
            k = 0
            while np.any(orders == 0):
                k += 1
                done = (cur == 0) & (orders == 0)
                orders[done] = k
                cur = self.table[cur, np.arange(n)]
                if k > n:
                    raise InternalInvariantViolation("order computation ran away")
            self._cache["orders"] = orders
        return self._cache["orders"]

    def exponent(self) -> int:
        e = 1
        for o in set(int(x) for x in self.element_orders()):
            e = _lcm(e, o)
        return e

    @property
    def is_abelian(self) -> bool:
        if "abelian" not in self._cache:
            self._cache["abelian"] = bool(np.array_equal(self.table, self.table.T))
        return self._cache["abelian"]

    def label(self, g: int) -> str:
        if self.labels is not None:
            return self.labels[g]
        return str(g)

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"<FiniteGroup {self.name} of order {self.order}>"

    # -- structure -----------------------------------------------------------

    def class_index(self) -> np.ndarray:
        """Array mapping each element to its conjugacy class id (by least member)."""
        if "class_index" not in self._cache:
            n = self.order
            T, inv = self.table, self.inverse
            conj = T[T, inv[:, None]]
            # conj[t, g] = t g t^{-1}; class of g = unique values of column g
            cls = np.full(n, -1, dtype=np.int64)
            reps = []
            for g in range(n):
                if cls[g] < 0:
                    orbit = np.unique(conj[:, g])
                    cls[orbit] = len(reps)
                    reps.append(orbit)
            self._cache["class_index"] = cls
            self._cache["classes"] = reps
        return self._cache["class_index"]

    def conjugacy_classes(self) -> list:
        self.class_index()
        return self._cache["classes"]

    def class_sizes(self) -> np.ndarray:
        return np.array([len(c) for c in self.conjugacy_classes()], dtype=np.int64)

    def center(self) -> "Subgroup":
        if "center" not in self._cache:
            members = np.nonzero(np.all(self.table == self.table.T, axis=1))[0]
            self._cache["center"] = Subgroup(self, members, check=False)
        return self._cache["center"]

    def centralizer(self, g: int) -> "Subgroup":
        members = np.nonzero(self.table[:, g] == self.table[g, :])[0]
        return Subgroup(self, members, check=False)

    def derived_subgroup(self) -> "Subgroup":
        if "derived" not in self._cache:
            n = self.order
            T, inv = self.table, self.inverse
            gh = T            # g*h
            hg = T.T          # h*g
            comms = T[inv[gh], hg].ravel()   # (gh)^-1 (hg) = [g,h]
            self._cache["derived"] = self.generated_subgroup(np.unique(comms))
        return self._cache["derived"]

    def generated_subgroup(self, gens: Iterable[int]) -> "Subgroup":
        mem = np.zeros(self.order, dtype=bool)
        mem[0] = True
        frontier = [0]
        gens = sorted(set(int(g) for g in gens))
        for g in gens:
            if not mem[g]:
                mem[g] = True
                frontier.append(g)
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if not mem[y]:
                        mem[y] = True
                        new.append(y)
            frontier = new
        return Subgroup(self, np.nonzero(mem)[0], check=False)

    def structure(self) -> "GroupStructure":
        classes = self.conjugacy_classes()
        reps = [int(c[0]) for c in classes]
        return GroupStructure(
            classes=classes,
            center=self.center(),
            derived=self.derived_subgroup(),
            centralizers={r: self.centralizer(r) for r in reps},
        )


@dataclass
class GroupStructure:
    classes: list
    center: "Subgroup"
    derived: "Subgroup"
    centralizers: dict


class Subgroup:
    """A subgroup of a parent group, stored as a sorted member index set."""

    def __init__(self, parent: FiniteGroup, members, check: bool = True):
        self.parent = parent
        self.members = np.unique(np.asarray(members, dtype=np.int32))
        if check:
            self._check()

    def _check(self) -> None:
        m = self.members
        if len(m) == 0 or m[0] != 0:
            raise GroupConstructionError("subgroup must contain the identity")
        sel = np.zeros(self.parent.order, dtype=bool)
        sel[m] = True
        prods = self.parent.table[np.ix_(m, m)]
        if not sel[prods].all() or not sel[self.parent.inverse[m]].all():
            raise GroupConstructionError("member set is not closed")

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, g: int) -> bool:
        i = np.searchsorted(self.members, g)
        return i < len(self.members) and self.members[i] == g

    def is_normal(self) -> bool:
        G = self.parent
        m = self.members
        sel = np.zeros(G.order, dtype=bool)
        sel[m] = True
        conj = G.table[G.table[:, m], G.inverse[:, None]]
        return bool(sel[conj].all())

    def is_central(self) -> bool:
        z = self.parent.center()
        return bool(np.isin(self.members, z.members).all())

    def as_group(self) -> tuple[FiniteGroup, np.ndarray]:
        """The subgroup as a standalone group plus the member index map."""
        m = self.members
        pos = {int(g): i for i, g in enumerate(m)}
        table = np.array([[pos[int(self.parent.table[a, b])] for b in m] for a in m])
        labels = [self.parent.label(int(g)) for g in m] if self.parent.labels else None
        return FiniteGroup(table, labels=labels, name=f"{self.parent.name}-sub{len(m)}",
                           check=False), m

    def __repr__(self) -> str:
        return f"<Subgroup of order {self.order} in {self.parent.name}>"


class GroupHom:
    """A homomorphism given by the image index of every source element."""

    def __init__(self, source: FiniteGroup, target: FiniteGroup, images,
                 check: bool = True):
        self.source = source
        self.target = target
        self.images = np.asarray(images, dtype=np.int32)
        if check:
            self._check()

    def _check(self) -> None:
        f = self.images
        if len(f) != self.source.order or f[0] != 0:
            raise GroupConstructionError("homomorphism must map identity to identity")
        lhs = f[self.source.table]
        rhs = self.target.table[f[:, None], f[None, :]]
        if not np.array_equal(lhs, rhs):
            raise GroupConstructionError("map is not a homomorphism")

    def __call__(self, g: int) -> int:
        return int(self.images[g])

    @property
    def is_isomorphism(self) -> bool:
        return (self.source.order == self.target.order
                and len(np.unique(self.images)) == self.source.order)

    def compose(self, other: "GroupHom") -> "GroupHom":
        """self after other."""
        return GroupHom(other.source, self.target, self.images[other.images], check=False)


@dataclass(frozen=True)
class AbelianInvariants:
    """Invariant factor chain d1 | d2 | ... | dk (each >= 2)."""

    factors: tuple

    def __post_init__(self):
        fs = self.factors
        for a, b in zip(fs, fs[1:]):
            if b % a:
                raise InternalInvariantViolation(f"not a divisibility chain: {fs}")
        if any(f < 2 for f in fs):
            raise InternalInvariantViolation(f"invariant factors must be >= 2: {fs}")

    @property
    def group_order(self) -> int:
        out = 1
        for f in self.factors:
            out *= f
        return out

    def __str__(self):
        if not self.factors:
            return "1"
        return " x ".join(f"C{d}" for d in self.factors)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _lcm(a: int, b: int) -> int:
    return a // _gcd(a, b) * b


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def trivial_group() -> FiniteGroup:
    return FiniteGroup(np.zeros((1, 1), dtype=np.int32), labels=["1"], name="C1")


def make_cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupConstructionError("order must be positive")
    idx = np.arange(n)
    table = (idx[:, None] + idx[None, :]) % n
    labels = ["1"] + [f"g^{k}" if k > 1 else "g" for k in range(1, n)]
    return FiniteGroup(table, labels=labels, name=f"C{n}", check=False)


def group_from_mul(elements: Sequence, mul: Callable, name: str = None,
                   labeler: Callable = None, check: bool = True) -> FiniteGroup:
    """Build a table group from abstract elements and a multiplication rule.

    ``elements[0]`` must be the identity.
    """
    pos = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    if len(pos) != n:
        raise GroupConstructionError("duplicate elements")
    table = np.empty((n, n), dtype=np.int32)
    for i, a in enumerate(elements):
        table[i] = [pos[mul(a, b)] for b in elements]
    labels = [labeler(e) if labeler else str(e) for e in elements]
    return FiniteGroup(table, labels=labels, name=name, check=check)


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    nh = H.order
    a = np.arange(G.order)[:, None, None, None]
    b = np.arange(nh)[None, :, None, None]
    c = np.arange(G.order)[None, None, :, None]
    d = np.arange(nh)[None, None, None, :]
    prod = G.table[a, c] * nh + H.table[b, d]
    table = prod.reshape(G.order * nh, G.order * nh)
    labels = None
    if G.labels is not None or H.labels is not None:
        labels = [f"({G.label(i)},{H.label(j)})" for i in range(G.order) for j in range(nh)]
    return FiniteGroup(table, labels=labels, name=f"{G.name}x{H.name}", check=False)


def close_action(N: FiniteGroup, T: FiniteGroup, gen_action: dict) -> dict:
    """Extend automorphisms given on generators of T to all of T.

    ``gen_action[t]`` is the image array of the automorphism attached to the
    generator with index t.  Raises ActionNotHomomorphism when the data does
    not define a homomorphism T -> Aut(N).
    """
    idn = np.arange(N.order, dtype=np.int32)
    acts = {0: idn}
    for t, a in gen_action.items():
        a = np.asarray(a, dtype=np.int32)
        if a[0] != 0 or len(np.unique(a)) != N.order:
            raise ActionNotHomomorphism(f"generator {t}: image map is not a bijection fixing 1")
        if not np.array_equal(a[N.table], N.table[a[:, None], a[None, :]]):
            raise ActionNotHomomorphism(f"generator {t}: image map is not an automorphism")
        acts[int(t)] = a
    frontier = list(acts)
    while frontier:
        new = []
        for x in frontier:
            for t, a in gen_action.items():
                y = T.mul(x, int(t))
                cand = acts[x][a]     # phi_x . phi_t
                if y in acts:
                    if not np.array_equal(acts[y], cand):
                        raise ActionNotHomomorphism("generator images are inconsistent on T")
                else:
                    acts[y] = cand
                    new.append(y)
        frontier = new
    if len(acts) != T.order:
        raise ActionNotHomomorphism("given generators do not generate the acting group")
    for x in range(T.order):
        for t in gen_action:
            if not np.array_equal(acts[T.mul(x, t)], acts[x][gen_action[t]]):
                raise ActionNotHomomorphism("action is not a homomorphism")
    return acts


def semidirect_product(N: FiniteGroup, T: FiniteGroup, gen_action: dict,
                       name: str = None) -> FiniteGroup:
    """N x| T where ``gen_action`` maps T-generator indices to automorphisms of N.

    Elements are pairs (n, t) encoded as n*|T| + t; multiplication is
    (n1,t1)(n2,t2) = (n1 * phi_{t1}(n2), t1 t2).  The copy of N is normal.
    """
    acts = close_action(N, T, gen_action)
    nt = T.order
    phi = np.stack([acts[t] for t in range(nt)])   # (|T|, |N|)
    n1 = np.arange(N.order)[:, None, None, None]
    t1 = np.arange(nt)[None, :, None, None]
    n2 = np.arange(N.order)[None, None, :, None]
    t2 = np.arange(nt)[None, None, None, :]
    table = (N.table[n1, phi[t1, n2]] * nt + T.table[t1, t2]).reshape(N.order * nt,
                                                                      N.order * nt)
    labels = None
    if N.labels is not None or T.labels is not None:
        labels = [f"({N.label(i)},{T.label(j)})" for i in range(N.order) for j in range(nt)]
    return FiniteGroup(table, labels=labels, name=name or f"{N.name}:{T.name}", check=False)


def central_extension(G: FiniteGroup, values: np.ndarray, modulus: int,
                      name: str = None) -> tuple[FiniteGroup, Subgroup]:
    """Extension of G by Z/d along an additive normalized 2-cocycle.

    Elements are pairs (a, g) encoded as a*|G| + g with multiplication
    (a,g)(b,h) = (a + b + values[g,h], gh).  Returns the group and the
    distinguished central subgroup {(a, 1)}.
    """
    from .cohomology import check_cocycle_values  # local import to avoid a cycle

    d = int(modulus)
    check_cocycle_values(G, values, d)
    n = G.order
    a = np.arange(d)[:, None, None, None]
    g = np.arange(n)[None, :, None, None]
    b = np.arange(d)[None, None, :, None]
    h = np.arange(n)[None, None, None, :]
    table = (((a + b + values[g, h]) % d) * n + G.table[g, h]).reshape(d * n, d * n)
    ext = FiniteGroup(table, name=name or f"{G.name}.ext{d}", check=False)
    centre = Subgroup(ext, np.arange(d) * n, check=False)
    if not centre.is_central():
        raise InternalInvariantViolation("distinguished subgroup is not central")
    return ext, centre


def quotient(G: FiniteGroup, N: Subgroup) -> tuple[FiniteGroup, GroupHom]:
    """G/N with the canonical projection; cosets are labeled by least member."""
    if N.parent is not G:
        raise NotNormal("subgroup does not belong to this group")
    if not N.is_normal():
        raise NotNormal("subgroup is not normal")
    n = G.order
    coset_min = np.full(n, -1, dtype=np.int64)
    for g in range(n):
        if coset_min[g] < 0:
            coset = G.table[g, N.members]
            coset_min[coset] = coset.min()
    reps = np.unique(coset_min)
    coset_id = np.searchsorted(reps, coset_min)
    table = coset_id[G.table[np.ix_(reps, reps)]]
    labels = [G.label(int(r)) + "N" for r in reps] if G.labels else None
    Q = FiniteGroup(table, labels=labels, name=f"{G.name}/N{N.order}", check=False)
    return Q, GroupHom(G, Q, coset_id, check=False)


# ---------------------------------------------------------------------------
# abelian invariants via a relation presentation and Smith normal form
# ---------------------------------------------------------------------------

def _greedy_generators(G: FiniteGroup):
    """Generators by descending element order (least index wins ties)."""
    orders = G.element_orders()
    by_order = sorted(range(G.order), key=lambda g: (-int(orders[g]), g))
    gens = []
    sub = G.generated_subgroup([])
    for g in by_order:
        if g not in sub:
            gens.append(g)
            sub = G.generated_subgroup(gens)
            if sub.order == G.order:
                break
    return gens


def abelian_invariants(A) -> AbelianInvariants:
    """Invariant factors of an abelian group or subgroup.

    Extracts a polycyclic relation matrix from the table and reduces it to
    Smith normal form.
    """
    from .modlinalg import smith_diagonal_int

    if isinstance(A, Subgroup):
        A, _ = A.as_group()
    if not A.is_abelian:
        raise NotAbelian("abelian_invariants needs an abelian group")
    if A.order == 1:
        return AbelianInvariants(())
    gens, coords, rel_rows = _abelian_presentation(A)
    diag = smith_diagonal_int(rel_rows)
    factors = sorted(int(d) for d in diag if d > 1)
    inv = AbelianInvariants(tuple(factors))
    if inv.group_order != A.order:
        raise InternalInvariantViolation("invariant factors do not multiply to the order")
    return inv


def _abelian_presentation(A: FiniteGroup):
    """Greedy generators, element coordinates, and the relation matrix rows."""
    orders = A.element_orders()
    by_order = sorted(range(A.order), key=lambda g: (-int(orders[g]), g))
    gens: list[int] = []
    coords: dict[int, tuple] = {0: ()}
    rel_rows: list[list[int]] = []
    for cand in by_order:
        if cand in coords:
            continue
        i = len(gens)
        gens.append(cand)
        for old in list(coords):
            coords[old] = coords[old] + (0,)
        # relative order: least r with cand^r in the previous subgroup
        r, x = 1, cand
        while x not in coords:
            x = A.mul(x, cand)
            r += 1
        rel = [-c for c in coords[x][:i]] + [r] + [0] * 0
        rel_rows.append(rel)
        # extend coordinates over the new cosets
        items = [(g, c) for g, c in coords.items() if c[i] == 0]
        for e in range(1, r):
            p = A.power(cand, e)
            for g, c in items:
                y = A.mul(g, p)
                if y not in coords:
                    coords[y] = c[:i] + (e,)
        if len(coords) == A.order:
            break
    k = len(gens)
    rows = [list(r) + [0] * (k - len(r)) for r in rel_rows]
    return gens, coords, rows


def abelian_basis(A: FiniteGroup):
    """A basis (independent generators) realizing the invariant factors.

    Returns (basis elements, factors, coordinate array of shape (|A|, k))
    with every element equal to the sum of basis multiples of its row.
    """
    invs = abelian_invariants(A).factors
    if not invs:
        return [], (), np.zeros((A.order, 0), dtype=np.int64)
    gens, coords, rows = _abelian_presentation(A)
    from .modlinalg import smith_with_transform_int

    diag, U, V = smith_with_transform_int(rows)
    # columns of V^-T give the new generating set; easier: new gens from V:
    # relations R * g = 0 with g the generator column vector; substituting
    # g = V h gives diagonal relations for h, i.e. h = V^{-1} g... we need
    # the new generators as combinations of the old: h_j = sum_i Vinv[j,i] g_i.
    Vinv = _int_inverse(V)
    k = len(gens)
    new_gens = []
    new_orders = [int(d) for d in diag]
    for j in range(k):
        x = 0
        for i in range(k):
            x = A.mul(x, A.power(gens[i], int(Vinv[j][i])))
        new_gens.append(x)
    keep = [j for j in range(k) if new_orders[j] > 1]
    basis = [new_gens[j] for j in keep]
    factors = tuple(sorted(new_orders[j] for j in keep))
    basis = [b for _, b in sorted(zip([new_orders[j] for j in keep], basis))]
    # recompute exact coordinates of every element by enumeration
    coord = np.zeros((A.order, len(basis)), dtype=np.int64)
    seen = {0: tuple([0] * len(basis))}
    frontier = [0]
    while frontier:
        new = []
        for g in frontier:
            c = seen[g]
            for i, b in enumerate(basis):
                y = A.mul(g, b)
                if y not in seen:
                    c2 = list(c)
                    c2[i] = (c2[i] + 1) % factors[i]
                    seen[y] = tuple(c2)
                    new.append(y)
        frontier = new
    if len(seen) != A.order:
        raise InternalInvariantViolation("basis does not generate the group")
    for g, c in seen.items():
        coord[g] = c
    return basis, factors, coord


def _int_inverse(V) -> list:
    """Exact inverse of a unimodular integer matrix (small sizes)."""
    from fractions import Fraction

    k = len(V)
    M = [[Fraction(V[i][j]) for j in range(k)] + [Fraction(int(i == j)) for j in range(k)]
         for i in range(k)]
    for col in range(k):
        piv = next(r for r in range(col, k) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [x / pv for x in M[col]]
        for r in range(k):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    out = [[M[i][k + j] for j in range(k)] for i in range(k)]
    for row in out:
        for x in row:
            if x.denominator != 1:
                raise InternalInvariantViolation("matrix is not unimodular")
    return [[int(x) for x in row] for row in out]


# ---------------------------------------------------------------------------
# isomorphism testing
# ---------------------------------------------------------------------------

def _invariant_fingerprint(G: FiniteGroup):
    orders = G.element_orders()
    pairs = sorted(zip(orders, G.class_index()))
    order_profile = tuple(sorted(int(o) for o in orders))
    class_profile = tuple(sorted((int(len(c)), int(orders[c[0]])) for c in G.conjugacy_classes()))
    der = G.derived_subgroup()
    derived_inv = None
    dg, _ = der.as_group()
    if dg.is_abelian:
        derived_inv = abelian_invariants(dg).factors
    zg, _ = G.center().as_group()
    return (G.order, order_profile, class_profile, G.center().order,
            der.order, derived_inv, abelian_invariants(zg).factors)


def is_isomorphic(G: FiniteGroup, H: FiniteGroup, node_budget: int = 10_000_000) -> bool:
    hom = find_isomorphism(G, H, node_budget)
    return hom is not None


def find_isomorphism(G: FiniteGroup, H: FiniteGroup,
                     node_budget: int = 10_000_000) -> Optional[GroupHom]:
    """Invariant screening, then backtracking over generator images."""
    if G.order != H.order:
        return None
    if G.is_abelian != H.is_abelian:
        return None
    if G.is_abelian:
        if abelian_invariants(G).factors != abelian_invariants(H).factors:
            return None
        return next(abelian_isomorphisms(G, H), None)
    if _invariant_fingerprint(G) != _invariant_fingerprint(H):
        return None

    gens = _greedy_generators(G)
    ordsG, ordsH = G.element_orders(), H.element_orders()
    clsG, clsH = G.class_index(), H.class_index()
    sizesG = G.class_sizes()[clsG]
    sizesH = H.class_sizes()[clsH]
    budget = [node_budget]

    def close(mapping, used, new_pairs):
        """Close a partial map under products; return added pairs or None."""
        added = []
        queue = list(new_pairs)
        known = [g for g in range(G.order) if mapping[g] >= 0]
        while queue:
            budget[0] -= 1
            if budget[0] < 0:
                raise Timeout("isomorphism search exceeded its node budget")
            g, h = queue.pop()
            for g2 in list(known):
                for (x, y) in ((G.mul(g, g2), H.mul(h, mapping[g2])),
                               (G.mul(g2, g), H.mul(mapping[g2], h))):
                    cur = mapping[x]
                    if cur >= 0:
                        if cur != y:
                            return None
                    else:
                        if used[y]:
                            return None
                        mapping[x] = y
                        used[y] = True
                        added.append((x, y))
                        queue.append((x, y))
                        known.append(x)
        return added

    mapping = np.full(G.order, -1, dtype=np.int64)
    used = np.zeros(H.order, dtype=bool)
    mapping[0] = 0
    used[0] = True

    def extend(i):
        if i == len(gens):
            return True
        g = gens[i]
        if mapping[g] >= 0:
            return extend(i + 1)
        for h in range(H.order):
            if used[h] or ordsH[h] != ordsG[g] or sizesH[h] != sizesG[g]:
                continue
            mapping[g] = h
            used[h] = True
            added = close(mapping, used, [(g, h)])
            if added is not None:
                if extend(i + 1):
                    return True
                added = added
            if added is None:
                added = []
            for (x, y) in added:
                mapping[x] = -1
                used[y] = False
            mapping[g] = -1
            used[h] = False
        return False

    if extend(0):
        if np.any(mapping < 0):
            raise InternalInvariantViolation("generators did not generate")
        return GroupHom(G, H, mapping)
    return None


def abelian_isomorphisms(A: FiniteGroup, B: FiniteGroup) -> Iterator[GroupHom]:
    """Yield every isomorphism between two abelian groups exactly once."""
    if not A.is_abelian or not B.is_abelian:
        raise NotAbelian("abelian_isomorphisms needs abelian groups")
    if A.order != B.order:
        return
    basisA, factorsA, coordA = abelian_basis(A)
    if abelian_invariants(B).factors != tuple(factorsA):
        return
    ordsB = B.element_orders()
    candidates = [
        [h for h in range(B.order) if ordsB[h] == d] for d in factorsA
    ]
    k = len(basisA)
    if k == 0:
        yield GroupHom(A, B, np.zeros(1, dtype=np.int64), check=False)
        return

    def build(images):
        im = np.zeros(A.order, dtype=np.int64)
        for g in range(A.order):
            x = 0
            for i in range(k):
                x = B.mul(x, B.power(images[i], int(coordA[g, i])))
            im[g] = x
        return im

    for choice in _product_lists(candidates):
        im = build(choice)
        if len(np.unique(im)) == A.order:
            yield GroupHom(A, B, im, check=False)


def _product_lists(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for rest in _product_lists(lists[1:]):
            yield (head,) + rest
