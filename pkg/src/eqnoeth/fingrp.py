"""Finite groups as multiplication tables.

Elements are the indices 0..order-1, the identity is always index 0, and a
group is immutable once validated.  This is the brute-force universe for
the variety and graph-of-groups computations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np


class GroupTableError(ValueError):
    """Structured report of the first failed group axiom."""

    def __init__(self, axiom: str, witness: Optional[tuple] = None):
        self.axiom = axiom
        self.witness = witness
        msg = f"group table violates {axiom}"
        if witness is not None:
            msg += f" (witness {witness})"
        super().__init__(msg)


class FiniteGroup:
    """A validated multiplication table with identity at index 0."""

    def __init__(self, table: Sequence[Sequence[int]], names: Optional[Sequence[str]] = None,
                 _validated: bool = False):
        rows = [list(map(int, row)) for row in table]
        if not _validated:
            _check_table(rows)
        self.order = len(rows)
        self._rows = rows
        self.names = tuple(names) if names is not None else None
        if self.names is not None and len(self.names) != self.order:
            raise ValueError("names length does not match group order")
        self._inv = [0] * self.order
        for a in range(self.order):
            for b in range(self.order):
                if rows[a][b] == 0:
                    self._inv[a] = b
                    break
        self._abelian: Optional[bool] = None
        self._hash: Optional[int] = None

    # words.evaluate group-ops interface
    identity = 0

    def mul(self, a: int, b: int) -> int:
        return self._rows[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def elements(self) -> range:
        return range(self.order)

    def conjugate(self, a: int, g: int) -> int:
        """a^g = g^-1 a g."""
        return self._rows[self._rows[self._inv[g]][a]][g]

    def commutator(self, a: int, b: int) -> int:
        return self._rows[self._rows[self._inv[a]][self._inv[b]]][self._rows[a][b]]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self._inv[a], -k
        acc = 0
        for _ in range(k):
            acc = self._rows[acc][a]
        return acc

    def element_order(self, a: int) -> int:
        x, k = a, 1
        while x != 0:
            x = self._rows[x][a]
            k += 1
        return k

    @property
    def is_abelian(self) -> bool:
        if self._abelian is None:
            arr = np.asarray(self._rows)
            self._abelian = bool((arr == arr.T).all())
        return self._abelian

    def name_of(self, a: int) -> str:
        return self.names[a] if self.names is not None else str(a)

    def table_list(self) -> List[List[int]]:
        return [row[:] for row in self._rows]

    def to_json(self) -> dict:
        out: dict = {"order": self.order, "table": self.table_list()}
        if self.names is not None:
            out["names"] = list(self.names)
        return out

    @staticmethod
    def from_json(data: dict) -> "FiniteGroup":
        return validate(data["table"], names=data.get("names"))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FiniteGroup) and self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(map(tuple, self._rows)))
        return self._hash

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"


def _check_table(rows: List[List[int]]) -> None:
    n = len(rows)
    if n == 0:
        raise GroupTableError("nonempty table")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise GroupTableError("square table", (i, len(row), n))
        for x in row:
            if not 0 <= x < n:
                raise GroupTableError("entries in range", (i, x))
    arr = np.asarray(rows, dtype=np.int64)
    full = np.arange(n)
    for i in range(n):
        if sorted(arr[i, :].tolist()) != full.tolist():
            raise GroupTableError("Latin square (row)", (i,))
        if sorted(arr[:, i].tolist()) != full.tolist():
            raise GroupTableError("Latin square (column)", (i,))
    if not ((arr[0, :] == full).all() and (arr[:, 0] == full).all()):
        raise GroupTableError("identity at index 0")
    # (xy)z == x(yz), vectorised over all triples.
    left = arr[arr, :]
    right = arr[:, arr]
    if not (left == right).all():
        bad = np.argwhere(left != right)[0]
        raise GroupTableError("associativity", tuple(int(v) for v in bad))


def validate(table: Sequence[Sequence[int]], names: Optional[Sequence[str]] = None) -> FiniteGroup:
    """Validate a multiplication table; raises GroupTableError on the first
    failed axiom, with a witness."""
    rows = [list(map(int, row)) for row in table]
    _check_table(rows)
    return FiniteGroup(rows, names=names, _validated=True)


# ---------------------------------------------------------------------------
# subgroups, quotients, homomorphisms


@dataclass(frozen=True)
class SubgroupHandle:
    """A subgroup of a parent group, stored as a sorted index tuple."""

    parent: FiniteGroup
    elements: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(sorted(set(self.elements))))

    def __contains__(self, a: int) -> bool:
        return a in set(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def index(self) -> int:
        return self.parent.order // len(self.elements)

    def is_normal(self) -> bool:
        return self.normality_witness() is None

    def normality_witness(self) -> Optional[Tuple[int, int]]:
        """None when normal, else (g, x) with x in H but x^g outside."""
        G = self.parent
        inside = set(self.elements)
        for g in G.elements():
            for x in self.elements:
                if G.conjugate(x, g) not in inside:
                    return (g, x)
        return None


def subgroup_generated(G: FiniteGroup, gens: Sequence[int]) -> SubgroupHandle:
    """Smallest subgroup containing `gens`; fixed-point closure."""
    elems: Set[int] = {0}
    frontier = [0]
    gens = sorted(set(int(g) for g in gens))
    while frontier:
        x = frontier.pop()
        for g in gens:
            for y in (G.mul(x, g), G.mul(x, G.inv(g))):
                if y not in elems:
                    elems.add(y)
                    frontier.append(y)
    return SubgroupHandle(G, tuple(elems))


def normal_closure(G: FiniteGroup, gens: Sequence[int]) -> SubgroupHandle:
    """Smallest normal subgroup containing `gens`."""
    conj = {G.conjugate(x, g) for x in gens for g in G.elements()}
    return subgroup_generated(G, sorted(conj))


@dataclass(frozen=True)
class Homomorphism:
    """A group homomorphism given by its full image array."""

    source: FiniteGroup
    target: FiniteGroup
    images: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "images", tuple(int(x) for x in self.images))
        if len(self.images) != self.source.order:
            raise ValueError("image array length must equal the source order")
        for x in self.images:
            if not 0 <= x < self.target.order:
                raise ValueError("image out of range")
        src, tgt, img = self.source, self.target, self.images
        for x in src.elements():
            for y in src.elements():
                if img[src.mul(x, y)] != tgt.mul(img[x], img[y]):
                    raise ValueError(f"not a homomorphism at ({x}, {y})")

    def __call__(self, a: int) -> int:
        return self.images[a]

    def is_injective(self) -> bool:
        return len(set(self.images)) == self.source.order

    def kernel(self) -> SubgroupHandle:
        return SubgroupHandle(self.source, tuple(x for x in self.source.elements() if self.images[x] == 0))

    def image_set(self) -> Tuple[int, ...]:
        return tuple(sorted(set(self.images)))

    def preimage(self, subset: Sequence[int]) -> Tuple[int, ...]:
        want = set(subset)
        return tuple(x for x in self.source.elements() if self.images[x] in want)

    def compose(self, inner: "Homomorphism") -> "Homomorphism":
        """self o inner (inner applied first)."""
        if inner.target is not self.source and inner.target != self.source:
            raise ValueError("composition type mismatch")
        return Homomorphism(inner.source, self.target, tuple(self.images[inner.images[x]] for x in inner.source.elements()))


def identity_hom(G: FiniteGroup) -> Homomorphism:
    return Homomorphism(G, G, tuple(G.elements()))


def quotient(G: FiniteGroup, N: SubgroupHandle) -> Tuple[FiniteGroup, Homomorphism]:
    """Quotient by a normal subgroup; returns (G/N, canonical projection)."""
    if N.parent is not G and N.parent != G:
        raise ValueError("subgroup does not live in the given group")
    witness = N.normality_witness()
    if witness is not None:
        raise ValueError(f"subgroup is not normal: conjugation witness {witness}")
    coset_of: Dict[int, int] = {}
    reps: List[int] = []
    for x in G.elements():
        if x in coset_of:
            continue
        members = sorted(G.mul(x, n) for n in N)
        rep = members[0]
        if rep in coset_of:
            idx = coset_of[rep]
        else:
            idx = len(reps)
            reps.append(rep)
        for m in members:
            coset_of[m] = idx
    # identity's coset contains 0, whose rep is 0, discovered first: index 0.
    k = len(reps)
    table = [[coset_of[G.mul(reps[i], reps[j])] for j in range(k)] for i in range(k)]
    names = None
    if G.names is not None:
        names = [f"[{G.names[reps[i]]}]" for i in range(k)]
    Q = FiniteGroup(table, names=names, _validated=True)
    proj = Homomorphism(G, Q, tuple(coset_of[x] for x in G.elements()))
    return Q, proj


@dataclass(frozen=True)
class LowerCentralSeries:
    """Descending series gamma_1 >= gamma_2 >= ... until stabilisation."""

    terms: Tuple[SubgroupHandle, ...]
    nilpotency_class: Optional[int]


def lower_central_series(G: FiniteGroup) -> LowerCentralSeries:
    """gamma_1 = G, gamma_{i+1} = <[gamma_i, G]>, computed to stabilisation.

    nilpotency_class is r when the terminal term is trivial (gamma_{r+1} = 1)
    and None when the series stabilises above the trivial subgroup.
    """
    current = SubgroupHandle(G, tuple(G.elements()))
    terms = [current]
    while True:
        comms = {G.commutator(a, b) for a in current for b in G.elements()}
        nxt = subgroup_generated(G, sorted(comms))
        if nxt.elements == current.elements:
            break
        terms.append(nxt)
        current = nxt
    if terms[-1].elements == (0,):
        ncls: Optional[int] = len(terms) - 1
    else:
        ncls = None
    return LowerCentralSeries(tuple(terms), ncls)


def all_subgroups(G: FiniteGroup) -> List[SubgroupHandle]:
    """Every subgroup, by closure search; intended for small orders."""
    seen: Dict[Tuple[int, ...], SubgroupHandle] = {}
    trivial = subgroup_generated(G, ())
    frontier = [trivial]
    seen[trivial.elements] = trivial
    while frontier:
        H = frontier.pop()
        for g in G.elements():
            if g in H:
                continue
            bigger = subgroup_generated(G, tuple(H.elements) + (g,))
            if bigger.elements not in seen:
                seen[bigger.elements] = bigger
                frontier.append(bigger)
    return sorted(seen.values(), key=lambda h: (len(h.elements), h.elements))


def normal_subgroups(G: FiniteGroup) -> List[SubgroupHandle]:
    return [H for H in all_subgroups(G) if H.is_normal()]


# ---------------------------------------------------------------------------
# products and extensions


class DirectProduct(FiniteGroup):
    """G x H with element indices packed as a*|H| + b."""

    def __init__(self, G: FiniteGroup, H: FiniteGroup):
        self.left, self.right = G, H
        nh = H.order
        names = None
        if G.names is not None and H.names is not None:
            names = [f"({G.names[a]},{H.names[b]})" for a in G.elements() for b in H.elements()]
        table = [
            [
                G.mul(a1, a2) * nh + H.mul(b1, b2)
                for a2 in G.elements()
                for b2 in H.elements()
            ]
            for a1 in G.elements()
            for b1 in H.elements()
        ]
        super().__init__(table, names=names, _validated=True)

    def pair(self, a: int, b: int) -> int:
        return a * self.right.order + b

    def split(self, x: int) -> Tuple[int, int]:
        return divmod(x, self.right.order)

    def embed_left(self, a: int) -> int:
        return self.pair(a, 0)

    def embed_right(self, b: int) -> int:
        return self.pair(0, b)


def direct_product(G: FiniteGroup, H: FiniteGroup) -> DirectProduct:
    return DirectProduct(G, H)


class SemidirectProduct(FiniteGroup):
    """A semidirect extension of an abelian group A by P, elements (a, p).

    `action[p]` is the automorphism a -> a^p of A (P acting on the right),
    so multiplication reads (a, p)(a', p') = (a + (a')^(p^-1), p p').
    """

    def __init__(self, A: FiniteGroup, P: FiniteGroup, action: Sequence[Sequence[int]]):
        if not A.is_abelian:
            raise ValueError("base group of the extension must be abelian")
        acts = [list(map(int, row)) for row in action]
        if len(acts) != P.order:
            raise ValueError("need one automorphism per element of P")
        for p, perm in enumerate(acts):
            if sorted(perm) != list(range(A.order)):
                raise ValueError(f"action[{p}] is not a permutation of A")
            for x in A.elements():
                for y in A.elements():
                    if perm[A.mul(x, y)] != A.mul(perm[x], perm[y]):
                        raise ValueError(f"action[{p}] is not an automorphism of A (at {x},{y})")
        if acts[0] != list(A.elements()):
            raise ValueError("action of the identity must be trivial")
        for p in P.elements():
            for q in P.elements():
                pq = P.mul(p, q)
                for x in A.elements():
                    if acts[pq][x] != acts[q][acts[p][x]]:
                        raise ValueError(f"action is not a right P-action (at p={p}, q={q})")
        self.base, self.acting = A, P
        self.action = [tuple(row) for row in acts]
        np_ = P.order
        table = []
        for a1 in A.elements():
            for p1 in P.elements():
                row = []
                back = acts[P.inv(p1)]
                for a2 in A.elements():
                    for p2 in P.elements():
                        row.append(A.mul(a1, back[a2]) * np_ + P.mul(p1, p2))
                table.append(row)
        names = None
        if A.names is not None and P.names is not None:
            names = [f"({A.names[a]},{P.names[p]})" for a in A.elements() for p in P.elements()]
        super().__init__(table, names=names, _validated=True)

    def pair(self, a: int, p: int) -> int:
        return a * self.acting.order + p

    def split(self, x: int) -> Tuple[int, int]:
        return divmod(x, self.acting.order)

    def embed_base(self, a: int) -> int:
        return self.pair(a, 0)

    def embed_acting(self, p: int) -> int:
        return self.pair(0, p)


def semidirect_product(A: FiniteGroup, P: FiniteGroup, action: Sequence[Sequence[int]]) -> SemidirectProduct:
    return SemidirectProduct(A, P, action)


# ---------------------------------------------------------------------------
# standard small groups


def trivial() -> FiniteGroup:
    return FiniteGroup([[0]], names=["e"], _validated=True)


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup(table, names=[str(i) for i in range(n)], _validated=True)


def klein_four() -> FiniteGroup:
    return direct_product(cyclic(2), cyclic(2))


def _perm_group(perms: List[Tuple[int, ...]]) -> FiniteGroup:
    perms = sorted(perms)
    index = {p: i for i, p in enumerate(perms)}
    n = len(perms[0])
    table = []
    for p in perms:
        row = []
        for q in perms:
            # apply p first, then q
            row.append(index[tuple(q[p[i]] for i in range(n))])
        table.append(row)
    names = ["".join(map(str, p)) for p in perms]
    return FiniteGroup(table, names=names, _validated=True)


def symmetric(n: int) -> FiniteGroup:
    """S_n as a table (identity permutation sorts first, so index 0)."""
    if not 1 <= n <= 5:
        raise ValueError("symmetric(n) is intended for small n")
    return _perm_group(list(itertools.permutations(range(n))))


def alternating(n: int) -> FiniteGroup:
    if not 1 <= n <= 5:
        raise ValueError("alternating(n) is intended for small n")
    perms = []
    for p in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        if inversions % 2 == 0:
            perms.append(p)
    return _perm_group(perms)


def dihedral(n: int) -> FiniteGroup:
    """D_n of order 2n: maps x -> (-1)^s x + r on Z_n, index = s*n + r."""
    if n < 1:
        raise ValueError("dihedral(n) needs n >= 1")

    def mul(f: Tuple[int, int], g: Tuple[int, int]) -> Tuple[int, int]:
        rf, sf = f
        rg, sg = g
        return ((rg + (rf if sg == 0 else -rf)) % n, sf ^ sg)

    elems = [(r, s) for s in (0, 1) for r in range(n)]
    index = {e: i for i, e in enumerate(elems)}
    table = [[index[mul(f, g)] for g in elems] for f in elems]
    names = [("r%d" % r if s == 0 else "sr%d" % r) for r, s in elems]
    return FiniteGroup(table, names=names, _validated=True)
