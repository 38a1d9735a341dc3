"""Restricted wreath products G wr H with exact element calculus.

Elements are pairs (f, a) of a finite-support function f: H -> G and a
point a in H, multiplied by (f, a)(g, b) = (f_b g, ab) where f_b shifts the
support by b.  Carriers are abstract, so H may be the integers, a finite
group, or itself a wreath product; that nesting is exactly what the
non-Noetherian witness chain needs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .fingrp import FiniteGroup, SubgroupHandle, all_subgroups, cyclic, quotient


class IntegersCarrier:
    """The infinite cyclic group Z, elements plain ints."""

    identity = 0
    is_abelian = True
    is_finite = False
    name = "Z"

    def mul(self, a: int, b: int) -> int:
        return a + b

    def inv(self, a: int) -> int:
        return -a

    def key(self, a: int):
        return a

    def element_order(self, a: int) -> Optional[int]:
        return 1 if a == 0 else None


class FiniteCarrier:
    """Carrier view of a finite multiplication-table group."""

    is_finite = True

    def __init__(self, group: FiniteGroup, name: str = ""):
        self.group = group
        self.identity = 0
        self.name = name or f"F{group.order}"

    @property
    def is_abelian(self) -> bool:
        return self.group.is_abelian

    def mul(self, a: int, b: int) -> int:
        return self.group.mul(a, b)

    def inv(self, a: int) -> int:
        return self.group.inv(a)

    def key(self, a: int):
        return a

    def elements(self) -> range:
        return self.group.elements()

    def element_order(self, a: int) -> Optional[int]:
        return self.group.element_order(a)


@dataclass(frozen=True)
class WreathElement:
    """(f, a): sorted finite support holding non-identity values, plus a point."""

    support: Tuple[Tuple[object, object], ...]
    point: object

    def support_map(self) -> Dict[object, object]:
        return dict(self.support)


class WreathProduct:
    """G wr H as a group-ops carrier over WreathElement values."""

    is_finite = False  # finite only when both carriers are; see below
    is_abelian = False

    def __init__(self, g_carrier, h_carrier, name: str = ""):
        self.g = g_carrier
        self.h = h_carrier
        self.is_finite = bool(getattr(g_carrier, "is_finite", False) and getattr(h_carrier, "is_finite", False))
        self.name = name or f"{self.g.name} wr {self.h.name}"
        self.identity = WreathElement((), h_carrier.identity)

    def element(self, support: Dict[object, object], point: object) -> WreathElement:
        items = [(x, v) for x, v in support.items() if v != self.g.identity]
        items.sort(key=lambda it: self.h.key(it[0]))
        return WreathElement(tuple(items), point)

    def delta(self, x: object, value: object) -> WreathElement:
        """The function supported at the single point x, with trivial point."""
        return self.element({x: value}, self.h.identity)

    def embed_point(self, a: object) -> WreathElement:
        return self.element({}, a)

    def key(self, w: WreathElement):
        return (
            self.h.key(w.point),
            tuple((self.h.key(x), self.g.key(v)) for x, v in w.support),
        )

    def _shift(self, support: Tuple[Tuple[object, object], ...], b: object) -> Dict[object, object]:
        return {self.h.mul(x, b): v for x, v in support}

    def mul(self, w1: WreathElement, w2: WreathElement) -> WreathElement:
        shifted = self._shift(w1.support, w2.point)
        merged = dict(shifted)
        for x, v in w2.support:
            merged[x] = self.g.mul(merged[x], v) if x in merged else v
        return self.element(merged, self.h.mul(w1.point, w2.point))

    def inv(self, w: WreathElement) -> WreathElement:
        a_inv = self.h.inv(w.point)
        shifted = self._shift(w.support, a_inv)
        return self.element({x: self.g.inv(v) for x, v in shifted.items()}, a_inv)

    def conjugate(self, w: WreathElement, by: WreathElement) -> WreathElement:
        return self.mul(self.mul(self.inv(by), w), by)

    def commutator(self, w1: WreathElement, w2: WreathElement) -> WreathElement:
        return self.mul(self.mul(self.inv(w1), self.inv(w2)), self.mul(w1, w2))

    def power(self, w: WreathElement, n: int) -> WreathElement:
        """w^n; closed translate-sum form over an abelian value group,
        repeated multiplication otherwise."""
        if not getattr(self.g, "is_abelian", False):
            acc = self.identity
            base = w if n >= 0 else self.inv(w)
            for _ in range(abs(n)):
                acc = self.mul(acc, base)
            return acc
        if n == 0:
            return self.identity
        a = w.point
        acc: Dict[object, object] = {}

        def add_translate(exponent: int, negate: bool) -> None:
            shift = _carrier_power(self.h, a, exponent)
            for x, v in w.support:
                y = self.h.mul(x, shift)
                val = self.g.inv(v) if negate else v
                acc[y] = self.g.mul(acc[y], val) if y in acc else val

        if n > 0:
            for i in range(n):
                add_translate(i, negate=False)
        else:
            for i in range(-1, n - 1, -1):
                add_translate(i, negate=True)
        return self.element(acc, _carrier_power(self.h, a, n))

    def element_order(self, w: WreathElement) -> Optional[int]:
        if not self.is_finite and w != self.identity:
            point_order = self.h.element_order(w.point)
            if point_order is None:
                return None
        acc = w
        k = 1
        while acc != self.identity:
            acc = self.mul(acc, w)
            k += 1
            if k > 10 ** 7:
                raise RuntimeError("element order runaway")
        return k


def _carrier_power(carrier, a, n: int):
    if n < 0:
        a, n = carrier.inv(a), -n
    acc = carrier.identity
    base = a
    while n:
        if n & 1:
            acc = carrier.mul(acc, base)
        base = carrier.mul(base, base)
        n >>= 1
    return acc


def spread(wp: WreathProduct, value: object, points: Iterable[object]) -> WreathElement:
    """The product of the conjugates of `value` over the set of points:
    support exactly the set (for a non-identity value), trivial point."""
    return wp.element({x: value for x in points}, wp.h.identity)


# ---------------------------------------------------------------------------
# the nested carrier C2 wr (C2 wr Z) and its witness chain


def c2_wr_z() -> WreathProduct:
    return WreathProduct(FiniteCarrier(cyclic(2), "C2"), IntegersCarrier(), name="C2 wr Z")


def nested_c2() -> WreathProduct:
    return WreathProduct(FiniteCarrier(cyclic(2), "C2"), c2_wr_z(), name="C2 wr (C2 wr Z)")


def window_subgroup(inner: WreathProduct, n: int) -> List[WreathElement]:
    """All (f, 0) in C2 wr Z with supp(f) inside the window |j| <= n."""
    coords = list(range(-n, n + 1))
    out = []
    for bits in itertools.product((0, 1), repeat=len(coords)):
        out.append(inner.element({c: b for c, b in zip(coords, bits) if b}, 0))
    return out


def window_edge_generator(inner: WreathProduct, n: int) -> WreathElement:
    """delta at coordinate n+1: lies in the (n+1)-window but not the n-window."""
    return inner.delta(n + 1, 1)


@dataclass(frozen=True)
class NonNoetherianWitness:
    level: int
    witness: WreathElement
    failing_index: int


def non_noetherian_witnesses(max_level: int) -> List[NonNoetherianWitness]:
    """For each n <= max_level: the spread over the n-window subgroup,
    which commutes with the chain elements h_0..h_{n-1} but not with h_n."""
    outer = nested_c2()
    inner = outer.h
    out = []
    for n in range(max_level + 1):
        w = spread(outer, 1, window_subgroup(inner, n))
        for j in range(n):
            h = outer.embed_point(window_edge_generator(inner, j))
            if outer.commutator(w, h) != outer.identity:
                raise RuntimeError(f"witness at level {n} fails the satisfied equation {j}")
        h_fail = outer.embed_point(window_edge_generator(inner, n))
        if outer.commutator(w, h_fail) == outer.identity:
            raise RuntimeError(f"witness at level {n} unexpectedly commutes with h_{n}")
        out.append(NonNoetherianWitness(n, w, n))
    return out


# ---------------------------------------------------------------------------
# cyclic membership and separability certificates


@dataclass(frozen=True)
class CyclicMembership:
    """Outcome of a power search: `definite` distinguishes a complete
    decision from plain search exhaustion."""

    is_member: bool
    exponent: Optional[int]
    definite: bool
    bound: int


def cyclic_membership(
    wp: WreathProduct, base: WreathElement, target: WreathElement, bound: int = 64
) -> CyclicMembership:
    """Decide whether target = base^p for some integer p.

    Complete for carriers whose point arithmetic pins the exponent (H = Z)
    and for finite carriers (cycle detection); otherwise a bounded two-sided
    search that reports exhaustion distinctly.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    if isinstance(wp.h, IntegersCarrier):
        a, c = base.point, target.point
        if a != 0:
            if c % a != 0:
                return CyclicMembership(False, None, True, bound)
            p = c // a
            ok = wp.power(base, p) == target
            return CyclicMembership(ok, p if ok else None, True, bound)
        if c != 0:
            return CyclicMembership(False, None, True, bound)
        order = _finite_order_of_base_function(wp, base)
        if order is not None:
            for p in range(order):
                if wp.power(base, p) == target:
                    return CyclicMembership(True, p, True, bound)
            return CyclicMembership(False, None, True, bound)
    elif wp.is_finite:
        acc = wp.identity
        p = 0
        while True:
            if acc == target:
                return CyclicMembership(True, p, True, bound)
            acc = wp.mul(acc, base)
            p += 1
            if acc == wp.identity:
                return CyclicMembership(False, None, True, bound)
    # bounded two-sided sweep
    pos = neg = wp.identity
    for p in range(bound + 1):
        if pos == target:
            return CyclicMembership(True, p, True, bound)
        if p > 0 and neg == target:
            return CyclicMembership(True, -p, True, bound)
        pos = wp.mul(pos, base)
        neg = wp.mul(neg, wp.inv(base))
    return CyclicMembership(False, None, False, bound)


def _finite_order_of_base_function(wp: WreathProduct, w: WreathElement) -> Optional[int]:
    orders = []
    for _, v in w.support:
        o = wp.g.element_order(v)
        if o is None:
            return None
        orders.append(o)
    out = 1
    for o in orders:
        out = out * o // _gcd(out, o)
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


class CertificateSearchExhausted(RuntimeError):
    """No certificate found within the declared limits; not a claim of
    inseparability."""

    def __init__(self, max_modulus: int):
        self.max_modulus = max_modulus
        super().__init__(f"no separating finite quotient found with modulus <= {max_modulus}")


@dataclass(frozen=True)
class SeparabilityCertificate:
    """Finite quotient data (G/B) wr (H/N) separating target from <base>."""

    modulus: Optional[int]  # N for H = Z; None when H is already finite
    base_subgroup: Tuple[int, ...]  # B as element indices of G
    quotient_order_bound: int
    image_base: WreathElement
    image_target: WreathElement
    powers_enumerated: int


def _quotient_wreath(
    wp: WreathProduct, modulus: Optional[int], b_sub: SubgroupHandle
) -> Tuple[WreathProduct, callable]:
    """The quotient (G/B) wr (H/N) and the canonical projection map."""
    gq, gproj = quotient(wp.g.group, b_sub)
    gq_c = FiniteCarrier(gq, f"{wp.g.name}/B")
    if modulus is None:
        hq_c = wp.h
        point_map = lambda a: a
    else:
        hq_c = FiniteCarrier(cyclic(modulus), f"C{modulus}")
        point_map = lambda a: a % modulus
    target = WreathProduct(gq_c, hq_c)

    def project(w: WreathElement) -> WreathElement:
        acc: Dict[object, object] = {}
        collision = False
        for x, v in w.support:
            y = point_map(x)
            img = gproj(v)
            if y in acc:
                collision = True
                acc[y] = gq.mul(acc[y], img)
            else:
                acc[y] = img
        if collision and not gq.is_abelian:
            raise ValueError("fibre products need an abelian value quotient")
        return target.element(acc, point_map(w.point))

    return target, project


def separability_certificate(
    wp: WreathProduct,
    base: WreathElement,
    target: WreathElement,
    max_modulus: int = 64,
) -> SeparabilityCertificate:
    """Search (N, B) in increasing order for a finite quotient of G wr H in
    which the image of `target` avoids the cyclic subgroup generated by the
    image of `base`; first hit wins, so certificates are deterministic.

    Requires a pre-verified non-power pair, G finite abelian (or finite with
    injective point behaviour), and H = Z or H finite.
    """
    if not isinstance(wp.g, FiniteCarrier):
        raise ValueError("certificate search needs a finite value group")
    pre = cyclic_membership(wp, base, target, bound=max(8, max_modulus))
    if pre.is_member:
        raise ValueError(f"target is the {pre.exponent}-th power of base; no certificate sought")
    if not pre.definite:
        raise ValueError("membership search exhausted; cannot certify an undecided pair")

    subgroups = sorted(all_subgroups(wp.g.group), key=lambda s: (s.index, s.elements))
    subgroups = [s for s in subgroups if s.is_normal()]

    if isinstance(wp.h, IntegersCarrier):
        moduli: Sequence[Optional[int]] = range(1, max_modulus + 1)
    elif wp.is_finite:
        moduli = [None]
    else:
        raise ValueError("certificate search supports H = Z or finite H")

    for modulus in moduli:
        for b_sub in subgroups:
            quotient_wp, project = _quotient_wreath(wp, modulus, b_sub)
            img_f = project(base)
            img_h = project(target)
            absent, count = _power_enumeration_excludes(quotient_wp, img_f, img_h)
            if absent:
                bound = quotient_wp.g.group.order ** max(1, len(img_f.support) + 1)
                return SeparabilityCertificate(
                    modulus=modulus,
                    base_subgroup=b_sub.elements,
                    quotient_order_bound=bound,
                    image_base=img_f,
                    image_target=img_h,
                    powers_enumerated=count,
                )
    raise CertificateSearchExhausted(max_modulus)


def _power_enumeration_excludes(
    wp: WreathProduct, base: WreathElement, target: WreathElement
) -> Tuple[bool, int]:
    """Exhaustively enumerate <base> in a finite wreath product; returns
    (target not among the powers, number of distinct powers)."""
    acc = wp.identity
    count = 0
    while True:
        if acc == target:
            return False, count
        acc = wp.mul(acc, base)
        count += 1
        if acc == wp.identity:
            return target != wp.identity, count


def verify_certificate(
    wp: WreathProduct,
    base: WreathElement,
    target: WreathElement,
    cert: SeparabilityCertificate,
) -> int:
    """Independent verifier: rebuild the quotient from the certificate data
    and walk every power of the base image, collecting them into a set.

    Returns the cyclic subgroup order; raises when the certificate fails.
    """
    b_sub = SubgroupHandle(wp.g.group, cert.base_subgroup)
    quotient_wp, project = _quotient_wreath(wp, cert.modulus, b_sub)
    img_f = project(base)
    img_h = project(target)
    if img_f != cert.image_base or img_h != cert.image_target:
        raise ValueError("certificate images do not match a fresh projection")
    seen = set()
    acc = quotient_wp.identity
    while acc not in seen:
        seen.add(acc)
        acc = quotient_wp.mul(acc, img_f)
    if img_h in seen:
        raise ValueError("certificate fails: target image is a power of the base image")
    return len(seen)
