"""Integer group rings over finite groups and the split-extension criterion.

For a split extension G = A x| P (A abelian, written additively as a right
P-module) and a positive word s, solving s = 1 in G decomposes into a
P-part condition and one linear condition over the group ring ZP.  The two
sides are computed along genuinely different routes, so their agreement on
every tuple is a real check of both.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .fingrp import FiniteGroup, SemidirectProduct
from .words import MixedWord, Word, evaluate, is_positive


@dataclass(frozen=True)
class GroupRingElement:
    """An element of ZP, stored sparsely; zero coefficients are never kept."""

    group: FiniteGroup
    coeffs: Tuple[Tuple[int, int], ...]  # sorted (element index, coefficient)

    @staticmethod
    def from_dict(group: FiniteGroup, data: Dict[int, int]) -> "GroupRingElement":
        items = tuple(sorted((g, c) for g, c in data.items() if c != 0))
        return GroupRingElement(group, items)

    @staticmethod
    def zero(group: FiniteGroup) -> "GroupRingElement":
        return GroupRingElement(group, ())

    @staticmethod
    def basis(group: FiniteGroup, g: int, c: int = 1) -> "GroupRingElement":
        return GroupRingElement.from_dict(group, {g: c})

    @staticmethod
    def one(group: FiniteGroup) -> "GroupRingElement":
        return GroupRingElement.basis(group, 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def as_dict(self) -> Dict[int, int]:
        return dict(self.coeffs)


def _check_same_group(u: GroupRingElement, v: GroupRingElement) -> None:
    if u.group is not v.group and u.group != v.group:
        raise ValueError("group ring elements live over different groups")


def ring_add(u: GroupRingElement, v: GroupRingElement) -> GroupRingElement:
    _check_same_group(u, v)
    acc = u.as_dict()
    for g, c in v.coeffs:
        acc[g] = acc.get(g, 0) + c
    return GroupRingElement.from_dict(u.group, acc)


def ring_scale(u: GroupRingElement, k: int) -> GroupRingElement:
    return GroupRingElement.from_dict(u.group, {g: k * c for g, c in u.coeffs})


def ring_multiply(u: GroupRingElement, v: GroupRingElement) -> GroupRingElement:
    """Convolution product in ZP."""
    _check_same_group(u, v)
    P = u.group
    acc: Dict[int, int] = {}
    for g, c in u.coeffs:
        for h, d in v.coeffs:
            gh = P.mul(g, h)
            acc[gh] = acc.get(gh, 0) + c * d
    return GroupRingElement.from_dict(P, acc)


@dataclass(frozen=True)
class ModuleElement:
    """An element of the abelian group A viewed as a right ZP-module point."""

    product: SemidirectProduct
    index: int  # element of A

    def acted_by(self, r: GroupRingElement) -> "ModuleElement":
        return ModuleElement(self.product, module_apply(self.product, self.index, r))


def module_apply(G: SemidirectProduct, a: int, r: GroupRingElement) -> int:
    """a . r = sum of c * (a acted by p) over the terms c*p of r, in A."""
    A = G.base
    acc = 0
    for p, c in r.coeffs:
        moved = G.action[p][a]
        acc = A.mul(acc, A.power(moved, c))
    return acc


def _positive_letters(s: Word) -> List[int]:
    """Expand a positive word into its letter-by-letter variable indices."""
    out: List[int] = []
    for v, e in s.letters:
        if e < 0:
            raise ValueError("word must be positive; route through positivize")
        out.extend([v] * e)
    return out


def s_j_coefficients(s: Word, p_tuple: Sequence[int], P: FiniteGroup) -> List[GroupRingElement]:
    """Suffix-product coefficients of a positive word at a tuple of P.

    For s = Y_1 ... Y_k, the j-th output is the sum of the suffix products
    p_i ... p_k over the positions i where Y_i = X_j.
    """
    if isinstance(s, MixedWord):
        s = s.to_word()
    letters = _positive_letters(s)
    if len(p_tuple) != s.n_vars:
        raise ValueError("arity mismatch")
    k = len(letters)
    suffix = [0] * (k + 1)  # suffix[k] = identity
    for i in range(k - 1, -1, -1):
        suffix[i] = P.mul(p_tuple[letters[i] - 1], suffix[i + 1])
    out: List[Dict[int, int]] = [dict() for _ in range(s.n_vars)]
    for i, v in enumerate(letters):
        d = out[v - 1]
        d[suffix[i]] = d.get(suffix[i], 0) + 1
    return [GroupRingElement.from_dict(P, d) for d in out]


def split_solution_check(
    s: Word, G: SemidirectProduct, tuple_: Sequence[int]
) -> Tuple[bool, bool]:
    """Compare direct evaluation of s = 1 with the decomposed criterion.

    Elements of G are split as (a_j, p_j); the decomposed side demands
    s(p_1,...,p_n) = 1 in P together with sum_j a_j . s_j(p_1,...,p_n) = 0
    in A.  A disagreement falsifies the implementation, not the input, and
    raises immediately.
    """
    if not is_positive(s):
        raise ValueError("word must be positive; route through positivize")
    if len(tuple_) != s.n_vars:
        raise ValueError("arity mismatch")
    direct = evaluate(s, tuple_, G) == 0

    A, P = G.base, G.acting
    parts = [G.split(g) for g in tuple_]
    p_tuple = [p for _, p in parts]
    p_ok = evaluate(s, p_tuple, P) == 0
    if not p_ok:
        decomposed = False
    else:
        sj = s_j_coefficients(s, p_tuple, P)
        total = 0
        for (a, _), coeff in zip(parts, sj):
            total = A.mul(total, module_apply(G, a, coeff))
        decomposed = total == 0
    if direct != decomposed:
        raise RuntimeError(
            f"split-extension criterion disagrees with direct evaluation at {tuple(tuple_)}"
        )
    return direct, decomposed
