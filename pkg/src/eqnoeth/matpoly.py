"""Exact matrix arithmetic over the integers and polynomial quotient rings.

Covers the unitriangular commutator chains and their witness table in the
truncated product of UT_{2^k}(Z), the translation of positive words into
entry polynomials, the 2-step nilpotent linear group over Z[X]/(X^(2^d)-1)
whose commutation pattern is decided by exact coefficient comparison, and
the BS(1,2) cyclic-subgroup membership table over exact rationals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .words import AnyWord, MixedWord, Word, evaluate, is_positive

# ---------------------------------------------------------------------------
# integer matrices


@dataclass(frozen=True)
class IntMatrix:
    """A square matrix of arbitrary-precision integers."""

    rows: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(tuple(int(x) for x in row) for row in self.rows))
        r = len(self.rows)
        if any(len(row) != r for row in self.rows):
            raise ValueError("matrix must be square")

    @property
    def r(self) -> int:
        return len(self.rows)

    @staticmethod
    def identity(r: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(1 if i == j else 0 for j in range(r)) for i in range(r)))

    @staticmethod
    def zero(r: int) -> "IntMatrix":
        return IntMatrix(tuple((0,) * r for _ in range(r)))

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.r != other.r:
            raise ValueError("dimension mismatch")
        r = self.r
        cols = list(zip(*other.rows))
        return IntMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in cols)
                for row in self.rows
            )
        )

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.r != other.r:
            raise ValueError("dimension mismatch")
        return IntMatrix(tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.rows, other.rows)))

    def is_identity(self) -> bool:
        return all(x == (1 if i == j else 0) for i, row in enumerate(self.rows) for j, x in enumerate(row))

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.rows for x in row)

    def is_unitriangular(self) -> bool:
        return all(
            (x == 1 if i == j else (x == 0 if i > j else True))
            for i, row in enumerate(self.rows)
            for j, x in enumerate(row)
        )

    def inverse_unitriangular(self) -> "IntMatrix":
        """Exact inverse by back-substitution; requires a unitriangular matrix."""
        if not self.is_unitriangular():
            raise ValueError("inverse implemented for unitriangular matrices only")
        r = self.r
        inv = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
        for j in range(r):
            for i in range(j - 1, -1, -1):
                s = -sum(self.rows[i][k] * inv[k][j] for k in range(i + 1, j + 1))
                inv[i][j] = s
        return IntMatrix(tuple(tuple(row) for row in inv))


class UnitriangularOps:
    """Group-ops view of UT_r(Z) for word evaluation."""

    def __init__(self, r: int):
        self.r = r
        self.identity = IntMatrix.identity(r)

    def mul(self, a: IntMatrix, b: IntMatrix) -> IntMatrix:
        return a * b

    def inv(self, a: IntMatrix) -> IntMatrix:
        return a.inverse_unitriangular()


def elementary(r: int, i: int, j: int) -> IntMatrix:
    """The matrix E(i,j) with a single 1 in row i, column j (1-based, i < j)."""
    if not 1 <= i < j <= r:
        raise ValueError(f"need 1 <= i < j <= r, got ({i},{j}) with r={r}")
    return IntMatrix(
        tuple(tuple(1 if (a == i - 1 and b == j - 1) else 0 for b in range(r)) for a in range(r))
    )


def e_product(r: int, ij: Tuple[int, int], kl: Tuple[int, int]) -> IntMatrix:
    """The actual product E(i,j) * E(k,l); equals E(i,l) when j == k, else 0."""
    return elementary(r, *ij) * elementary(r, *kl)


def build_B(r: int) -> IntMatrix:
    """I plus the full superdiagonal: the chain-shift element of UT_r(Z)."""
    m = IntMatrix.identity(r)
    for i in range(1, r):
        m = m + elementary(r, i, i + 1)
    return m


def matrix_commutator(m: IntMatrix, n: IntMatrix) -> IntMatrix:
    return m.inverse_unitriangular() * n.inverse_unitriangular() * m * n


def comm_chain(m: IntMatrix, b: IntMatrix, n: int) -> IntMatrix:
    """Iterated commutator [m, b, ..., b] with n copies of b; n = 0 gives m."""
    if m.r != b.r:
        raise ValueError("dimension mismatch")
    if not (m.is_unitriangular() and b.is_unitriangular()):
        raise ValueError("comm_chain expects unitriangular matrices")
    if n < 0:
        raise ValueError("n must be nonnegative")
    acc = m
    for _ in range(n):
        acc = matrix_commutator(acc, b)
    return acc


def g1_witness_table(max_rank_exp: int, max_index: int) -> List[List[bool]]:
    """Identity table for the chain words in the truncated product of
    UT_{2^k}(Z), ranks 2^1..2^max_rank_exp.

    Entry [n][m] is True when [A, B, ..., B (n+m copies), C] is the identity
    in every rank component, where A = I+E(1,2), B = I + superdiagonal and
    C = I+E(r-1,r).  Identity checks are complete for n+m+3 <= 2^max_rank_exp + 1;
    beyond that every present component is forced trivial by the chain
    collapse, which is why claims are restricted to the covered range.
    """
    if max_rank_exp < 1 or max_index < 0:
        raise ValueError("need max_rank_exp >= 1 and max_index >= 0")
    total_max = 2 * max_index
    is_id = [True] * (total_max + 1)
    for k in range(1, max_rank_exp + 1):
        r = 2 ** k
        a = IntMatrix.identity(r) + elementary(r, 1, 2)
        b = build_B(r)
        c = IntMatrix.identity(r) + elementary(r, r - 1, r)
        chain = a
        for total in range(total_max + 1):
            if total > 0:
                chain = matrix_commutator(chain, b)
            if not matrix_commutator(chain, c).is_identity():
                is_id[total] = False
    return [[is_id[n + m] for m in range(max_index + 1)] for n in range(max_index + 1)]


def g1_predicted_table(max_rank_exp: int, max_index: int) -> List[List[bool]]:
    """The power-of-two criterion restricted to the ranks present."""
    powers = {2 ** k for k in range(1, max_rank_exp + 1)}
    return [
        [(n + m + 3) not in powers for m in range(max_index + 1)]
        for n in range(max_index + 1)
    ]


def chain_word(n: int) -> Word:
    """The equation [X1, X2, ..., X2 (n copies), X3] over three variables."""
    from .words import simple_commutator

    parts = [Word(3, ((1, 1),))] + [Word(3, ((2, 1),))] * n + [Word(3, ((3, 1),))]
    return simple_commutator(parts)


# ---------------------------------------------------------------------------
# sparse multivariate polynomials over Z

VarId = Tuple[int, int, int]  # (matrix index m, row k, column l), all 1-based
Monomial = Tuple[Tuple[VarId, int], ...]


@dataclass(frozen=True)
class MultiPoly:
    """Sparse integer polynomial in matrix-entry variables."""

    terms: Tuple[Tuple[Monomial, int], ...]

    @staticmethod
    def _normalize(mapping: Dict[Monomial, int]) -> "MultiPoly":
        items = tuple(sorted((m, c) for m, c in mapping.items() if c != 0))
        return MultiPoly(items)

    @staticmethod
    def constant(c: int) -> "MultiPoly":
        return MultiPoly._normalize({(): int(c)})

    @staticmethod
    def variable(var: VarId) -> "MultiPoly":
        return MultiPoly._normalize({((var, 1),): 1})

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        acc = dict(self.terms)
        for m, c in other.terms:
            acc[m] = acc.get(m, 0) + c
        return MultiPoly._normalize(acc)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        acc: Dict[Monomial, int] = {}
        for m1, c1 in self.terms:
            e1 = dict(m1)
            for m2, c2 in other.terms:
                e = dict(e1)
                for v, k in m2:
                    e[v] = e.get(v, 0) + k
                mono = tuple(sorted(e.items()))
                acc[mono] = acc.get(mono, 0) + c1 * c2
        return MultiPoly._normalize(acc)

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, assignment: Dict[VarId, int]) -> int:
        total = 0
        for mono, c in self.terms:
            v = c
            for var, e in mono:
                v *= assignment[var] ** e
            total += v
        return total

    def pretty(self) -> str:
        """Graded-lex rendering with deterministic variable order."""
        if not self.terms:
            return "0"
        def key(item):
            mono, _ = item
            deg = sum(e for _, e in mono)
            return (-deg, mono)
        chunks = []
        for mono, c in sorted(self.terms, key=key):
            factors = "".join(
                f"x{m}[{k},{l}]" + (f"^{e}" if e != 1 else "")
                for (m, k, l), e in mono
            )
            if not factors:
                chunks.append(f"{c:+d}")
            elif c == 1:
                chunks.append(f"+{factors}")
            elif c == -1:
                chunks.append(f"-{factors}")
            else:
                chunks.append(f"{c:+d}*{factors}")
        text = " ".join(chunks)
        return text[1:] if text.startswith("+") else text


def _poly_matrix_identity(r: int) -> List[List[MultiPoly]]:
    return [[MultiPoly.constant(1 if i == j else 0) for j in range(r)] for i in range(r)]


def _poly_matrix_mul(a: List[List[MultiPoly]], b: List[List[MultiPoly]]) -> List[List[MultiPoly]]:
    r = len(a)
    out = []
    for i in range(r):
        row = []
        for j in range(r):
            acc = MultiPoly.constant(0)
            for k in range(r):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def word_to_polys(s: AnyWord, r: int) -> List[List[MultiPoly]]:
    """Entry polynomials of the word map on r x r matrices.

    Requires an inverse-free word (route general words through positivize
    first); the entry of the m-th matrix at (k, l) is the variable x{m}[k,l].
    """
    if isinstance(s, MixedWord):
        s = s.to_word()
    if not is_positive(s):
        raise ValueError("word_to_polys needs an inverse-free word; positivize first")
    acc = _poly_matrix_identity(r)
    var_mats: Dict[int, List[List[MultiPoly]]] = {}
    for v, e in s.letters:
        if v not in var_mats:
            var_mats[v] = [
                [MultiPoly.variable((v, k + 1, l + 1)) for l in range(r)] for k in range(r)
            ]
        for _ in range(e):
            acc = _poly_matrix_mul(acc, var_mats[v])
    return acc


def shat(s: AnyWord, r: int) -> List[List[MultiPoly]]:
    """word_to_polys minus the identity matrix (entrywise)."""
    mat = word_to_polys(s, r)
    return [
        [mat[i][j] - MultiPoly.constant(1 if i == j else 0) for j in range(r)]
        for i in range(r)
    ]


def matrix_entry_assignment(matrices: Sequence[IntMatrix]) -> Dict[VarId, int]:
    """Assignment sending x{m}[k,l] to the (k,l) entry of matrices[m-1]."""
    out: Dict[VarId, int] = {}
    for m, mat in enumerate(matrices, start=1):
        for k in range(mat.r):
            for l in range(mat.r):
                out[(m, k + 1, l + 1)] = mat.rows[k][l]
    return out


# ---------------------------------------------------------------------------
# the cyclic quotient ring Z[X]/(X^(2^d) - 1) and the depth-d commutation test


@dataclass(frozen=True)
class CyclicRingElement:
    """An element of Z[X]/(X^(2^d) - 1) as a dense coefficient vector."""

    depth: int
    coeffs: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != 2 ** self.depth:
            raise ValueError("coefficient vector must have length 2^depth")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @staticmethod
    def zero(depth: int) -> "CyclicRingElement":
        return CyclicRingElement(depth, (0,) * (2 ** depth))

    @staticmethod
    def one(depth: int) -> "CyclicRingElement":
        return CyclicRingElement.monomial(depth, 0)

    @staticmethod
    def monomial(depth: int, e: int, c: int = 1) -> "CyclicRingElement":
        n = 2 ** depth
        coeffs = [0] * n
        coeffs[e % n] = c
        return CyclicRingElement(depth, tuple(coeffs))

    def __add__(self, other: "CyclicRingElement") -> "CyclicRingElement":
        self._check(other)
        return CyclicRingElement(self.depth, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CyclicRingElement":
        return CyclicRingElement(self.depth, tuple(-a for a in self.coeffs))

    def __sub__(self, other: "CyclicRingElement") -> "CyclicRingElement":
        return self + (-other)

    def __mul__(self, other: "CyclicRingElement") -> "CyclicRingElement":
        self._check(other)
        n = len(self.coeffs)
        out = [0] * n
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[(i + j) % n] += a * b
        return CyclicRingElement(self.depth, tuple(out))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def _check(self, other: "CyclicRingElement") -> None:
        if self.depth != other.depth:
            raise ValueError("ring depth mismatch")


def ring_generator(depth: int, j: int) -> CyclicRingElement:
    """The image of the j-th tower generator: X^(2^(depth-j))."""
    if not 0 <= j <= depth:
        raise ValueError(f"generator index {j} out of range 0..{depth}")
    return CyclicRingElement.monomial(depth, 2 ** (depth - j))


def ring_b(depth: int, j: int) -> CyclicRingElement:
    """b_j = 1 + X_j + X_j^2 + ... + X_j^(2^j - 1) in the depth-d quotient."""
    if not 0 <= j <= depth:
        raise ValueError(f"index {j} out of range 0..{depth}")
    n = 2 ** depth
    step = 2 ** (depth - j)
    coeffs = [0] * n
    for l in range(2 ** j):
        coeffs[(l * step) % n] += 1
    return CyclicRingElement(depth, tuple(coeffs))


def _ring_mat_mul(x, y):
    # 3x3 matrices over the cyclic ring, as nested lists
    return [
        [
            x[i][0] * y[0][j] + x[i][1] * y[1][j] + x[i][2] * y[2][j]
            for j in range(3)
        ]
        for i in range(3)
    ]


def _ring_unitriangular(depth: int, a: CyclicRingElement, c: CyclicRingElement, b=None):
    one = CyclicRingElement.one(depth)
    zero = CyclicRingElement.zero(depth)
    if b is None:
        b = zero
    return [[one, a, b], [zero, one, c], [zero, zero, one]]


def _ring_inv_unitriangular(depth: int, m):
    a, b, c = m[0][1], m[0][2], m[1][2]
    return _ring_unitriangular(depth, -a, -c, a * c - b)


def nnsen_ring_condition(d: int, j: int, k: int) -> bool:
    """The exact coefficient comparison b_k == X_j * b_k at depth d."""
    b = ring_b(d, k)
    return (ring_generator(d, j) * b - b).is_zero()


def nnsen_commutator(d: int, j: int, k: int) -> bool:
    """True when [A_j, B_k] is the identity over Z[X]/(X^(2^d) - 1).

    A_j has superdiagonal (1, X_j) and B_k has superdiagonal (b_k, b_k);
    the pattern of commuting pairs over 0 <= j,k <= d is exactly j <= k.
    """
    if not (0 <= j <= d and 0 <= k <= d):
        raise ValueError("indices must lie in 0..d")
    one = CyclicRingElement.one(d)
    a_mat = _ring_unitriangular(d, one, ring_generator(d, j))
    b_val = ring_b(d, k)
    b_mat = _ring_unitriangular(d, b_val, b_val)
    comm = _ring_mat_mul(
        _ring_mat_mul(_ring_inv_unitriangular(d, a_mat), _ring_inv_unitriangular(d, b_mat)),
        _ring_mat_mul(a_mat, b_mat),
    )
    ident = _ring_unitriangular(d, CyclicRingElement.zero(d), CyclicRingElement.zero(d))
    return all((comm[i][jj] - ident[i][jj]).is_zero() for i in range(3) for jj in range(3))


def nnsen_table(d: int) -> List[List[bool]]:
    """Commutation table over (j, k) in 0..d; expected pattern is j <= k."""
    return [[nnsen_commutator(d, j, k) for k in range(d + 1)] for j in range(d + 1)]


# ---------------------------------------------------------------------------
# BS(1,2) inside GL_2(Q) and the conjugated-generator membership table


@dataclass(frozen=True)
class RationalMatrix:
    """An exact 2x2 rational matrix with nonzero determinant."""

    rows: Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]

    def __post_init__(self) -> None:
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        if self.det() == 0:
            raise ValueError("matrix must be invertible")

    def det(self) -> Fraction:
        return self.rows[0][0] * self.rows[1][1] - self.rows[0][1] * self.rows[1][0]

    def __mul__(self, other: "RationalMatrix") -> "RationalMatrix":
        a, b = self.rows, other.rows
        return RationalMatrix(
            (
                (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
                (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
            )
        )

    def inverse(self) -> "RationalMatrix":
        d = self.det()
        a, b = self.rows[0]
        c, e = self.rows[1]
        return RationalMatrix(((e / d, -b / d), (-c / d, a / d)))

    @staticmethod
    def identity() -> "RationalMatrix":
        return RationalMatrix(((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))))


class RationalMatrixOps:
    identity = RationalMatrix.identity()

    def mul(self, a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
        return a * b

    def inv(self, a: RationalMatrix) -> RationalMatrix:
        return a.inverse()


def bs12_generators() -> Tuple[RationalMatrix, RationalMatrix]:
    """(a, t) with a unipotent and t diagonal, so that t^-1 a t = a^2."""
    a = RationalMatrix(((Fraction(1), Fraction(1)), (Fraction(0), Fraction(1))))
    t = RationalMatrix(((Fraction(1, 2), Fraction(0)), (Fraction(0), Fraction(1))))
    return a, t


def bs12_in_L(m: RationalMatrix) -> bool:
    """Membership in <a>: identity diagonal, zero lower-left, integer shift.

    Specific to the chosen matrix realisation of the group.
    """
    return (
        m.rows[0][0] == 1
        and m.rows[1][1] == 1
        and m.rows[1][0] == 0
        and m.rows[0][1].denominator == 1
    )


def bs12_table(max_n: int, max_m: int) -> List[List[bool]]:
    """Entry [n][m]: whether X1^n X2 X1^-n evaluated at (t, a^(2^m)) lies in <a>."""
    a, t = bs12_generators()
    ops = RationalMatrixOps()
    out = []
    from .words import Word as _W

    for n in range(max_n + 1):
        word = _W(2, ((1, n), (2, 1), (1, -n))) if n else _W(2, ((2, 1),))
        row = []
        for m in range(max_m + 1):
            a_pow = a
            for _ in range(2 ** m - 1):
                a_pow = a_pow * a
            row.append(bs12_in_L(evaluate(word, (t, a_pow), ops)))
        out.append(row)
    return out
