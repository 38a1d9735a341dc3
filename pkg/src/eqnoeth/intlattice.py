"""Exact integer lattice membership via Hermite-style row elimination.

Used to express an exponent vector as an integer combination of basis
vectors.  Everything is plain Python ints, so there is no overflow.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) = a*x + b*y and g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _echelonize(vectors: Sequence[Sequence[int]]) -> Tuple[List[List[int]], List[List[int]], List[Tuple[int, int]]]:
    """Row-reduce `vectors` over Z with unimodular row operations.

    Returns (H, U, pivots) with H = U * M (M the stacked input rows), H in
    echelon form, and pivots a list of (row, column) positions.
    """
    m = len(vectors)
    n = len(vectors[0]) if m else 0
    H = [list(map(int, v)) for v in vectors]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    pivots: List[Tuple[int, int]] = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        nonzero = [i for i in range(r, m) if H[i][c] != 0]
        if not nonzero:
            continue
        i0 = nonzero[0]
        H[r], H[i0] = H[i0], H[r]
        U[r], U[i0] = U[i0], U[r]
        for i in range(r + 1, m):
            if H[i][c] == 0:
                continue
            a, b = H[r][c], H[i][c]
            g, x, y = _xgcd(a, b)
            u, v = a // g, b // g
            # 2x2 unimodular transform sending (a, b) to (g, 0).
            row_r = [x * p + y * q for p, q in zip(H[r], H[i])]
            row_i = [-v * p + u * q for p, q in zip(H[r], H[i])]
            H[r], H[i] = row_r, row_i
            urow_r = [x * p + y * q for p, q in zip(U[r], U[i])]
            urow_i = [-v * p + u * q for p, q in zip(U[r], U[i])]
            U[r], U[i] = urow_r, urow_i
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        pivots.append((r, c))
        r += 1
    return H, U, pivots


def integer_combination(
    vectors: Sequence[Sequence[int]], target: Sequence[int]
) -> Optional[List[int]]:
    """Solve sum_i alpha_i * vectors[i] = target over the integers.

    Returns the coefficient list alpha, or None when the target is not in
    the integer lattice spanned by the vectors.  The solution is the
    canonical one produced by the elimination and is not unique in general.
    """
    m = len(vectors)
    t = [int(x) for x in target]
    if m == 0:
        return [] if all(x == 0 for x in t) else None
    n = len(vectors[0])
    if any(len(v) != n for v in vectors) or len(t) != n:
        raise ValueError("all vectors and the target must share one length")
    H, U, pivots = _echelonize(vectors)
    y = [0] * m
    residue = list(t)
    for r, c in pivots:
        if residue[c] == 0:
            continue
        if residue[c] % H[r][c] != 0:
            return None
        q = residue[c] // H[r][c]
        y[r] = q
        residue = [a - q * b for a, b in zip(residue, H[r])]
    if any(x != 0 for x in residue):
        return None
    alpha = [0] * m
    for k in range(m):
        if y[k] == 0:
            continue
        for i in range(m):
            alpha[i] += y[k] * U[k][i]
    return alpha


def in_lattice(vectors: Sequence[Sequence[int]], target: Sequence[int]) -> bool:
    """True when `target` lies in the integer lattice spanned by `vectors`."""
    return integer_combination(vectors, target) is not None
