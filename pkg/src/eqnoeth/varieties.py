"""Brute-force solution sets over finite groups.

V_G(S) collects the tuples killing every equation of S; the quasi-algebraic
variant V_{G,A}(S) relaxes "equals identity" to "lands in the subset A".
Enumeration is row-major over tuple indices and all reported witnesses are
the first in that order, so output is deterministic regardless of how the
tuple space is partitioned across workers.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .fingrp import FiniteGroup
from .words import AnyWord, EquationSystem, MixedWord, Word, evaluate


@dataclass(frozen=True)
class Variety:
    """The solution set of a system in G^n."""

    group: FiniteGroup
    n_vars: int
    tuples: FrozenSet[Tuple[int, ...]]

    def __contains__(self, t: Tuple[int, ...]) -> bool:
        return tuple(t) in self.tuples

    def __len__(self) -> int:
        return len(self.tuples)

    def sorted_tuples(self) -> List[Tuple[int, ...]]:
        return sorted(self.tuples)


@dataclass(frozen=True)
class QuasiVariety(Variety):
    """Tuples whose equation values all land in a target subset."""

    target: Tuple[int, ...] = ()


def _worker_count() -> int:
    raw = os.environ.get("EQNOETH_THREADS", "")
    if not raw:
        return 1
    try:
        return max(1, min(int(raw), 64))
    except ValueError:
        return 1


def _word_length(w: AnyWord) -> int:
    if isinstance(w, Word):
        return sum(abs(e) for _, e in w.letters)
    total = 0
    for p in w.pieces:
        if p[0] == "v":
            total += abs(p[2])
        else:
            total += sum(abs(e) for _, e in p[1])
    return total


def _satisfies(
    eqs: Sequence[AnyWord],
    t: Tuple[int, ...],
    G: FiniteGroup,
    accept,
    coeffs: Optional[Mapping[int, int]],
) -> bool:
    for eq in eqs:
        if not accept(evaluate(eq, t, G, coeffs)):
            return False
    return True


def _enumerate(
    S: EquationSystem,
    G: FiniteGroup,
    accept,
    coeffs: Optional[Mapping[int, int]],
) -> FrozenSet[Tuple[int, ...]]:
    if coeffs is not None:
        for tok, g in coeffs.items():
            if not 0 <= g < G.order:
                raise ValueError(f"coefficient g{tok} resolves outside the group")
    # short equations first: most tuples die early
    eqs = sorted(S.equations, key=_word_length)
    space = itertools.product(range(G.order), repeat=S.n_vars)
    workers = _worker_count()
    if workers == 1:
        return frozenset(t for t in space if _satisfies(eqs, t, G, accept, coeffs))
    tuples = list(space)
    chunk = (len(tuples) + workers - 1) // workers or 1
    parts = [tuples[i : i + chunk] for i in range(0, len(tuples), chunk)]

    def run(part):
        return [t for t in part if _satisfies(eqs, t, G, accept, coeffs)]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run, parts))
    return frozenset(t for part in results for t in part)


def solution_set(
    S: EquationSystem, G: FiniteGroup, coeffs: Optional[Mapping[int, int]] = None
) -> Variety:
    """Exact enumeration of V_G(S)."""
    found = _enumerate(S, G, lambda v: v == 0, coeffs)
    return Variety(G, S.n_vars, found)


def quasi_solution_set(
    S: EquationSystem,
    G: FiniteGroup,
    target: Sequence[int],
    coeffs: Optional[Mapping[int, int]] = None,
) -> QuasiVariety:
    """Exact enumeration of V_{G,A}(S) for a target subset A of G."""
    A = frozenset(int(a) for a in target)
    for a in A:
        if not 0 <= a < G.order:
            raise ValueError("target subset must lie inside the group")
    found = _enumerate(S, G, lambda v: v in A, coeffs)
    return QuasiVariety(G, S.n_vars, found, target=tuple(sorted(A)))


# ---------------------------------------------------------------------------
# family-level minimal subsystems


@dataclass(frozen=True)
class PrefixCertificate:
    """Why a shorter prefix fails: a group and a separating witness tuple."""

    prefix_len: int
    group_index: int
    witness: Tuple[int, ...]
    failing_equation: int


@dataclass(frozen=True)
class MinimalSubsystemResult:
    indices: Tuple[int, ...]
    certificates: Tuple[PrefixCertificate, ...]
    shrunk: bool


def minimal_subsystem(
    S: EquationSystem,
    family: Sequence[FiniteGroup],
    coeffs: Optional[Sequence[Optional[Mapping[int, int]]]] = None,
    shrink: bool = False,
) -> MinimalSubsystemResult:
    """Smallest prefix S_0 of S with V_G(S_0) = V_G(S) for every G in the family.

    Certificates name, for each rejected shorter prefix, the first group and
    witness tuple (row-major) separating the two varieties.  With
    shrink=True the prefix is further thinned greedily to a subset.
    """
    if coeffs is None:
        coeffs = [None] * len(family)
    full: Dict[int, Variety] = {
        gi: solution_set(S, G, coeffs[gi]) for gi, G in enumerate(family)
    }

    def matches(indices: Sequence[int]) -> Optional[Tuple[int, Tuple[int, ...]]]:
        """None when the subsystem matches everywhere, else (group, witness)."""
        sub = EquationSystem(S.n_vars, tuple(S.equations[i] for i in indices))
        for gi, G in enumerate(family):
            V = solution_set(sub, G, coeffs[gi])
            extra = V.tuples - full[gi].tuples
            if extra:
                return gi, min(extra)
        return None

    certificates: List[PrefixCertificate] = []
    chosen: Optional[int] = None
    for k in range(len(S) + 1):
        sep = matches(range(k))
        if sep is None:
            chosen = k
            break
        gi, witness = sep
        G = family[gi]
        failing = next(
            i
            for i, eq in enumerate(S.equations)
            if evaluate(eq, witness, G, coeffs[gi]) != 0
        )
        certificates.append(PrefixCertificate(k, gi, witness, failing))
    assert chosen is not None  # the full system always matches itself
    indices = list(range(chosen))
    shrunk = False
    if shrink:
        for i in list(indices):
            trial = [j for j in indices if j != i]
            if matches(trial) is None:
                indices = trial
                shrunk = True
    return MinimalSubsystemResult(tuple(indices), tuple(certificates), shrunk)
