"""Free-group and mixed words: reduction, word maps, and system transforms.

Words over a free basis X1..Xn are stored run-length as (variable, exponent)
pairs.  Mixed words additionally interleave opaque coefficient tokens that
are resolved against a coefficient table only at evaluation time, so the
word layer never depends on a particular group implementation.

A word map is evaluated against any "group ops" object exposing three
members: ``identity``, ``mul(a, b)`` and ``inv(a)``.  Finite groups, exact
matrix groups and wreath products all provide this interface.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .intlattice import integer_combination

Letter = Tuple[int, int]
# A coefficient piece holds a formal product of (token, exponent) factors;
# opaque tokens cannot be multiplied out, so "pre-multiplied" neighbours are
# kept as one composite piece.
Piece = Tuple  # ("v", var, exp) | ("c", ((token, exp), ...))


class LatticeMembershipError(ValueError):
    """Exponent vector not expressible over the basis exponent lattice."""

    def __init__(self, target: Tuple[int, ...], basis: Tuple[Tuple[int, ...], ...]):
        self.target = target
        self.basis = basis
        super().__init__(
            f"exponent vector {target} is not an integer combination of {list(basis)}"
        )


@dataclass(frozen=True)
class Word:
    """A word in the free group F_n, stored as (variable, exponent) runs.

    The constructor checks ranges only; library operations always return
    freely reduced words, and :func:`reduce` canonicalises arbitrary input.
    """

    n_vars: int
    letters: Tuple[Letter, ...] = ()

    def __post_init__(self) -> None:
        if self.n_vars < 1:
            raise ValueError(f"n_vars must be positive, got {self.n_vars}")
        object.__setattr__(self, "letters", tuple((int(v), int(e)) for v, e in self.letters))
        for v, e in self.letters:
            if not 1 <= v <= self.n_vars:
                raise ValueError(f"variable X{v} out of range 1..{self.n_vars}")
            if e == 0:
                raise ValueError("zero exponent in word")

    @property
    def is_reduced(self) -> bool:
        return all(a[0] != b[0] for a, b in zip(self.letters, self.letters[1:]))

    def length(self) -> int:
        """Letter count of the expanded word (sum of |exponents|)."""
        return sum(abs(e) for _, e in self.letters)

    def inverse(self) -> "Word":
        return Word(self.n_vars, tuple((v, -e) for v, e in reversed(self.letters)))

    def __mul__(self, other: "Word") -> "Word":
        n = max(self.n_vars, other.n_vars)
        return Word(n, _reduce_letters(self.letters + other.letters))

    def __pow__(self, k: int) -> "Word":
        return word_power(self, k)

    def widen(self, n_vars: int) -> "Word":
        if n_vars < self.n_vars:
            raise ValueError("cannot shrink n_vars")
        return Word(n_vars, self.letters)

    def to_mixed(self) -> "MixedWord":
        pieces = tuple(("v", v, e) for v, e in self.letters)
        return MixedWord(self.n_vars, pieces)


@dataclass(frozen=True)
class MixedWord:
    """An element of F_n * G with opaque coefficient tokens.

    Pieces alternate between variable runs and composite coefficient pieces;
    two coefficient pieces are never adjacent (their factors are held
    pre-multiplied inside a single piece).
    """

    n_vars: int
    pieces: Tuple[Piece, ...] = ()

    def __post_init__(self) -> None:
        if self.n_vars < 1:
            raise ValueError(f"n_vars must be positive, got {self.n_vars}")
        prev_kind = None
        for piece in self.pieces:
            kind = piece[0]
            if kind == "v":
                _, v, e = piece
                if not 1 <= v <= self.n_vars:
                    raise ValueError(f"variable X{v} out of range 1..{self.n_vars}")
                if e == 0:
                    raise ValueError("zero exponent in word")
            elif kind == "c":
                factors = piece[1]
                if not factors:
                    raise ValueError("empty coefficient piece")
                if prev_kind == "c":
                    raise ValueError("adjacent coefficient pieces must be pre-multiplied")
                for _tok, e in factors:
                    if e == 0:
                        raise ValueError("zero exponent on coefficient token")
            else:
                raise ValueError(f"unknown piece kind {kind!r}")
            prev_kind = kind

    @property
    def has_coefficients(self) -> bool:
        return any(p[0] == "c" for p in self.pieces)

    def to_word(self) -> Word:
        if self.has_coefficients:
            raise ValueError("mixed word has coefficient tokens")
        return Word(self.n_vars, tuple((v, e) for _, v, e in self.pieces))

    def inverse(self) -> "MixedWord":
        return MixedWord(self.n_vars, _invert_pieces(self.pieces))

    def __mul__(self, other: "MixedWord") -> "MixedWord":
        n = max(self.n_vars, other.n_vars)
        return MixedWord(n, _normalize_pieces(self.pieces + other.pieces))

    def widen(self, n_vars: int) -> "MixedWord":
        if n_vars < self.n_vars:
            raise ValueError("cannot shrink n_vars")
        return MixedWord(n_vars, self.pieces)


AnyWord = Union[Word, MixedWord]


@dataclass(frozen=True)
class EquationSystem:
    """An ordered, homogeneous system of equations sharing one n_vars."""

    n_vars: int
    equations: Tuple[AnyWord, ...]

    def __post_init__(self) -> None:
        for eq in self.equations:
            if eq.n_vars != self.n_vars:
                raise ValueError("all equations must share the system's n_vars")

    def __len__(self) -> int:
        return len(self.equations)

    def __iter__(self):
        return iter(self.equations)

    def prefix(self, k: int) -> "EquationSystem":
        return EquationSystem(self.n_vars, self.equations[:k])


def system(equations: Sequence[AnyWord], n_vars: Optional[int] = None) -> EquationSystem:
    """Build an EquationSystem, widening members to a common n_vars."""
    if n_vars is None:
        n_vars = max((eq.n_vars for eq in equations), default=1)
    return EquationSystem(n_vars, tuple(eq.widen(n_vars) for eq in equations))


# ---------------------------------------------------------------------------
# reduction


def _reduce_letters(letters: Iterable[Letter]) -> Tuple[Letter, ...]:
    stack: List[List[int]] = []
    for v, e in letters:
        if e == 0:
            continue
        if stack and stack[-1][0] == v:
            stack[-1][1] += e
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([v, e])
    return tuple((v, e) for v, e in stack)


def _merge_factors(factors: Iterable[Tuple[int, int]]) -> Tuple[Tuple[int, int], ...]:
    stack: List[List[int]] = []
    for tok, e in factors:
        if e == 0:
            continue
        if stack and stack[-1][0] == tok:
            stack[-1][1] += e
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([tok, e])
    return tuple((t, e) for t, e in stack)


def _normalize_pieces(pieces: Iterable[Piece]) -> Tuple[Piece, ...]:
    stack: List[Piece] = []
    for piece in pieces:
        stack.append(piece)
        while len(stack) >= 2:
            a, b = stack[-2], stack[-1]
            if a[0] == "v" and b[0] == "v" and a[1] == b[1]:
                e = a[2] + b[2]
                stack.pop()
                stack.pop()
                if e != 0:
                    stack.append(("v", a[1], e))
            elif a[0] == "c" and b[0] == "c":
                merged = _merge_factors(a[1] + b[1])
                stack.pop()
                stack.pop()
                if merged:
                    stack.append(("c", merged))
            else:
                break
    return tuple(stack)


def _invert_pieces(pieces: Sequence[Piece]) -> Tuple[Piece, ...]:
    out: List[Piece] = []
    for piece in reversed(pieces):
        if piece[0] == "v":
            out.append(("v", piece[1], -piece[2]))
        else:
            out.append(("c", tuple((t, -e) for t, e in reversed(piece[1]))))
    return tuple(out)


def reduce(w: AnyWord) -> AnyWord:
    """Freely reduce a word; idempotent."""
    if isinstance(w, Word):
        return Word(w.n_vars, _reduce_letters(w.letters))
    return MixedWord(w.n_vars, _normalize_pieces(w.pieces))


def word_power(w: Word, k: int) -> Word:
    if k == 0:
        return Word(w.n_vars)
    base = w if k > 0 else w.inverse()
    out = Word(w.n_vars)
    for _ in range(abs(k)):
        out = out * base
    return out


def commutator(u: AnyWord, v: AnyWord) -> AnyWord:
    """[u, v] = u^-1 v^-1 u v, freely reduced."""
    if isinstance(u, Word) and isinstance(v, Word):
        return u.inverse() * v.inverse() * u * v
    um = u.to_mixed() if isinstance(u, Word) else u
    vm = v.to_mixed() if isinstance(v, Word) else v
    return um.inverse() * vm.inverse() * um * vm


def simple_commutator(words: Sequence[AnyWord]) -> AnyWord:
    """Left-nested iterated commutator [x0, x1, ..., xk]; [x0] = x0."""
    if not words:
        raise ValueError("simple_commutator of an empty sequence")
    acc = words[0]
    for w in words[1:]:
        acc = commutator(acc, w)
    return acc


def generator(var: int, n_vars: Optional[int] = None) -> Word:
    """The single-letter word X_var."""
    return Word(n_vars if n_vars is not None else var, ((var, 1),))


# ---------------------------------------------------------------------------
# word maps


def _element_power(ops, a, k: int):
    if k < 0:
        a = ops.inv(a)
        k = -k
    acc = ops.identity
    base = a
    while k:
        if k & 1:
            acc = ops.mul(acc, base)
        base = ops.mul(base, base)
        k >>= 1
    return acc


def evaluate(
    w: AnyWord,
    elements: Sequence,
    ops,
    coeffs: Optional[Mapping[int, object]] = None,
):
    """Evaluate the word map at a tuple of group elements.

    `ops` is any object with ``identity``, ``mul`` and ``inv``; `coeffs`
    maps coefficient tokens to group elements and is required for mixed
    words with coefficients.
    """
    if len(elements) != w.n_vars:
        raise ValueError(f"arity mismatch: word has {w.n_vars} variables, got {len(elements)} elements")
    acc = ops.identity
    if isinstance(w, Word):
        for v, e in w.letters:
            acc = ops.mul(acc, _element_power(ops, elements[v - 1], e))
        return acc
    for piece in w.pieces:
        if piece[0] == "v":
            _, v, e = piece
            acc = ops.mul(acc, _element_power(ops, elements[v - 1], e))
        else:
            for tok, e in piece[1]:
                if coeffs is None or tok not in coeffs:
                    raise ValueError(f"coefficient token g{tok} not resolved in the target group")
                acc = ops.mul(acc, _element_power(ops, coeffs[tok], e))
    return acc


# ---------------------------------------------------------------------------
# abelianization and the positive / zero-sum transforms


def exponent_sum(w: AnyWord) -> Tuple[int, ...]:
    """Signed exponent total per variable; coefficient tokens contribute 0."""
    sums = [0] * w.n_vars
    if isinstance(w, Word):
        for v, e in w.letters:
            sums[v - 1] += e
    else:
        for piece in w.pieces:
            if piece[0] == "v":
                sums[piece[1] - 1] += piece[2]
    return tuple(sums)


def positivize(w: AnyWord) -> AnyWord:
    """Rewrite over 2n variables with no negative exponents.

    Each letter X_i stays put and each X_i^-1 becomes X_{n+i}; applied
    letterwise, so substituting (g, g^-1) for the doubled variables recovers
    the original word map value.
    """
    n = w.n_vars

    def image(v: int, e: int) -> Letter:
        return (v, e) if e > 0 else (n + v, -e)

    if isinstance(w, Word):
        return Word(2 * n, tuple(image(v, e) for v, e in w.letters))
    pieces: List[Piece] = []
    for piece in w.pieces:
        if piece[0] == "v":
            pieces.append(("v", *image(piece[1], piece[2])))
        else:
            pieces.append(piece)
    return MixedWord(2 * n, tuple(pieces))


def zero_sum_transform(
    s: Word, basis: Union[EquationSystem, Sequence[Word]]
) -> Tuple[Word, Tuple[int, ...]]:
    """Return (s', alpha) with s' = s_1^a1 ... s_m^am s of exponent sum zero.

    Raises LatticeMembershipError when the exponent vector of `s` does not
    lie in the lattice generated by the basis exponent vectors.
    """
    members = list(basis)
    vectors = [exponent_sum(b) for b in members]
    target = tuple(-x for x in exponent_sum(s))
    alpha = integer_combination(vectors, target)
    if alpha is None:
        raise LatticeMembershipError(exponent_sum(s), tuple(vectors))
    n = max([s.n_vars] + [b.n_vars for b in members])
    out = Word(n)
    for b, a in zip(members, alpha):
        out = out * word_power(b.widen(n), a)
    out = out * s.widen(n)
    return out, tuple(alpha)


def substitute(w: Word, replacements: Sequence[Word]) -> Word:
    """Substitute replacements[i-1] for X_i throughout `w`, reduced."""
    if len(replacements) != w.n_vars:
        raise ValueError("need one replacement word per variable")
    n = max((r.n_vars for r in replacements), default=1)
    out = Word(n)
    for v, e in w.letters:
        out = out * word_power(replacements[v - 1].widen(n), e)
    return out


def is_positive(w: AnyWord) -> bool:
    """True when no variable carries a negative exponent."""
    if isinstance(w, Word):
        return all(e > 0 for _, e in w.letters)
    return all(p[2] > 0 for p in w.pieces if p[0] == "v")


# ---------------------------------------------------------------------------
# grammar:  word := term*    term := atom | atom '^' int
#           atom := 'X' digits | '[' word ',' word ']' | '(' word ')' | 'g' digits

_TOKEN_RE = re.compile(r"X(\d+)|g(\d+)|\^(-?\d+)|(\[)|(\])|(\()|(\))|(,)|(\s+)|(.)")


def _tokenize(text: str) -> List[Tuple[str, int]]:
    tokens: List[Tuple[str, int]] = []
    for m in _TOKEN_RE.finditer(text):
        if m.group(1) is not None:
            tokens.append(("X", int(m.group(1))))
        elif m.group(2) is not None:
            tokens.append(("g", int(m.group(2))))
        elif m.group(3) is not None:
            tokens.append(("^", int(m.group(3))))
        elif m.group(9) is not None:
            continue
        elif m.group(10) is not None:
            raise ValueError(f"unexpected character {m.group(10)!r} in word {text!r}")
        else:
            sym = next(g for g in m.groups()[3:8] if g is not None)
            tokens.append((sym, 0))
    return tokens


def _pieces_power(pieces: Tuple[Piece, ...], k: int) -> Tuple[Piece, ...]:
    if k == 0:
        return ()
    base = pieces if k > 0 else _invert_pieces(pieces)
    out: Tuple[Piece, ...] = ()
    for _ in range(abs(k)):
        out = _normalize_pieces(out + base)
    return out


class _Parser:
    def __init__(self, tokens: List[Tuple[str, int]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def next(self) -> Tuple[str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse_sequence(self, stop: Tuple[str, ...]) -> Tuple[Piece, ...]:
        pieces: Tuple[Piece, ...] = ()
        while self.peek() is not None and self.peek() not in stop:
            pieces = _normalize_pieces(pieces + self.parse_term())
        return pieces

    def parse_term(self) -> Tuple[Piece, ...]:
        atom = self.parse_atom()
        if self.peek() == "^":
            _, e = self.next()
            return _pieces_power(atom, e)
        return atom

    def parse_atom(self) -> Tuple[Piece, ...]:
        kind, value = self.next()
        if kind == "X":
            if value < 1:
                raise ValueError("variable indices are 1-based")
            return (("v", value, 1),)
        if kind == "g":
            return (("c", ((value, 1),)),)
        if kind == "[":
            left = self.parse_sequence((",",))
            if self.peek() != ",":
                raise ValueError("expected ',' in commutator")
            self.next()
            right = self.parse_sequence(("]",))
            if self.peek() != "]":
                raise ValueError("expected ']' closing commutator")
            self.next()
            inv = _invert_pieces
            return _normalize_pieces(inv(left) + inv(right) + left + right)
        if kind == "(":
            inner = self.parse_sequence((")",))
            if self.peek() != ")":
                raise ValueError("expected ')'")
            self.next()
            return inner
        raise ValueError(f"unexpected token {kind!r}")


def parse_word(text: str, n_vars: Optional[int] = None) -> AnyWord:
    """Parse the word grammar; returns a reduced Word, or MixedWord when
    coefficient tokens appear."""
    parser = _Parser(_tokenize(text))
    pieces = parser.parse_sequence(())
    if parser.pos != len(parser.tokens):
        raise ValueError(f"trailing tokens in word {text!r}")
    max_var = max((p[1] for p in pieces if p[0] == "v"), default=0)
    if n_vars is None:
        n_vars = max(max_var, 1)
    elif max_var > n_vars:
        raise ValueError(f"word uses X{max_var} but n_vars={n_vars}")
    if any(p[0] == "c" for p in pieces):
        return MixedWord(n_vars, pieces)
    return Word(n_vars, tuple((v, e) for _, v, e in pieces))


def word_to_text(w: AnyWord) -> str:
    """Print a word in the grammar; parse(word_to_text(w)) == reduce(w)."""
    terms: List[str] = []

    def var_term(v: int, e: int) -> str:
        return f"X{v}" if e == 1 else f"X{v}^{e}"

    if isinstance(w, Word):
        terms = [var_term(v, e) for v, e in w.letters]
    else:
        for piece in w.pieces:
            if piece[0] == "v":
                terms.append(var_term(piece[1], piece[2]))
            else:
                for tok, e in piece[1]:
                    terms.append(f"g{tok}" if e == 1 else f"g{tok}^{e}")
    return " ".join(terms)
