"""Verma modules of the Neveu-Schwarz algebra.

Relations used by the rewriting engine::

    [L_m, L_n]   = (m - n) L_{m+n} + c/12 (m^3 - m) delta_{m+n,0}
    [L_m, G_r]   = (m/2 - r) G_{m+r}
    {G_r, G_s}   = 2 L_{r+s} + c/3 (r^2 - 1/4) delta_{r+s,0}

Internally a generator is an int ``code`` equal to twice its index: even codes
are L's, odd codes are G's. A PBW monomial is the tuple of positive codes
``(a_1, ..., a_k)`` meaning ``X_{-a_1/2} ... X_{-a_k/2} Omega`` read as an
operator word: the G block comes first with strictly decreasing indices,
followed by the L block with weakly decreasing indices. This is the order

    G_{-j_beta} ... G_{-j_1} L_{-i_alpha} ... L_{-i_1} Omega

with ``i_1 <= ... <= i_alpha`` and ``j_1 < ... < j_beta``.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from .exactnum import C, H, HalfInt, PolyCH, as_rat, format_rat

Word = tuple  # tuple[int, ...] of positive twice-indices


class InhomogeneousError(ValueError):
    pass


# ---------------------------------------------------------------------------
# generators and monomials

@dataclass(frozen=True)
class Generator:
    """``L_n``, ``G_r`` or the central element ``C`` (index None)."""

    kind: str
    index: HalfInt | None = None

    def __post_init__(self):
        if self.kind == "Central":
            if self.index is not None:
                raise ValueError("the central element carries no index")
            return
        if self.kind not in ("L", "G"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        idx = HalfInt.of(self.index)
        object.__setattr__(self, "index", idx)
        if self.kind == "L" and not idx.is_integer:
            raise ValueError("L generators have integer index")
        if self.kind == "G" and idx.is_integer:
            raise ValueError("G generators have half-odd-integer index")

    @classmethod
    def L(cls, n) -> "Generator":
        return cls("L", HalfInt.of(n))

    @classmethod
    def G(cls, r) -> "Generator":
        return cls("G", HalfInt.of(r))

    @property
    def parity(self) -> int:
        return 1 if self.kind == "G" else 0

    @property
    def code(self) -> int:
        if self.kind == "Central":
            raise ValueError("the central element has no mode code")
        return self.index.twice

    @classmethod
    def from_code(cls, code: int) -> "Generator":
        return cls("G" if code % 2 else "L", HalfInt(code))

    def __str__(self):
        if self.kind == "Central":
            return "C"
        return f"{self.kind}({self.index})"


GeneratorWord = tuple  # tuple[Generator, ...], applied right to left


def adjoint(word: Sequence[Generator]) -> tuple:
    """Reverse the word and negate every index (``L_n* = L_-n``, ``G_r* = G_-r``)."""
    out = []
    for g in reversed(word):
        out.append(g if g.kind == "Central" else Generator(g.kind, -g.index))
    return tuple(out)


def word_parity(word: Sequence[Generator]) -> int:
    return sum(g.parity for g in word) % 2


def _can_precede(a: int, b: int) -> bool:
    """May lowering code ``a`` sit immediately left of ``b`` in a PBW word?"""
    if a % 2:
        return b % 2 == 0 or a > b
    return b % 2 == 0 and a >= b


def is_canonical(word: Word) -> bool:
    return all(a > 0 for a in word) and all(
        _can_precede(word[i], word[i + 1]) for i in range(len(word) - 1)
    )


@dataclass(frozen=True)
class PBWMonomial:
    """A basis vector of the Verma module, stored as its operator word."""

    word: Word = ()

    def __post_init__(self):
        if not is_canonical(self.word):
            raise ValueError(f"{self.word!r} is not a PBW-ordered word")

    @classmethod
    def from_parts(cls, g_parts: Iterable = (), l_parts: Iterable = ()) -> "PBWMonomial":
        gs = sorted((HalfInt.of(j).twice for j in g_parts), reverse=True)
        ls = sorted((HalfInt.of(i).twice for i in l_parts), reverse=True)
        if any(g % 2 == 0 for g in gs) or any(x % 2 for x in ls):
            raise ValueError("G parts must be half-odd, L parts integral")
        if len(set(gs)) != len(gs):
            raise ValueError("G parts must be distinct")
        return cls(tuple(gs) + tuple(ls))

    @property
    def g_parts(self) -> tuple:
        """Strictly increasing j's of the G_{-j} factors."""
        return tuple(Fraction(a, 2) for a in reversed(self.word) if a % 2)

    @property
    def l_parts(self) -> tuple:
        """Weakly increasing i's of the L_{-i} factors."""
        return tuple(Fraction(a, 2) for a in reversed(self.word) if a % 2 == 0)

    @property
    def level(self) -> Fraction:
        return Fraction(sum(self.word), 2)

    def generators(self) -> tuple:
        return tuple(Generator.from_code(-a) for a in self.word)

    def sort_key(self):
        g = self.g_parts
        return (len(g), g, self.l_parts)

    def __str__(self):
        return format_monomial(self.word)


def format_monomial(word: Word) -> str:
    if not word:
        return "Omega"
    return " ".join(
        f"{'G' if a % 2 else 'L'}({format_rat(Fraction(-a, 2))})" for a in word
    )


_TOKEN = re.compile(r"\s*([LG])\(\s*([-+]?\d+(?:/\d+)?)\s*\)\s*")


def parse_word(text: str) -> tuple:
    """Parse ``"G(-1/2) L(-1)"`` into a tuple of Generators (any order)."""
    s = text.strip()
    if s in ("", "Omega", "1"):
        return ()
    pos, out = 0, []
    while pos < len(s):
        mt = _TOKEN.match(s, pos)
        if not mt:
            raise ValueError(f"cannot parse generator word {text!r}")
        kind, idx = mt.groups()
        out.append(Generator(kind, HalfInt.of(idx)))
        pos = mt.end()
    return tuple(out)


def parse_monomial(text: str) -> PBWMonomial:
    gens = parse_word(text)
    if any(g.index >= 0 for g in gens):
        raise ValueError("monomials contain lowering generators only")
    return PBWMonomial(tuple(-g.code for g in gens))


# ---------------------------------------------------------------------------
# basis

def _partitions_distinct_odd(total: int, max_part: int) -> Iterator[tuple]:
    """Strictly decreasing tuples of odd positive ints summing to ``total``."""
    if total == 0:
        yield ()
        return
    start = min(max_part, total)
    if start % 2 == 0:
        start -= 1
    for a in range(start, 0, -2):
        for rest in _partitions_distinct_odd(total - a, a - 2):
            yield (a,) + rest


def _partitions_even(total: int, max_part: int) -> Iterator[tuple]:
    """Weakly decreasing tuples of even positive ints summing to ``total``."""
    if total == 0:
        yield ()
        return
    start = min(max_part, total)
    if start % 2:
        start -= 1
    for a in range(start, 0, -2):
        for rest in _partitions_even(total - a, a):
            yield (a,) + rest


@lru_cache(maxsize=None)
def _basis_words(twice_n: int) -> tuple:
    if twice_n < 0:
        return ()
    words = []
    for g_total in range(0, twice_n + 1):
        l_total = twice_n - g_total
        if l_total % 2:
            continue
        for g in _partitions_distinct_odd(g_total, g_total):
            for ls in _partitions_even(l_total, l_total):
                words.append(g + ls)
    words.sort(key=lambda w: PBWMonomial(w).sort_key())
    return tuple(words)


def enumerate_basis(n) -> list[PBWMonomial]:
    """PBW monomials of level ``n``, ordered by (#G parts, G parts, L parts)."""
    twice = HalfInt.of(n).twice
    return [PBWMonomial(w) for w in _basis_words(twice)]


def dimension_d(n) -> int:
    """d(n): dimension of the level-n subspace, 0 for n < 0."""
    return len(_basis_words(HalfInt.of(n).twice))


# ---------------------------------------------------------------------------
# ambient: fixes the scalars c and h and owns the memo tables

class Ambient:
    """Where the highest weight lives: rational point or symbolic (c, h)."""

    def __init__(self, c, h, mode: str):
        self.c = c
        self.h = h
        self.mode = mode
        self._memo: dict = {}
        self._lock = threading.Lock()

    @classmethod
    def point(cls, c, h) -> "Ambient":
        return cls(as_rat(c), as_rat(h), "point")

    @classmethod
    def symbolic(cls) -> "Ambient":
        return _SYMBOLIC

    def zero(self):
        return Fraction(0) if self.mode == "point" else PolyCH()

    def scalar(self, x):
        """Normalize a coefficient into this ambient's scalar type."""
        if self.mode == "point":
            return as_rat(x)
        if isinstance(x, PolyCH):
            return x
        return PolyCH.const(x)

    def key(self):
        return ("symbolic",) if self.mode == "symbolic" else ("point", self.c, self.h)

    def __eq__(self, other):
        return isinstance(other, Ambient) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if self.mode == "symbolic":
            return "Ambient.symbolic()"
        return f"Ambient.point({format_rat(self.c)}, {format_rat(self.h)})"


_SYMBOLIC = Ambient(C, H, "symbolic")


# ---------------------------------------------------------------------------
# rewriting engine on raw dict vectors {word: scalar}

def _bracket(x: int, y: int):
    """Super-bracket of modes with codes x, y.

    Returns ``(terms, central)``: ``terms`` is a list of (coef, code) and
    ``central`` is the coefficient of c (nonzero only when x + y == 0).
    """
    m, n = Fraction(x, 2), Fraction(y, 2)
    xo, yo = x % 2, y % 2
    central = Fraction(0)
    if not xo and not yo:
        coef = m - n
        if x + y == 0:
            central = (m**3 - m) / 12
    elif not xo and yo:
        coef = m / 2 - n
    elif xo and not yo:
        coef = -(n / 2 - m)
    else:
        coef = Fraction(2)
        if x + y == 0:
            central = (m * m - Fraction(1, 4)) / 3
    terms = [(coef, x + y)] if coef else []
    return terms, central


def _add_into(acc: dict, vec: Mapping, factor=1):
    for w, v in vec.items():
        s = acc.get(w)
        s = v * factor if s is None else s + v * factor
        if s == 0:
            acc.pop(w, None)
        else:
            acc[w] = s


def _lower(amb: Ambient, a: int, word: Word) -> dict:
    """Apply lowering mode with code ``-a`` (a > 0) to a PBW word."""
    if not word or _can_precede(a, word[0]):
        return {(a,) + word: 1}
    key = ("lo", a, word)
    hit = amb._memo.get(key)
    if hit is not None:
        return hit
    b, rest = word[0], word[1:]
    out: dict = {}
    if a == b and a % 2:
        # G_{-r} G_{-r} = (1/2){G_{-r}, G_{-r}} = L_{-2r}
        out = _lower(amb, 2 * a, rest)
    else:
        sign = -1 if (a % 2 and b % 2) else 1
        for w, v in _lower(amb, a, rest).items():
            _add_into(out, _lower(amb, b, w), sign * v)
        for coef, code in _bracket(-a, -b)[0]:
            _add_into(out, _lower(amb, -code, rest), coef)
    with amb._lock:
        amb._memo.setdefault(key, out)
    return out


def _apply_mono(amb: Ambient, code: int, word: Word) -> dict:
    if code < 0:
        return _lower(amb, -code, word)
    if code == 0:
        val = amb.h + Fraction(sum(word), 2)
        return {word: val} if val != 0 else {}
    if not word:
        return {}
    key = ("up", code, word)
    hit = amb._memo.get(key)
    if hit is not None:
        return hit
    x, rest = word[0], word[1:]
    sign = -1 if (code % 2 and x % 2) else 1
    out: dict = {}
    for w, v in _apply_mono(amb, code, rest).items():
        _add_into(out, _lower(amb, x, w), sign * v)
    terms, central = _bracket(code, -x)
    for coef, c2 in terms:
        _add_into(out, _apply_mono(amb, c2, rest), coef)
    if central:
        _add_into(out, {rest: amb.c}, central)
    with amb._lock:
        amb._memo.setdefault(key, out)
    return out


def _apply_code(amb: Ambient, code: int, vec: Mapping) -> dict:
    out: dict = {}
    for w, v in vec.items():
        _add_into(out, _apply_mono(amb, code, w), v)
    return out


# ---------------------------------------------------------------------------
# public vector type

class VermaVector:
    """Finite combination of PBW monomials with exact coefficients."""

    __slots__ = ("_coeffs", "ambient")

    def __init__(self, coeffs: Mapping | None, ambient: Ambient):
        self.ambient = ambient
        clean = {}
        for k, v in (coeffs or {}).items():
            w = k.word if isinstance(k, PBWMonomial) else tuple(k)
            if not is_canonical(w):
                raise ValueError(f"non-PBW word {w!r}")
            v = ambient.scalar(v)
            if v != 0:
                clean[w] = v
        self._coeffs = clean

    @classmethod
    def _raw(cls, coeffs: dict, ambient: Ambient) -> "VermaVector":
        v = cls.__new__(cls)
        v.ambient = ambient
        v._coeffs = {w: ambient.scalar(x) for w, x in coeffs.items() if x != 0}
        return v

    @classmethod
    def vacuum(cls, ambient: Ambient) -> "VermaVector":
        return cls._raw({(): 1}, ambient)

    @classmethod
    def from_word(cls, word: Sequence[Generator], ambient: Ambient, coef=1) -> "VermaVector":
        """``coef * word . Omega`` with the word in any order."""
        return apply_word(word, cls._raw({(): coef}, ambient))

    @property
    def coeffs(self) -> dict:
        return {PBWMonomial(w): v for w, v in self._coeffs.items()}

    def raw(self) -> dict:
        return dict(self._coeffs)

    def coefficient(self, mono: PBWMonomial):
        return self._coeffs.get(mono.word, self.ambient.zero())

    def is_zero(self) -> bool:
        return not self._coeffs

    def levels(self) -> set:
        return {Fraction(sum(w), 2) for w in self._coeffs}

    def level(self) -> Fraction:
        lv = self.levels()
        if len(lv) != 1:
            raise InhomogeneousError("vector is zero or not homogeneous")
        return lv.pop()

    def __add__(self, other: "VermaVector"):
        self._check(other)
        out = dict(self._coeffs)
        _add_into(out, other._coeffs)
        return VermaVector._raw(out, self.ambient)

    def __sub__(self, other: "VermaVector"):
        return self + other * -1

    def __mul__(self, k):
        return VermaVector._raw({w: v * k for w, v in self._coeffs.items()}, self.ambient)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, VermaVector):
            return NotImplemented
        return self.ambient == other.ambient and self._coeffs == other._coeffs

    def _check(self, other):
        if self.ambient != other.ambient:
            raise ValueError("vectors live in different Verma modules")

    def to_json(self) -> list[dict]:
        out = []
        for w in sorted(self._coeffs, key=lambda w: PBWMonomial(w).sort_key()):
            v = self._coeffs[w]
            coef = v.to_json() if isinstance(v, PolyCH) else format_rat(v)
            out.append({"mon": format_monomial(w), "coef": coef})
        return out

    def __str__(self):
        if not self._coeffs:
            return "0"
        return " + ".join(f"({v}) {format_monomial(w)}" for w, v in self._coeffs.items())

    __repr__ = __str__


def apply_generator(g: Generator, v: VermaVector) -> VermaVector:
    amb = v.ambient
    if g.kind == "Central":
        return VermaVector._raw({w: x * amb.c for w, x in v._coeffs.items()}, amb)
    return VermaVector._raw(_apply_code(amb, g.code, v._coeffs), amb)


def apply_word(word: Sequence[Generator], v: VermaVector) -> VermaVector:
    """Apply an operator word (rightmost generator acts first)."""
    for g in reversed(tuple(word)):
        v = apply_generator(g, v)
    return v


def inner_product(a: PBWMonomial, b: PBWMonomial, ambient: Ambient):
    """Contravariant form ``(a Omega, b Omega)``: the Omega-coefficient of a* b Omega."""
    if sum(a.word) != sum(b.word):
        return ambient.zero()
    vec: dict = {b.word: 1}
    for x in a.word:
        vec = _apply_code(ambient, x, vec)
        if not vec:
            return ambient.zero()
    return ambient.scalar(vec.get((), 0))


def form(u: VermaVector, v: VermaVector):
    """Bilinear extension of the contravariant form (all scalars are real)."""
    u._check(v)
    amb = u.ambient
    total = amb.zero()
    for wa, xa in u._coeffs.items():
        for wb, xb in v._coeffs.items():
            total = total + xa * xb * inner_product(PBWMonomial(wa), PBWMonomial(wb), amb)
    return total


def is_singular(v: VermaVector) -> bool:
    """True iff ``G_{1/2} v = G_{3/2} v = 0`` for homogeneous v of positive level."""
    lv = v.levels()
    if len(lv) != 1:
        raise InhomogeneousError("is_singular needs a nonzero homogeneous vector")
    if lv.pop() <= 0:
        raise ValueError("singular vectors have positive level")
    return all(apply_generator(Generator.G(r), v).is_zero() for r in (Fraction(1, 2), Fraction(3, 2)))
