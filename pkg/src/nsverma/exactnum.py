"""Exact scalars: rationals, half-integers and sparse polynomials in (c, h).

Rationals are :class:`fractions.Fraction`; this module only adds the text
format used for I/O, a half-integer index type and the bivariate polynomial
ring Q[c, h] in which Gram entries and Kac determinants live.
"""

from __future__ import annotations

import itertools
import operator
from fractions import Fraction
from functools import total_ordering
from typing import Callable, Iterable, Mapping, Union

Rat = Fraction
Number = Union[int, Fraction]


class DegreeBoundError(ValueError):
    """A polynomial exceeds the degree bound it was promised to respect."""


# ---------------------------------------------------------------------------
# rationals

def as_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rat(x)
    if isinstance(x, HalfInt):
        return x.to_fraction()
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def parse_rat(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``. Floats and decimals are rejected."""
    s = text.strip()
    if not s:
        raise ValueError("empty rational")
    num, sep, den = s.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {text!r}") from None
    if d == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(n, d)


def format_rat(x: Number) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def rat_arith(a: Fraction, b: Fraction, op: str) -> Fraction:
    """Exact ``a op b`` for op in ``+ - * /`` (also accepts ``×``, ``÷``, ``−``)."""
    ops: dict[str, Callable] = {
        "+": operator.add,
        "-": operator.sub,
        "−": operator.sub,
        "*": operator.mul,
        "×": operator.mul,
        "/": operator.truediv,
        "÷": operator.truediv,
    }
    if op not in ops:
        raise ValueError(f"unknown operator {op!r}")
    a, b = as_rat(a), as_rat(b)
    if ops[op] is operator.truediv and b == 0:
        raise ZeroDivisionError("rational division by zero")
    return ops[op](a, b)


# ---------------------------------------------------------------------------
# half-integers

@total_ordering
class HalfInt:
    """An element of (1/2)Z stored as twice its value."""

    __slots__ = ("twice",)

    def __init__(self, twice: int):
        if not isinstance(twice, int):
            raise TypeError("HalfInt stores an integer twice-value")
        object.__setattr__(self, "twice", twice)

    def __setattr__(self, name, value):
        raise AttributeError("HalfInt is immutable")

    @classmethod
    def of(cls, x) -> "HalfInt":
        if isinstance(x, HalfInt):
            return x
        f = as_rat(x) * 2
        if f.denominator != 1:
            raise ValueError(f"{x!r} is not a half-integer")
        return cls(f.numerator)

    def to_fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __add__(self, other):
        other = HalfInt.of(other)
        return HalfInt(self.twice + other.twice)

    __radd__ = __add__

    def __sub__(self, other):
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __rsub__(self, other):
        return HalfInt(HalfInt.of(other).twice - self.twice)

    def __neg__(self):
        return HalfInt(-self.twice)

    def __eq__(self, other):
        if isinstance(other, HalfInt):
            return self.twice == other.twice
        if isinstance(other, (int, Fraction)):
            return Fraction(self.twice, 2) == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, HalfInt):
            return self.twice < other.twice
        if isinstance(other, (int, Fraction)):
            return Fraction(self.twice, 2) < other
        return NotImplemented

    def __hash__(self):
        return hash(Fraction(self.twice, 2))

    def __repr__(self):
        return f"HalfInt({format_rat(self.to_fraction())})"

    def __str__(self):
        return format_rat(self.to_fraction())


# ---------------------------------------------------------------------------
# polynomials in c and h

Monomial = tuple  # (degree in c, degree in h)


class PolyCH:
    """Sparse polynomial over Q in the two indeterminates c and h.

    ``terms`` maps ``(dc, dh)`` to a nonzero Fraction; the map is the
    canonical form, so equality is structural.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        clean = {}
        if terms:
            for (dc, dh), coef in terms.items():
                if dc < 0 or dh < 0:
                    raise ValueError("negative exponent in PolyCH")
                coef = Fraction(coef)
                if coef:
                    clean[(dc, dh)] = coef
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "PolyCH":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, x: Number) -> "PolyCH":
        x = Fraction(x)
        return cls._raw({(0, 0): x} if x else {})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def degree_c(self) -> int:
        return max((k[0] for k in self._terms), default=-1)

    def degree_h(self) -> int:
        return max((k[1] for k in self._terms), default=-1)

    def total_degree(self) -> int:
        return max((k[0] + k[1] for k in self._terms), default=-1)

    def leading(self) -> tuple[Monomial, Fraction]:
        """Leading term in lex order with h before c (highest h power first)."""
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        key = max(self._terms, key=lambda k: (k[1], k[0]))
        return key, self._terms[key]

    def constant_value(self) -> Fraction | None:
        if not self._terms:
            return Fraction(0)
        if set(self._terms) == {(0, 0)}:
            return self._terms[(0, 0)]
        return None

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "PolyCH | None":
        if isinstance(other, PolyCH):
            return other
        if isinstance(other, (int, Fraction)):
            return PolyCH.const(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for k, v in other._terms.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return PolyCH._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return PolyCH._raw({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return PolyCH._raw({})
            return PolyCH._raw({k: v * other for k, v in self._terms.items()})
        if not isinstance(other, PolyCH):
            return NotImplemented
        out: dict = {}
        for (a1, b1), v1 in self._terms.items():
            for (a2, b2), v2 in other._terms.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, 0) + v1 * v2
        return PolyCH._raw({k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("PolyCH division by zero")
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("PolyCH powers must be non-negative integers")
        result = PolyCH.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divexact(self, other: "PolyCH") -> "PolyCH":
        """Exact quotient; raises ArithmeticError if ``other`` does not divide."""
        other = self._coerce(other)
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        (lc_, lh_), lcoef = other.leading()
        rem = dict(self._terms)
        quot: dict = {}
        order = lambda k: (k[1], k[0])
        while rem:
            key = max(rem, key=order)
            dc, dh = key[0] - lc_, key[1] - lh_
            if dc < 0 or dh < 0:
                raise ArithmeticError("polynomial division is not exact")
            q = rem[key] / lcoef
            quot[(dc, dh)] = quot.get((dc, dh), 0) + q
            for (a, b), v in other._terms.items():
                k = (a + dc, b + dh)
                s = rem.get(k, 0) - q * v
                if s:
                    rem[k] = s
                else:
                    rem.pop(k, None)
        return PolyCH._raw({k: v for k, v in quot.items() if v})

    # -- comparison / hashing -------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- evaluation -----------------------------------------------------------

    def __call__(self, c, h) -> Fraction:
        return poly_eval(self, c, h)

    def substitute_c(self, c) -> "PolyCH":
        c = as_rat(c)
        out: dict = {}
        for (dc, dh), v in self._terms.items():
            out[(0, dh)] = out.get((0, dh), 0) + v * c**dc
        return PolyCH(out)

    # -- text -----------------------------------------------------------------

    def to_json(self) -> list[dict]:
        return [
            {"dc": dc, "dh": dh, "coef": format_rat(v)}
            for (dc, dh), v in sorted(self._terms.items(), key=lambda kv: (-kv[0][1], -kv[0][0]))
        ]

    @classmethod
    def from_json(cls, items: Iterable[Mapping]) -> "PolyCH":
        out: dict = {}
        for item in items:
            k = (int(item["dc"]), int(item["dh"]))
            out[k] = out.get(k, 0) + parse_rat(str(item["coef"]))
        return cls(out)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (dc, dh), v in sorted(self._terms.items(), key=lambda kv: (-kv[0][1], -kv[0][0])):
            mono = []
            if dc:
                mono.append("c" if dc == 1 else f"c^{dc}")
            if dh:
                mono.append("h" if dh == 1 else f"h^{dh}")
            mag = abs(v)
            if mono:
                coef = "" if mag == 1 else format_rat(mag) + "*"
                body = coef + "*".join(mono)
            else:
                body = format_rat(mag)
            parts.append(("-" if v < 0 else "+", body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"PolyCH({self})"


C = PolyCH._raw({(1, 0): Fraction(1)})
H = PolyCH._raw({(0, 1): Fraction(1)})


def poly_arith(a: PolyCH, b: PolyCH, op: str) -> PolyCH:
    if op == "+":
        return a + b
    if op in ("-", "−"):
        return a - b
    if op in ("*", "×"):
        return a * b
    raise ValueError(f"unknown polynomial operator {op!r}")


def poly_eval(p: PolyCH, c, h) -> Fraction:
    c, h = as_rat(c), as_rat(h)
    total = Fraction(0)
    for (dc, dh), v in p.items():
        total += v * c**dc * h**dh
    return total


def _grid(n: int) -> list[Fraction]:
    # distinct small rationals away from the usual special values
    return [Fraction(2 * k + 3, 7) for k in range(n)]


def grid_identity(
    f: Callable[[Fraction, Fraction], Fraction],
    g: Callable[[Fraction, Fraction], Fraction],
    deg_bound: tuple[int, int],
    c_points: Iterable[Fraction] | None = None,
    h_points: Iterable[Fraction] | None = None,
) -> bool:
    """Decide ``f == g`` for polynomial functions of bounded bidegree.

    If the difference has degree at most ``dc`` in c and ``dh`` in h, it is
    zero as soon as it vanishes on a (dc+1) x (dh+1) grid of distinct points.
    """
    dc, dh = deg_bound
    cs = list(c_points) if c_points is not None else _grid(dc + 1)
    hs = list(h_points) if h_points is not None else [x + Fraction(1, 11) for x in _grid(dh + 1)]
    if len(set(cs)) < dc + 1 or len(set(hs)) < dh + 1:
        raise ValueError("grid too small for the degree bound")
    return all(f(c, h) == g(c, h) for c, h in itertools.product(cs, hs))


def poly_identity_test(a: PolyCH, b: PolyCH, deg_bound: tuple[int, int]) -> bool:
    """Test ``a == b`` by evaluation on a grid sized from ``deg_bound``."""
    for p in (a, b):
        if p.degree_c() > deg_bound[0] or p.degree_h() > deg_bound[1]:
            raise DegreeBoundError(f"{p} exceeds degree bound {deg_bound}")
    return grid_identity(a, b, deg_bound)


def interpolate_c(samples: Iterable[tuple[Fraction, Fraction]]) -> PolyCH:
    """Lagrange interpolation of values at distinct c-points, as a PolyCH in c."""
    pts = [(as_rat(x), as_rat(y)) for x, y in samples]
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation nodes must be distinct")
    result = PolyCH()
    for i, (xi, yi) in enumerate(pts):
        basis = PolyCH.const(yi)
        for j, (xj, _) in enumerate(pts):
            if j != i:
                basis = basis * ((C - xj) / (xi - xj))
        result = result + basis
    return result
