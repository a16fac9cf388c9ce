"""Unitarity classification in the (c, h) plane.

Discrete series enumeration, intersections of vanishing curves, first
intersectors, and a point classifier that backs every ghost verdict with an
explicit negative-norm vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Optional

from .exactnum import HalfInt, as_rat, format_rat
from .gramkac import c_from_m, gram_at, h_from_m, rank_kernel_signature
from .nsalgebra import Ambient, VermaVector, form


class InvalidLabel(ValueError):
    pass


def validate_label(m: int, p: int, q: int):
    if not (isinstance(m, int) and m >= 2):
        raise InvalidLabel(f"m={m} must be an integer >= 2")
    if not (1 <= p <= m - 1 and 1 <= q <= m + 1):
        raise InvalidLabel(f"(p,q)=({p},{q}) out of range for m={m}")
    if (p - q) % 2:
        raise InvalidLabel(f"(p,q)=({p},{q}) violates p = q mod 2")


@dataclass(frozen=True)
class DiscreteSeriesPoint:
    m: int
    p: int
    q: int
    c: Fraction = field(init=False)
    h: Fraction = field(init=False)

    def __post_init__(self):
        validate_label(self.m, self.p, self.q)
        object.__setattr__(self, "c", c_from_m(self.m))
        object.__setattr__(self, "h", h_from_m(self.m, self.p, self.q))

    @property
    def p_prime(self) -> int:
        return self.m - self.p

    @property
    def q_prime(self) -> int:
        return self.m + 2 - self.q

    def dual(self) -> "DiscreteSeriesPoint":
        return DiscreteSeriesPoint(self.m, self.p_prime, self.q_prime)

    def canonical(self) -> "DiscreteSeriesPoint":
        """The lexicographically smaller of the label and its dual."""
        d = self.dual()
        return self if (self.p, self.q) <= (d.p, d.q) else d

    def to_json(self) -> dict:
        return {
            "m": self.m, "p": self.p, "q": self.q,
            "c": format_rat(self.c), "h": format_rat(self.h),
            "p_prime": self.p_prime, "q_prime": self.q_prime,
        }


def discrete_labels(m: int):
    for p in range(1, m):
        for q in range(1, m + 2):
            if (p - q) % 2 == 0:
                yield p, q


def discrete_series(m_max: int, dedupe: bool = False) -> list[DiscreteSeriesPoint]:
    if m_max < 2:
        raise ValueError("m_max must be >= 2")
    out = []
    for m in range(2, m_max + 1):
        seen = set()
        for p, q in discrete_labels(m):
            pt = DiscreteSeriesPoint(m, p, q)
            if dedupe:
                if pt.h in seen:
                    continue
                seen.add(pt.h)
                pt = pt.canonical()
            out.append(pt)
    return out


# ---------------------------------------------------------------------------
# curve intersections

@dataclass(frozen=True)
class Intersection:
    pq: tuple
    pq_prime: tuple
    m_plus: Optional[Fraction]
    m_minus: Optional[Fraction]

    def points(self) -> list[Fraction]:
        return [m for m in (self.m_plus, self.m_minus) if m is not None]


def curve_intersections(p: int, q: int, pp: int, qq: int) -> Intersection:
    """Values of m where C_pq meets C_p'q' (poles m = 0, -2 reported as None)."""
    if (p, q) == (pp, qq):
        raise ValueError("labels must differ")
    for a, b in ((p, q), (pp, qq)):
        if a <= 0 or b <= 0 or (a - b) % 2:
            raise ValueError(f"({a},{b}) is not a curve label")

    def branch(sign: int) -> Optional[Fraction]:
        den = (p - q) + sign * (pp - qq)
        if den == 0:
            return None
        m = Fraction(2 * (-sign * pp - p), den)
        if m in (0, -2):
            return None
        if h_from_m(m, p, q) != h_from_m(m, pp, qq):
            raise ArithmeticError(f"intersection check failed at m={m}")
        return m

    # when p = q and p' = q' both denominators vanish; such curves only share
    # the poles, so both branches come back as None
    return Intersection((p, q), (pp, qq), branch(+1), branch(-1))


def kappa(p: int, q: int) -> int:
    # q = p + 1 is impossible when p = q mod 2
    assert q != p + 1, "q = p + 1 cannot occur for p = q mod 2"
    return 1 if q < p + 1 else 0


def first_intersectors(p: int, q: int, k_max: int) -> list[tuple[int, int, int]]:
    """(p', q', m) for the curves C_{q-1+k, p+1+k}, k >= kappa, meeting C'_pq."""
    if p <= 0 or q <= 0 or (p - q) % 2:
        raise ValueError(f"({p},{q}) is not a curve label")
    k0 = kappa(p, q)
    return [(q - 1 + k, p + 1 + k, p + q + k - 1) for k in range(k0, k_max + 1)]


def first_intersection_points(m_max: int, k_offset: int = 0) -> set:
    """(c, h) of all first intersections with m <= m_max.

    ``k_offset`` shifts the start of the k range (used to show the rule is tight).
    """
    pts = set()
    for p in range(1, m_max + 1):
        for q in range(1, m_max + 2):
            if (p - q) % 2:
                continue
            k = kappa(p, q) + k_offset
            while p + q + k - 1 <= m_max:
                m = p + q + k - 1
                if m >= 2:
                    pts.add((c_from_m(m), h_from_m(m, p, q)))
                k += 1
    return pts


def first_intersections_equal_series(m_max: int, k_offset: int = 0) -> bool:
    series = {(pt.c, pt.h) for pt in discrete_series(m_max)}
    return first_intersection_points(m_max, k_offset) == series


def wassermann_inequalities(m_max: int) -> bool:
    """h + max(pq/2, p'q'/2) > m^2/8 and h <= m(m-2)/8 on every discrete label."""
    for pt in discrete_series(m_max):
        big_m = max(Fraction(pt.p * pt.q, 2), Fraction(pt.p_prime * pt.q_prime, 2))
        if not pt.h + big_m > Fraction(pt.m * pt.m, 8):
            return False
        if not pt.h <= Fraction(pt.m * (pt.m - 2), 8):
            return False
    return True


# ---------------------------------------------------------------------------
# classification

@dataclass(frozen=True)
class Classification:
    verdict: str  # unitary-continuum | unitary-discrete | ghost | undetermined
    c: Fraction
    h: Fraction
    point: Optional[DiscreteSeriesPoint] = None
    level: Optional[Fraction] = None
    witness: Optional[VermaVector] = None
    norm: Optional[Fraction] = None

    def to_json(self) -> dict:
        out = {"c": format_rat(self.c), "h": format_rat(self.h), "verdict": self.verdict}
        if self.point is not None:
            out.update(m=self.point.m, p=self.point.p, q=self.point.q)
        if self.level is not None:
            out["level"] = format_rat(self.level)
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
            out["norm"] = format_rat(self.norm)
        return out


def rational_sqrt(x: Fraction) -> Optional[Fraction]:
    if x < 0:
        return None
    n, d = isqrt(x.numerator), isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


def invert_c(c) -> Optional[Fraction]:
    """Positive root m of c_m = c (for 0 <= c < 3/2) when it is rational."""
    c = as_rat(c)
    if not 0 <= c < Fraction(3, 2):
        return None
    root = rational_sqrt(1 + 24 / (3 - 2 * c))
    return None if root is None else root - 1


def match_label(m: int, h) -> Optional[DiscreteSeriesPoint]:
    """The canonical discrete label at (c_m, h), if there is one.

    Solves ((m+2)p - mq)^2 = 8m(m+2)h + 4 for x = (m+2)p - mq instead of
    scanning every label.
    """
    h = as_rat(h)
    x = rational_sqrt(8 * m * (m + 2) * h + 4)
    if x is None or x.denominator != 1:
        return None
    for p in range(1, m):
        for target in (int(x), -int(x)):
            num = (m + 2) * p - target
            if num % m == 0:
                q = num // m
                if 1 <= q <= m + 1 and (p - q) % 2 == 0:
                    return DiscreteSeriesPoint(m, p, q).canonical()
    return None


def _vector(word, coef, c, h) -> VermaVector:
    amb = Ambient.point(c, h)
    return VermaVector._raw({word: coef}, amb)


def _l_witness_level(c: Fraction, h: Fraction) -> int:
    n = 1
    while 2 * n * h + c * Fraction(n * (n * n - 1), 12) >= 0:
        n += 1
    return n


def classify(c, h, max_level=3) -> Classification:
    c, h = as_rat(c), as_rat(h)
    top = HalfInt.of(max_level)
    if top.twice < 1:
        raise ValueError("max_level must be at least 1/2")
    if h < 0:
        w = _vector((1,), 1, c, h)
        return Classification("ghost", c, h, level=Fraction(1, 2), witness=w, norm=2 * h)
    if c < 0:
        n = _l_witness_level(c, h)
        w = _vector((2 * n,), 1, c, h)
        norm = 2 * n * h + c * Fraction(n * (n * n - 1), 12)
        return Classification("ghost", c, h, level=Fraction(n), witness=w, norm=norm)
    if c >= Fraction(3, 2):
        return Classification("unitary-continuum", c, h)
    m = invert_c(c)
    if m is not None and m.denominator == 1 and m >= 2:
        mi = int(m)
        hit = match_label(mi, h)
        if hit is not None:
            return Classification("unitary-discrete", c, h, point=hit)
    for t in range(1, top.twice + 1):
        inertia = rank_kernel_signature(gram_at(HalfInt(t), c, h))
        wit = inertia.negative_witness()
        if wit is not None:
            vec, norm = wit
            return Classification("ghost", c, h, level=Fraction(t, 2), witness=vec, norm=norm)
    return Classification("undetermined", c, h, level=top.to_fraction())


def witness_norm(cl: Classification) -> Fraction:
    """Re-evaluate a ghost witness's norm through the contravariant form."""
    return form(cl.witness, cl.witness)


def region_sign_profile(c, h, pairs) -> dict:
    """Signs of phi_pq at (c, h); region membership is decided from these."""
    from .gramkac import phi

    return {(p, q): (phi(p, q)(c, h) > 0) - (phi(p, q)(c, h) < 0) for p, q in pairs}
