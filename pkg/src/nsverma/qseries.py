"""Truncated formal series with rational exponents, theta functions, characters.

A series truncated at ``order`` stores exactly the terms with t-exponent
strictly below ``order``; every operation propagates the smallest truncation.
Two-variable identities are always checked in multiplied-through form, never
by dividing Laurent series.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, isqrt, lcm
from typing import Callable, Iterator, Mapping

from .exactnum import as_rat, format_rat


class ExponentModulusError(ValueError):
    pass


def _denom_ok(e: Fraction, modulus: int) -> bool:
    return (e * modulus).denominator == 1


class PuiseuxSeries:
    """Sum of c_e t^e over rational e < truncation."""

    __slots__ = ("terms", "truncation", "modulus")

    def __init__(self, terms: Mapping | None, truncation, modulus: int = 1):
        self.truncation = as_rat(truncation)
        self.modulus = modulus
        clean = {}
        for e, v in (terms or {}).items():
            e, v = as_rat(e), as_rat(v)
            if not _denom_ok(e, modulus):
                raise ExponentModulusError(f"exponent {e} incompatible with modulus {modulus}")
            if v and e < self.truncation:
                clean[e] = clean.get(e, 0) + v
        self.terms = {e: v for e, v in clean.items() if v}

    @classmethod
    def one(cls, truncation) -> "PuiseuxSeries":
        return cls({0: 1}, truncation)

    @classmethod
    def monomial(cls, exp, truncation, coef=1) -> "PuiseuxSeries":
        exp = as_rat(exp)
        return cls({exp: coef}, truncation, exp.denominator)

    def coefficient(self, e) -> Fraction:
        e = as_rat(e)
        if e >= self.truncation:
            raise ValueError(f"t^{e} lies at or beyond the truncation {self.truncation}")
        return self.terms.get(e, Fraction(0))

    def _mod(self, other) -> int:
        return lcm(self.modulus, other.modulus)

    def __add__(self, other: "PuiseuxSeries"):
        out = dict(self.terms)
        for e, v in other.terms.items():
            out[e] = out.get(e, 0) + v
        return PuiseuxSeries(out, min(self.truncation, other.truncation), self._mod(other))

    def __neg__(self):
        return PuiseuxSeries({e: -v for e, v in self.terms.items()}, self.truncation, self.modulus)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return PuiseuxSeries({e: v * other for e, v in self.terms.items()}, self.truncation, self.modulus)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        if not self.terms or not other.terms:
            lo = min(self.truncation, other.truncation)
            return PuiseuxSeries({}, lo, self._mod(other))
        # a term e1 of self is exact only below self.truncation; the product is
        # reliable below min(T1 + min_e2, T2 + min_e1)
        trunc = min(
            self.truncation + min(other.terms),
            other.truncation + min(self.terms),
        )
        out: dict = {}
        for e1, v1 in self.terms.items():
            for e2, v2 in other.terms.items():
                e = e1 + e2
                if e < trunc:
                    out[e] = out.get(e, 0) + v1 * v2
        return PuiseuxSeries(out, trunc, self._mod(other))

    __rmul__ = __mul__

    def shift(self, e) -> "PuiseuxSeries":
        """Multiply by t^e."""
        e = as_rat(e)
        mod = lcm(self.modulus, e.denominator)
        return PuiseuxSeries({k + e: v for k, v in self.terms.items()}, self.truncation + e, mod)

    def truncate(self, order) -> "PuiseuxSeries":
        return PuiseuxSeries(self.terms, min(as_rat(order), self.truncation), self.modulus)

    def agrees_with(self, other: "PuiseuxSeries") -> bool:
        lo = min(self.truncation, other.truncation)
        a = {e: v for e, v in self.terms.items() if e < lo}
        b = {e: v for e, v in other.terms.items() if e < lo}
        return a == b

    def sorted_terms(self) -> list:
        return sorted(self.terms.items())

    def to_json(self) -> list[dict]:
        return [{"exp": format_rat(e), "coef": format_rat(v)} for e, v in self.sorted_terms()]

    def __repr__(self):
        body = " + ".join(f"{format_rat(v)}*t^{format_rat(e)}" for e, v in self.sorted_terms())
        return f"PuiseuxSeries({body or '0'} + O(t^{format_rat(self.truncation)}))"


class TwoVarSeries:
    """Sum of c t^a z^b, truncated in the t-exponent only."""

    __slots__ = ("terms", "truncation")

    def __init__(self, terms: Mapping | None, truncation):
        self.truncation = as_rat(truncation)
        clean: dict = {}
        for (a, b), v in (terms or {}).items():
            a, b, v = as_rat(a), as_rat(b), as_rat(v)
            if v and a < self.truncation:
                clean[(a, b)] = clean.get((a, b), 0) + v
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def from_t(cls, s: PuiseuxSeries) -> "TwoVarSeries":
        return cls({(e, 0): v for e, v in s.terms.items()}, s.truncation)

    def _min_t(self):
        return min((a for a, _ in self.terms), default=None)

    def __add__(self, other):
        if isinstance(other, PuiseuxSeries):
            other = TwoVarSeries.from_t(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return TwoVarSeries(out, min(self.truncation, other.truncation))

    def __neg__(self):
        return TwoVarSeries({k: -v for k, v in self.terms.items()}, self.truncation)

    def __sub__(self, other):
        if isinstance(other, PuiseuxSeries):
            other = TwoVarSeries.from_t(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TwoVarSeries({k: v * other for k, v in self.terms.items()}, self.truncation)
        if isinstance(other, PuiseuxSeries):
            other = TwoVarSeries.from_t(other)
        m1, m2 = self._min_t(), other._min_t()
        if m1 is None or m2 is None:
            return TwoVarSeries({}, min(self.truncation, other.truncation))
        trunc = min(self.truncation + m2, other.truncation + m1)
        out: dict = {}
        for (a1, b1), v1 in self.terms.items():
            for (a2, b2), v2 in other.terms.items():
                a = a1 + a2
                if a < trunc:
                    k = (a, b1 + b2)
                    out[k] = out.get(k, 0) + v1 * v2
        return TwoVarSeries(out, trunc)

    __rmul__ = __mul__

    def shift_t(self, e) -> "TwoVarSeries":
        e = as_rat(e)
        return TwoVarSeries({(a + e, b): v for (a, b), v in self.terms.items()}, self.truncation + e)

    def invert_z(self) -> "TwoVarSeries":
        return TwoVarSeries({(a, -b): v for (a, b), v in self.terms.items()}, self.truncation)

    def truncate(self, order) -> "TwoVarSeries":
        return TwoVarSeries(self.terms, min(as_rat(order), self.truncation))

    def agrees_with(self, other: "TwoVarSeries") -> bool:
        lo = min(self.truncation, other.truncation)
        a = {k: v for k, v in self.terms.items() if k[0] < lo}
        b = {k: v for k, v in other.terms.items() if k[0] < lo}
        return a == b

    def __repr__(self):
        body = " + ".join(
            f"{format_rat(v)}*t^{format_rat(a)}*z^{format_rat(b)}" for (a, b), v in sorted(self.terms.items())
        )
        return f"TwoVarSeries({body or '0'} + O(t^{format_rat(self.truncation)}))"


@dataclass(frozen=True)
class CharacterSeries:
    """t^prefactor_exponent * normalized."""

    prefactor_exponent: Fraction
    normalized: PuiseuxSeries
    prefactor_text: str = ""

    def to_json(self) -> dict:
        return {
            "prefactor": self.prefactor_text or format_rat(self.prefactor_exponent),
            "terms": self.normalized.to_json(),
        }


# ---------------------------------------------------------------------------
# chi_NS and theta functions

def chi_ns(order) -> PuiseuxSeries:
    """prod_{n>=1} (1 + t^{n-1/2}) / (1 - t^n), exact below ``order``."""
    order = as_rat(order)
    if order <= 0:
        raise ValueError("order must be positive")
    result = PuiseuxSeries.one(order)
    n = 1
    while n - Fraction(1, 2) < order:
        result = result * PuiseuxSeries({0: 1, n - Fraction(1, 2): 1}, order, 2)
        if n < order:
            geo = {Fraction(k * n): 1 for k in range(0, floor(order / n) + 1)}
            result = result * PuiseuxSeries(geo, order, 2)
        n += 1
    return result


def _quadratic_range(center: Fraction, scale: Fraction, order: Fraction) -> Iterator[int]:
    """Integers j with scale * (j - center)^2 < order (scale > 0)."""
    if order <= 0:
        return iter(())
    # |j - center| < sqrt(order / scale); widen by one and filter exactly
    bound = isqrt(floor(order / scale)) + 2
    base = floor(center)
    return (j for j in range(base - bound, base + bound + 1) if scale * (j - center) ** 2 < order)


def theta(order) -> TwoVarSeries:
    """sum_k t^{k^2/2} z^k."""
    order = as_rat(order)
    return TwoVarSeries(
        {(Fraction(k * k, 2), k): 1 for k in _quadratic_range(Fraction(0), Fraction(1, 2), order)}, order
    )


def theta_nm(n: int, m: int, order) -> TwoVarSeries:
    """sum over k in n/2m + Z of t^{m k^2} z^{m k}."""
    if m < 1:
        raise ValueError("theta_nm needs m >= 1")
    order = as_rat(order)
    shift = Fraction(n, 2 * m)
    terms = {}
    for j in _quadratic_range(-shift, Fraction(m), order):
        k = shift + j
        terms[(m * k * k, m * k)] = 1
    return TwoVarSeries(terms, order)


def jacobi_sides(order) -> tuple[TwoVarSeries, TwoVarSeries]:
    """(sum side, product side) of the triple product identity."""
    order = as_rat(order)
    lhs = theta(order)
    rhs = TwoVarSeries({(0, 0): 1}, order)
    n = 1
    while n - Fraction(1, 2) < order:
        e = n - Fraction(1, 2)
        rhs = rhs * TwoVarSeries({(0, 0): 1, (e, 1): 1}, order)
        rhs = rhs * TwoVarSeries({(0, 0): 1, (e, -1): 1}, order)
        rhs = rhs * TwoVarSeries({(0, 0): 1, (n, 0): -1}, order)
        n += 1
    return lhs, rhs


def _compare(lhs, rhs, floor: Fraction) -> bool:
    """Term-for-term agreement, refusing to compare below the requested order."""
    if min(lhs.truncation, rhs.truncation) < floor:
        raise ArithmeticError(f"series lost precision below t^{format_rat(floor)}")
    return lhs.agrees_with(rhs)


def jacobi_check(order) -> bool:
    lhs, rhs = jacobi_sides(order)
    return _compare(lhs, rhs, as_rat(order))


# ---------------------------------------------------------------------------
# alpha, gamma and the product formula

def alpha(m: int, p: int, q: int, n: int) -> Fraction:
    u = m * (m + 2)
    return Fraction((2 * u * n - (m + 2) * p + m * q) ** 2, 8 * u)


def gamma(m: int, p: int, q: int, n: int) -> Fraction:
    u = m * (m + 2)
    return Fraction((2 * u * n - (m + 2) * p + m * q) ** 2 - 4, 8 * u)


def _exponent_sum(fn: Callable[[int], Fraction], m: int, p: int, q: int, order: Fraction, offset=Fraction(0)):
    """Integers n with fn(n) - offset < order, for fn quadratic in n with vertex known."""
    u = m * (m + 2)
    center = Fraction((m + 2) * p - m * q, 2 * u)
    bound = isqrt(max(0, floor((order + offset + 1) * 8 * u))) // (2 * u) + 2
    base = floor(center)
    return [n for n in range(base - bound, base + bound + 1) if fn(n) - offset < order]


def alpha_sum(m: int, p: int, q: int, order, alpha_fn=alpha) -> PuiseuxSeries:
    """sum_n t^{alpha_pq^m(n)} below ``order``."""
    order = as_rat(order)
    u = m * (m + 2)
    terms: dict = {}
    for n in _exponent_sum(lambda n: alpha(m, p, q, n), m, p, q, order):
        e = alpha_fn(m, p, q, n)
        if e < order:
            terms[e] = terms.get(e, 0) + 1
    return PuiseuxSeries(terms, order, 8 * u)


def product_formula_sides(p: int, m: int, order, alpha_fn=alpha):
    order = as_rat(order)
    lhs = theta(order) * theta_nm(p, m, order)
    rhs = TwoVarSeries({}, order)
    for q in range(0, 2 * (m + 2)):
        if (q - p) % 2:
            continue
        rhs = rhs + alpha_sum(m, p, q, order, alpha_fn) * theta_nm(q, m + 2, order)
    return lhs, rhs


def product_formula_check(p: int, m: int, order, alpha_fn=alpha) -> bool:
    if m < 1 or not 0 <= p < 2 * m:
        raise ValueError("product formula needs m >= 1 and 0 <= p < 2m")
    lhs, rhs = product_formula_sides(p, m, order, alpha_fn)
    return _compare(lhs, rhs, as_rat(order))


# ---------------------------------------------------------------------------
# multiplicity-space characters

def _check_discrete(m: int, p: int, q: int):
    from .fqs import validate_label

    validate_label(m, p, q)


def gamma_normalized(m: int, p: int, q: int, order) -> PuiseuxSeries:
    """t^{-h} Gamma_pq^m(t) below ``order`` (integer half-steps only)."""
    order = as_rat(order)
    h = gamma(m, p, q, 0)
    terms: dict = {}
    for sign, pp in ((1, p), (-1, -p)):
        fn = lambda n, pp=pp: gamma(m, pp, q, n)
        for n in _exponent_sum(fn, m, pp, q, order, h):
            e = fn(n) - h
            terms[e] = terms.get(e, 0) + sign
    return PuiseuxSeries(terms, order, 2)


def mult_character(m: int, p: int, q: int, order) -> CharacterSeries:
    """Character t^{-c_m/24} chi_NS Gamma_pq^m of the multiplicity space."""
    from .gramkac import c_from_m, h_from_m

    _check_discrete(m, p, q)
    order = as_rat(order)
    c, h = c_from_m(m), h_from_m(m, p, q)
    norm = chi_ns(order) * gamma_normalized(m, p, q, order)
    text = f"{format_rat(h)}-{format_rat(c / 24)}"
    return CharacterSeries(h - c / 24, norm.truncate(order), text)


def rank_character_crosscheck(m: int, p: int, q: int, max_level) -> bool:
    """Gram rank at (c_m, h_pq^m) equals the character coefficient, level by level."""
    from .gramkac import c_from_m, gram_at, h_from_m, rank_kernel_signature

    top = as_rat(max_level)
    if top > 3:
        raise ValueError("cross-check limited to level 3")
    ch = mult_character(m, p, q, top + Fraction(1, 2)).normalized
    c, h = c_from_m(m), h_from_m(m, p, q)
    for t in range(0, int(2 * top) + 1):
        n = Fraction(t, 2)
        rank = rank_kernel_signature(gram_at(n, c, h)).rank
        if rank != ch.coefficient(n):
            return False
    return True


def rank_profile(m: int, p: int, q: int, max_level) -> list[tuple[Fraction, int, Fraction]]:
    """(level, Gram rank, character coefficient) rows for reporting."""
    from .gramkac import c_from_m, gram_at, h_from_m, rank_kernel_signature

    top = as_rat(max_level)
    ch = mult_character(m, p, q, top + Fraction(1, 2)).normalized
    c, h = c_from_m(m), h_from_m(m, p, q)
    rows = []
    for t in range(0, int(2 * top) + 1):
        n = Fraction(t, 2)
        rows.append((n, rank_kernel_signature(gram_at(n, c, h)).rank, ch.coefficient(n)))
    return rows


# ---------------------------------------------------------------------------
# coset and Frenkel identities (denominator-free)

FNS_PREFACTOR = Fraction(-1, 16)


def f_series(m: int, p: int, q: int, order) -> PuiseuxSeries:
    """chi_NS * sum_n (t^{alpha_pq} - t^{alpha_-pq}); the t^{-1/16} is kept apart."""
    order = as_rat(order)
    diff = alpha_sum(m, p, q, order) - alpha_sum(m, -p, q, order)
    return chi_ns(order) * diff


def weyl_numerator(n: int, m: int, order) -> TwoVarSeries:
    return theta_nm(n, m, order) - theta_nm(-n, m, order)


def coset_sides(j, ell: int, order, f_fn=f_series):
    """Both sides of the tensor decomposition, multiplied by the Weyl-Kac denominator.

    Each side is returned with its t^{-1/16} prefactor already applied.
    """
    order = as_rat(order)
    p = int(2 * as_rat(j) + 1)
    m = ell + 2
    if not 1 <= p <= m - 1:
        raise ValueError("need p = 2j + 1 <= m - 1 with m = ell + 2")
    lhs = (chi_ns(order) * theta(order)) * weyl_numerator(p, m, order)
    rhs = TwoVarSeries({}, order)
    for q in range(1, m + 2):
        if (q - p) % 2:
            continue
        rhs = rhs + f_fn(m, p, q, order) * weyl_numerator(q, m + 2, order)
    return lhs.shift_t(FNS_PREFACTOR), rhs.shift_t(FNS_PREFACTOR)


def coset_identity_check(j, ell: int, order, f_fn=f_series) -> bool:
    lhs, rhs = coset_sides(j, ell, order, f_fn)
    return _compare(lhs, rhs, as_rat(order) + FNS_PREFACTOR)


def frenkel_sides(order, q_values=(1, 3)):
    order = as_rat(order)
    lhs = (chi_ns(order) * theta(order) * weyl_numerator(1, 2, order)).shift_t(FNS_PREFACTOR)
    rhs = TwoVarSeries({}, order)
    for q in q_values:
        rhs = rhs + weyl_numerator(q, 4, order)
    return lhs, rhs


def frenkel_check(order, q_values=(1, 3)) -> bool:
    lhs, rhs = frenkel_sides(order, q_values)
    return _compare(lhs, rhs, as_rat(order) + FNS_PREFACTOR)
