"""Gram matrices of the contravariant form and the Kac determinant.

Symbolic determinants use fraction-free (Bareiss) elimination over Q[c, h];
point-mode work is plain exact Gaussian elimination over Q. Inertia comes
from a symmetric congruence reduction, so no eigenvalues are ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .exactnum import C, H, HalfInt, PolyCH, as_rat, format_rat, grid_identity, interpolate_c
from .nsalgebra import (
    Ambient,
    PBWMonomial,
    VermaVector,
    dimension_d,
    enumerate_basis,
    inner_product,
)


class KacIdentityError(AssertionError):
    """The Kac product formula failed; carries the residual."""

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


# ---------------------------------------------------------------------------
# Gram matrices

@dataclass(frozen=True)
class GramMatrix:
    level: HalfInt
    basis: tuple
    entries: tuple  # tuple of row tuples
    ambient: Ambient = field(compare=False)

    @property
    def size(self) -> int:
        return len(self.basis)

    def to_json(self) -> dict:
        def enc(x):
            return x.to_json() if isinstance(x, PolyCH) else format_rat(x)

        return {
            "level": str(self.level),
            "basis": [str(b) for b in self.basis],
            "entries": [[enc(x) for x in row] for row in self.entries],
        }


def gram_matrix(n, ambient: Ambient | None = None) -> GramMatrix:
    """Matrix of the contravariant form on the level-n subspace."""
    ambient = ambient or Ambient.symbolic()
    level = HalfInt.of(n)
    if ambient.mode == "symbolic":
        return _symbolic_gram(level.twice)
    basis = tuple(enumerate_basis(level))
    return GramMatrix(level, basis, _entries(basis, ambient), ambient)


def _entries(basis: Sequence[PBWMonomial], ambient: Ambient) -> tuple:
    d = len(basis)
    rows = [[None] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            x = inner_product(basis[i], basis[j], ambient)
            rows[i][j] = rows[j][i] = x
    return tuple(tuple(r) for r in rows)


@lru_cache(maxsize=None)
def _symbolic_gram(twice: int) -> GramMatrix:
    amb = Ambient.symbolic()
    basis = tuple(enumerate_basis(HalfInt(twice)))
    return GramMatrix(HalfInt(twice), basis, _entries(basis, amb), amb)


def gram_at(n, c, h) -> GramMatrix:
    """Point-mode Gram matrix obtained by evaluating the cached symbolic one."""
    c, h = as_rat(c), as_rat(h)
    sym = gram_matrix(n)
    entries = tuple(tuple(x(c, h) for x in row) for row in sym.entries)
    return GramMatrix(sym.level, sym.basis, entries, Ambient.point(c, h))


# ---------------------------------------------------------------------------
# determinants

def _bareiss(rows: list[list], one, zero):
    a = [list(r) for r in rows]
    d = len(a)
    if d == 0:
        return one
    sign = 1
    prev = one
    for k in range(d - 1):
        if a[k][k] == zero:
            swap = next((i for i in range(k + 1, d) if a[i][k] != zero), None)
            if swap is None:
                return zero
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, d):
            for j in range(k + 1, d):
                num = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = num.divexact(prev) if isinstance(num, PolyCH) else num / prev
        prev = a[k][k]
    det = a[d - 1][d - 1]
    return det if sign > 0 else -det


def det(M: GramMatrix):
    if M.ambient.mode == "symbolic":
        if M == _symbolic_gram(M.level.twice):
            return _symbolic_det(M.level.twice)
        return _bareiss([list(r) for r in M.entries], PolyCH.const(1), PolyCH())
    return det_rational(M.entries)


@lru_cache(maxsize=None)
def _symbolic_det(twice: int) -> PolyCH:
    M = _symbolic_gram(twice)
    return _bareiss([list(r) for r in M.entries], PolyCH.const(1), PolyCH())


def det_rational(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    a = [[Fraction(x) for x in r] for r in rows]
    d = len(a)
    result = Fraction(1)
    for k in range(d):
        piv = next((i for i in range(k, d) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            result = -result
        result *= a[k][k]
        for i in range(k + 1, d):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k, d):
                    a[i][j] -= f * a[k][j]
    return result


# ---------------------------------------------------------------------------
# rank, kernel, inertia

@dataclass(frozen=True)
class Inertia:
    rank: int
    kernel: tuple  # VermaVectors spanning the radical
    signature: tuple  # (n_plus, n_minus, n_zero)
    diagonal: tuple  # congruence diagonal, in elimination order
    transform: tuple  # rows are the vectors realizing the diagonal

    def negative_witness(self):
        """(vector, norm) for the first negative diagonal entry, or None."""
        for row, dval in zip(self.transform, self.diagonal):
            if dval < 0:
                return row, dval
        return None


def congruence_diagonalize(rows: Sequence[Sequence[Fraction]]):
    """Symmetric elimination: returns (T, D) with T M T^t = diag(D)."""
    d = len(rows)
    a = [[Fraction(x) for x in r] for r in rows]
    t = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]

    def swap(i, j):
        if i == j:
            return
        a[i], a[j] = a[j], a[i]
        for r in a:
            r[i], r[j] = r[j], r[i]
        t[i], t[j] = t[j], t[i]

    diag = []
    for k in range(d):
        piv = next((i for i in range(k, d) if a[i][i] != 0), None)
        if piv is None:
            pair = next(
                ((i, j) for i in range(k, d) for j in range(i + 1, d) if a[i][j] != 0), None
            )
            if pair is None:
                diag.extend([Fraction(0)] * (d - k))
                break
            i, j = pair
            # row_i += row_j, col_i += col_j: new a_ii = 2 a_ij != 0
            for col in range(d):
                a[i][col] += a[j][col]
            for r in range(d):
                a[r][i] += a[r][j]
            t[i] = [x + y for x, y in zip(t[i], t[j])]
            piv = i
        swap(k, piv)
        p = a[k][k]
        diag.append(p)
        for i in range(k + 1, d):
            f = a[i][k] / p
            if f:
                for col in range(d):
                    a[i][col] -= f * a[k][col]
                for r in range(d):
                    a[r][i] -= f * a[r][k]
                t[i] = [x - f * y for x, y in zip(t[i], t[k])]
    return t, diag


def rank_kernel_signature(M: GramMatrix) -> Inertia:
    if M.ambient.mode != "point":
        raise ValueError("inertia needs a point-mode Gram matrix")
    t, diag = congruence_diagonalize(M.entries)
    to_vec = lambda row: VermaVector._raw(
        {b.word: x for b, x in zip(M.basis, row) if x}, M.ambient
    )
    vectors = tuple(to_vec(row) for row in t)
    plus = sum(1 for x in diag if x > 0)
    minus = sum(1 for x in diag if x < 0)
    zero = len(diag) - plus - minus
    kernel = tuple(v for v, x in zip(vectors, diag) if x == 0)
    return Inertia(plus + minus, kernel, (plus, minus, zero), tuple(diag), vectors)


def kernel_basis(n, c, h) -> tuple:
    return rank_kernel_signature(gram_at(n, c, h)).kernel


# ---------------------------------------------------------------------------
# curves h = h_pq(c)

def c_from_m(m) -> Fraction:
    m = as_rat(m)
    if m in (0, -2):
        raise ZeroDivisionError("c_m has poles at m = 0 and m = -2")
    return Fraction(3, 2) * (1 - 8 / (m * (m + 2)))


def h_from_m(m, p: int, q: int) -> Fraction:
    m = as_rat(m)
    if m in (0, -2):
        raise ZeroDivisionError("h_pq^m has poles at m = 0 and m = -2")
    return (((m + 2) * p - m * q) ** 2 - 4) / (8 * m * (m + 2))


def h_sum(p: int, q: int) -> PolyCH:
    """h_pq + h_qp as a polynomial in c."""
    x = 1 - C * Fraction(2, 3)
    return x * Fraction(p * p + q * q - 2, 16) + Fraction((p - q) ** 2, 4)


def printed_h_product(p: int, q: int) -> PolyCH:
    """The product h_pq * h_qp in the form displayed in the source (known faulty)."""
    x = 1 - C * Fraction(2, 3)
    d2 = 2 * (p - q) ** 2
    return (d2 - x * (p * q - p - q - 1)) * (d2 - x * (p * q + p + q + 1)) / 256


INTERP_NODES = (3, 4, 5)
CHECK_NODES = tuple(range(6, 16))


@lru_cache(maxsize=None)
def h_product(p: int, q: int) -> PolyCH:
    """h_pq * h_qp as a polynomial in c, interpolated from the m-parametrization.

    The product is quadratic in 1 - 2c/3, so three nodes determine it; the
    result is re-checked on ten further values of m.
    """
    samples = [(c_from_m(m), h_from_m(m, p, q) * h_from_m(m, q, p)) for m in INTERP_NODES]
    poly = interpolate_c(samples)
    for m in CHECK_NODES:
        if poly(c_from_m(m), 0) != h_from_m(m, p, q) * h_from_m(m, q, p):
            raise ArithmeticError(f"interpolated product for ({p},{q}) fails at m={m}")
    return poly


@dataclass(frozen=True)
class CurveData:
    p: int
    q: int

    def __post_init__(self):
        if self.p <= 0 or self.q <= 0 or (self.p - self.q) % 2:
            raise ValueError(f"({self.p},{self.q}) is not a vanishing-curve label")

    def c_at(self, m) -> Fraction:
        return c_from_m(m)

    def h_at(self, m) -> Fraction:
        return h_from_m(m, self.p, self.q)

    @property
    def phi(self) -> PolyCH:
        return phi(min(self.p, self.q), max(self.p, self.q))


def _check_pq(p: int, q: int):
    if p <= 0 or q <= 0:
        raise ValueError("curve labels are positive")
    if (p - q) % 2:
        raise ValueError(f"p={p}, q={q} violate p = q mod 2")


@lru_cache(maxsize=None)
def phi(p: int, q: int) -> PolyCH:
    """The vanishing polynomial of the curve pair C_pq, C_qp (p <= q)."""
    _check_pq(p, q)
    if p > q:
        raise ValueError("phi expects p <= q")
    if p == q:
        return H - (3 - 2 * C) * Fraction(p * p - 1, 48)
    return H * H - h_sum(p, q) * H + h_product(p, q)


def product_formula_erratum(extra_nodes: Sequence[int] = CHECK_NODES) -> dict:
    """Compare the displayed product formula with the explicit h_pq^m at (1,3)."""
    printed = printed_h_product(1, 3)
    fitted = h_product(1, 3)
    exact_vals = {m: h_from_m(m, 1, 3) * h_from_m(m, 3, 1) for m in (2,) + INTERP_NODES + tuple(extra_nodes)}
    printed_ok = all(printed(c_from_m(m), 0) == v for m, v in exact_vals.items())
    fitted_ok = all(fitted(c_from_m(m), 0) == v for m, v in exact_vals.items())
    witness = next(m for m in exact_vals if printed(c_from_m(m), 0) != exact_vals[m]) if not printed_ok else None
    return {
        "printed": printed,
        "interpolated": fitted,
        "printed_consistent": printed_ok,
        "interpolated_consistent": fitted_ok,
        "validated_nodes": len(extra_nodes),
        "witness_m": witness,
    }


# ---------------------------------------------------------------------------
# Kac determinant

@dataclass(frozen=True)
class KacFactorization:
    level: HalfInt
    factors: tuple  # ((p, q, exponent), ...)
    leading: Fraction

    def to_json(self) -> dict:
        return {
            "level": str(self.level),
            "factors": [{"p": p, "q": q, "exp": e} for p, q, e in self.factors],
            "A": format_rat(self.leading),
        }


def curve_pairs(n, ordered: bool = False) -> list[tuple[int, int]]:
    """Pairs (p, q) with 0 < pq/2 <= n and p = q mod 2 (p <= q unless ordered)."""
    bound = HalfInt.of(n).twice  # pq <= 2n
    out = []
    for p in range(1, bound + 1):
        for q in range(1 if ordered else p, bound // p + 1):
            if (p - q) % 2 == 0:
                out.append((p, q))
    return out


def kac_factors(n) -> tuple:
    level = HalfInt.of(n)
    return tuple(
        (p, q, dimension_d(level - Fraction(p * q, 2))) for p, q in curve_pairs(level)
    )


def kac_product(n, phi_fn: Callable[[int, int], PolyCH] = phi) -> PolyCH:
    out = PolyCH.const(1)
    for p, q, e in kac_factors(n):
        out = out * phi_fn(p, q) ** e
    return out


def expected_h_degree(n) -> int:
    """Sum of d(n - pq/2) over ordered pairs; the h-degree of det_n."""
    level = HalfInt.of(n)
    return sum(dimension_d(level - Fraction(p * q, 2)) for p, q in curve_pairs(level, ordered=True))


def degree_check(n) -> bool:
    level = HalfInt.of(n)
    if level.twice > 6:
        raise ValueError("symbolic determinants are limited to level 3")
    return _symbolic_det(level.twice).degree_h() == expected_h_degree(level)


def _leading_ratio(a: PolyCH, b: PolyCH) -> Fraction:
    ka, va = a.leading()
    kb, vb = b.leading()
    if ka != kb:
        raise KacIdentityError(f"leading monomials differ: {ka} vs {kb}", a - b)
    return va / vb


def _det_degree_bound(M: GramMatrix) -> tuple[int, int]:
    # det degree <= sum over rows of the largest entry degree in that row
    dc = sum(max((x.degree_c() for x in row), default=0) for row in M.entries)
    dh = sum(max((x.degree_h() for x in row), default=0) for row in M.entries)
    return max(dc, 0), max(dh, 0)


def kac_verify(n, mode: str = "symbolic", phi_fn: Callable[[int, int], PolyCH] = phi) -> KacFactorization:
    """Check det_n = A_n * prod phi_pq^{d(n - pq/2)} and return the factorization."""
    level = HalfInt.of(n)
    factors = kac_factors(level)
    prod = kac_product(level, phi_fn)
    if mode == "symbolic":
        if level.twice > 6:
            raise ValueError("symbolic Kac verification is limited to level 3")
        d = _symbolic_det(level.twice)
        A = _leading_ratio(d, prod)
        residual = d - prod * A
        if residual:
            raise KacIdentityError(f"det_{level} != A * product", residual)
    elif mode == "pointwise":
        A = _pointwise_constant(level, prod)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if A <= 0:
        raise KacIdentityError(f"A_{level} = {A} is not positive", A)
    return KacFactorization(level, factors, A)


def _pointwise_constant(level: HalfInt, prod: PolyCH) -> Fraction:
    sym = gram_matrix(level)
    bc, bh = _det_degree_bound(sym)
    bc, bh = max(bc, prod.degree_c()), max(bh, prod.degree_h())
    det_at = lambda c, h: det_rational([[x(c, h) for x in row] for row in sym.entries])
    # pick the normalizing point off the vanishing set
    c0, h0 = Fraction(7, 3), Fraction(5, 2)
    p0 = prod(c0, h0)
    if p0 == 0:
        raise KacIdentityError("normalizing point lies on a vanishing curve")
    A = det_at(c0, h0) / p0
    ok = grid_identity(det_at, lambda c, h: A * prod(c, h), (bc, bh))
    if not ok:
        raise KacIdentityError(f"pointwise identity fails at level {level}")
    return A


# ---------------------------------------------------------------------------
# kernels at discrete points

def kernel_dims(c, h, max_level) -> dict:
    """dim K_n(c, h) for n = 1/2, 1, ..., max_level."""
    top = HalfInt.of(max_level).twice
    out = {}
    for t in range(1, top + 1):
        inertia = rank_kernel_signature(gram_at(HalfInt(t), c, h))
        out[Fraction(t, 2)] = len(inertia.kernel)
    return out


def predicted_kernel_profile(m: int, p: int, q: int, max_level) -> dict:
    """Kernel dimensions implied by two singular vectors at pq/2 and p'q'/2."""
    pp, qq = m - p, m + 2 - q
    lo, hi = sorted((Fraction(p * q, 2), Fraction(pp * qq, 2)))
    top = HalfInt.of(max_level).twice
    out = {}
    for t in range(1, top + 1):
        n = Fraction(t, 2)
        if n < lo:
            dim = 0
        elif n < hi:
            dim = dimension_d(n - lo)
        elif n == hi:
            dim = dimension_d(n - lo) + 1
        else:
            raise ValueError("profile only predicted up to max(pq/2, p'q'/2)")
        out[n] = dim
    return out


def kernel_census(m: int, p: int, q: int, max_level) -> dict:
    """Exact dim K_n at (c_m, h_pq^m); raises for non-discrete labels."""
    from .fqs import validate_label

    validate_label(m, p, q)
    pp, qq = m - p, m + 2 - q
    top = max(Fraction(p * q, 2), Fraction(pp * qq, 2))
    if as_rat(HalfInt.of(max_level)) > top:
        raise ValueError(f"max_level must be <= {format_rat(top)}")
    return kernel_dims(c_from_m(m), h_from_m(m, p, q), max_level)

