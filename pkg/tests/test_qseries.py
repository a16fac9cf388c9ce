from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracle import ns_partition_counts
from nsverma.fqs import InvalidLabel, discrete_labels
from nsverma.qseries import (
    ExponentModulusError,
    PuiseuxSeries,
    TwoVarSeries,
    alpha,
    alpha_sum,
    chi_ns,
    coset_identity_check,
    f_series,
    frenkel_check,
    gamma,
    gamma_normalized,
    jacobi_check,
    mult_character,
    product_formula_check,
    rank_character_crosscheck,
    rank_profile,
    theta,
    theta_nm,
)

half = Fraction(1, 2)


def test_chi_ns_matches_partition_count():
    s = chi_ns(Fraction(21, 2))
    counts = ns_partition_counts(20)
    assert [s.coefficient(Fraction(t, 2)) for t in range(21)] == counts
    assert counts[:9] == [1, 1, 1, 2, 3, 4, 5, 7, 10]


def test_truncation_is_strict():
    s = PuiseuxSeries({0: 1, 1: 2, 2: 3}, 2)
    assert s.terms == {0: 1, 1: 2}
    with pytest.raises(ValueError):
        s.coefficient(2)


def test_product_truncation():
    a = PuiseuxSeries({half: 1}, 3, 2)
    b = PuiseuxSeries({0: 1, 1: 1}, 2)
    assert (a * b).truncation == Fraction(5, 2)
    assert (a + b).truncation == 2


@settings(max_examples=40)
@given(
    st.dictionaries(st.integers(0, 8), st.integers(-3, 3), max_size=5),
    st.dictionaries(st.integers(0, 8), st.integers(-3, 3), max_size=5),
)
def test_truncated_product_is_correct_below_truncation(da, db):
    # compare against the product of the untruncated polynomials
    a = PuiseuxSeries({Fraction(k, 2): v for k, v in da.items()}, 3, 2)
    b = PuiseuxSeries({Fraction(k, 2): v for k, v in db.items()}, 3, 2)
    full: dict = {}
    for k1, v1 in da.items():
        for k2, v2 in db.items():
            if Fraction(k1, 2) < 3 and Fraction(k2, 2) < 3:
                e = Fraction(k1 + k2, 2)
                full[e] = full.get(e, 0) + v1 * v2
    prod = a * b
    assert prod.truncation >= 3
    for e, v in prod.terms.items():
        assert full.get(e, 0) == v
    for e, v in full.items():
        if e < prod.truncation and v:
            assert prod.terms[e] == v


def test_modulus_is_enforced():
    with pytest.raises(ExponentModulusError):
        PuiseuxSeries({Fraction(1, 3): 1}, 2, 2)


def test_jacobi_triple_product():
    assert jacobi_check(8)
    assert jacobi_check(half)
    assert jacobi_check(Fraction(13, 2))


@pytest.mark.parametrize("pm", [(1, 2), (1, 3), (2, 3), (1, 4), (0, 1), (3, 4)])
def test_product_formula(pm):
    assert product_formula_check(*pm, 8)


def test_product_formula_detects_mutation():
    def broken(m, p, q, n):
        u = m * (m + 2)
        return Fraction((2 * u * n + m * q) ** 2, 8 * u)

    assert not product_formula_check(1, 2, 6, broken)


def test_product_formula_preconditions():
    with pytest.raises(ValueError):
        product_formula_check(4, 2, 6)


def test_alpha_gamma_values():
    assert gamma(3, 1, 3, 0) == Fraction(1, 10)
    assert gamma(3, -1, 3, 0) == Fraction(8, 5)
    assert gamma(3, -1, 3, -1) == Fraction(21, 10)
    assert gamma(3, 1, 3, 2) == alpha(3, 1, 3, 2) - Fraction(4, 8 * 15)


def test_gamma_normalization_all_labels():
    for m in range(2, 7):
        for p, q in discrete_labels(m):
            a, b = Fraction(p * q, 2), Fraction((m - p) * (m + 2 - q), 2)
            s = gamma_normalized(m, p, q, max(a, b) + 3)
            rest = dict(s.terms)
            for e, v in ((Fraction(0), 1), (a, -1), (b, -1)):
                rest[e] = rest.get(e, 0) - v
            assert all(e > max(a, b) for e, v in rest.items() if v)


def test_theta_symmetries():
    for m in (2, 3, 5):
        for n in range(-4, 5):
            assert theta_nm(-n, m, 7).terms == theta_nm(n, m, 7).invert_z().terms
        for q in range(0, 2 * m + 1):
            assert theta_nm(2 * m - q, m, 7).terms == theta_nm(-q, m, 7).terms


def test_theta_terms():
    t = theta(5)
    assert t.terms[(Fraction(0), Fraction(0))] == 1
    assert t.terms[(Fraction(9, 2), Fraction(3))] == 1
    assert len(t.terms) == 7


def test_f_boundary_cancellations():
    for m in (2, 3, 4, 5):
        for p in range(1, m):
            assert f_series(m, p, 0, 6).terms == {}
            assert f_series(m, p, m + 2, 6).terms == {}


def test_mult_character_examples():
    ch = mult_character(3, 1, 3, Fraction(7, 2))
    assert [ch.normalized.coefficient(Fraction(t, 2)) for t in range(7)] == [1, 1, 1, 1, 1, 2, 2]
    assert ch.prefactor_exponent == Fraction(1, 10) - Fraction(7, 240)
    assert ch.to_json()["prefactor"] == "1/10-7/240"
    triv = mult_character(2, 1, 1, 2)
    assert [triv.normalized.coefficient(Fraction(t, 2)) for t in range(4)] == [1, 0, 0, 0]


def test_mult_character_rejects_bad_labels():
    with pytest.raises(InvalidLabel):
        mult_character(3, 1, 2, 3)
    with pytest.raises(InvalidLabel):
        mult_character(1, 1, 1, 3)


@pytest.mark.parametrize("label,top", [((2, 1, 1), Fraction(3, 2)), ((2, 1, 3), Fraction(3, 2)), ((3, 1, 3), 3), ((3, 2, 2), 3)])
def test_rank_equals_character(label, top):
    assert rank_character_crosscheck(*label, top)


def test_rank_profile_for_trivial_rep():
    rows = rank_profile(2, 1, 1, Fraction(3, 2))
    assert [r[1] for r in rows] == [1, 0, 0, 0]


def test_rank_crosscheck_level_guard():
    with pytest.raises(ValueError):
        rank_character_crosscheck(3, 1, 3, Fraction(7, 2))


@pytest.mark.parametrize("j,ell", [(0, 0), (half, 1), (0, 1), (0, 2), (half, 2), (1, 2), (0, 3)])
def test_coset_identity(j, ell):
    assert coset_identity_check(j, ell, 6)


def test_coset_identity_detects_mutation():
    def broken(m, p, q, order):
        return chi_ns(order) * (alpha_sum(m, p, q, order) + alpha_sum(m, -p, q, order))

    assert not coset_identity_check(0, 1, 5, broken)


def test_coset_preconditions():
    with pytest.raises(ValueError):
        coset_identity_check(1, 0, 4)


def test_frenkel():
    assert frenkel_check(6)
    assert frenkel_check(half)
    assert not frenkel_check(6, (1,))


def test_two_variable_arithmetic():
    a = TwoVarSeries({(0, 1): 1, (1, -1): 2}, 3)
    b = TwoVarSeries({(half, 0): 1}, 2)
    prod = a * b
    assert prod.terms == {(half, 1): 1, (Fraction(3, 2), -1): 2}
    assert prod.truncation == 2
    assert (a - a).terms == {}
    assert a.shift_t(-Fraction(1, 16)).truncation == Fraction(47, 16)
