from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsverma.fqs import (
    DiscreteSeriesPoint,
    InvalidLabel,
    classify,
    curve_intersections,
    discrete_labels,
    discrete_series,
    first_intersection_points,
    first_intersections_equal_series,
    first_intersectors,
    invert_c,
    kappa,
    region_sign_profile,
    wassermann_inequalities,
    witness_norm,
)
from nsverma.gramkac import c_from_m, h_from_m
from nsverma.nsalgebra import Ambient, Generator, VermaVector, apply_generator, form


def test_discrete_series_small_m():
    m2 = discrete_series(2)
    assert [(p.p, p.q) for p in m2] == [(1, 1), (1, 3)]
    assert {p.h for p in m2} == {0} and {p.c for p in m2} == {0}
    m3 = [p for p in discrete_series(3, dedupe=True) if p.m == 3]
    assert {(p.c, p.h) for p in m3} == {(Fraction(7, 10), 0), (Fraction(7, 10), Fraction(1, 10))}


def test_discrete_points_nonnegative_and_dual():
    for pt in discrete_series(12):
        assert pt.h >= 0
        d = pt.dual()
        assert (d.c, d.h) == (pt.c, pt.h)
        assert d.dual() == pt


def test_dedupe_keeps_one_label_per_point():
    for m in range(2, 9):
        pts = [p for p in discrete_series(m, dedupe=True) if p.m == m]
        hs = [p.h for p in pts]
        assert len(hs) == len(set(hs))
        full = {p.h for p in discrete_series(m) if p.m == m}
        assert set(hs) == full
        assert all(p == p.canonical() for p in pts)


def test_label_validation():
    for bad in [(1, 1, 1), (3, 0, 1), (3, 3, 1), (3, 1, 5), (3, 1, 2)]:
        with pytest.raises(InvalidLabel):
            DiscreteSeriesPoint(*bad)
    with pytest.raises(ValueError):
        discrete_series(1)


def test_curve_intersection_examples():
    x = curve_intersections(1, 3, 2, 2)
    assert Fraction(3) in x.points()
    assert h_from_m(3, 1, 3) == h_from_m(3, 2, 2) == Fraction(1, 10)
    y = curve_intersections(1, 1, 1, 3)
    assert Fraction(2) in y.points()
    assert y.m_minus is None


def test_curve_intersections_are_exact():
    labels = [(p, q) for p in range(1, 6) for q in range(1, 6) if (p - q) % 2 == 0]
    for a in labels:
        for b in labels:
            if a == b:
                continue
            for m in curve_intersections(*a, *b).points():
                assert h_from_m(m, *a) == h_from_m(m, *b)
    with pytest.raises(ValueError):
        curve_intersections(1, 1, 1, 1)
    with pytest.raises(ValueError):
        curve_intersections(1, 2, 1, 1)


def test_parallel_curves_do_not_meet():
    x = curve_intersections(1, 1, 2, 2)
    assert x.points() == []
    for m in range(2, 30):
        assert h_from_m(m, 1, 1) != h_from_m(m, 2, 2)


def test_kappa():
    assert kappa(1, 3) == 0
    assert kappa(3, 1) == 1
    assert kappa(1, 1) == 1
    with pytest.raises(AssertionError):
        kappa(1, 2)


def test_first_intersectors():
    assert first_intersectors(1, 3, 0) == [(2, 2, 3)]
    assert first_intersectors(3, 1, 1) == [(1, 5, 4)]
    assert first_intersectors(1, 1, 3) == [(1, 3, 2), (2, 4, 3), (3, 5, 4)]
    # the listed curve really meets C_pq at the listed m
    for p, q in [(1, 3), (3, 1), (2, 2), (2, 4)]:
        for pp, qq, m in first_intersectors(p, q, 4):
            assert h_from_m(m, p, q) == h_from_m(m, pp, qq)


def test_first_intersections_are_the_discrete_series():
    for m_max in (2, 6, 12):
        assert first_intersections_equal_series(m_max)
    assert not first_intersections_equal_series(6, k_offset=1)
    assert len(first_intersection_points(6, 1)) < len(first_intersection_points(6))


def test_wassermann():
    assert wassermann_inequalities(20)
    pt = DiscreteSeriesPoint(3, 1, 3)
    assert pt.h + 2 == Fraction(21, 10) > Fraction(9, 8)


def test_classify_continuum_and_negative():
    assert classify(2, 5).verdict == "unitary-continuum"
    cl = classify(1, -1)
    assert cl.verdict == "ghost" and cl.level == Fraction(1, 2) and cl.norm == -2
    assert [t["mon"] for t in cl.witness.to_json()] == ["G(-1/2)"]


@pytest.mark.parametrize("c,h", [(-1, 1), (Fraction(-1, 10), 3), (-5, 0)])
def test_classify_negative_c(c, h):
    cl = classify(c, h)
    n = cl.level
    assert cl.verdict == "ghost"
    assert cl.norm == 2 * n * h + c * n * (n * n - 1) / 12 < 0
    assert witness_norm(cl) == cl.norm


def test_classify_discrete():
    cl = classify(Fraction(7, 10), Fraction(1, 10))
    assert cl.verdict == "unitary-discrete"
    assert (cl.point.m, cl.point.p, cl.point.q) == (3, 1, 3)


def test_classify_region_r13():
    c, h = Fraction(1), Fraction(1, 2)
    signs = region_sign_profile(c, h, [(1, 1), (1, 3)])
    assert signs == {(1, 1): 1, (1, 3): -1}
    cl = classify(c, h)
    assert cl.verdict == "ghost" and cl.level == Fraction(3, 2)
    assert cl.norm < 0 and witness_norm(cl) == cl.norm


def test_classify_level_two_region():
    c, h = Fraction(1), Fraction(1, 32)
    signs = region_sign_profile(c, h, [(1, 1), (1, 3), (2, 2)])
    assert signs == {(1, 1): 1, (1, 3): 1, (2, 2): -1}
    cl = classify(c, h)
    assert cl.verdict == "ghost" and cl.level == 2
    assert witness_norm(cl) == cl.norm < 0


def test_classify_undetermined_is_honest():
    # with h > 0 the level-1/2 form is positive, so a search stopping there proves nothing
    cl = classify(Fraction(7, 10), Fraction(1, 10) + Fraction(1, 10**6), max_level=Fraction(1, 2))
    assert cl.verdict == "undetermined" and cl.level == Fraction(1, 2)


def test_invert_c():
    for m in range(2, 51):
        assert invert_c(c_from_m(m)) == m
    assert invert_c(Fraction(1, 3)) is None
    assert invert_c(2) is None


def test_m_inversion_soundness():
    for m in range(2, 51):
        for p, q in discrete_labels(m):
            cl = classify(c_from_m(m), h_from_m(m, p, q))
            assert cl.verdict == "unitary-discrete"
            got = (cl.point.p, cl.point.q)
            assert got in {(p, q), (m - p, m + 2 - q)}


def test_classify_is_duality_invariant():
    for m in range(2, 8):
        for p, q in discrete_labels(m):
            a = classify(c_from_m(m), h_from_m(m, p, q)).point
            b = classify(c_from_m(m), h_from_m(m, m - p, m + 2 - q)).point
            assert a == b


@settings(max_examples=25, deadline=None)
@given(
    st.fractions(min_value=-2, max_value=2, max_denominator=12),
    st.fractions(min_value=-1, max_value=2, max_denominator=12),
)
def test_every_ghost_witness_has_its_reported_norm(c, h):
    cl = classify(c, h, max_level=2)
    if cl.verdict == "ghost":
        assert cl.norm < 0
        assert form(cl.witness, cl.witness) == cl.norm


def test_ghost_at_half_matches_hand_norm():
    amb = Ambient.point(1, Fraction(-1, 3))
    v = apply_generator(Generator.G(Fraction(-1, 2)), VermaVector.vacuum(amb))
    assert form(v, v) == Fraction(-2, 3)


def test_json_shapes():
    assert classify(Fraction(7, 10), Fraction(1, 10)).to_json() == {
        "c": "7/10", "h": "1/10", "verdict": "unitary-discrete", "m": 3, "p": 1, "q": 3,
    }
    ghost = classify(1, Fraction(1, 2)).to_json()
    assert ghost["verdict"] == "ghost" and ghost["level"] == "3/2"
    assert {t["mon"] for t in ghost["witness"]} <= {"G(-1/2) L(-1)", "G(-3/2)"}
