"""
Exact coefficient ring: scalars, conjugation, evaluation, truncated series and ideals.
"""
import pytest
from sympy.polys.domains import QQ, QQ_I

from genkahler.core.coeffring import (
    I_UNIT,
    IdealKind,
    PolyIdeal,
    TruncatedSeries,
    chart_dim,
    complex_coordinates,
    conj,
    eval_at,
    format_rational,
    gauss,
    groebner_basis,
    ideal_membership,
    is_holomorphic,
    make_ring,
    point_from_complex,
    rational,
    spatial_degree,
    t_coefficient,
    t_gen,
    truncate_t,
    z,
    zb,
)
from genkahler.core.errors import DegreeOverflowError, DimensionMismatchError, UndecidedAtCapError, UsageError


def test_ring_layout(R2):
    assert R2.ngens == 5
    assert chart_dim(R2) == 2
    assert str(t_gen(R2)) == "t"
    assert make_ring(2) is R2


def test_ring_rejects_empty_chart():
    with pytest.raises(DimensionMismatchError):
        make_ring(0)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("1/2", QQ(1, 2)),
        ("-3", QQ(-3)),
        (" 4/6 ", QQ(2, 3)),
    ]
)
def test_rational_parsing(text, expected):
    assert rational(text) == expected


@pytest.mark.parametrize("bad", ["0.5", "1/0", "abc", 0.5])
def test_rational_rejects_inexact(bad):
    with pytest.raises(UsageError):
        rational(bad)


def test_format_rational():
    assert format_rational(QQ(3, 1)) == "3"
    assert format_rational(QQ(-1, 2)) == "-1/2"


def test_conjugation_swaps_variables(R2):
    p = z(R2, 0) ** 2 * zb(R2, 1) * I_UNIT + t_gen(R2)
    q = conj(p)
    assert q == zb(R2, 0) ** 2 * z(R2, 1) * (-I_UNIT) + t_gen(R2)
    assert conj(q) == p


def test_eval_at_real_point(R1):
    # |z|^2 at z = 1 + 2i
    p = z(R1, 0) * zb(R1, 0)
    assert eval_at(p, ("1", "2")) == QQ_I(5, 0)


def test_eval_requires_t_value(R1):
    p = z(R1, 0) * t_gen(R1)
    with pytest.raises(UsageError):
        eval_at(p, ("1", "0"))
    assert eval_at(p, ("1", "0"), "1/2") == QQ_I(QQ(1, 2), 0)


def test_eval_checks_point_length(R2):
    with pytest.raises(DimensionMismatchError):
        eval_at(z(R2, 0), ("1", "2", "3"))


def test_complex_point_conversion():
    values = [gauss("1/2", "-1"), gauss(3)]
    point = point_from_complex(values)
    assert point == (QQ(1, 2), QQ(3), QQ(-1), QQ(0))
    assert complex_coordinates(point) == values


def test_degrees_and_holomorphy(R2):
    p = z(R2, 0) ** 3 * t_gen(R2) ** 2 + zb(R2, 1)
    assert spatial_degree(p) == 3
    assert not is_holomorphic(p)
    assert is_holomorphic(z(R2, 0) * z(R2, 1))
    assert spatial_degree(R2.zero) == 0


def test_t_truncation(R1):
    tt = t_gen(R1)
    p = 1 + 2 * tt + 3 * tt ** 2 + 4 * tt ** 3
    assert truncate_t(p, 1) == 1 + 2 * tt
    assert t_coefficient(p, 2) == R1(3)


def test_truncated_series_arithmetic(R1):
    tt = t_gen(R1)
    a = TruncatedSeries.from_coefficients([R1.one, R1.one], 2)
    product = a * a
    assert product.coefficients() == [R1(1), R1(2), R1(1)]
    cube = product * a
    # (1 + t)^3 = 1 + 3t + 3t^2 mod t^3
    assert cube.poly == 1 + 3 * tt + 3 * tt ** 2
    assert (a - a).is_zero()


def test_degree_guard(R1):
    with pytest.raises(DegreeOverflowError):
        TruncatedSeries(z(R1, 0) ** 65, 2)


def test_ideal_kinds(R2):
    z1, z2 = z(R2, 0), z(R2, 1)
    assert PolyIdeal.from_generators([z1 * z2]).kind == IdealKind.PRINCIPAL
    assert PolyIdeal.from_generators([z1, z2 ** 2]).kind == IdealKind.MONOMIAL
    assert PolyIdeal.from_generators([z1 - 1, z2 + z1]).kind == IdealKind.GENERAL
    with pytest.raises(UsageError):
        PolyIdeal.from_generators([R2.zero])


def test_principal_membership(R2):
    z1, z2 = z(R2, 0), z(R2, 1)
    ideal = PolyIdeal.from_generators([z1 * z2 - 1])
    assert ideal_membership((z1 * z2 - 1) * (z1 + z2), ideal)
    assert not ideal_membership(z1, ideal)


def test_monomial_membership(R2):
    z1, z2 = z(R2, 0), z(R2, 1)
    ideal = PolyIdeal.from_generators([z1, z2 ** 2])
    assert ideal_membership(z1 * z2 + 3 * z2 ** 3, ideal)
    assert not ideal_membership(z1 + z2, ideal)


def test_general_membership(R2):
    z1, z2 = z(R2, 0), z(R2, 1)
    ideal = PolyIdeal.from_generators([z1 - z2, z1 * z2 - 1])
    # z2^2 - 1 = (z1 z2 - 1) - z2 (z1 - z2)
    assert ideal_membership(z2 ** 2 - 1, ideal)
    assert not ideal_membership(z2 - 2, ideal)


def test_groebner_basis_is_reduced(R2):
    z1, z2 = z(R2, 0), z(R2, 1)
    basis = groebner_basis([z1 - z2, z1 * z2 - 1])
    assert all(g.LC == QQ_I.one for g in basis)
    assert len(basis) == 2


def test_buchberger_cap(R3):
    z1, z2, z3 = (z(R3, k) for k in range(3))
    ideal = PolyIdeal.from_generators([z1 ** 2 - z2, z2 ** 2 - z3, z1 * z3 - 1])
    with pytest.raises(UndecidedAtCapError):
        ideal_membership(z1 + 5, ideal, cap=0)
