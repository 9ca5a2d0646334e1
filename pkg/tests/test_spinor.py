"""
Pure spinors on C^2: annihilators, type, non-degeneracy and the induced structure.
"""
import pytest

from genkahler.core.coeffring import random_point
from genkahler.core.errors import DegenerateError, NotPureError
from genkahler.core.gcs import make_JJ, make_Jomega
from genkahler.core.spinor import (
    induced_Jpsi,
    is_nondegenerate,
    is_pure_at,
    kernel_at_point,
    type_of_spinor_at_point,
)
from genkahler.core.tensorcalc import Form, canonical_form, dz, dzb, kahler_exponential, wedge_all


@pytest.fixture
def points(rng):
    return [random_point(2, rng) for _ in range(3)]


def test_kahler_spinor(omega2, points):
    psi = kahler_exponential(omega2)
    assert all(is_pure_at(psi, x) for x in points)
    assert is_nondegenerate(psi, points)
    assert [type_of_spinor_at_point(psi, x) for x in points] == [0, 0, 0]


def test_kahler_spinor_induces_symplectic_structure(omega2, points):
    J = induced_Jpsi(kahler_exponential(omega2), points)
    expected = make_Jomega(omega2)
    for x in points:
        assert J.at(x) == expected.at(x)


def test_canonical_form_induces_complex_structure(R2, points):
    psi = canonical_form(R2)
    assert [type_of_spinor_at_point(psi, x) for x in points] == [2, 2, 2]
    J = induced_Jpsi(psi, points)
    expected = make_JJ(R2)
    for x in points:
        assert J.at(x) == expected.at(x)


def test_constant_spinor_is_pure_but_degenerate(R2, points):
    psi = Form.scalar(R2, 1)
    assert len(kernel_at_point(psi, points[0])) == 4
    assert not is_nondegenerate(psi, points)
    with pytest.raises(DegenerateError):
        induced_Jpsi(psi, points)


def test_impure_spinor(R2, points):
    volume = wedge_all([dz(R2, 0), dz(R2, 1), dzb(R2, 0), dzb(R2, 1)])
    psi = Form.scalar(R2, 1) + volume
    assert not is_pure_at(psi, points[0])
    with pytest.raises(NotPureError):
        kernel_at_point(psi, points[0])


def test_vanishing_spinor(R2, points):
    psi = Form.zero(R2)
    assert not is_pure_at(psi, points[0])
    with pytest.raises(DegenerateError):
        type_of_spinor_at_point(psi, points[0])
