"""
Clifford relations, the spin action on forms and the truncated BCH series.
"""
import pytest
from sympy.polys.domains import QQ, QQ_I

from genkahler.core.clifford import (
    CliffordElem,
    ExpDescriptor,
    adjoint_on_sections,
    bch_log,
    commutator,
    exp_action,
    spin_action,
)
from genkahler.core.coeffring import random_poly, t_gen, z
from genkahler.core.errors import FiltrationOverflowError, UsageError
from genkahler.core.tensorcalc import (
    Form,
    GenSection,
    Polyvector,
    contract,
    d_z,
    d_zb,
    dz,
    dzb,
    form_exp,
    interior,
    pairing,
)

HALF = QQ_I(QQ(1, 2))


@pytest.fixture
def sample_form(R2):
    return Form.scalar(R2, 1) + dz(R2, 0) * z(R2, 1) + dz(R2, 1).wedge(dzb(R2, 0))


@pytest.mark.parametrize("a, b", [(0, 4), (1, 5), (2, 6), (3, 7)])
def test_paired_generators_anticommute_to_minus_one(R2, a, b):
    ea, eb = CliffordElem.generator(R2, a), CliffordElem.generator(R2, b)
    assert ea * eb + eb * ea == CliffordElem.scalar(R2, -1)


@pytest.mark.parametrize("a, b", [(0, 1), (0, 5), (4, 6)])
def test_unpaired_generators_anticommute(R2, a, b):
    ea, eb = CliffordElem.generator(R2, a), CliffordElem.generator(R2, b)
    assert (ea * eb + eb * ea).is_zero()
    assert (ea * ea).is_zero()


def test_spin_action_is_a_representation(R2, sample_form):
    x = CliffordElem.generator(R2, 0) + CliffordElem.generator(R2, 6)
    y = CliffordElem.generator(R2, 4) + CliffordElem.generator(R2, 3)
    lhs = spin_action(x * y, sample_form)
    rhs = spin_action(x, spin_action(y, sample_form))
    assert lhs == rhs


def test_clifford_relation_on_random_sections(R2, rng):
    for _ in range(50):
        E = GenSection(
            Polyvector.vector(R2, [random_poly(R2, rng, terms=2) for _ in range(4)]),
            Form(R2, {(k,): random_poly(R2, rng, terms=2) for k in range(4)}),
        )
        phi = Form(R2, {(): random_poly(R2, rng), (0, 3): random_poly(R2, rng), (1,): random_poly(R2, rng)})
        x = CliffordElem.from_section(E)
        assert spin_action(x, spin_action(x, phi)) == -(phi * pairing(E, E))
        assert x * x == CliffordElem.scalar(R2, -pairing(E, E))


@pytest.mark.parametrize("a", [0, 1, 2, 3])
def test_vector_acts_by_minus_contraction(R2, sample_form, a):
    v = d_z(R2, a) if a < 2 else d_zb(R2, a - 2)
    assert spin_action(CliffordElem.generator(R2, a), sample_form) == -interior(v, sample_form)


def test_polyvector_acts_by_contraction(R2, sample_form):
    P = d_z(R2, 1).wedge(d_zb(R2, 0))
    assert spin_action(CliffordElem.from_polyvector(P), sample_form) == contract(P, sample_form)


def test_form_acts_by_wedge(R2, sample_form):
    b = dz(R2, 0).wedge(dzb(R2, 1))
    assert spin_action(CliffordElem.from_form(b), sample_form) == b.wedge(sample_form)


def test_exp_of_two_form(R2):
    b = dz(R2, 0).wedge(dz(R2, 1)) + dzb(R2, 0).wedge(dzb(R2, 1))
    one = Form.scalar(R2, 1)
    assert exp_action(CliffordElem.from_form(b), one) == form_exp(b)


def test_exp_requires_nilpotent_exponent(R2):
    with pytest.raises(UsageError):
        exp_action(CliffordElem.scalar(R2, 1), Form.scalar(R2, 1))


def test_filtration_overflow(R2):
    b1 = CliffordElem.from_form(dz(R2, 0).wedge(dz(R2, 1)))
    b2 = CliffordElem.from_form(dzb(R2, 0).wedge(dzb(R2, 1)))
    with pytest.raises(FiltrationOverflowError):
        b1 * b2


def test_bfield_conjugation_matches_section_map(R2):
    b = dz(R2, 0).wedge(dz(R2, 1)) + dzb(R2, 0).wedge(dzb(R2, 1))
    g = ExpDescriptor.bfield(b)
    X = g.spin_element()
    for a in range(4):
        E = CliffordElem.generator(R2, a)
        conjugated = E + commutator(X, E)
        assert conjugated == CliffordElem.from_section(adjoint_on_sections(g, E.to_section()))


def test_bivector_conjugation_matches_section_map(R2):
    beta = d_z(R2, 0).wedge(d_z(R2, 1)) * z(R2, 0)
    g = ExpDescriptor.bivector_exp(beta)
    X = g.spin_element()
    for a in range(4, 8):
        E = CliffordElem.generator(R2, a)
        conjugated = E + commutator(X, E)
        assert conjugated == CliffordElem.from_section(adjoint_on_sections(g, E.to_section()))


def test_descriptor_inverse(R2):
    beta = d_z(R2, 0).wedge(d_z(R2, 1))
    b = dzb(R2, 0).wedge(dz(R2, 0))
    g = ExpDescriptor.compose(ExpDescriptor.bivector_exp(beta), ExpDescriptor.bfield(b))
    E = GenSection(d_z(R2, 1), dz(R2, 0) + dzb(R2, 1))
    assert adjoint_on_sections(g.inverse(), adjoint_on_sections(g, E)) == E


def test_bch_of_commuting_elements(R2):
    tt = t_gen(R2)
    g1 = CliffordElem.from_form(dz(R2, 0).wedge(dz(R2, 1)))
    g2 = CliffordElem.from_form(dzb(R2, 0).wedge(dz(R2, 1))) * tt
    assert bch_log(g1, g2, 3) == g1 * tt + g2


def test_bch_second_order_term(R2):
    tt = t_gen(R2)
    beta = CliffordElem.from_polyvector(d_z(R2, 0).wedge(d_z(R2, 1)))
    b = CliffordElem.from_form(dz(R2, 0).wedge(dz(R2, 1)))
    z_t = bch_log(beta, b * tt, 2)
    assert z_t.t_coefficient(1) == beta + b
    assert z_t.t_coefficient(2) == commutator(beta, b) * HALF


def test_bch_action_matches_product(R2):
    tt = t_gen(R2)
    beta = CliffordElem.from_polyvector(d_z(R2, 0).wedge(d_z(R2, 1)) * z(R2, 1))
    b = CliffordElem.from_form(dzb(R2, 0).wedge(dz(R2, 0)))
    one = Form.scalar(R2, 1)
    order = 3
    z_t = bch_log(beta, b * tt, order)
    direct = exp_action(beta * tt, exp_action(b * tt, one, order), order)
    assert exp_action(z_t, one, order) == direct


@pytest.mark.parametrize("order", [0, 7])
def test_bch_order_range(R2, order):
    g = CliffordElem.from_form(dz(R2, 0).wedge(dz(R2, 1)))
    with pytest.raises(UsageError):
        bch_log(g, g * t_gen(R2), order)


def test_bch_rejects_constant_term(R2):
    g = CliffordElem.from_form(dz(R2, 0).wedge(dz(R2, 1)))
    with pytest.raises(UsageError):
        bch_log(g, g, 2)
