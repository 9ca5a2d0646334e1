"""
Order-by-order deformations of e^{i omega}, first-order bi-Hermitian data and the torus x CP^1 rank criterion.
"""
import random

import pytest
from sympy.polys.domains import QQ, QQ_I

from genkahler.core.coeffring import I_UNIT, make_ring, random_poly, t_gen, z, zb
from genkahler.core.deform import (
    ObstructionMatrix,
    bch_consistency,
    bihermitian_first_order,
    conjugation_consistency,
    first_order_source,
    k1_membership,
    k2_membership,
    ks_class,
    obstruction_rank_test,
    residual_zero_through,
    solve_deformation,
)
from genkahler.core.errors import DegreeBoundError, NotPoissonError, UsageError
from genkahler.core.spinor import deformed_spinor, deformed_spinor_series
from genkahler.core.tensorcalc import Form, Polyvector, d_z, d_zb, dz, interior, kahler_exponential, standard_kahler_form


@pytest.fixture
def constant_beta(R2):
    return d_z(R2, 0).wedge(d_z(R2, 1))


@pytest.fixture
def linear_beta(R2):
    return d_z(R2, 0).wedge(d_z(R2, 1)) * z(R2, 0)


@pytest.fixture
def linear_series(linear_beta, omega2):
    return solve_deformation(linear_beta, omega2, 2)


def test_constant_beta_needs_no_correction(constant_beta, omega2):
    series = solve_deformation(constant_beta, omega2, 3)
    assert all(bk.is_zero() for bk in series.b_coeffs)
    assert residual_zero_through(series) == 3
    assert first_order_source(constant_beta, omega2).is_zero()


def test_truncated_spinor_agrees_with_exact_spinor(constant_beta, omega2):
    """For constant beta on C^2, e^{at} stops at t^2, so order 2 is exact."""
    series = solve_deformation(constant_beta, omega2, 2)
    psi = deformed_spinor_series(series)
    assert psi != kahler_exponential(omega2)
    assert psi.substitute_t("1/2") == deformed_spinor(series, "1/2")


def test_linear_beta_solution(linear_series, omega2):
    assert len(linear_series.b_coeffs) == 2
    assert residual_zero_through(linear_series) == 2
    for bk in linear_series.b_coeffs:
        assert k1_membership(bk.h, bk.p, omega2)


def test_linear_beta_consistency_checks(linear_series):
    assert bch_consistency(linear_series, random.Random(5), count=3)
    assert conjugation_consistency(linear_series)


def test_primitive_shift(R2, linear_beta, omega2):
    half = QQ_I(0, QQ(1, 2))
    shift = Form(R2, {(0, 2): -half, (1, 3): half})
    series = solve_deformation(linear_beta, omega2, 1, shift=shift)
    assert residual_zero_through(series) == 1
    assert series.b_coeffs[0] != solve_deformation(linear_beta, omega2, 1).b_coeffs[0]
    with pytest.raises(UsageError):
        solve_deformation(linear_beta, omega2, 1, shift=omega2)


@pytest.mark.parametrize("order", [0, 7])
def test_order_range(constant_beta, omega2, order):
    with pytest.raises(UsageError):
        solve_deformation(constant_beta, omega2, order)


def test_non_poisson_bivector(R3):
    z1, z2 = z(R3, 0), z(R3, 1)
    beta = Polyvector(R3, {(1, 2): -z2, (2, 0): z1, (0, 1): 1})
    with pytest.raises(NotPoissonError):
        solve_deformation(beta, standard_kahler_form(R3), 1)


def test_k1_membership(R2, omega2):
    assert k1_membership(R2.zero, Form.zero(R2), omega2)
    # Lambda(-omega) = -2 balances h = 1
    assert k1_membership(R2.one, -omega2, omega2)
    assert not k1_membership(R2.one, Form.zero(R2), omega2)


def test_k2_membership(R2, omega2):
    psi = kahler_exponential(omega2)
    assert k2_membership(dz(R2, 0).wedge(psi), omega2)
    assert not k2_membership(psi, omega2)


def test_ks_class_is_delbar_closed(R2, linear_beta, omega2):
    K = ks_class(linear_beta, omega2)
    assert not K.is_zero()
    assert K.delbar_closed(R2)


@pytest.mark.parametrize("n", [2, 3])
def test_ks_class_of_random_holomorphic_bivectors(n, rng):
    R = make_ring(n)
    omega = standard_kahler_form(R)
    for _ in range(10):
        beta = Polyvector(R, {
            (j, k): random_poly(R, rng, degree=3, holomorphic=True)
            for j in range(n) for k in range(j + 1, n)
        })
        assert ks_class(beta, omega).delbar_closed(R)


def test_ks_class_of_antiholomorphic_coefficient(R2, omega2):
    beta = d_z(R2, 0).wedge(d_z(R2, 1)) * zb(R2, 0)
    assert not ks_class(beta, omega2).delbar_closed(R2)


def test_degree_bound_failure_reports_obstruction(linear_beta, omega2):
    with pytest.raises(DegreeBoundError) as info:
        solve_deformation(linear_beta, omega2, 1, degree_bound=0)
    assert info.value.order == 1
    assert info.value.degree_bound == 0
    assert info.value.obstruction_in_k2 is True


def test_bihermitian_frames(R2, constant_beta, omega2):
    frames = bihermitian_first_order(constant_beta, omega2)
    half_t = t_gen(R2) * QQ_I(QQ(1, 2), 0)
    assert frames.plus == [d_z(R2, 0) + d_zb(R2, 1) * half_t, d_z(R2, 1) - d_zb(R2, 0) * half_t]
    assert frames.minus == [d_z(R2, 0) - d_zb(R2, 1) * half_t, d_z(R2, 1) + d_zb(R2, 0) * half_t]
    assert frames.b1.is_zero()


def test_bihermitian_frames_of_linear_beta(R2, linear_beta, omega2):
    frames = bihermitian_first_order(linear_beta, omega2)
    assert not frames.b1.is_zero()
    assert frames.b1.is_homogeneous(2)
    assert frames.b1.bidegrees() == [(1, 1)]
    beta_bar = linear_beta.conj()
    for j, correction in enumerate(frames.corrections):
        theta_bar = interior(d_z(R2, j), omega2) * (-I_UNIT)
        assert correction == beta_bar.sharp(theta_bar)


def test_bihermitian_frames_without_bivector(R2, omega2):
    frames = bihermitian_first_order(Polyvector.zero(R2), omega2)
    assert frames.plus == frames.minus == [d_z(R2, 0), d_z(R2, 1)]
    assert all(c.is_zero() for c in frames.corrections)


def test_bihermitian_frame_must_be_holomorphic(R2, constant_beta, omega2):
    with pytest.raises(UsageError):
        bihermitian_first_order(constant_beta, omega2, frame=[d_zb(R2, 0)])


def test_obstruction_matrix_validation():
    with pytest.raises(UsageError):
        ObstructionMatrix([[1, 0]], [[0]])
    with pytest.raises(UsageError):
        ObstructionMatrix([[1, 0, 0], [0, 1, 0]], [[0, 1], [1, 0]])


@pytest.mark.parametrize(
    "P, lam, rank, poisson",
    [
        ([[0, 0, 0], [0, 0, 0]], [[0, 0], [0, 0]], 0, True),
        ([[1, 0, 0], [2, 0, 0]], [[0, 0], [0, 0]], 1, True),
        ([[1, 2, 1], [2, 4, 2]], [[0, 3], [-3, 0]], 1, True),
        ([[1, 0, 0], [0, 1, 0]], [[0, 0], [0, 0]], 2, False),
    ]
)
def test_obstruction_rank(P, lam, rank, poisson):
    report = obstruction_rank_test(ObstructionMatrix(P, lam))
    assert report.rank == rank
    assert report.schouten_zero == poisson
    assert report.criterion_consistent


@pytest.mark.parametrize("rank_one", [True, False])
def test_random_obstruction_matrices(rank_one):
    rng = random.Random(11)
    for n in (2, 3):
        report = obstruction_rank_test(ObstructionMatrix.random(n, rng, rank_one=rank_one))
        assert report.criterion_consistent
        if rank_one:
            assert report.rank <= 1


@pytest.mark.slow
def test_obstruction_sweep():
    rng = random.Random(2024)
    for trial in range(200):
        data = ObstructionMatrix.random(2 + trial % 3, rng, rank_one=trial % 2 == 0)
        assert obstruction_rank_test(data).criterion_consistent
