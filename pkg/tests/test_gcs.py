"""
Generalized complex structures: J_J, J_omega, J_beta_t, b-fields, types and Kaehler pairs.
"""
import pytest

from genkahler.cli.parser import parse_expr
from genkahler.core.coeffring import chart_dim, make_ring, random_point, random_poly, t_gen, z
from genkahler.core.errors import DegenerateError, NonCommutingError, NotClosedError, NotPoissonError, UsageError
from genkahler.core.gcs import (
    b_field_transform,
    c_split,
    eigenframe,
    gen_metric,
    integrability_check,
    is_almost_complex_at,
    kahler_pair_check,
    make_J_beta_t,
    make_JJ,
    make_Jomega,
    poisson_rank_at_point,
    poly_matrix,
    type_at_point,
)
from genkahler.core.tensorcalc import Form, Polyvector, beta_f, d_z, dz, dzb, standard_kahler_form

HALF = "1/2"


@pytest.fixture
def points(rng):
    return [random_point(2, rng) for _ in range(3)]


@pytest.fixture
def linear_beta(R2):
    return d_z(R2, 0).wedge(d_z(R2, 1)) * z(R2, 0)


def test_complex_structure(R2, points):
    J = make_JJ(R2)
    assert J.is_almost_complex()
    assert J.is_orthogonal()
    assert J.is_real()
    assert [type_at_point(J, x) for x in points] == [2, 2, 2]
    report = integrability_check(J, points)
    assert report.integrable and report.symbolic


def test_symplectic_structure(omega2, points):
    J = make_Jomega(omega2)
    assert J.is_almost_complex()
    assert J.is_orthogonal()
    assert J.is_real()
    assert [type_at_point(J, x) for x in points] == [0, 0, 0]
    assert integrability_check(J, points).integrable


def test_flat_kahler_pair(R2, omega2, points):
    report = kahler_pair_check(make_JJ(R2), make_Jomega(omega2), points)
    assert report.commuting and report.symbolic
    assert report.valid


def test_literal_kahler_form_pairs_positively(R2, points):
    omega = parse_expr("i/2*(dz1^^dzb1 + dz2^^dzb2)", 2)
    assert omega == standard_kahler_form(R2)
    report = kahler_pair_check(make_JJ(R2), make_Jomega(omega), points)
    assert report.commuting
    assert report.valid
    # the opposite orientation still commutes with J_J but is negative
    assert not kahler_pair_check(make_JJ(R2), make_Jomega(-omega), points).valid


def test_pair_with_itself_is_not_positive(R2, points):
    J = make_JJ(R2)
    report = kahler_pair_check(J, J, points)
    assert report.commuting
    assert not report.valid


def test_flat_metric_has_no_b_field(R2, omega2, points):
    G = gen_metric(make_JJ(R2), make_Jomega(omega2))
    split = c_split(G, points[0])
    assert split.b.is_zero()
    assert len(split.plus) == len(split.minus) == 4


def test_holomorphic_symplectic_does_not_commute(R2, points):
    sigma = dz(R2, 0).wedge(dz(R2, 1)) + dzb(R2, 0).wedge(dzb(R2, 1))
    J1 = make_Jomega(sigma)
    with pytest.raises(NonCommutingError):
        gen_metric(make_JJ(R2), J1)
    assert not kahler_pair_check(make_JJ(R2), J1, points).commuting


def test_beta_deformation_is_generalized_complex(linear_beta, points):
    J = make_J_beta_t(linear_beta)
    assert J.depends_on_t()
    assert J.is_almost_complex()
    assert J.is_orthogonal()
    assert J.is_real()
    assert integrability_check(J, points, HALF).integrable
    for x in points:
        assert is_almost_complex_at(J, x, HALF)
        assert len(eigenframe(J, x, HALF)) == 4


@pytest.mark.parametrize(
    "point, expected",
    [
        (("1", "0", "0", "0"), 0),  # z1 = 1
        (("0", "1", "0", "1"), 2),  # z1 = 0: beta vanishes
    ]
)
def test_type_drops_where_beta_is_nonzero(linear_beta, point, expected):
    J = make_J_beta_t(linear_beta)
    assert type_at_point(J, point, HALF) == expected
    assert type_at_point(J, point, HALF) == 2 - 2 * poisson_rank_at_point(linear_beta, point)


def test_type_at_zero_t_is_complex(linear_beta):
    assert type_at_point(make_J_beta_t(linear_beta), ("1", "2", "0", "0"), 0) == 2


def test_non_poisson_beta_rejected(R3):
    z1, z2 = z(R3, 0), z(R3, 1)
    beta = Polyvector(R3, {(1, 2): -z2, (2, 0): z1, (0, 1): 1})
    with pytest.raises(NotPoissonError):
        make_J_beta_t(beta)
    J = make_J_beta_t(beta, check=False)
    assert J.is_almost_complex()


def test_b_field_transform(R2, points):
    b = dz(R2, 0).wedge(dz(R2, 1)) + dzb(R2, 0).wedge(dzb(R2, 1))
    J = b_field_transform(make_JJ(R2), b)
    assert J.is_almost_complex() and J.is_orthogonal()
    assert [type_at_point(J, x) for x in points] == [2, 2, 2]
    assert integrability_check(J, points).integrable


def test_b_field_must_be_closed_and_real(R2):
    J = make_JJ(R2)
    with pytest.raises(NotClosedError):
        b_field_transform(J, dz(R2, 1).wedge(dzb(R2, 0)) * z(R2, 0))
    with pytest.raises(UsageError):
        b_field_transform(J, dz(R2, 0).wedge(dz(R2, 1)))


def test_degenerate_symplectic_form(R2):
    with pytest.raises(DegenerateError):
        make_Jomega(dz(R2, 0).wedge(dzb(R2, 0)))


def _random_poisson(R, rng, constant=False):
    """Constant bivectors, or sums of f_j(z_{2j}, z_{2j+1}) d_{2j} ^ d_{2j+1} and beta_f on C^3."""
    n = chart_dim(R)
    if constant:
        return Polyvector(R, {(j, k): rng.randint(-3, 3) for j in range(n) for k in range(j + 1, n)})
    if n == 3:
        return beta_f(random_poly(R, rng, degree=3, terms=3, holomorphic=True))
    beta = Polyvector.zero(R)
    for j in range(0, n - 1, 2):
        a, b = z(R, j), z(R, j + 1)
        f = R.one * rng.randint(1, 3) + a * rng.randint(-3, 3) + a * b * rng.randint(-3, 3)
        beta = beta + d_z(R, j).wedge(d_z(R, j + 1)) * f
    return beta


def _explicit_conjugate(beta):
    """Ad_{e^{at}} J_J Ad_{e^{-at}} from the block matrix [[1, t A], [0, 1]], A the matrix of a^sharp."""
    R = beta.ring
    n2 = 2 * beta.n
    a = beta + beta.conj()
    tt = t_gen(R)
    rows = [[R.one if i == j else R.zero for j in range(2 * n2)] for i in range(2 * n2)]
    inverse_rows = [list(row) for row in rows]
    for k in range(n2):
        image = a.sharp(Form.basis(R, (k,))).vector_coefficients()
        for i in range(n2):
            rows[i][n2 + k] = image[i] * tt
            inverse_rows[i][n2 + k] = -image[i] * tt
    return poly_matrix(R, rows) * make_JJ(R).matrix * poly_matrix(R, inverse_rows)


@pytest.mark.parametrize("n", [2, 3])
def test_beta_deformation_matches_explicit_conjugation(n, rng):
    R = make_ring(n)
    for _ in range(10):
        beta = _random_poisson(R, rng)
        J = make_J_beta_t(beta)
        assert J.matrix == _explicit_conjugate(beta)
        assert all(c == 0 for row in J.lower_left().to_list() for c in row)


@pytest.mark.slow
@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("constant", [True, False])
def test_type_formula_on_random_bivectors(n, constant, rng):
    R = make_ring(n)
    beta = _random_poisson(R, rng, constant=constant)
    J = make_J_beta_t(beta)
    for _ in range(20):
        x = random_point(n, rng)
        assert type_at_point(J, x, HALF) == n - 2 * poisson_rank_at_point(beta, x)
