"""
Submanifold models: samples, conormal bundles, Poisson and J-submanifolds, projective extension.
"""
import pytest

from genkahler.core.coeffring import PolyIdeal, z, zb
from genkahler.core.errors import NoParametrizationError, NonCommutingError, NotPoissonError, UsageError
from genkahler.core.gcs import make_J_beta_t, make_JJ, make_Jomega
from genkahler.core.spinor import pullback_at_point, type_of_spinor_at_point
from genkahler.core.submanifold import (
    SubmanifoldModel,
    conormal_frame,
    extends_to_projective,
    gamma_iso_check,
    group_invariant_ideal_check,
    induced_poisson,
    is_conormal_invariant,
    is_J_submanifold,
    is_poisson_submanifold,
)
from genkahler.core.tensorcalc import (
    Polyvector,
    beta_f,
    canonical_form,
    d_z,
    dz,
    kahler_exponential,
    standard_kahler_form,
    wedge_of_fields,
)

HALF = "1/2"


@pytest.fixture
def axis(R2):
    return SubmanifoldModel.from_generators([z(R2, 0)], graph={0: R2.zero}, name="axis")


@pytest.fixture
def linear_beta(R2):
    return d_z(R2, 0).wedge(d_z(R2, 1)) * z(R2, 0)


@pytest.fixture
def torus_fields(R3):
    return [d_z(R3, k) * z(R3, k) for k in range(3)]


@pytest.fixture
def toric_beta(torus_fields):
    return wedge_of_fields(torus_fields, {(0, 1): 1, (1, 2): 2})


@pytest.fixture
def plane(R3):
    return SubmanifoldModel.from_generators([z(R3, 0)], graph={0: R3.zero}, name="plane")


def test_samples_are_checked(axis):
    axis.add_sample(("0", "2", "0", "-1"))
    assert axis.samples == [("0", "2", "0", "-1")]
    with pytest.raises(UsageError):
        axis.add_sample(("1", "0", "0", "0"))


def test_find_samples(axis, rng):
    found = axis.find_samples(3, rng)
    assert len(found) == 3
    assert all(axis.contains(x) for x in found)
    assert len(axis.ensure_samples(2, rng)) == 2


def test_conormal_bundle(axis, rng):
    (x,) = axis.find_samples(1, rng)
    assert len(axis.conormal_vectors(x)) == 2
    assert len(axis.tangent_basis(x)) == 2
    assert len(axis.holomorphic_tangent_basis(x)) == 1


def test_conormal_frame_of_axis(axis, rng):
    (x,) = axis.find_samples(1, rng)
    frame = conormal_frame(axis, x)
    # dz1 and dzb1
    assert sorted(list(phi.components) for phi in frame) == [[(0,)], [(2,)]]


def test_axis_is_poisson_submanifold(linear_beta, axis, rng):
    assert is_poisson_submanifold(linear_beta, axis)
    beta_M, nontrivial = induced_poisson(linear_beta, axis)
    assert beta_M.is_zero()
    assert not nontrivial
    points = axis.find_samples(3, rng)
    assert is_conormal_invariant(make_J_beta_t(linear_beta), axis, points, HALF)


def test_non_poisson_bivector_rejected(R3, plane):
    z1, z2 = z(R3, 0), z(R3, 1)
    beta = Polyvector(R3, {(1, 2): -z2, (2, 0): z1, (0, 1): 1})
    with pytest.raises(NotPoissonError):
        is_poisson_submanifold(beta, plane)


def test_toric_plane(R2, toric_beta, plane, torus_fields):
    assert is_poisson_submanifold(toric_beta, plane)
    beta_M, nontrivial = induced_poisson(toric_beta, plane)
    assert nontrivial
    assert beta_M == Polyvector(R2, {(0, 1): z(R2, 0) * z(R2, 1) * 2})
    assert group_invariant_ideal_check(torus_fields, plane.ideal)


def test_affine_plane_is_not_poisson(R3, toric_beta):
    model = SubmanifoldModel.from_generators([z(R3, 0) + z(R3, 1) - 1])
    assert not is_poisson_submanifold(toric_beta, model)


def test_induced_poisson_needs_graph(R3, toric_beta):
    model = SubmanifoldModel.from_generators([z(R3, 0)])
    with pytest.raises(NoParametrizationError):
        induced_poisson(toric_beta, model)


def test_group_invariance_needs_commuting_fields(R2):
    fields = [d_z(R2, 0), d_z(R2, 1) * z(R2, 0)]
    with pytest.raises(NonCommutingError):
        group_invariant_ideal_check(fields, PolyIdeal.from_generators([z(R2, 0)]))


def test_complex_submanifold_is_j_submanifold(R2, axis, rng):
    points = axis.find_samples(3, rng)
    report = is_J_submanifold(make_JJ(R2), axis, points)
    assert report.holds
    assert not report.rank_jump
    assert is_conormal_invariant(make_JJ(R2), axis, points)


def test_gamma_isomorphism_on_complex_line(R2, omega2, axis):
    x = ("0", "2", "0", "-1")
    axis.add_sample(x)
    report = gamma_iso_check(make_JJ(R2), make_Jomega(omega2), axis, x)
    assert (report.dim_plus, report.dim_minus) == (2, 2)
    assert report.holds


def test_gamma_isomorphism_on_real_hypersurface(R2, omega2):
    """{y1 = 0} still maps C+(M) + C-(M) onto T_M + T*_M, but J_J moves d/dx1 off T_M."""
    x = ("1/2", "1", "0", "2")
    model = SubmanifoldModel.from_generators([z(R2, 0) - zb(R2, 0)], samples=[x], name="real")
    report = gamma_iso_check(make_JJ(R2), make_Jomega(omega2), model, x)
    assert (report.dim_plus, report.dim_minus) == (3, 3)
    assert report.bijective
    assert not report.j0_invariant
    assert not report.holds


def test_pullback_of_spinors(R2, axis, rng):
    (x,) = axis.find_samples(1, rng)
    kahler = pullback_at_point(kahler_exponential(standard_kahler_form(R2)), axis, x)
    assert kahler.n == 1
    assert type_of_spinor_at_point(kahler, ("0", "0")) == 0
    assert pullback_at_point(canonical_form(R2), axis, x).is_zero()
    assert not pullback_at_point(dz(R2, 1), axis, x).is_zero()


@pytest.mark.parametrize(
    "f, expected",
    [
        ("z1*z2*z3", True),
        ("z1^3 + z2^3 + z3^3", True),
        ("z1^5 + z2*z3", False),
    ]
)
def test_jacobian_bivector_extension(R3, f, expected):
    z1, z2, z3 = (z(R3, k) for k in range(3))
    polys = {
        "z1*z2*z3": z1 * z2 * z3,
        "z1^3 + z2^3 + z3^3": z1 ** 3 + z2 ** 3 + z3 ** 3,
        "z1^5 + z2*z3": z1 ** 5 + z2 * z3,
    }
    assert extends_to_projective(beta_f(polys[f])) is expected


@pytest.mark.parametrize("power, expected", [(2, True), (3, False)])
def test_extension_along_one_factor(R3, power, expected):
    beta = d_z(R3, 0).wedge(d_z(R3, 1)) * z(R3, 0) ** power
    assert extends_to_projective(beta, [0]) is expected
