"""
Pure spinors: annihilators, non-degeneracy, type and the structure they induce.

All kernels are computed at exact rational points; a spinor depending on t is
evaluated at a rational value of t first.
"""
import dataclasses
import itertools
import logging
import typing as t

from sympy.polys.domains import QQ_I

from genkahler.core.clifford import CliffordElem, ExpDescriptor, exp_action, spin_action
from genkahler.core.coeffring import make_ring, rational, t_gen
from genkahler.core.errors import DegenerateError, NotPureError, UsageError
from genkahler.core.gcs import conj_vector, structure_from_space
from genkahler.core.linalg import kernel, rank
from genkahler.core.tensorcalc import Form, Polyvector, contract, kahler_exponential, wedge_all

# Set up logging
logger = logging.getLogger(__name__)

Vector = t.List[t.Any]


def _evaluated(psi: Form, point, t_value: t.Any = None) -> Form:
    return psi.evaluate(point, t_value)


def kernel_at_point(psi: Form, point, t_value: t.Any = None) -> t.List[Vector]:
    """Basis of {E : E . psi(x) = 0} in the frame (d_z, d_zb, dz, dzb).

    Raises:
        NotPureError: If psi vanishes at x or the annihilator is not of dimension 2n
    """
    phi = _evaluated(psi, point, t_value)
    if phi.is_zero():
        raise NotPureError(f"spinor vanishes at {tuple(point)}")
    R = phi.ring
    size = 4 * phi.n
    images = [spin_action(CliffordElem.generator(R, a), phi).constant_values() for a in range(size)]
    keys = sorted({idx for image in images for idx in image})
    rows = [[image.get(idx, QQ_I.zero) for image in images] for idx in keys]
    L = kernel(rows, size)
    if len(L) != size // 2:
        raise NotPureError(f"annihilator has dimension {len(L)}, expected {size // 2}")
    return L


def is_pure_at(psi: Form, point, t_value: t.Any = None) -> bool:
    try:
        kernel_at_point(psi, point, t_value)
    except NotPureError:
        return False
    return True


def is_nondegenerate(psi: Form, points: t.Sequence, t_value: t.Any = None) -> bool:
    """ker psi + conj(ker psi) spans (T + T*) tensored with C at every sample."""
    size = 4 * psi.n
    for point in points:
        try:
            L = kernel_at_point(psi, point, t_value)
        except NotPureError as e:
            logger.debug(f"not pure: {e}")
            return False
        if rank(L + [conj_vector(v, psi.n) for v in L], size) != size:
            logger.debug(f"spinor degenerate at {tuple(point)}")
            return False
    return True


def type_of_spinor_at_point(psi: Form, point, t_value: t.Any = None) -> int:
    """Degree of the lowest nonzero homogeneous part of psi(x).

    Raises:
        DegenerateError: If psi vanishes at x
    """
    phi = _evaluated(psi, point, t_value)
    if phi.is_zero():
        raise DegenerateError(f"spinor vanishes at {tuple(point)}")
    return min(phi.degrees())


@dataclasses.dataclass
class PointwiseStructure:
    """Generalized complex structure J_psi with L = ker psi, built point by point.

    Exposes the ``at`` interface of GCStructure so it can stand in for one in
    Kaehler pair checks.

    Attributes:
        psi: The spinor
        name: Label used in reports
    """
    psi: Form
    name: str = "J_psi"
    _cache: t.Dict[t.Any, t.Any] = dataclasses.field(default_factory=dict, repr=False, compare=False)

    @property
    def ring(self):
        return self.psi.ring

    @property
    def n(self) -> int:
        return self.psi.n

    def at(self, point, t_value: t.Any = None):
        key = (tuple(point), str(t_value))
        if key not in self._cache:
            L = kernel_at_point(self.psi, point, t_value)
            self._cache[key] = structure_from_space(L, self.n)
        return self._cache[key]


def induced_Jpsi(psi: Form, points: t.Sequence, t_value: t.Any = None) -> PointwiseStructure:
    """The structure induced by a spinor, validated at the sample points.

    Raises:
        DegenerateError: If psi is not a non-degenerate pure spinor at some sample
    """
    if not is_nondegenerate(psi, points, t_value):
        raise DegenerateError("spinor is degenerate or impure at a sample point")
    J = PointwiseStructure(psi)
    for point in points:
        J.at(point, t_value)
    return J


def pullback_at_point(psi: Form, model, point, t_value: t.Any = None) -> Form:
    """Restriction of psi(x) to T_xM for a complex submanifold M.

    The tangent space is framed by a holomorphic basis u_1..u_m of T^{1,0}_xM
    and its conjugate, so the result is a constant form on a chart of dimension
    m, index k < m dual to u_{k+1}.

    Args:
        psi: Form on the ambient chart
        model: SubmanifoldModel containing the point
        point: Smooth sample point of the model

    Returns:
        The pulled-back constant form

    Raises:
        SingularPointError: If the generators drop rank at the point
    """
    if not model.is_complex():
        raise UsageError("pullback is implemented for complex submanifolds")
    holo = model.holomorphic_tangent_basis(point)
    m = len(holo)
    n = psi.n
    R = psi.ring
    vectors = [list(u) + [QQ_I.zero] * n for u in holo]
    vectors += [[QQ_I.zero] * n + [QQ_I(c.x, -c.y) for c in u] for u in holo]
    fields = [Polyvector.vector(R, v) for v in vectors]
    if not m:
        raise UsageError("submanifold has dimension 0")
    phi = _evaluated(psi, point, t_value)
    out = {}
    for k in range(2 * m + 1):
        for idx in itertools.combinations(range(2 * m), k):
            if not idx:
                value = phi.coefficient(())
            else:
                value = contract(wedge_all([fields[i] for i in idx]), phi).coefficient(())
            c = value.get(R.zero_monom, QQ_I.zero)
            if c:
                out[idx] = c
    return Form(make_ring(m), out)


def deformed_spinor(series, t_value: t.Any) -> Form:
    """e^{a t} e^{b(t)} e^{i omega} at a rational t, without truncation.

    e^{a t} acts through its spin lift, the exponential of -a t as a
    contraction element, so the induced structures conjugate like J_beta_t.
    The scalar part h of b(t) only rescales the spinor by e^h and is left out;
    kernels, purity and the induced structure do not see it.
    """
    psi0 = kahler_exponential(series.omega)
    b = series.b_two_form().substitute_t(t_value)
    if not b.is_zero():
        psi0 = ExpDescriptor.bfield(b).act(psi0)
    a = series.a * rational(t_value)
    if a.is_zero():
        return psi0
    return ExpDescriptor.bivector_exp(a).act(psi0)


def deformed_spinor_series(series, order: t.Optional[int] = None) -> Form:
    """e^{a t} e^{b(t)} e^{i omega} with coefficients truncated mod t^{T+1}, e^h included."""
    order = series.order if order is None else order
    R = series.omega.ring
    psi = kahler_exponential(series.omega)
    b = series.b_clifford()
    if not b.is_zero():
        psi = exp_action(b, psi, order)
    a = series.a
    if a.is_zero():
        return psi.truncate(order)
    return ExpDescriptor.bivector_exp(a * t_gen(R)).act(psi, order)
