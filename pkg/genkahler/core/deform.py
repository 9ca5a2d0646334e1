"""
Order-by-order deformation of the Kaehler spinor e^{i omega} along a Poisson bivector.

Given a holomorphic Poisson beta and a constant Kaehler form omega, the solver
finds b(t) = sum_k t^k (h_k + p_k), each term in K^1 (real h, real (1,1) form p
with Lambda_omega p + 2h = 0), such that

    d(e^{a t} e^{b(t)} e^{i omega}) = 0  mod t^{T+1},   a = beta + conj(beta).

Here e^{a t} is the spin lift of the section map v + theta -> v + t a^sharp(theta) + theta,
the same map that conjugates J_J into J_beta_t.

At order k the unknown enters only through d((h_k + p_k) ^ psi), so each order
is an exact linear system over QQ in the coefficients of a real (1,1) ansatz of
bounded polynomial degree.
"""
import dataclasses
import itertools
import logging
import random
import typing as t

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.rings import PolyRing

from genkahler.config import DEFAULT_DEGREE_SLACK, MAX_ORDER
from genkahler.core.clifford import CliffordElem, ExpDescriptor, adjoint_on_sections, bch_log, commutator, exp_action, spin_action
from genkahler.core.coeffring import (
    I_UNIT,
    PolyScalar,
    TruncatedSeries,
    chart_dim,
    conj,
    make_ring,
    random_poly,
    spatial_degree,
    t_coefficient,
    t_gen,
    truncate_t,
)
from genkahler.core.errors import DegreeBoundError, NotPoissonError, UsageError, VerificationError
from genkahler.core.gcs import GCStructure, make_JJ, make_J_beta_t, poly_matrix
from genkahler.core.linalg import rank, solve_affine
from genkahler.core.spinor import deformed_spinor_series
from genkahler.core.tensorcalc import (
    Form,
    GenSection,
    Polyvector,
    d_z,
    delbar,
    differential,
    exterior_d,
    form_exp,
    homotopy,
    interior,
    is_poisson,
    kahler_exponential,
    lefschetz_contract,
    multi_indices,
)

# Set up logging
logger = logging.getLogger(__name__)


# ---------- K^1 ---------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class KOneElem:
    """Element h + p of K^1.

    Attributes:
        h: Real scalar function
        p: Real form of bidegree (1,1)
    """
    h: PolyScalar
    p: Form

    @classmethod
    def zero(cls, R: PolyRing) -> "KOneElem":
        return cls(R.zero, Form.zero(R))

    def as_form(self) -> Form:
        return Form.from_poly(self.h) + self.p

    def is_zero(self) -> bool:
        return not self.h and self.p.is_zero()


def k1_membership(h: PolyScalar, p: Form, omega: Form) -> bool:
    """Lambda_omega p + 2h = 0 with h and p real and p of bidegree (1,1)."""
    if not p.is_zero() and p.bidegrees() != [(1, 1)]:
        return False
    if not p.is_real() or conj(h) != h:
        return False
    return lefschetz_contract(p, omega) + 2 * h == 0


def k2_membership(phi: Form, omega: Form) -> bool:
    """phi = eta ^ e^{i omega} with eta in Lambda^1 + Lambda^{2,1} + Lambda^{1,2}."""
    eta = form_exp(omega * (-I_UNIT)).wedge(phi)
    allowed = {(1, 0), (0, 1), (2, 1), (1, 2)}
    return all(eta.bidegree(idx) in allowed for idx in eta.components)


def real_11_basis(R: PolyRing, degree: int) -> t.List[Form]:
    """Real (1,1) forms m dz_j ^ dzb_l + conj and i(m dz_j ^ dzb_l - conj), deg m = degree.

    Each conjugate pair of terms contributes once, so the list spans the real
    (1,1) forms of that coefficient degree over QQ.
    """
    n = chart_dim(R)
    basis = []
    seen = set()
    for j, l in itertools.product(range(n), repeat=2):
        for combo in itertools.combinations_with_replacement(range(2 * n), degree):
            exps = [0] * R.ngens
            for k in combo:
                exps[k] += 1
            mirror = exps[n:2 * n] + exps[:n] + exps[2 * n:]
            key = (j, l, tuple(exps))
            partner = (l, j, tuple(mirror))
            if partner in seen:
                continue
            seen.add(key)
            term = Form(R, {(j, n + l): R.term_new(tuple(exps), QQ_I.one)})
            for candidate in (term + term.conj(), (term - term.conj()) * I_UNIT):
                if not candidate.is_zero():
                    basis.append(candidate)
    return basis


# ---------- deformation series ------------------------------------------------

@dataclasses.dataclass
class DeformationSeries:
    """Truncated solution b(t) = sum_k t^k b_k of the closedness condition.

    Attributes:
        beta: Holomorphic Poisson bivector
        omega: Constant Kaehler form
        order: Truncation order T
        b_coeffs: b_1, ..., b_T
        degree_bound: Degree bound D used by the solver
        shift: Harmonic shift added to b_1, if any
    """
    beta: Polyvector
    omega: Form
    order: int
    b_coeffs: t.List[KOneElem] = dataclasses.field(default_factory=list)
    degree_bound: int = 0
    shift: t.Optional[Form] = None

    @property
    def ring(self) -> PolyRing:
        return self.omega.ring

    @property
    def a(self) -> Polyvector:
        return self.beta + self.beta.conj()

    @property
    def psi0(self) -> Form:
        return kahler_exponential(self.omega)

    def b_scalar(self) -> TruncatedSeries:
        tt = t_gen(self.ring)
        poly = self.ring.zero
        for k, bk in enumerate(self.b_coeffs, start=1):
            poly += bk.h * tt ** k
        return TruncatedSeries.from_poly(poly, self.order)

    def b_two_form(self) -> Form:
        tt = t_gen(self.ring)
        result = Form.zero(self.ring)
        for k, bk in enumerate(self.b_coeffs, start=1):
            result = result + bk.p * tt ** k
        return result

    def b_form(self) -> Form:
        return Form.from_poly(self.b_scalar().poly) + self.b_two_form()

    def b_clifford(self) -> CliffordElem:
        return CliffordElem.from_form(self.b_form())


def _check_kahler(omega: Form) -> None:
    if not omega.is_constant() or omega.bidegrees() != [(1, 1)] or not omega.is_real():
        raise UsageError("omega must be a constant real (1,1) form")
    lefschetz_contract(omega, omega)


def _t_part(phi: Form, k: int) -> Form:
    return phi.map_coefficients(lambda c: t_coefficient(c, k))


def residual(series: DeformationSeries, order: t.Optional[int] = None) -> t.List[Form]:
    """t-coefficients 0..T of d(e^{a t} e^{b(t)} psi_0), recomputed from scratch."""
    order = series.order if order is None else order
    d_psi = exterior_d(deformed_spinor_series(series, order))
    return [_t_part(d_psi, k) for k in range(order + 1)]


def residual_zero_through(series: DeformationSeries) -> int:
    """Largest k with all residual coefficients up to t^k zero, -1 if t^0 fails."""
    last = -1
    for k, part in enumerate(residual(series)):
        if not part.is_zero():
            break
        last = k
    return last


def first_order_source(beta: Polyvector, omega: Form) -> Form:
    """d(X . psi_0) with e^X the spin lift of e^a; the term b_1 has to cancel at order one.

    Raises:
        NotPoissonError: If beta is not Poisson
    """
    if not is_poisson(beta):
        raise NotPoissonError("[beta, beta] != 0")
    X = ExpDescriptor.bivector_exp(beta + beta.conj()).spin_element()
    return exterior_d(spin_action(X, kahler_exponential(omega)))


def source_bidegrees(source: Form, omega: Form) -> t.List[t.Tuple[int, int]]:
    """Bidegrees of eta with source = eta ^ e^{i omega}."""
    return form_exp(omega * (-I_UNIT)).wedge(source).bidegrees()


def _flatten(phi: Form) -> t.Dict[t.Tuple, t.Any]:
    return {(idx, monom): c for idx, coeff in phi.components.items() for monom, c in coeff.items()}


def _image(basis_form: Form, omega: Form, psi0: Form) -> Form:
    h = lefschetz_contract(basis_form, omega) * QQ_I(QQ(-1, 2))
    return (differential(h) + exterior_d(basis_form)).wedge(psi0)


def _solve_with_basis(basis: t.List[Form], images: t.List[Form], target: Form) -> t.Optional[Form]:
    """Real combination sum x_i B_i with sum x_i images_i = target, or None."""
    rows: t.Dict[t.Tuple, int] = {}
    equations: t.Dict[int, t.Dict[int, t.Any]] = {}
    rhs: t.Dict[int, t.Any] = {}

    def row(key) -> int:
        if key not in rows:
            rows[key] = len(rows)
        return rows[key]

    for col, image in enumerate(images):
        for key, c in _flatten(image).items():
            for part, value in (("re", c.x), ("im", c.y)):
                if value:
                    equations.setdefault(row(key + (part,)), {})[col] = value
    for key, c in _flatten(target).items():
        for part, value in (("re", c.x), ("im", c.y)):
            if value:
                rhs[row(key + (part,))] = value
    solution = solve_affine(equations, rhs, len(rows), len(basis), QQ)
    if solution is None:
        return None
    result = Form.zero(target.ring)
    for x, form in zip(solution, basis):
        if x:
            result = result + form * x
    return result


def _normalize(p: Form, omega: Form) -> KOneElem:
    """h = -Lambda p / 2, with a constant part of h moved into p as a multiple of omega."""
    R = p.ring
    n = chart_dim(R)
    h = lefschetz_contract(p, omega) * QQ_I(QQ(-1, 2))
    c = h.get(R.zero_monom, QQ_I.zero)
    if c:
        p = p + omega * (c * QQ_I(QQ(2, n)))
        h = h - R.ground_new(c)
    return KOneElem(h, p)


def solve_order_k(series: DeformationSeries, k: int) -> KOneElem:
    """Find b_k in K^1 cancelling the order-k residual, given b_1..b_{k-1}.

    Raises:
        DegreeBoundError: If no solution of degree at most the bound exists
        VerificationError: If the obstruction fails its exactness certificate
    """
    if len(series.b_coeffs) != k - 1:
        raise UsageError(f"order {k} needs b_1..b_{k - 1}, have {len(series.b_coeffs)}")
    R = series.ring
    obstruction = _t_part(exterior_d(deformed_spinor_series(series, k)), k)
    if obstruction.is_zero():
        logger.debug(f"order {k}: obstruction vanishes")
        return KOneElem.zero(R)
    logger.debug(f"order {k}: obstruction has {len(obstruction.components)} components")
    # closed by construction; the radial primitive certifies it is exact on the chart
    if exterior_d(homotopy(obstruction)) != obstruction:
        raise VerificationError(f"order {k} obstruction is not d-exact")
    psi0 = series.psi0
    target = -obstruction
    basis: t.List[Form] = []
    images: t.List[Form] = []
    for degree in range(series.degree_bound + 1):
        new = real_11_basis(R, degree)
        basis.extend(new)
        images.extend(_image(b, series.omega, psi0) for b in new)
        p = _solve_with_basis(basis, images, target)
        if p is not None:
            logger.info(f"order {k} solved with ansatz degree {degree}")
            return _normalize(p, series.omega)
    raise DegreeBoundError(
        f"no solution at order {k} within degree bound {series.degree_bound}",
        order=k,
        degree_bound=series.degree_bound,
        obstruction_in_k2=k2_membership(obstruction, series.omega),
    )


def default_degree_bound(beta: Polyvector) -> int:
    """Ansatz degree bound deg(beta) + DEFAULT_DEGREE_SLACK."""
    deg = max((spatial_degree(c) for _, c in beta.items()), default=0)
    return deg + DEFAULT_DEGREE_SLACK


def solve_deformation(
    beta: Polyvector,
    omega: Form,
    order: int,
    shift: t.Optional[Form] = None,
    degree_bound: t.Optional[int] = None,
) -> DeformationSeries:
    """Solve the closedness condition through order T.

    Args:
        beta: Holomorphic Poisson bivector
        omega: Constant Kaehler form
        order: Truncation order T, 1 <= T <= MAX_ORDER
        shift: Constant real primitive (1,1) form added to b_1
        degree_bound: Ansatz degree bound, default deg(beta) + slack

    Returns:
        The series, its residual re-verified to vanish through order T

    Raises:
        NotPoissonError: If beta is not Poisson
        DegreeBoundError: If some order has no solution within the bound
    """
    if order < 1 or order > MAX_ORDER:
        raise UsageError(f"order must be in 1..{MAX_ORDER}, got {order}")
    if not is_poisson(beta):
        raise NotPoissonError("[beta, beta] != 0")
    _check_kahler(omega)
    if shift is not None:
        _check_shift(shift, omega)
    bound = default_degree_bound(beta) if degree_bound is None else degree_bound
    series = DeformationSeries(beta, omega, order, [], bound, shift)
    for k in range(1, order + 1):
        bk = solve_order_k(series, k)
        if k == 1 and shift is not None:
            bk = KOneElem(bk.h, bk.p + shift)
        series.b_coeffs.append(bk)
        logger.info(f"deformation order {k}/{order} done")
    reached = residual_zero_through(series)
    if reached < order:
        raise VerificationError(f"residual does not vanish at order {reached + 1}")
    return series


def _check_shift(shift: Form, omega: Form) -> None:
    if not shift.is_zero():
        if not shift.is_constant() or shift.bidegrees() != [(1, 1)] or not shift.is_real():
            raise UsageError("harmonic shift must be a constant real (1,1) form")
        if lefschetz_contract(shift, omega):
            raise UsageError("harmonic shift must be primitive")


# ---------- consistency checks ------------------------------------------------

def _random_forms(R: PolyRing, count: int, rng: random.Random) -> t.List[Form]:
    indices = multi_indices(2 * chart_dim(R))
    forms = []
    for _ in range(count):
        comps = {}
        for idx in rng.sample(indices, 3):
            comps[idx] = random_poly(R, rng, degree=1, terms=2)
        forms.append(Form(R, comps))
    return forms


def bch_consistency(series: DeformationSeries, rng: random.Random, count: int = 10) -> bool:
    """e^{z(t)} with z = log(e^{a t} e^{b(t)}) acts like e^{a t} e^{b(t)} mod t^{T+1}."""
    T = series.order
    R = series.ring
    a = ExpDescriptor.bivector_exp(series.a).spin_element()
    b = series.b_clifford()
    z = bch_log(a, b, T)
    at = a * t_gen(R)
    for phi in _random_forms(R, count, rng):
        lhs = exp_action(z, phi, T)
        rhs = exp_action(at, exp_action(b, phi, T) if not b.is_zero() else phi.truncate(T), T)
        if lhs != rhs:
            return False
    return True


def adjoint_series_matrix(z: CliffordElem, order: int) -> t.List[t.List[PolyScalar]]:
    """Matrix of E -> e^z E e^{-z} = sum_k ad_z^k E / k! on sections, mod t^{order+1}."""
    R = z.ring
    size = 4 * chart_dim(R)
    columns = []
    for a in range(size):
        term = CliffordElem.generator(R, a)
        total = term
        k = 0
        while True:
            k += 1
            term = commutator(z, term, order) * QQ_I(QQ(1, k))
            if term.is_zero():
                break
            total = total + term
        columns.append(total.truncate(order).to_section().entries())
    return [[columns[j][i] for j in range(size)] for i in range(size)]


def conjugation_consistency(series: DeformationSeries) -> bool:
    """Ad_{e^{z(t)}} J_J equals J_beta_t mod t^{T+1}, with z(t) from the BCH series."""
    T = series.order
    R = series.ring
    z = bch_log(ExpDescriptor.bivector_exp(series.a).spin_element(), series.b_clifford(), T)
    forward = poly_matrix(R, adjoint_series_matrix(z, T))
    backward = poly_matrix(R, adjoint_series_matrix(-z, T))
    conjugated = GCStructure(forward * make_JJ(R).matrix * backward).truncate(T)
    return conjugated.matrix == make_J_beta_t(series.beta).truncate(T).matrix


# ---------- bi-Hermitian first order ------------------------------------------

@dataclasses.dataclass
class KSClass:
    """(1,0)-vector valued (0,1)-form sum K[j][l] d_j (x) dzb_l.

    Attributes:
        n: Chart dimension
        components: {(j, l): coefficient}
    """
    n: int
    components: t.Dict[t.Tuple[int, int], PolyScalar]

    def is_zero(self) -> bool:
        return not any(self.components.values())

    def __add__(self, other: "KSClass") -> "KSClass":
        out = dict(self.components)
        for key, c in other.components.items():
            out[key] = out[key] + c if key in out else c
        return KSClass(self.n, {k: v for k, v in out.items() if v})

    def delbar_closed(self, R: PolyRing) -> bool:
        """Each vector component, as a (0,1) form, is delbar-closed."""
        for j in range(self.n):
            form = Form(R, {(self.n + l,): c for (jj, l), c in self.components.items() if jj == j})
            if not delbar(form).is_zero():
                return False
        return True


def ks_class(beta: Polyvector, omega: Form) -> KSClass:
    """Contraction of beta with i omega: sum_l beta^sharp(i i_{d_zb_l} omega) (x) dzb_l."""
    R = beta.ring
    n = beta.n
    comps = {}
    for l in range(n):
        theta = interior(Polyvector.basis(R, (n + l,)), omega) * I_UNIT
        v = beta.sharp(theta)
        for j in range(n):
            c = v.coefficient((j,))
            if c:
                comps[(j, l)] = c
    return KSClass(n, comps)


@dataclasses.dataclass
class BihermitianFrames:
    """Frames Z_i^+-(t) of T^{1,0} for the complex structures J_+ and J_-, mod t^2.

    Attributes:
        plus: Z_i^+(t), from the sections in conj(L_0(t)) and conj(L_1(t))
        minus: Z_i^-(t), from the sections in conj(L_0(t)) and L_1(t)
        corrections: t-coefficients of Z_i^+(t)
        b1: 2-form part of the first-order b-field
    """
    plus: t.List[Polyvector]
    minus: t.List[Polyvector]
    corrections: t.List[Polyvector]
    b1: Form


def _first_order_section(Z: Polyvector, omega: Form, b1: Form, a: Polyvector, sign: int) -> GenSection:
    """Ad_{e^{a t}} Ad_{e^{t b1}} (Z + sign i i_Z omega) mod t^2.

    Z + i i_Z omega lies in ker e^{i omega} = L_1 and Z - i i_Z omega in its
    conjugate; both must stay in conj(L_0) = T^{1,0} + Lambda^{0,1}.

    Raises:
        VerificationError: If the b-field moves the section out of conj(L_0)
    """
    R = Z.ring
    tt = t_gen(R)
    theta = interior(Z, omega) * (I_UNIT if sign > 0 else -I_UNIT)
    E = GenSection(Z, theta + interior(Z, b1) * tt)
    if any(bd != (0, 1) for bd in E.oneform.bidegrees()):
        raise VerificationError(f"b-field leaves Lambda^(0,1): {E.oneform.bidegrees()}")
    return adjoint_on_sections(ExpDescriptor.bivector_exp(a * tt), E, order=1)


def _is_plus_i_eigenvector(J: GCStructure, E: GenSection) -> bool:
    """J E = i E mod t^2."""
    entries = E.entries()
    column = poly_matrix(J.ring, [[c] for c in entries])
    image = (J.matrix * column).to_list()
    return all(truncate_t(row[0] - c * I_UNIT, 1) == 0 for row, c in zip(image, entries))


def bihermitian_first_order(
    beta: Polyvector,
    omega: Form,
    frame: t.Optional[t.Sequence[Polyvector]] = None,
) -> BihermitianFrames:
    """First-order deformation of a holomorphic frame Z_1..Z_n under J_beta_t and e^{a t} e^{b(t)} e^{i omega}.

    Each Z_i is completed to a section of conj(L_0) meeting conj(L_1) (for
    J_+) or L_1 (for J_-), the first-order b-field b_1 from the solver is
    applied, then Ad_{e^{a t}}. The vector parts are Z_i^+-(t); every deformed
    section is checked to be a +i eigenvector of J_beta_t mod t^2.

    Raises:
        NotPoissonError: If beta is not Poisson
        UsageError: If a frame vector has antiholomorphic legs
        VerificationError: If a deformed section leaves conj(L_0(t))
    """
    R = beta.ring
    n = beta.n
    frame = list(frame) if frame is not None else [d_z(R, j) for j in range(n)]
    if any(k >= n for Z in frame for idx, _ in Z.items() for k in idx):
        raise UsageError("frame vectors must lie in T^{1,0}")
    b1 = solve_deformation(beta, omega, 1).b_coeffs[0].p
    a = beta + beta.conj()
    J = make_J_beta_t(beta)
    plus, minus, corrections = [], [], []
    for Z in frame:
        sections = {sign: _first_order_section(Z, omega, b1, a, sign) for sign in (-1, 1)}
        if not all(_is_plus_i_eigenvector(J, E) for E in sections.values()):
            raise VerificationError("deformed section is not in conj(L_0(t))")
        plus.append(sections[-1].vector)
        minus.append(sections[1].vector)
        corrections.append((sections[-1].vector - Z).map_coefficients(lambda c: t_coefficient(c, 1)))
    return BihermitianFrames(plus, minus, corrections, b1)


# ---------- torus x CP^1 obstruction ------------------------------------------

@dataclasses.dataclass
class ObstructionMatrix:
    """Data of sum_i (a_i + b_i zeta + c_i zeta^2) d_zeta ^ d_i + sum lambda_jk d_j ^ d_k.

    Attributes:
        P: n x 3 rows (a_i, b_i, c_i)
        lam: Antisymmetric n x n matrix
    """
    P: t.List[t.List[t.Any]]
    lam: t.List[t.List[t.Any]]

    def __post_init__(self):
        n = len(self.P)
        if n < 1 or any(len(row) != 3 for row in self.P):
            raise UsageError("P must be an n x 3 matrix")
        if len(self.lam) != n or any(len(row) != n for row in self.lam):
            raise UsageError("lambda must be an n x n matrix")
        self.P = [[QQ_I.convert(c) for c in row] for row in self.P]
        self.lam = [[QQ_I.convert(c) for c in row] for row in self.lam]
        if any(self.lam[j][k] != -self.lam[k][j] for j in range(n) for k in range(n)):
            raise UsageError("lambda must be antisymmetric")

    @property
    def n(self) -> int:
        return len(self.P)

    @classmethod
    def random(
        cls,
        n: int,
        rng: random.Random,
        low: int = -2,
        high: int = 2,
        rank_one: bool = False,
    ) -> "ObstructionMatrix":
        """Random entries in [low, high]; with rank_one, P = u v^T so rank P <= 1."""
        if rank_one:
            u = [rng.randint(low, high) for _ in range(n)]
            v = [rng.randint(low, high) for _ in range(3)]
            P = [[ui * vj for vj in v] for ui in u]
        else:
            P = [[rng.randint(low, high) for _ in range(3)] for _ in range(n)]
        lam = [[0] * n for _ in range(n)]
        for j, k in itertools.combinations(range(n), 2):
            value = rng.randint(low, high)
            lam[j][k], lam[k][j] = value, -value
        return cls(P, lam)


def build_torus_cp1_bivector(data: ObstructionMatrix) -> Polyvector:
    """The bivector on the chart (zeta, z_1..z_n) with zeta at index 0."""
    R = make_ring(data.n + 1)
    zeta = R.gens[0]
    comps = {}
    for i, (a, b, c) in enumerate(data.P):
        f = R.ground_new(a) + R.ground_new(b) * zeta + R.ground_new(c) * zeta ** 2
        if f:
            comps[(0, i + 1)] = f
    for j, k in itertools.combinations(range(data.n), 2):
        if data.lam[j][k]:
            comps[(j + 1, k + 1)] = data.lam[j][k]
    return Polyvector(R, comps)


@dataclasses.dataclass
class ObstructionReport:
    rank: int
    schouten_zero: bool

    @property
    def criterion_consistent(self) -> bool:
        return (self.rank <= 1) == self.schouten_zero


def obstruction_rank_test(data: ObstructionMatrix) -> ObstructionReport:
    """rank(P) and [beta, beta] = 0, computed independently."""
    r = rank(data.P, 3)
    zero = is_poisson(build_torus_cp1_bivector(data))
    report = ObstructionReport(r, zero)
    if not report.criterion_consistent:
        logger.error(f"rank criterion disagrees with the Schouten bracket for P={data.P}")
    return report

