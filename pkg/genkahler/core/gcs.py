"""
Generalized complex structures as exact matrices.

Every structure is a 4n x 4n matrix acting on column vectors in the complex
frame (d_z, d_zb, dz, dzb). L_J is the -i eigenspace. The pairing
<d_k, dx_k> = 1/2 has matrix Q = [[0, I/2], [I/2, 0]] and J is orthogonal when
J^T Q J = Q.
"""
import dataclasses
import logging
import typing as t

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import PolyRing

from genkahler.core.clifford import ExpDescriptor, adjoint_on_sections
from genkahler.core.coeffring import (
    I_UNIT,
    PolyScalar,
    chart_dim,
    conj,
    depends_on_t,
    eval_at,
    gauss_conj,
    substitute_t,
    t_gen,
    truncate_t,
)
from genkahler.core.errors import (
    DegenerateError,
    IndefiniteMetricError,
    NonCommutingError,
    NotClosedError,
    NotPoissonError,
    UsageError,
)
from genkahler.core.linalg import (
    identity,
    independent,
    intersection_dim,
    inverse,
    is_positive_definite,
    kernel,
    rank,
    span_contains,
    to_matrix,
)
from genkahler.core.tensorcalc import (
    Form,
    GenSection,
    Polyvector,
    courant,
    exterior_d,
    interior,
    is_poisson,
)

# Set up logging
logger = logging.getLogger(__name__)

Vector = t.List[t.Any]


# ---------- frame helpers -----------------------------------------------------

def poly_matrix(R: PolyRing, rows: t.Sequence[t.Sequence[PolyScalar]]) -> DomainMatrix:
    """Dense DomainMatrix over the coefficient ring."""
    K = R.to_domain()
    return DomainMatrix([[K.convert(c) for c in row] for row in rows], (len(rows), len(rows[0])), K)


def poly_identity(R: PolyRing, size: int) -> DomainMatrix:
    return poly_matrix(R, [[R.one if i == j else R.zero for j in range(size)] for i in range(size)])


def pairing_matrix(n: int) -> DomainMatrix:
    """Q with <E, F> = e^T Q f."""
    half = QQ_I(QQ(1, 2))
    size = 4 * n
    rows = [[QQ_I.zero] * size for _ in range(size)]
    for k in range(2 * n):
        rows[k][2 * n + k] = half
        rows[2 * n + k][k] = half
    return to_matrix(rows, size)


def swap_permutation(n: int) -> t.List[int]:
    """Index permutation induced by complex conjugation on the frame."""
    def swap(k: int) -> int:
        block, r = divmod(k, n)
        return (block ^ 1) * n + r

    return [swap(k) for k in range(4 * n)]


def swap_matrix(n: int) -> DomainMatrix:
    perm = swap_permutation(n)
    size = 4 * n
    return to_matrix([[QQ_I.one if perm[i] == j else QQ_I.zero for j in range(size)] for i in range(size)], size)


def conj_vector(vec: Vector, n: int) -> Vector:
    """Coordinates of the complex conjugate section."""
    perm = swap_permutation(n)
    return [gauss_conj(vec[perm[a]]) for a in range(4 * n)]


def frame_vectors(frame: t.Sequence[GenSection], point, t_value: t.Any = None) -> t.List[Vector]:
    return [s.to_vector(point, t_value) for s in frame]


def structure_from_space(L: t.Sequence[Vector], n: int) -> DomainMatrix:
    """Matrix with -i on span(L) and +i on its conjugate.

    Raises:
        DegenerateError: If L + conj(L) does not span the whole space
    """
    size = 4 * n
    L = independent(L, size)
    conjugates = [conj_vector(v, n) for v in L]
    if len(L) != 2 * n or rank(L + conjugates, size) != size:
        raise DegenerateError(f"space of dimension {len(L)} does not define a complex structure")
    basis = to_matrix([list(col) for col in zip(*(L + conjugates))], size)
    diag = [[QQ_I.zero] * size for _ in range(size)]
    for k in range(size):
        diag[k][k] = -I_UNIT if k < 2 * n else I_UNIT
    return basis * to_matrix(diag, size) * inverse(basis)


# ---------- structures --------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class GCStructure:
    """Almost generalized complex structure with polynomial entries.

    Attributes:
        matrix: 4n x 4n DomainMatrix over the coefficient ring (entries may contain t)
        name: Short label used in reports
        frame: Optional polynomial frame of L_J
    """
    matrix: DomainMatrix
    name: str = "J"
    frame: t.Optional[t.Tuple[GenSection, ...]] = dataclasses.field(default=None, compare=False)

    @property
    def ring(self) -> PolyRing:
        return self.matrix.domain.ring

    @property
    def n(self) -> int:
        return chart_dim(self.ring)

    def entries(self) -> t.List[t.List[PolyScalar]]:
        return self.matrix.to_list()

    def depends_on_t(self) -> bool:
        return any(depends_on_t(c) for row in self.entries() for c in row)

    def at(self, point, t_value: t.Any = None) -> DomainMatrix:
        """Exact QQ_I matrix at a real point (and value of t)."""
        return self.matrix.applyfunc(lambda p: eval_at(p, point, t_value), QQ_I)

    def substitute_t(self, value: t.Any) -> "GCStructure":
        return GCStructure(self.matrix.applyfunc(lambda p: substitute_t(p, value)), self.name)

    def truncate(self, order: int) -> "GCStructure":
        return GCStructure(self.matrix.applyfunc(lambda p: truncate_t(p, order)), self.name, self.frame)

    def upper_right(self) -> DomainMatrix:
        """Block sending covectors to vectors."""
        n2 = 2 * self.n
        return self.matrix.extract(list(range(n2)), list(range(n2, 2 * n2)))

    def lower_left(self) -> DomainMatrix:
        n2 = 2 * self.n
        return self.matrix.extract(list(range(n2, 2 * n2)), list(range(n2)))

    def is_almost_complex(self) -> bool:
        """J^2 = -I identically."""
        return self.matrix * self.matrix == -poly_identity(self.ring, 4 * self.n)

    def is_orthogonal(self) -> bool:
        """J^T Q J = Q identically."""
        Q = pairing_matrix(self.n).convert_to(self.matrix.domain)
        return self.matrix.transpose() * Q * self.matrix == Q

    def is_real(self) -> bool:
        """J commutes with complex conjugation."""
        perm = swap_permutation(self.n)
        rows = self.entries()
        return all(conj(rows[perm[i]][perm[j]]) == rows[i][j] for i in range(len(rows)) for j in range(len(rows)))


def make_JJ(R: PolyRing) -> GCStructure:
    """J_J = diag(i, -i, -i, i); L = T^{0,1} + Lambda^{1,0}."""
    n = chart_dim(R)
    diag = [I_UNIT] * n + [-I_UNIT] * n + [-I_UNIT] * n + [I_UNIT] * n
    rows = [[R.ground_new(diag[i]) if i == j else R.zero for j in range(4 * n)] for i in range(4 * n)]
    frame = [GenSection.from_vector(R, [R.one if a == n + j else R.zero for a in range(4 * n)]) for j in range(n)]
    frame += [GenSection.from_vector(R, [R.one if a == 2 * n + j else R.zero for a in range(4 * n)]) for j in range(n)]
    return GCStructure(poly_matrix(R, rows), "J_J", tuple(frame))


def flat_matrix(omega: Form) -> t.List[t.List[t.Any]]:
    """2n x 2n matrix of v -> i_v omega (column k is the image of the k-th vector)."""
    if not omega.is_constant():
        raise UsageError("symplectic form must have constant coefficients")
    R = omega.ring
    n2 = 2 * omega.n
    columns = []
    for k in range(n2):
        image = interior(Polyvector.basis(R, (k,)), omega)
        values = image.constant_values()
        columns.append([values.get((m,), QQ_I.zero) for m in range(n2)])
    return [[columns[k][m] for k in range(n2)] for m in range(n2)]


def make_Jomega(omega: Form) -> GCStructure:
    """J_omega = [[0, -W^{-1}], [W, 0]] with W v = i_v omega, so L = {v + i i_v omega} = ker e^{i omega}.

    Raises:
        DegenerateError: If omega is degenerate
    """
    R = omega.ring
    n = omega.n
    n2 = 2 * n
    W = to_matrix(flat_matrix(omega), n2)
    if not W.det():
        raise DegenerateError("symplectic form is degenerate")
    Winv = inverse(W).to_list()
    Wl = W.to_list()
    rows = [[R.zero] * (2 * n2) for _ in range(2 * n2)]
    for i in range(n2):
        for j in range(n2):
            rows[i][n2 + j] = R.ground_new(-Winv[i][j])
            rows[n2 + i][j] = R.ground_new(Wl[i][j])
    frame = []
    for k in range(n2):
        v = Polyvector.basis(R, (k,))
        frame.append(GenSection(v, interior(v, omega) * I_UNIT))
    return GCStructure(poly_matrix(R, rows), "J_omega", tuple(frame))


def adjoint_matrix(g: ExpDescriptor, order: t.Optional[int] = None) -> DomainMatrix:
    return poly_matrix(g.ring, g.matrix(order))


def conjugate(J: GCStructure, g: ExpDescriptor, name: t.Optional[str] = None) -> GCStructure:
    """Ad_g J Ad_g^{-1}, carrying a polynomial frame along when J has one."""
    M = adjoint_matrix(g) * J.matrix * adjoint_matrix(g.inverse())
    frame = None
    if J.frame is not None:
        frame = tuple(adjoint_on_sections(g, s) for s in J.frame)
    return GCStructure(M, name or J.name, frame)


def make_J_beta_t(beta: Polyvector, check: bool = True) -> GCStructure:
    """J_{beta t} = Ad_{e^{at}} J_J Ad_{e^{-at}} with a = beta + conj(beta) and t symbolic.

    Args:
        beta: Holomorphic 2-vector
        check: Require [beta, beta] = 0; disable to build the almost structure of any beta

    Raises:
        NotPoissonError: If check is set and beta is not Poisson
    """
    if not (beta.is_zero() or beta.is_homogeneous(2)):
        raise UsageError("make_J_beta_t needs a 2-vector")
    if check and not is_poisson(beta):
        raise NotPoissonError("[beta, beta] != 0")
    R = beta.ring
    a = beta + beta.conj()
    g = ExpDescriptor.bivector_exp(a * t_gen(R))
    return conjugate(make_JJ(R), g, "J_beta_t")


def b_field_transform(J: GCStructure, b: Form, require_real: bool = True) -> GCStructure:
    """Ad_{e^b} J Ad_{e^{-b}} for a closed 2-form b.

    Raises:
        NotClosedError: If db != 0
        UsageError: If b is not a real 2-form
    """
    if not (b.is_zero() or b.is_homogeneous(2)):
        raise UsageError("a b-field must be a 2-form")
    if not exterior_d(b).is_zero():
        raise NotClosedError("b-field is not closed")
    if require_real and not b.is_real():
        raise UsageError("b-field must be real")
    return conjugate(J, ExpDescriptor.bfield(b), f"{J.name}_b")


def symbolic_frame(J: GCStructure) -> t.Tuple[GenSection, ...]:
    if J.frame is None:
        raise UsageError(f"{J.name} carries no polynomial frame; use eigenframe at points")
    return J.frame


# ---------- pointwise checks --------------------------------------------------

def eigenframe(J, point, t_value: t.Any = None) -> t.List[Vector]:
    """Basis of L_J = ker(J + iI) at a point.

    Raises:
        DegenerateError: If the kernel does not have dimension 2n
    """
    M = J.at(point, t_value)
    size = M.shape[0]
    shifted = M + identity(size) * I_UNIT
    L = kernel(shifted.to_list(), size)
    if len(L) != size // 2:
        raise DegenerateError(f"-i eigenspace has dimension {len(L)}, expected {size // 2}")
    return L


def is_almost_complex_at(J, point, t_value: t.Any = None) -> bool:
    """dim L_J = 2n and L_J meets its conjugate trivially."""
    n = J.n
    try:
        L = eigenframe(J, point, t_value)
    except DegenerateError:
        return False
    return intersection_dim(L, [conj_vector(v, n) for v in L], 4 * n) == 0


@dataclasses.dataclass
class IntegrabilityReport:
    """Outcome of a Courant involutivity check.

    Attributes:
        integrable: True if every bracket stays in L_J at every sample
        symbolic: True if every bracket vanished identically
        failures: (i, j, sample index) triples whose bracket leaves L_J
    """
    integrable: bool
    symbolic: bool
    failures: t.List[t.Tuple[int, int, int]] = dataclasses.field(default_factory=list)


def integrability_check(J: GCStructure, points: t.Sequence, t_value: t.Any = None) -> IntegrabilityReport:
    """Courant involutivity of L_J from its polynomial frame.

    Brackets that vanish identically settle the question symbolically; the
    rest are tested for membership in L_J by exact rank at every sample.
    """
    frame = symbolic_frame(J)
    size = 4 * J.n
    brackets = {}
    for i in range(len(frame)):
        for j in range(i + 1, len(frame)):
            bracket = courant(frame[i], frame[j])
            if not bracket.is_zero():
                brackets[(i, j)] = bracket
    if not brackets:
        return IntegrabilityReport(True, True)
    failures = []
    for idx, point in enumerate(points):
        basis = frame_vectors(frame, point, t_value)
        for (i, j), br in brackets.items():
            if not span_contains(basis, br.to_vector(point, t_value), size):
                failures.append((i, j, idx))
    if failures:
        logger.info(f"{J.name}: {len(failures)} bracket failures over {len(points)} samples")
    return IntegrabilityReport(not failures, False, failures)


def type_of_matrix(M: DomainMatrix) -> int:
    """n - rank(upper-right block) / 2 for an exact 4n x 4n structure matrix."""
    n2 = M.shape[0] // 2
    block = M.extract(list(range(n2)), list(range(n2, 2 * n2)))
    return n2 // 2 - block.rank() // 2


def type_at_point(J, point, t_value: t.Any = None) -> int:
    return type_of_matrix(J.at(point, t_value))


def poisson_rank_at_point(beta: Polyvector, point) -> int:
    """Half the rank of the coefficient matrix of beta at a point."""
    n2 = 2 * beta.n
    values = beta.values(point)
    rows = [[QQ_I.zero] * n2 for _ in range(n2)]
    for (j, k), c in values.items():
        rows[j][k] = c
        rows[k][j] = -c
    return to_matrix(rows, n2).rank() // 2


# ---------- generalized metrics -----------------------------------------------

@dataclasses.dataclass
class GenMetric:
    """G = -J0 J1 for a commuting pair.

    Attributes:
        J0: First structure
        J1: Second structure
        matrix: Symbolic G when both structures are symbolic, else None
    """
    J0: t.Any
    J1: t.Any
    matrix: t.Optional[DomainMatrix] = None

    @property
    def n(self) -> int:
        return self.J0.n

    def at(self, point, t_value: t.Any = None) -> DomainMatrix:
        if self.matrix is not None:
            return self.matrix.applyfunc(lambda p: eval_at(p, point, t_value), QQ_I)
        return -(self.J0.at(point, t_value) * self.J1.at(point, t_value))

    def hermitian_at(self, point, t_value: t.Any = None) -> DomainMatrix:
        """Matrix H with conj(e)^T H e = <G E, conj(E)>."""
        n = self.n
        return swap_matrix(n) * pairing_matrix(n) * self.at(point, t_value)

    def is_positive_at(self, point, t_value: t.Any = None) -> bool:
        H = self.hermitian_at(point, t_value)
        rows = H.to_list()
        size = len(rows)
        hermitian = all(rows[i][j] == gauss_conj(rows[j][i]) for i in range(size) for j in range(size))
        return hermitian and is_positive_definite(H)


def _commute_at(J0, J1, point, t_value) -> bool:
    A, B = J0.at(point, t_value), J1.at(point, t_value)
    return A * B == B * A


def gen_metric(J0, J1) -> GenMetric:
    """Generalized metric of a commuting pair, checked symbolically when possible.

    Raises:
        NonCommutingError: If J0 J1 != J1 J0 identically
    """
    if isinstance(J0, GCStructure) and isinstance(J1, GCStructure):
        if J0.matrix * J1.matrix != J1.matrix * J0.matrix:
            raise NonCommutingError(f"{J0.name} and {J1.name} do not commute")
        return GenMetric(J0, J1, -(J0.matrix * J1.matrix))
    return GenMetric(J0, J1)


@dataclasses.dataclass
class CSplit:
    """C+ and C- at a point with their (g, b) presentation.

    Attributes:
        plus: Basis of C+ (complexified)
        minus: Basis of C-
        g: Matrix g[k][l] = g(e_k, e_l) on the vector frame
        b: Constant 2-form b
    """
    plus: t.List[Vector]
    minus: t.List[Vector]
    g: t.List[t.List[t.Any]]
    b: Form


def _graph_map(basis: t.List[Vector], n2: int) -> t.List[t.List[t.Any]]:
    V = to_matrix([[v[k] for v in basis] for k in range(n2)], n2)
    if not V.det():
        raise DegenerateError("eigenbundle is not a graph over T")
    T = to_matrix([[v[n2 + k] for v in basis] for k in range(n2)], n2)
    return (T * inverse(V)).to_list()


def c_split(G: GenMetric, point, t_value: t.Any = None) -> CSplit:
    """Eigenbundles C+- of G at a point and g, b with C+- = {v +- g(v) + i_v b}."""
    M = G.at(point, t_value)
    size = M.shape[0]
    n2 = size // 2
    eye = identity(size)
    plus = kernel((M - eye).to_list(), size)
    minus = kernel((M + eye).to_list(), size)
    if len(plus) != n2 or len(minus) != n2:
        raise IndefiniteMetricError(f"eigenbundles of G have dimensions {len(plus)}, {len(minus)}")
    mp, mm = _graph_map(plus, n2), _graph_map(minus, n2)
    half = QQ_I(QQ(1, 2))
    # column k of mp is g(e_k) + i_{e_k} b
    g = [[(mp[l][k] - mm[l][k]) * half for l in range(n2)] for k in range(n2)]
    R = G.J0.ring
    b_comps = {}
    for k in range(n2):
        for l in range(k + 1, n2):
            value = (mp[l][k] + mm[l][k]) * half
            if value:
                b_comps[(k, l)] = value
    return CSplit(plus, minus, g, Form(R, b_comps))


@dataclasses.dataclass
class KahlerPairReport:
    """Outcome of kahler_pair_check.

    Attributes:
        commuting: J0 J1 = J1 J0 (symbolically, or at every sample)
        positive_at: Per-sample positivity of <G., .>
        symbolic: Commutation was decided symbolically
    """
    commuting: bool
    positive_at: t.List[bool]
    symbolic: bool

    @property
    def valid(self) -> bool:
        return self.commuting and all(self.positive_at)


def kahler_pair_check(J0, J1, points: t.Sequence, t_value: t.Any = None) -> KahlerPairReport:
    """Commutation plus positivity of G = -J0 J1 at every sample point."""
    symbolic = isinstance(J0, GCStructure) and isinstance(J1, GCStructure)
    try:
        G = gen_metric(J0, J1)
    except NonCommutingError as e:
        logger.info(f"Kaehler pair check: {e}")
        return KahlerPairReport(False, [], True)
    if not symbolic and not all(_commute_at(J0, J1, x, t_value) for x in points):
        return KahlerPairReport(False, [], False)
    positive = [G.is_positive_at(x, t_value) for x in points]
    if not all(positive):
        logger.warning(f"generalized metric not positive at {positive.count(False)} of {len(points)} samples")
    return KahlerPairReport(True, positive, symbolic)
