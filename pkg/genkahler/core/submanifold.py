"""
Submanifolds cut out by polynomial ideals, checked at exact sample points.

A model stores its generators, a list of rational sample points on the zero
set and, optionally, a graph parametrization. Bundle-level statements
(conormal invariance, the J-submanifold condition, the induced structure and
the isomorphism between C+-(M) and T_M + T*_M) are verified pointwise.
"""
import dataclasses
import itertools
import logging
import random
import typing as t

from sympy.polys.domains import QQ_I
from sympy.polys.fields import field
from sympy.polys.rings import PolyRing, ring

from genkahler.config import BUCHBERGER_CAP, SAMPLE_ATTEMPTS
from genkahler.core.coeffring import (
    PolyIdeal,
    PolyScalar,
    chart_dim,
    eval_at,
    gauss_conj,
    ideal_membership,
    is_holomorphic,
    make_ring,
    point_from_complex,
    random_gauss,
)
from genkahler.core.errors import (
    NoParametrizationError,
    NonCommutingError,
    NotPoissonError,
    SampleSearchError,
    SingularPointError,
    UsageError,
    VerificationError,
)
from genkahler.core.gcs import conj_vector, eigenframe, structure_from_space
from genkahler.core.linalg import (
    identity,
    independent,
    intersection_basis,
    intersection_dim,
    kernel,
    matvec,
    rank,
    solve_affine,
    span_contains,
)
from genkahler.core.tensorcalc import (
    Form,
    Polyvector,
    differential,
    is_poisson,
    lie_bracket,
    poisson_bracket,
    sort_sign,
)

# Set up logging
logger = logging.getLogger(__name__)

Vector = t.List[t.Any]


@dataclasses.dataclass
class SubmanifoldModel:
    """Zero set of an ideal on a chart of complex dimension n.

    Attributes:
        ideal: Defining ideal
        codim: Number of independent defining equations at smooth points
        samples: Real-rational points (x, y) on the zero set
        graph: Optional graph parametrization {eliminated index: polynomial in the free coordinates}
        name: Label used in reports
    """
    ideal: PolyIdeal
    codim: int
    samples: t.List[t.Tuple] = dataclasses.field(default_factory=list)
    graph: t.Optional[t.Dict[int, PolyScalar]] = None
    name: str = "M"

    @classmethod
    def from_generators(
        cls,
        generators: t.Sequence[PolyScalar],
        codim: t.Optional[int] = None,
        samples: t.Optional[t.Sequence] = None,
        graph: t.Optional[t.Dict[int, PolyScalar]] = None,
        name: str = "M",
    ) -> "SubmanifoldModel":
        ideal = PolyIdeal.from_generators(generators)
        model = cls(ideal, codim if codim is not None else len(ideal.generators), [], graph, name)
        for point in samples or []:
            model.add_sample(point)
        return model

    @property
    def ring(self) -> PolyRing:
        return self.ideal.ring

    @property
    def n(self) -> int:
        return chart_dim(self.ring)

    def is_complex(self) -> bool:
        """True if every generator is holomorphic."""
        return all(is_holomorphic(g) for g in self.ideal.generators)

    def contains(self, point) -> bool:
        return all(not eval_at(g, point) for g in self.ideal.generators)

    def add_sample(self, point) -> None:
        """Store a sample after checking it lies on M and is smooth.

        Raises:
            UsageError: If a generator does not vanish at the point
            SingularPointError: If the differentials drop rank
        """
        point = tuple(point)
        if not self.contains(point):
            raise UsageError(f"point {point} is not on {self.name}")
        self.conormal_vectors(point)
        self.samples.append(point)

    # ---------- pointwise geometry --------------------------------------------

    def conormal_vectors(self, point) -> t.List[Vector]:
        """Basis of (N*)^C at x as 4n-vectors with zero vector part.

        Raises:
            SingularPointError: If the differentials of the generators have rank below codim
        """
        n = self.n
        covectors = []
        for g in self.ideal.generators:
            dg = differential(g).values(point)
            covectors.append([dg.get((k,), QQ_I.zero) for k in range(2 * n)])
        if rank(covectors, 2 * n) < self.codim:
            raise SingularPointError(f"{self.name} is singular at {point}")
        spanning = covectors + [_conj_covector(c, n) for c in covectors]
        return [[QQ_I.zero] * (2 * n) + c for c in independent(spanning, 2 * n)]

    def tangent_basis(self, point) -> t.List[Vector]:
        """Basis of T_xM tensored with C, as 2n-vectors in the frame (d_z, d_zb)."""
        n = self.n
        rows = [v[2 * n:] for v in self.conormal_vectors(point)]
        return kernel(rows, 2 * n)

    def holomorphic_tangent_basis(self, point) -> t.List[Vector]:
        """Basis of T^{1,0}_xM as n-vectors, for complex models."""
        if not self.is_complex():
            raise UsageError(f"{self.name} is not a complex submanifold")
        n = self.n
        rows = []
        for g in self.ideal.generators:
            dg = differential(g).values(point)
            rows.append([dg.get((k,), QQ_I.zero) for k in range(n)])
        if rank(rows, n) < self.codim:
            raise SingularPointError(f"{self.name} is singular at {point}")
        return kernel(rows, n)

    def adapted_tangent_basis(self, point) -> t.List[Vector]:
        """u_1..u_m, conj(u_1)..conj(u_m) as 2n-vectors for a complex model."""
        n = self.n
        holo = self.holomorphic_tangent_basis(point)
        return [list(u) + [QQ_I.zero] * n for u in holo] + [[QQ_I.zero] * n + [gauss_conj(c) for c in u] for u in holo]

    # ---------- sample search -------------------------------------------------

    def find_samples(self, count: int, rng: random.Random) -> t.List[t.Tuple]:
        """Add ``count`` smooth rational samples found by coordinate search.

        Each attempt draws random Gaussian rationals for all but one variable of
        a generator and takes a Gaussian-rational root in the remaining one.

        Raises:
            SampleSearchError: If the attempts run out
        """
        if not self.is_complex():
            raise SampleSearchError(f"{self.name} has non-holomorphic generators; supply samples")
        found: t.List[t.Tuple] = []
        attempts = 0
        while len(found) < count:
            if attempts >= SAMPLE_ATTEMPTS * count:
                raise SampleSearchError(f"found {len(found)} of {count} samples on {self.name}")
            attempts += 1
            values = _search_point(self.ideal.generators, self.n, rng)
            if values is None:
                continue
            point = point_from_complex(values)
            if point in self.samples:
                continue
            try:
                self.add_sample(point)
            except SingularPointError:
                continue
            found.append(point)
        logger.debug(f"{self.name}: {count} samples after {attempts} attempts")
        return found

    def ensure_samples(self, count: int, rng: random.Random) -> t.List[t.Tuple]:
        missing = count - len(self.samples)
        if missing > 0:
            self.find_samples(missing, rng)
        return self.samples[:count]


def _conj_covector(c: Vector, n: int) -> Vector:
    return [gauss_conj(c[(k + n) % (2 * n)]) for k in range(2 * n)]


def _substitute(p: PolyScalar, values: t.Dict[int, t.Any]) -> PolyScalar:
    R = p.ring
    for k, value in values.items():
        p = p.compose(R.gens[k], R.ground_new(value))
    return p


def _gaussian_roots(p: PolyScalar, var: int) -> t.List[t.Any]:
    """Gaussian-rational roots of a polynomial in the single variable ``var``."""
    S, x = ring("x", QQ_I)
    uni = S.from_dict({(m[var],): c for m, c in p.items()})
    if uni.is_ground:
        return []
    _, factors = uni.factor_list()
    roots = []
    for factor, _ in factors:
        if factor.degree() == 1:
            coeffs = dict(factor.items())
            c1 = coeffs.get((1,), QQ_I.zero)
            c0 = coeffs.get((0,), QQ_I.zero)
            roots.append(-c0 / c1)
    return roots


def _search_point(generators: t.Sequence[PolyScalar], n: int, rng: random.Random) -> t.Optional[t.List[t.Any]]:
    values: t.Dict[int, t.Any] = {}
    for g in generators:
        reduced = _substitute(g, values)
        if not reduced:
            continue
        free = sorted({k for m in reduced.itermonoms() for k in range(n) if m[k]})
        if not free:
            return None
        var = rng.choice(free)
        for k in free:
            if k != var:
                values[k] = random_gauss(rng)
        roots = _gaussian_roots(_substitute(reduced, {k: values[k] for k in free if k != var}), var)
        if not roots:
            return None
        values[var] = rng.choice(roots)
    for k in range(n):
        if k not in values:
            values[k] = random_gauss(rng)
    return [values[k] for k in range(n)]


# ---------- conormal and Poisson conditions -----------------------------------

def conormal_frame(model: SubmanifoldModel, point) -> t.List:
    """{dF_k(x)} together with conjugates, as constant 1-forms spanning (N*)^C."""
    n = model.n
    return [Form(model.ring, {(k,): c for k, c in enumerate(v[2 * n:]) if c}) for v in model.conormal_vectors(point)]


def is_conormal_invariant(J, model: SubmanifoldModel, points: t.Sequence, t_value: t.Any = None) -> bool:
    """J(x) N*_x is contained in N*_x at every sample."""
    size = 4 * model.n
    for point in points:
        N = model.conormal_vectors(point)
        M = J.at(point, t_value)
        for v in N:
            if not span_contains(N, matvec(M, v), size):
                logger.debug(f"conormal not invariant at {point}")
                return False
    return True


def is_poisson_submanifold(beta: Polyvector, model: SubmanifoldModel, cap: int = BUCHBERGER_CAP) -> bool:
    """{F, g} lies in I_M for every generator F and coordinate function g.

    Raises:
        NotPoissonError: If [beta, beta] != 0
        UndecidedAtCapError: If ideal membership is undecided
    """
    if not is_poisson(beta):
        raise NotPoissonError("[beta, beta] != 0")
    R = model.ring
    coordinates = R.gens[:2 * model.n]
    for F in model.ideal.generators:
        for g in coordinates:
            if not ideal_membership(poisson_bracket(beta, F, g), model.ideal, cap):
                return False
    return True


# ---------- J-submanifolds ----------------------------------------------------

class RankMonitor:
    """Records a dimension per sample and flags changes across samples."""

    def __init__(self, label: str):
        self.label = label
        self.values: t.List[int] = []

    def record(self, value: int) -> None:
        if self.values and value != self.values[0]:
            logger.warning(
                f"{self.label}: dimension {value} differs from {self.values[0]} at sample {len(self.values)}"
            )
        self.values.append(value)

    @property
    def jumps(self) -> bool:
        return len(set(self.values)) > 1


@dataclasses.dataclass
class JSubmanifoldReport:
    """Outcome of is_J_submanifold.

    Attributes:
        holds: q(L(M)) meets its conjugate trivially at every sample and the sequence is exact
        dim_LM: dim L_J(M) per sample
        dim_LN: dim L_J(N*) per sample
        dim_qLM: dim q(L_J(M)) per sample
        rank_jump: L_J(M) changed dimension across samples
    """
    holds: bool
    dim_LM: t.List[int]
    dim_LN: t.List[int]
    dim_qLM: t.List[int]
    rank_jump: bool


def _restricted_space(model: SubmanifoldModel, point) -> t.List[Vector]:
    """pi^{-1}(T_xM) tensored with C as 4n-vectors."""
    n = model.n
    size = 4 * n
    tangent = [list(v) + [QQ_I.zero] * (2 * n) for v in model.tangent_basis(point)]
    covectors = [[QQ_I.one if a == 2 * n + k else QQ_I.zero for a in range(size)] for k in range(2 * n)]
    return tangent + covectors


def _q(vectors: t.Sequence[Vector], tangent: t.Sequence[Vector], n: int) -> t.List[Vector]:
    """(v, theta) -> (v, theta(t_1), ..., theta(t_d)) for a tangent basis t_i."""
    out = []
    for e in vectors:
        theta = e[2 * n:]
        restricted = [sum((a * b for a, b in zip(theta, tv)), QQ_I.zero) for tv in tangent]
        out.append(list(e[:2 * n]) + restricted)
    return out


def _L_of_M(J, model: SubmanifoldModel, point, t_value) -> t.Tuple[t.List[Vector], t.List[Vector]]:
    n = model.n
    L = eigenframe(J, point, t_value)
    LM = intersection_basis(L, _restricted_space(model, point), 4 * n)
    return L, LM


def is_J_submanifold(J, model: SubmanifoldModel, points: t.Sequence, t_value: t.Any = None) -> JSubmanifoldReport:
    """q(L_J(M)) and its conjugate meet trivially and the defining sequence is exact, at each sample."""
    n = model.n
    size = 4 * n
    monitor = RankMonitor(f"L(M) on {model.name}")
    holds = True
    dim_LN, dim_qLM = [], []
    for point in points:
        L, LM = _L_of_M(J, model, point, t_value)
        tangent = model.tangent_basis(point)
        d = len(tangent)
        width = 2 * n + d
        qLM = _q(LM, tangent, n)
        qLM_bar = _q([conj_vector(v, n) for v in LM], tangent, n)
        LN = intersection_dim(L, model.conormal_vectors(point), size)
        rank_q = rank(qLM, width)
        monitor.record(len(LM))
        dim_LN.append(LN)
        dim_qLM.append(rank_q)
        exact = LN + rank_q == len(LM) and rank_q == d
        trivial = intersection_dim(qLM, qLM_bar, width) == 0
        if not (exact and trivial):
            logger.debug(f"not a J-submanifold at {point}: exact={exact} trivial={trivial}")
            holds = False
    return JSubmanifoldReport(holds, monitor.values, dim_LN, dim_qLM, monitor.jumps)


def _tangent_coordinates(model: SubmanifoldModel, point, basis: t.Sequence[Vector], v: Vector) -> Vector:
    n = model.n
    equations = {i: {j: basis[j][i] for j in range(len(basis)) if basis[j][i]} for i in range(2 * n)}
    rhs = {i: v[i] for i in range(2 * n) if v[i]}
    solution = solve_affine(equations, rhs, 2 * n, len(basis), QQ_I)
    if solution is None:
        raise UsageError("vector part is not tangent to the submanifold")
    return solution


def induced_structure_at_point(J, model: SubmanifoldModel, point, t_value: t.Any = None):
    """Matrix of J_M at x in the frame (d_w, d_wb, dw, dwb) of T_xM + T*_xM.

    The frame comes from a holomorphic tangent basis u_1..u_m; the -i eigenspace
    of the result is q(L_J(M)).

    Raises:
        VerificationError: If M is not a J-submanifold at x
    """
    report = is_J_submanifold(J, model, [point], t_value)
    if not report.holds:
        raise VerificationError(f"{model.name} is not a J-submanifold at {point}")
    n = model.n
    basis = model.adapted_tangent_basis(point)
    m = len(basis) // 2
    _, LM = _L_of_M(J, model, point, t_value)
    images = []
    for e in LM:
        coords = _tangent_coordinates(model, point, basis, e[:2 * n])
        theta = e[2 * n:]
        restricted = [sum((a * b for a, b in zip(theta, u)), QQ_I.zero) for u in basis]
        images.append(coords + restricted)
    return structure_from_space(independent(images, 4 * m), m)


@dataclasses.dataclass
class GammaReport:
    """Outcome of gamma_iso_check at one point.

    Attributes:
        dim_plus: dim C+(M)
        dim_minus: dim C-(M)
        bijective: q(C+(M)) + q(C-(M)) is all of T_M + T*_M
        j0_invariant: J0 preserves C+(M) and C-(M)
        j1_invariant: J1 preserves C+(M) and C-(M)
    """
    dim_plus: int
    dim_minus: int
    bijective: bool
    j0_invariant: bool
    j1_invariant: bool

    @property
    def holds(self) -> bool:
        return self.bijective and self.j0_invariant and self.j1_invariant


def _preserves(M, spaces: t.Sequence[t.List[Vector]], size: int) -> bool:
    return all(span_contains(space, matvec(M, v), size) for space in spaces for v in space)


def gamma_iso_check(J0, J1, model: SubmanifoldModel, point, t_value: t.Any = None) -> GammaReport:
    """C+-(M) = C+- meet pi^{-1}(T_M) each map isomorphically onto a half of T_M + T*_M."""
    n = model.n
    size = 4 * n
    A, B = J0.at(point, t_value), J1.at(point, t_value)
    G = -(A * B)
    eye = identity(size)
    W = _restricted_space(model, point)
    plus = intersection_basis(kernel((G - eye).to_list(), size), W, size)
    minus = intersection_basis(kernel((G + eye).to_list(), size), W, size)
    tangent = model.tangent_basis(point)
    d = len(tangent)
    images = _q(plus, tangent, n) + _q(minus, tangent, n)
    bijective = len(plus) == d and len(minus) == d and rank(images, 2 * n + d) == 2 * d
    report = GammaReport(
        len(plus),
        len(minus),
        bijective,
        _preserves(A, [plus, minus], size),
        _preserves(B, [plus, minus], size),
    )
    logger.debug(f"gamma check at {point}: {report}")
    return report


# ---------- induced Poisson structures ----------------------------------------

def induced_poisson(beta: Polyvector, model: SubmanifoldModel) -> t.Tuple[Polyvector, bool]:
    """beta restricted to M in the free coordinates of its graph parametrization.

    Returns:
        (beta_M on a chart of dimension m, True if beta_M is nonzero)

    Raises:
        NoParametrizationError: If the model carries no graph
    """
    if not model.graph:
        raise NoParametrizationError(f"{model.name} has no graph parametrization")
    R = model.ring
    n = model.n
    free = [k for k in range(n) if k not in model.graph]
    m = len(free)
    S = make_ring(m)
    position = {k: i for i, k in enumerate(free)}

    def rename(p: PolyScalar) -> PolyScalar:
        for k, image in model.graph.items():
            p = p.compose(R.gens[k], image)
        out = {}
        for monom, c in p.items():
            if any(monom[k] for k in model.graph) or any(monom[n + k] for k in model.graph):
                raise UsageError("graph images must be free of eliminated coordinates")
            new = [0] * S.ngens
            for k, i in position.items():
                new[i] = monom[k]
                new[m + i] = monom[n + k]
            new[-1] = monom[-1]
            out[tuple(new)] = c
        return S.from_dict(out)

    components = {}
    for idx, c in beta.components.items():
        if all(k < n and k in position for k in idx):
            value = rename(c)
            if value:
                components[tuple(position[k] for k in idx)] = value
    beta_M = Polyvector(S, components)
    return beta_M, not beta_M.is_zero()


def group_invariant_ideal_check(fields: t.Sequence[Polyvector], ideal: PolyIdeal, cap: int = BUCHBERGER_CAP) -> bool:
    """V_i(F) lies in I for all commuting fields V_i and generators F.

    Raises:
        NonCommutingError: If two of the fields do not commute
    """
    for v, w in itertools.combinations(fields, 2):
        if not lie_bracket(v, w).is_zero():
            raise NonCommutingError("vector fields do not commute")
    return all(ideal_membership(v.apply(F), ideal, cap) for v in fields for F in ideal.generators)


# ---------- projective extension ----------------------------------------------

@dataclasses.dataclass
class ChartMap:
    """Transition from the chart {Z_0 != 0} to the chart {Z_j != 0}.

    Attributes:
        index: j, the coordinate whose hyperplane becomes the new origin
        field: Rational function field of the new coordinates w_1..w_n
        jacobian: {(a, c): d w_c / d z_a written in w}
        images: z_a written in w
    """
    index: int
    field: t.Any
    jacobian: t.Dict[t.Tuple[int, int], t.Any]
    images: t.List[t.Any]


def projective_chart_maps(n: int, coords: t.Optional[t.Sequence[int]] = None) -> t.List[ChartMap]:
    """Standard transitions of CP^k, k = len(coords), inside a chart of dimension n.

    Coordinates outside ``coords`` are left unchanged; new coordinates are
    w_j = 1/z_j and w_c = z_c/z_j for the other c in ``coords``.
    """
    coords = list(range(n)) if coords is None else list(coords)
    maps = []
    for j in coords:
        K, *ws = field(",".join(f"w{k + 1}" for k in range(n)), QQ_I)
        images = []
        for a in range(n):
            if a == j:
                images.append(1 / ws[j])
            elif a in coords:
                images.append(ws[a] / ws[j])
            else:
                images.append(ws[a])
        jac = {}
        for a in range(n):
            for c in range(n):
                if c == j:
                    value = -ws[j] ** 2 if a == j else K.zero
                elif c in coords:
                    value = ws[j] if a == c else (-ws[c] * ws[j] if a == j else K.zero)
                else:
                    value = K.one if a == c else K.zero
                if value:
                    jac[(a, c)] = value
        maps.append(ChartMap(j, K, jac, images))
    return maps


def _to_field(p: PolyScalar, chart: ChartMap, n: int):
    total = chart.field.zero
    for monom, c in p.items():
        if any(monom[n:]):
            raise UsageError("projective extension needs holomorphic, t-free coefficients")
        term = chart.field(c)
        for a in range(n):
            if monom[a]:
                term *= chart.images[a] ** monom[a]
        total += term
    return total


def _minor(chart: ChartMap, rows: t.Sequence[int], cols: t.Sequence[int]):
    total = chart.field.zero
    for perm in itertools.permutations(range(len(cols))):
        sign, _ = sort_sign(perm)
        term = chart.field.one
        for r, p in zip(rows, perm):
            entry = chart.jacobian.get((r, cols[p]))
            if entry is None:
                break
            term *= entry
        else:
            total += term if sign > 0 else -term
    return total


def transform_polyvector(P: Polyvector, chart: ChartMap) -> t.Dict[t.Tuple[int, ...], t.Any]:
    """Components of a holomorphic polyvector in the coordinates of another chart."""
    n = P.n
    out: t.Dict[t.Tuple[int, ...], t.Any] = {}
    for idx, c in P.components.items():
        if any(k >= n for k in idx):
            raise UsageError("projective extension needs a holomorphic polyvector")
        value = _to_field(c, chart, n)
        for target in itertools.combinations(range(n), len(idx)):
            minor = _minor(chart, idx, target)
            if minor:
                out[target] = out.get(target, chart.field.zero) + value * minor
    return {k: v for k, v in out.items() if v}


def extends_to_projective(P: Polyvector, coords: t.Optional[t.Sequence[int]] = None) -> bool:
    """True if P has polynomial components in every other standard chart."""
    for chart in projective_chart_maps(P.n, coords):
        for target, value in transform_polyvector(P, chart).items():
            if not value.denom.is_ground:
                logger.debug(f"component {target} has a pole in chart {chart.index + 1}")
                return False
    return True
