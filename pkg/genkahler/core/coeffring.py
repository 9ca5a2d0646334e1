"""
Exact coefficient ring for chart computations.

Scalars are Gaussian rationals (sympy ``QQ_I``). Functions on a chart of complex
dimension n are polynomials in the formally independent variables
``z1..zn, zb1..zbn`` together with the deformation parameter ``t``, which is the
last generator and is real under conjugation. Conjugacy of ``z_j`` and ``zb_j`` is
only enforced when a polynomial is evaluated at a real point.
"""
import dataclasses
import logging
import random
import typing as t

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, PolyRing, ring

from genkahler.config import (
    BUCHBERGER_CAP,
    MAX_TOTAL_DEGREE,
    SAMPLE_DENOMINATOR,
    SAMPLE_HEIGHT,
)
from genkahler.core.errors import (
    DegreeOverflowError,
    DimensionMismatchError,
    UndecidedAtCapError,
    UsageError,
)

# Set up logging
logger = logging.getLogger(__name__)

GaussRat = type(QQ_I.one)
PolyScalar = PolyElement
Point = t.Sequence[t.Any]

# Rings are built once per chart dimension
_RINGS: t.Dict[int, PolyRing] = {}


def make_ring(n: int) -> PolyRing:
    """Return the coefficient ring ``QQ_I[z1..zn, zb1..zbn, t]`` under lex order.

    Args:
        n: Complex dimension of the chart

    Returns:
        The cached polynomial ring

    Raises:
        DimensionMismatchError: If n is not positive
    """
    if n < 1:
        raise DimensionMismatchError(f"chart dimension must be positive, got {n}")
    if n not in _RINGS:
        names = [f"z{j}" for j in range(1, n + 1)]
        names += [f"zb{j}" for j in range(1, n + 1)]
        names.append("t")
        _RINGS[n] = ring(",".join(names), QQ_I, lex)[0]
        logger.debug(f"Built coefficient ring for n={n}")
    return _RINGS[n]


def chart_dim(R: PolyRing) -> int:
    """Complex chart dimension of a coefficient ring."""
    return (R.ngens - 1) // 2


def z(R: PolyRing, j: int) -> PolyScalar:
    """Holomorphic coordinate z_{j+1} (0-based index)."""
    return R.gens[j]


def zb(R: PolyRing, j: int) -> PolyScalar:
    """Antiholomorphic coordinate zb_{j+1} (0-based index)."""
    return R.gens[chart_dim(R) + j]


def t_gen(R: PolyRing) -> PolyScalar:
    """The deformation parameter t."""
    return R.gens[-1]


# ---------- scalars -----------------------------------------------------------

def rational(value: t.Any):
    """Convert ints, ``"p/q"`` strings, fractions and QQ elements to QQ."""
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                num, den = text.split("/")
                return QQ(int(num), int(den))
            return QQ(int(text))
        except (ValueError, ZeroDivisionError) as e:
            raise UsageError(f"not an exact rational: {value!r}") from e
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return QQ(int(value.numerator), int(value.denominator))
    raise UsageError(f"not an exact rational: {value!r}")


def gauss(re: t.Any = 0, im: t.Any = 0) -> GaussRat:
    """Build a Gaussian rational re + i*im from exact rational inputs."""
    if isinstance(re, GaussRat) and im == 0:
        return re
    return QQ_I(rational(re), rational(im))


I_UNIT = QQ_I(0, 1)


def gauss_conj(c: GaussRat) -> GaussRat:
    """Complex conjugate of a Gaussian rational."""
    return QQ_I(c.x, -c.y)


def format_rational(q) -> str:
    """Render a rational as ``"p/q"`` (or ``"p"`` for integers)."""
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def format_gauss(c: GaussRat) -> t.Dict[str, str]:
    """Render a Gaussian rational as ``{"re": "p/q", "im": "p/q"}``."""
    return {"re": format_rational(c.x), "im": format_rational(c.y)}


# ---------- polynomials -------------------------------------------------------

def conj(p: PolyScalar) -> PolyScalar:
    """Conjugate a polynomial: swap z/zb exponents and conjugate coefficients."""
    R = p.ring
    n = chart_dim(R)
    terms = {}
    for monom, coeff in p.items():
        swapped = monom[n:2 * n] + monom[:n] + monom[2 * n:]
        terms[swapped] = gauss_conj(coeff)
    return R.from_dict(terms)


def check_degree(p: PolyScalar) -> PolyScalar:
    """Raise if any exponent vector of p exceeds the total-degree guard."""
    for monom in p.itermonoms():
        if sum(monom) > MAX_TOTAL_DEGREE:
            raise DegreeOverflowError(
                f"total degree {sum(monom)} exceeds the guard {MAX_TOTAL_DEGREE}"
            )
    return p


def spatial_degree(p: PolyScalar) -> int:
    """Total degree in the chart variables, ignoring t (0 for the zero polynomial)."""
    return max((sum(m[:-1]) for m in p.itermonoms()), default=0)


def is_holomorphic(p: PolyScalar) -> bool:
    """True if no zb variable appears in p."""
    n = chart_dim(p.ring)
    return all(not any(m[n:2 * n]) for m in p.itermonoms())


def depends_on_t(p: PolyScalar) -> bool:
    return any(m[-1] for m in p.itermonoms())


def truncate_t(p: PolyScalar, order: int) -> PolyScalar:
    """Drop every term of t-degree above ``order``."""
    return p.ring.from_dict({m: c for m, c in p.items() if m[-1] <= order})


def t_coefficient(p: PolyScalar, k: int) -> PolyScalar:
    """Coefficient of t^k as a t-free polynomial."""
    return p.ring.from_dict({m[:-1] + (0,): c for m, c in p.items() if m[-1] == k})


def substitute_t(p: PolyScalar, value: t.Any) -> PolyScalar:
    """Set t to an exact rational value."""
    R = p.ring
    if not depends_on_t(p):
        return p
    return p.compose(t_gen(R), R.ground_new(gauss(value)))


def eval_at(p: PolyScalar, point: Point, t_value: t.Any = None) -> GaussRat:
    """Evaluate p at a real point.

    Args:
        p: Polynomial on a chart of dimension n
        point: Real coordinates (x_1..x_n, y_1..y_n); z_j = x_j + i*y_j, zb_j = x_j - i*y_j
        t_value: Value of t, required when p depends on t

    Returns:
        The exact Gaussian-rational value

    Raises:
        DimensionMismatchError: If the point does not have 2n coordinates
        UsageError: If p depends on t and no t value was given
    """
    R = p.ring
    n = chart_dim(R)
    if len(point) != 2 * n:
        raise DimensionMismatchError(f"point has {len(point)} coordinates, chart needs {2 * n}")
    xs = [rational(v) for v in point]
    values = [QQ_I(xs[j], xs[n + j]) for j in range(n)]
    values += [QQ_I(xs[j], -xs[n + j]) for j in range(n)]
    values.append(QQ_I.zero if t_value is None else gauss(t_value))

    total = QQ_I.zero
    for monom, coeff in p.items():
        if monom[-1] and t_value is None:
            raise UsageError("polynomial depends on t; a t value is required")
        term = coeff
        for value, exp in zip(values, monom):
            if exp:
                term = term * value ** exp
        total += term
    return total


def point_from_complex(values: t.Sequence[GaussRat]) -> t.Tuple:
    """Real point (x, y) for complex coordinate values z_j = x_j + i*y_j."""
    return tuple(v.x for v in values) + tuple(v.y for v in values)


def complex_coordinates(point: Point) -> t.List[GaussRat]:
    """Complex coordinates z_j of a real point."""
    n = len(point) // 2
    xs = [rational(v) for v in point]
    return [QQ_I(xs[j], xs[n + j]) for j in range(n)]


# ---------- random data -------------------------------------------------------

def random_rational(rng: random.Random):
    return QQ(rng.randint(-SAMPLE_HEIGHT, SAMPLE_HEIGHT), rng.randint(1, SAMPLE_DENOMINATOR))


def random_gauss(rng: random.Random) -> GaussRat:
    return QQ_I(random_rational(rng), random_rational(rng))


def random_point(n: int, rng: random.Random) -> t.Tuple:
    """Random real-rational point of a chart of dimension n."""
    return tuple(random_rational(rng) for _ in range(2 * n))


def random_poly(
    R: PolyRing,
    rng: random.Random,
    degree: int = 2,
    terms: int = 3,
    holomorphic: bool = False,
) -> PolyScalar:
    """Random polynomial in the chart variables with Gaussian-rational coefficients."""
    n = chart_dim(R)
    nvars = n if holomorphic else 2 * n
    poly = R.zero
    for _ in range(terms):
        exps = [0] * R.ngens
        for _ in range(rng.randint(0, degree)):
            exps[rng.randrange(nvars)] += 1
        poly += R.term_new(tuple(exps), random_gauss(rng))
    return poly


# ---------- truncated series --------------------------------------------------

@dataclasses.dataclass(frozen=True)
class TruncatedSeries:
    """Power series in t with polynomial coefficients, exact modulo t^{order+1}.

    Attributes:
        poly: Representative polynomial; terms of t-degree above ``order`` are dropped
        order: Truncation order T
    """
    poly: PolyScalar
    order: int

    def __post_init__(self):
        object.__setattr__(self, "poly", check_degree(truncate_t(self.poly, self.order)))

    @classmethod
    def from_poly(cls, p: PolyScalar, order: int) -> "TruncatedSeries":
        """Truncate any polynomial in t."""
        return cls(p, order)

    @classmethod
    def from_coefficients(cls, coeffs: t.Sequence[PolyScalar], order: int) -> "TruncatedSeries":
        R = coeffs[0].ring
        tt = t_gen(R)
        poly = R.zero
        for k, c in enumerate(coeffs):
            poly += c * tt ** k
        return cls(poly, order)

    def _lift(self, other) -> PolyScalar:
        if isinstance(other, TruncatedSeries):
            return other.poly
        return self.poly.ring(other)

    def _order_with(self, other) -> int:
        if isinstance(other, TruncatedSeries):
            return min(self.order, other.order)
        return self.order

    def __add__(self, other):
        return TruncatedSeries(self.poly + self._lift(other), self._order_with(other))

    __radd__ = __add__

    def __sub__(self, other):
        return TruncatedSeries(self.poly - self._lift(other), self._order_with(other))

    def __neg__(self):
        return TruncatedSeries(-self.poly, self.order)

    def __mul__(self, other):
        order = self._order_with(other)
        return TruncatedSeries(truncate_t(self.poly, order) * truncate_t(self._lift(other), order), order)

    __rmul__ = __mul__

    def coefficient(self, k: int) -> PolyScalar:
        """Coefficient of t^k (a t-free polynomial)."""
        return t_coefficient(self.poly, k)

    def coefficients(self) -> t.List[PolyScalar]:
        return [self.coefficient(k) for k in range(self.order + 1)]

    def evaluate_t(self, value: t.Any) -> PolyScalar:
        return substitute_t(self.poly, value)

    def is_zero(self) -> bool:
        return self.poly == 0


# ---------- ideals ------------------------------------------------------------

class IdealKind:
    PRINCIPAL = "principal"
    MONOMIAL = "monomial"
    GENERAL = "general"


@dataclasses.dataclass(frozen=True)
class PolyIdeal:
    """Ideal of the coefficient ring given by generators.

    Attributes:
        generators: Nonzero generating polynomials
        kind: principal, monomial or general; decides the membership algorithm
    """
    generators: t.Tuple[PolyScalar, ...]
    kind: str

    @classmethod
    def from_generators(cls, generators: t.Iterable[PolyScalar]) -> "PolyIdeal":
        gens = tuple(g for g in generators if g)
        if not gens:
            raise UsageError("an ideal needs at least one nonzero generator")
        if len(gens) == 1:
            kind = IdealKind.PRINCIPAL
        elif all(len(g) == 1 for g in gens):
            kind = IdealKind.MONOMIAL
        else:
            kind = IdealKind.GENERAL
        return cls(gens, kind)

    @property
    def ring(self) -> PolyRing:
        return self.generators[0].ring


def _s_polynomial(f: PolyScalar, g: PolyScalar, R: PolyRing) -> PolyScalar:
    lcm = R.monomial_lcm(f.LM, g.LM)
    return f.mul_monom(R.monomial_div(lcm, f.LM)) - g.mul_monom(R.monomial_div(lcm, g.LM))


def _interreduce(basis: t.List[PolyScalar], R: PolyRing) -> t.List[PolyScalar]:
    minimal = []
    for i, g in enumerate(basis):
        redundant = any(
            j != i
            and R.monomial_div(g.LM, h.LM) is not None
            and (h.LM != g.LM or j < i)
            for j, h in enumerate(basis)
        )
        if not redundant:
            minimal.append(g)
    reduced = []
    for i, g in enumerate(minimal):
        others = [h for j, h in enumerate(minimal) if j != i]
        r = g.rem(others) if others else g
        reduced.append(r.monic())
    return sorted(reduced, key=lambda p: p.LM, reverse=True)


def groebner_basis(generators: t.Sequence[PolyScalar], cap: int = BUCHBERGER_CAP) -> t.List[PolyScalar]:
    """Reduced Groebner basis under lex order by capped Buchberger completion.

    Pairs are taken lowest lcm degree first; pairs with coprime leading
    monomials are skipped without reduction.

    Args:
        generators: Ideal generators
        cap: Maximum number of S-polynomial reductions

    Returns:
        Reduced, monic Groebner basis

    Raises:
        UndecidedAtCapError: If the completion needs more than ``cap`` reductions
    """
    gens = [g.monic() for g in generators if g]
    if not gens:
        return []
    R = gens[0].ring
    basis: t.List[PolyScalar] = []
    pairs: t.List[t.Tuple[int, int]] = []
    for g in gens:
        basis.append(g)
        k = len(basis) - 1
        pairs.extend((i, k) for i in range(k))

    reductions = 0
    while pairs:
        pair = min(pairs, key=lambda ij: sum(R.monomial_lcm(basis[ij[0]].LM, basis[ij[1]].LM)))
        pairs.remove(pair)
        f, g = basis[pair[0]], basis[pair[1]]
        if R.monomial_gcd(f.LM, g.LM) == R.zero_monom:
            continue
        if reductions >= cap:
            raise UndecidedAtCapError(f"Buchberger completion undecided at cap {cap}")
        reductions += 1
        r = _s_polynomial(f, g, R).rem(basis)
        if r:
            basis.append(r.monic())
            k = len(basis) - 1
            pairs.extend((i, k) for i in range(k))

    logger.debug(f"Buchberger finished after {reductions} reductions with {len(basis)} elements")
    return _interreduce(basis, R)


def ideal_membership(g: PolyScalar, ideal: PolyIdeal, cap: int = BUCHBERGER_CAP) -> bool:
    """Decide whether g lies in the ideal.

    Principal ideals use exact division, monomial ideals monomial divisibility,
    and general ideals the remainder modulo a capped Groebner basis.

    Raises:
        UndecidedAtCapError: If the Groebner completion hits the cap
    """
    if not g:
        return True
    if ideal.kind == IdealKind.PRINCIPAL:
        return not g.rem(ideal.generators[0])
    if ideal.kind == IdealKind.MONOMIAL:
        R = ideal.ring
        leads = [gen.LM for gen in ideal.generators]
        return all(
            any(R.monomial_div(monom, lead) is not None for lead in leads)
            for monom in g.itermonoms()
        )
    basis = groebner_basis(ideal.generators, cap=cap)
    return not g.rem(basis)
