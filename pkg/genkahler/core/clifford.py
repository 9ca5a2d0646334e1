"""
Clifford algebra of (T + T*) tensored with C and its spin representation on forms.

Generators are indexed 0..4n-1: index a < 2n is the vector d_a, index a >= 2n
the covector dx_{a-2n}. The only nonzero pairing is <d_k, dx_k> = 1/2 and the
relation is x x = -<x, x>, so e_a e_b + e_b e_a = -1 for such a pair and 0
otherwise. Elements are stored in normal form: strictly increasing generator
words.

A word acts on forms from the right: a vector v by -i_v, a covector by wedge.
Even words therefore act by plain contraction and wedge: the 2-vector
d_j ^ d_k corresponds to the word (d_k, d_j) and the 2-form dx_j ^ dx_k to the
word (dx_j, dx_k).
"""
import dataclasses
import functools
import logging
import typing as t
from math import factorial

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.rings import PolyElement, PolyRing

from genkahler.config import CLIFFORD_MAX_DEGREE, MAX_ORDER
from genkahler.core.coeffring import PolyScalar, chart_dim, t_coefficient, truncate_t
from genkahler.core.errors import DimensionMismatchError, FiltrationOverflowError, UsageError
from genkahler.core.tensorcalc import (
    Form,
    GenSection,
    Polyvector,
    contract_indices,
    interior,
    pairing,
    sort_sign,
)

# Set up logging
logger = logging.getLogger(__name__)

Word = t.Tuple[int, ...]

__all__ = [
    "CliffordElem",
    "ExpDescriptor",
    "GenSection",
    "adjoint_on_sections",
    "bch_log",
    "cl_product",
    "commutator",
    "exp_action",
    "pairing",
    "spin_action",
]

# Bernoulli numbers B_2, B_4, B_6 for the BCH recursion
_BERNOULLI = {1: QQ(1, 6), 2: QQ(-1, 30), 3: QQ(1, 42)}


def _paired(a: int, b: int, dim: int) -> bool:
    return abs(a - b) == dim


@functools.lru_cache(maxsize=None)
def _normalize_word(word: Word, dim: int) -> t.Tuple[t.Tuple[Word, int], ...]:
    """Straighten a generator word into sorted words without repeats.

    Args:
        word: Generator indices in product order
        dim: 2n, the offset between d_k and dx_k

    Returns:
        Pairs (sorted word, integer coefficient)
    """
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if a < b:
            continue
        if a == b:
            # every generator is isotropic
            return ()
        out: t.Dict[Word, int] = {}
        swapped = word[:i] + (b, a) + word[i + 2:]
        for w, c in _normalize_word(swapped, dim):
            out[w] = out.get(w, 0) - c
        if _paired(a, b, dim):
            for w, c in _normalize_word(word[:i] + word[i + 2:], dim):
                out[w] = out.get(w, 0) - c
        return tuple((w, c) for w, c in sorted(out.items()) if c)
    return ((word, 1),)


class CliffordElem:
    """Element of the Clifford algebra with polynomial coefficients.

    Attributes:
        ring: Coefficient ring (coefficients may depend on t)
        terms: {sorted word: coefficient}
    """

    def __init__(self, R: PolyRing, terms: t.Optional[t.Mapping[Word, t.Any]] = None):
        self.ring = R
        self.n = chart_dim(R)
        dim = 2 * self.n
        out: t.Dict[Word, PolyScalar] = {}
        for word, coeff in (terms or {}).items():
            if any(a < 0 or a >= 2 * dim for a in word):
                raise DimensionMismatchError(f"generator word {word} out of range for n={self.n}")
            c = coeff if isinstance(coeff, PolyElement) else R.ground_new(QQ_I.convert(coeff))
            if not c:
                continue
            for w, k in _normalize_word(tuple(word), dim):
                out[w] = out.get(w, R.zero) + c * k
        self.terms: t.Dict[Word, PolyScalar] = {w: c for w, c in out.items() if c}

    # ---------- constructors --------------------------------------------------

    @classmethod
    def zero(cls, R: PolyRing) -> "CliffordElem":
        return cls(R)

    @classmethod
    def scalar(cls, R: PolyRing, c: t.Any) -> "CliffordElem":
        return cls(R, {(): c})

    @classmethod
    def generator(cls, R: PolyRing, a: int) -> "CliffordElem":
        return cls(R, {(a,): 1})

    @classmethod
    def from_form(cls, phi: Form) -> "CliffordElem":
        """A form acting by wedge product."""
        dim = 2 * phi.n
        return cls(phi.ring, {tuple(dim + k for k in idx): c for idx, c in phi.components.items()})

    @classmethod
    def from_polyvector(cls, P: Polyvector) -> "CliffordElem":
        """A polyvector acting by contraction, i_{j1} applied first."""
        # each vector generator carries a sign
        return cls(P.ring, {tuple(reversed(idx)): (-c if len(idx) % 2 else c) for idx, c in P.components.items()})

    @classmethod
    def from_section(cls, E: GenSection) -> "CliffordElem":
        entries = E.entries()
        return cls(E.ring, {(a,): c for a, c in enumerate(entries) if c})

    # ---------- structure -----------------------------------------------------

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def truncate(self, order: int) -> "CliffordElem":
        return CliffordElem(self.ring, {w: truncate_t(c, order) for w, c in self.terms.items()})

    def t_coefficient(self, k: int) -> "CliffordElem":
        return CliffordElem(self.ring, {w: t_coefficient(c, k) for w, c in self.terms.items()})

    def to_section(self) -> GenSection:
        if any(len(w) != 1 for w in self.terms):
            raise UsageError("only degree-1 elements are sections")
        entries = [self.terms.get((a,), self.ring.zero) for a in range(4 * self.n)]
        return GenSection.from_vector(self.ring, entries)

    def __add__(self, other: "CliffordElem") -> "CliffordElem":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, self.ring.zero) + c
        return CliffordElem(self.ring, out)

    def __neg__(self) -> "CliffordElem":
        return CliffordElem(self.ring, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "CliffordElem") -> "CliffordElem":
        return self + (-other)

    def __mul__(self, scalar) -> "CliffordElem":
        if isinstance(scalar, CliffordElem):
            return cl_product(self, scalar)
        s = scalar if isinstance(scalar, PolyElement) else self.ring.ground_new(QQ_I.convert(scalar))
        return CliffordElem(self.ring, {w: s * c for w, c in self.terms.items()})

    def __rmul__(self, scalar) -> "CliffordElem":
        s = scalar if isinstance(scalar, PolyElement) else self.ring.ground_new(QQ_I.convert(scalar))
        return CliffordElem(self.ring, {w: s * c for w, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, CliffordElem):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __repr__(self):
        return f"CliffordElem(n={self.n}, {dict(sorted(self.terms.items()))})"


def _product(x: CliffordElem, y: CliffordElem, order: t.Optional[int] = None) -> CliffordElem:
    if x.ring != y.ring:
        raise DimensionMismatchError("Clifford product across different charts")
    R = x.ring
    dim = 2 * x.n
    out: t.Dict[Word, PolyScalar] = {}
    for w1, c1 in x.terms.items():
        for w2, c2 in y.terms.items():
            coeff = c1 * c2
            if order is not None:
                coeff = truncate_t(coeff, order)
            if not coeff:
                continue
            for w, k in _normalize_word(w1 + w2, dim):
                out[w] = out.get(w, R.zero) + coeff * k
    return CliffordElem(R, out)


def cl_product(x: CliffordElem, y: CliffordElem) -> CliffordElem:
    """Clifford product within the filtration CL^0 < ... < CL^3.

    Raises:
        FiltrationOverflowError: If the normalized product has a word longer than 3
    """
    result = _product(x, y)
    if result.degree() > CLIFFORD_MAX_DEGREE:
        raise FiltrationOverflowError(
            f"product has filtration degree {result.degree()} > {CLIFFORD_MAX_DEGREE}"
        )
    return result


def commutator(x: CliffordElem, y: CliffordElem, order: t.Optional[int] = None) -> CliffordElem:
    """[x, y] = xy - yx, optionally truncated in t."""
    return _product(x, y, order) - _product(y, x, order)


# ---------- spin representation -----------------------------------------------

def _apply_generator(a: int, dim: int, idx: t.Tuple[int, ...]) -> t.Tuple[int, t.Optional[t.Tuple[int, ...]]]:
    if a < dim:
        sign, rest = contract_indices((a,), idx)
        return -sign, rest
    return sort_sign((a - dim,) + idx)


def spin_action(x: CliffordElem, phi: Form) -> Form:
    """Action of a Clifford element on forms: (v + theta).phi = -i_v phi + theta ^ phi."""
    if x.ring != phi.ring:
        raise DimensionMismatchError("spin action across different charts")
    R = phi.ring
    dim = 2 * phi.n
    out: t.Dict[t.Tuple[int, ...], PolyScalar] = {}
    for word, c in x.terms.items():
        for idx, f in phi.components.items():
            sign, cur = 1, idx
            for a in reversed(word):
                s, cur = _apply_generator(a, dim, cur)
                if not s:
                    break
                sign *= s
            else:
                term = c * f
                out[cur] = out.get(cur, R.zero) + (term if sign > 0 else -term)
    return Form(R, out)


def exp_action(x: CliffordElem, phi: Form, order: t.Optional[int] = None) -> Form:
    """e^x . phi = sum_k x^k . phi / k!.

    Without ``order`` x must act nilpotently (a 2-form or a 2-vector). With an
    order T every coefficient is truncated mod t^{T+1}, which also terminates
    the series when x vanishes at t = 0.

    Raises:
        UsageError: If the series does not terminate
    """
    cap = (2 * x.n + 2) * ((order or 0) + 1)
    result = phi if order is None else phi.truncate(order)
    term = result
    for k in range(1, cap + 1):
        term = spin_action(x, term) * QQ_I(QQ(1, k))
        if order is not None:
            term = term.truncate(order)
        if term.is_zero():
            return result
        result = result + term
    raise UsageError("exponential series does not terminate; exponent is not nilpotent")


# ---------- exponentials on sections ------------------------------------------

class ExpKind:
    BFIELD = "bfield"
    BIVECTOR = "bivector"
    COMPOSE = "compose"


@dataclasses.dataclass(frozen=True)
class ExpDescriptor:
    """Exponential e^b (2-form), e^beta (2-vector) or a composition of those.

    Attributes:
        kind: bfield, bivector or compose
        form: The 2-form b for kind bfield
        bivector: The 2-vector beta for kind bivector
        parts: Factors g1, g2, ... of a composition, applied right to left
    """
    kind: str
    form: t.Optional[Form] = None
    bivector: t.Optional[Polyvector] = None
    parts: t.Tuple["ExpDescriptor", ...] = ()

    @classmethod
    def bfield(cls, b: Form) -> "ExpDescriptor":
        if not (b.is_zero() or b.is_homogeneous(2)):
            raise UsageError("a b-field must be a 2-form")
        return cls(ExpKind.BFIELD, form=b)

    @classmethod
    def bivector_exp(cls, beta: Polyvector) -> "ExpDescriptor":
        if not (beta.is_zero() or beta.is_homogeneous(2)):
            raise UsageError("expected a 2-vector")
        return cls(ExpKind.BIVECTOR, bivector=beta)

    @classmethod
    def compose(cls, *parts: "ExpDescriptor") -> "ExpDescriptor":
        if not parts:
            raise UsageError("composition needs at least one factor")
        return cls(ExpKind.COMPOSE, parts=tuple(parts))

    @property
    def ring(self) -> PolyRing:
        if self.kind == ExpKind.BFIELD:
            return self.form.ring
        if self.kind == ExpKind.BIVECTOR:
            return self.bivector.ring
        return self.parts[0].ring

    def inverse(self) -> "ExpDescriptor":
        if self.kind == ExpKind.BFIELD:
            return ExpDescriptor.bfield(-self.form)
        if self.kind == ExpKind.BIVECTOR:
            return ExpDescriptor.bivector_exp(-self.bivector)
        return ExpDescriptor.compose(*(p.inverse() for p in reversed(self.parts)))

    def spin_element(self) -> CliffordElem:
        """Clifford exponent X whose conjugation e^X E e^{-X} is the section map.

        Conjugation by the contraction element beta sends theta to
        theta - beta^sharp(theta), so e^beta is represented by X = -beta; a
        2-form is represented by itself.
        """
        if self.kind == ExpKind.BFIELD:
            return CliffordElem.from_form(self.form)
        if self.kind == ExpKind.BIVECTOR:
            return CliffordElem.from_polyvector(-self.bivector)
        raise UsageError("a composition has no single exponent; use bch_log")

    def act(self, phi: Form, order: t.Optional[int] = None) -> Form:
        """Spin action of the exponential on a form."""
        if self.kind == ExpKind.COMPOSE:
            for part in reversed(self.parts):
                phi = part.act(phi, order)
            return phi
        return exp_action(self.spin_element(), phi, order)

    def matrix(self, order: t.Optional[int] = None) -> t.List[t.List[PolyScalar]]:
        """4n x 4n matrix of the section map in the frame (d_z, d_zb, dz, dzb)."""
        R = self.ring
        size = 4 * chart_dim(R)
        columns = []
        for a in range(size):
            unit = [R.one if b == a else R.zero for b in range(size)]
            image = adjoint_on_sections(self, GenSection.from_vector(R, unit), order)
            columns.append(image.entries())
        return [[columns[j][i] for j in range(size)] for i in range(size)]


def adjoint_on_sections(g: ExpDescriptor, E: GenSection, order: t.Optional[int] = None) -> GenSection:
    """Ad_g on sections: e^b gives v + theta + i_v b, e^beta gives v + beta^sharp(theta) + theta."""
    if g.kind == ExpKind.COMPOSE:
        for part in reversed(g.parts):
            E = adjoint_on_sections(part, E, order)
        return E
    if g.kind == ExpKind.BFIELD:
        result = GenSection(E.vector, E.oneform + interior(E.vector, g.form))
    else:
        result = GenSection(E.vector + g.bivector.sharp(E.oneform), E.oneform)
    if order is not None:
        result = GenSection(result.vector.truncate(order), result.oneform.truncate(order))
    return result


# ---------- Baker-Campbell-Hausdorff -------------------------------------------

def _compositions(total: int, parts: int) -> t.Iterator[t.Tuple[int, ...]]:
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def bch_log(g1: CliffordElem, g2: CliffordElem, order: int) -> CliffordElem:
    """z(t) with e^{z(t)} = e^{g1 t} e^{g2(t)} mod t^{order+1}.

    Uses the recursion Z_1 = X + Y and
    (m+1) Z_{m+1} = [X - Y, Z_m] / 2
                    + sum_p B_2p/(2p)! sum_{k_1+..+k_2p = m} [Z_k1, [..., [Z_k2p, X + Y]]],
    with X = g1 t and Y = g2(t); Z_m is O(t^m).

    Args:
        g1: t-independent element of CL^2
        g2: CL^2-valued series in t without constant term
        order: Truncation order T, at most MAX_ORDER

    Raises:
        UsageError: If the order is unsupported or g2 has a constant term
    """
    if order < 1 or order > MAX_ORDER:
        raise UsageError(f"BCH order must be in 1..{MAX_ORDER}, got {order}")
    if not g2.t_coefficient(0).is_zero():
        raise UsageError("g2(t) must vanish at t = 0")
    R = g1.ring
    tt = R.gens[-1]
    X = (g1 * tt).truncate(order)
    Y = g2.truncate(order)
    S = X + Y
    D = X - Y
    Z: t.Dict[int, CliffordElem] = {1: S}
    for m in range(1, order):
        acc = commutator(D, Z[m], order) * QQ_I(QQ(1, 2))
        for p, bern in _BERNOULLI.items():
            if 2 * p > m:
                break
            weight = QQ_I(bern / factorial(2 * p))
            for ks in _compositions(m, 2 * p):
                nested = S
                for k in reversed(ks):
                    nested = commutator(Z[k], nested, order)
                    if nested.is_zero():
                        break
                if not nested.is_zero():
                    acc = acc + nested * weight
        Z[m + 1] = acc * QQ_I(QQ(1, m + 1))
    result = CliffordElem.zero(R)
    for zm in Z.values():
        result = result + zm
    logger.debug(f"BCH log to order {order}: {len(result.terms)} words")
    return result.truncate(order)
