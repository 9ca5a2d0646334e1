"""
Graded exterior calculus on polynomial charts.

Forms and polyvector fields are stored as maps from strictly increasing index
tuples to coefficient polynomials. Index k < n stands for dz_{k+1} (or
d/dz_{k+1}), index n <= k < 2n for dzb_{k-n+1} (or d/dzb_{k-n+1}); index k is
dual to ring generator k, so the derivative along index k is ``diff(R.gens[k])``.

Sign conventions:
    * contract(u^v, phi) applies i_u first and then i_v;
    * the Schouten bracket uses right derivatives in the odd variables, so it
      restricts to the Lie bracket on vector fields.
"""
import dataclasses
import itertools
import logging
import typing as t
from math import factorial

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.rings import PolyElement, PolyRing

from genkahler.core.coeffring import (
    I_UNIT,
    PolyScalar,
    chart_dim,
    conj,
    eval_at,
    is_holomorphic,
    substitute_t,
    truncate_t,
)
from genkahler.core.errors import DegenerateError, DimensionMismatchError, NotClosedError, UsageError
from genkahler.core.linalg import inverse, to_matrix

# Set up logging
logger = logging.getLogger(__name__)

Indices = t.Tuple[int, ...]


def sort_sign(seq: t.Sequence[int]) -> t.Tuple[int, t.Optional[Indices]]:
    """Sign of the permutation sorting ``seq`` and the sorted tuple.

    Returns (0, None) when an index repeats.
    """
    if len(set(seq)) < len(seq):
        return 0, None
    inversions = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return (-1 if inversions % 2 else 1), tuple(sorted(seq))


def contract_indices(vector_idx: Indices, form_idx: Indices) -> t.Tuple[int, t.Optional[Indices]]:
    """Apply i_{j1}, i_{j2}, ... (in that order) to the basis form dx_I."""
    sign = 1
    remaining = list(form_idx)
    for j in vector_idx:
        if j not in remaining:
            return 0, None
        pos = remaining.index(j)
        if pos % 2:
            sign = -sign
        remaining.pop(pos)
    return sign, tuple(remaining)


def multi_indices(dim: int) -> t.List[Indices]:
    """All increasing index tuples over ``dim`` indices, by degree then lexicographically."""
    return [c for k in range(dim + 1) for c in itertools.combinations(range(dim), k)]


def _as_poly(R: PolyRing, c: t.Any) -> PolyScalar:
    if isinstance(c, PolyElement):
        if c.ring != R:
            raise DimensionMismatchError("coefficient lives in a different chart ring")
        return c
    if isinstance(c, str):
        raise UsageError(f"not a scalar: {c!r}")
    return R.ground_new(QQ_I.convert(c))


def _swap_index(k: int, n: int) -> int:
    return k + n if k < n else k - n


class _Graded:
    """Shared storage for forms and polyvectors: {indices: coefficient}."""

    def __init__(self, R: PolyRing, components: t.Optional[t.Mapping[Indices, t.Any]] = None):
        self.ring = R
        self.n = chart_dim(R)
        comps: t.Dict[Indices, PolyScalar] = {}
        for idx, coeff in (components or {}).items():
            if any(k < 0 or k >= 2 * self.n for k in idx):
                raise DimensionMismatchError(f"index {idx} out of range for n={self.n}")
            sign, key = sort_sign(idx)
            if not sign:
                continue
            value = _as_poly(R, coeff)
            if sign < 0:
                value = -value
            comps[key] = comps.get(key, R.zero) + value
        self.components: t.Dict[Indices, PolyScalar] = {k: v for k, v in comps.items() if v}

    def _new(self, components) -> "_Graded":
        return type(self)(self.ring, components)

    @classmethod
    def zero(cls, R: PolyRing):
        return cls(R, {})

    @classmethod
    def basis(cls, R: PolyRing, indices: t.Sequence[int], coeff: t.Any = 1):
        return cls(R, {tuple(indices): coeff})

    @classmethod
    def scalar(cls, R: PolyRing, coeff: t.Any):
        return cls(R, {(): coeff})

    @classmethod
    def from_poly(cls, p: PolyScalar):
        return cls(p.ring, {(): p})

    def items(self):
        return sorted(self.components.items())

    def coefficient(self, indices: t.Sequence[int]) -> PolyScalar:
        sign, key = sort_sign(tuple(indices))
        if not sign:
            return self.ring.zero
        value = self.components.get(key, self.ring.zero)
        return value if sign > 0 else -value

    def degrees(self) -> t.List[int]:
        return sorted({len(k) for k in self.components})

    def degree(self) -> int:
        """Highest degree present (0 for the zero object)."""
        return max((len(k) for k in self.components), default=0)

    def is_zero(self) -> bool:
        return not self.components

    def is_homogeneous(self, k: int) -> bool:
        return all(len(idx) == k for idx in self.components)

    def degree_part(self, k: int):
        return self._new({i: c for i, c in self.components.items() if len(i) == k})

    def bidegree(self, idx: Indices) -> t.Tuple[int, int]:
        hol = sum(1 for k in idx if k < self.n)
        return hol, len(idx) - hol

    def bidegree_part(self, p: int, q: int):
        return self._new({i: c for i, c in self.components.items() if self.bidegree(i) == (p, q)})

    def bidegrees(self) -> t.List[t.Tuple[int, int]]:
        return sorted({self.bidegree(i) for i in self.components})

    def map_coefficients(self, fn: t.Callable[[PolyScalar], PolyScalar]):
        return self._new({i: fn(c) for i, c in self.components.items()})

    def conj(self):
        """Complex conjugate: swaps holomorphic and antiholomorphic legs."""
        return self._new({tuple(_swap_index(k, self.n) for k in i): conj(c) for i, c in self.components.items()})

    def is_real(self) -> bool:
        return self.conj() == self

    def truncate(self, order: int):
        return self.map_coefficients(lambda c: truncate_t(c, order))

    def substitute_t(self, value: t.Any):
        return self.map_coefficients(lambda c: substitute_t(c, value))

    def evaluate(self, point, t_value: t.Any = None):
        """Constant-coefficient object obtained by evaluating at a real point."""
        R = self.ring
        return self._new({i: R.ground_new(eval_at(c, point, t_value)) for i, c in self.components.items()})

    def values(self, point, t_value: t.Any = None) -> t.Dict[Indices, t.Any]:
        return {i: eval_at(c, point, t_value) for i, c in self.components.items()}

    def constant_values(self) -> t.Dict[Indices, t.Any]:
        """Coefficients of a constant object as Gaussian rationals."""
        zero_monom = self.ring.zero_monom
        out = {}
        for i, c in self.components.items():
            if not c.is_ground:
                raise UsageError("object has non-constant coefficients")
            out[i] = c.get(zero_monom, QQ_I.zero)
        return out

    def is_constant(self) -> bool:
        return all(c.is_ground for c in self.components.values())

    def wedge(self, other):
        """Graded product; for polyvectors this is the product of odd variables."""
        if not isinstance(other, type(self)):
            return self * other
        if other.ring != self.ring:
            raise DimensionMismatchError("wedge of objects on different charts")
        out: t.Dict[Indices, PolyScalar] = {}
        for i, a in self.components.items():
            for j, b in other.components.items():
                sign, key = sort_sign(i + j)
                if not sign:
                    continue
                term = a * b
                out[key] = out.get(key, self.ring.zero) + (term if sign > 0 else -term)
        return self._new(out)

    def __add__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        if other.ring != self.ring:
            raise DimensionMismatchError("sum of objects on different charts")
        out = dict(self.components)
        for i, c in other.components.items():
            out[i] = out.get(i, self.ring.zero) + c
        return self._new(out)

    def __neg__(self):
        return self._new({i: -c for i, c in self.components.items()})

    def __sub__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, _Graded):
            return NotImplemented
        s = _as_poly(self.ring, scalar)
        return self._new({i: s * c for i, c in self.components.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return self.ring == other.ring and self.components == other.components

    def __hash__(self):
        return hash((type(self).__name__, tuple(self.items())))

    def __repr__(self):
        terms = ", ".join(f"{i}: {c}" for i, c in self.items())
        return f"{type(self).__name__}(n={self.n}, {{{terms}}})"


class Form(_Graded):
    """Mixed-degree differential form; index k is dz (k < n) or dzb (k >= n)."""


class Polyvector(_Graded):
    """Polyvector field; index k is d/dz (k < n) or d/dzb (k >= n)."""

    @classmethod
    def vector(cls, R: PolyRing, coefficients: t.Sequence[t.Any]) -> "Polyvector":
        return cls(R, {(k,): c for k, c in enumerate(coefficients) if c})

    def vector_coefficients(self) -> t.List[PolyScalar]:
        """Coefficients (v_0..v_{2n-1}) of a vector field."""
        if not self.is_homogeneous(1) and not self.is_zero():
            raise UsageError("expected a vector field (degree-1 polyvector)")
        return [self.components.get((k,), self.ring.zero) for k in range(2 * self.n)]

    def apply(self, f: PolyScalar) -> PolyScalar:
        """Derivative of f along a vector field."""
        R = self.ring
        return sum((c * f.diff(R.gens[k]) for k, c in enumerate(self.vector_coefficients()) if c), R.zero)

    def sharp(self, theta: Form) -> "Polyvector":
        """beta^sharp(theta) = sum_k contract(beta, theta ^ dx_k) d_k for a 1-form theta."""
        R = self.ring
        coeffs = []
        for k in range(2 * self.n):
            value = contract(self, theta.wedge(Form.basis(R, (k,))))
            coeffs.append(value.coefficient(()))
        return Polyvector.vector(R, coeffs)

    def is_holomorphic(self) -> bool:
        """True if only d/dz legs appear and coefficients are free of zb."""
        return all(all(k < self.n for k in i) and is_holomorphic(c) for i, c in self.components.items())


# ---------- basis helpers -----------------------------------------------------

def dz(R: PolyRing, j: int) -> Form:
    return Form.basis(R, (j,))


def dzb(R: PolyRing, j: int) -> Form:
    return Form.basis(R, (chart_dim(R) + j,))


def d_z(R: PolyRing, j: int) -> Polyvector:
    return Polyvector.basis(R, (j,))


def d_zb(R: PolyRing, j: int) -> Polyvector:
    return Polyvector.basis(R, (chart_dim(R) + j,))


def wedge_all(items: t.Sequence[_Graded]) -> _Graded:
    result = items[0]
    for item in items[1:]:
        result = result.wedge(item)
    return result


# ---------- derivatives -------------------------------------------------------

def _d_range(phi: Form, indices: t.Iterable[int]) -> Form:
    R = phi.ring
    out: t.Dict[Indices, PolyScalar] = {}
    indices = list(indices)
    for idx, c in phi.components.items():
        for k in indices:
            if k in idx:
                continue
            dc = c.diff(R.gens[k])
            if not dc:
                continue
            sign, key = sort_sign((k,) + idx)
            out[key] = out.get(key, R.zero) + (dc if sign > 0 else -dc)
    return Form(R, out)


def exterior_d(phi: Form) -> Form:
    """Exterior derivative d = del + delbar."""
    return _d_range(phi, range(2 * phi.n))


def del_(phi: Form) -> Form:
    """Holomorphic part of d."""
    return _d_range(phi, range(phi.n))


def delbar(phi: Form) -> Form:
    """Antiholomorphic part of d."""
    return _d_range(phi, range(phi.n, 2 * phi.n))


def differential(f: PolyScalar) -> Form:
    return exterior_d(Form.from_poly(f))


# ---------- contractions ------------------------------------------------------

def contract(P: Polyvector, phi: Form) -> Form:
    """Contract a polyvector into a form, applying interior products left to right.

    A component c * d_{j1}^...^d_{jr} acts as c * i_{jr}...i_{j1}, i.e. i_{j1}
    is applied first. Scalar components multiply.
    """
    if P.ring != phi.ring:
        raise DimensionMismatchError("contraction across different charts")
    R = phi.ring
    out: t.Dict[Indices, PolyScalar] = {}
    for vidx, a in P.components.items():
        for fidx, b in phi.components.items():
            sign, rest = contract_indices(vidx, fidx)
            if not sign:
                continue
            term = a * b
            out[rest] = out.get(rest, R.zero) + (term if sign > 0 else -term)
    return Form(R, out)


def interior(v: Polyvector, phi: Form) -> Form:
    """Interior product by a vector field, an anti-derivation of degree -1."""
    if not v.is_homogeneous(1) and not v.is_zero():
        raise UsageError("interior product needs a vector field")
    return contract(v, phi)


def lie_derivative(v: Polyvector, phi: Form) -> Form:
    """Lie derivative of a form along a vector field, computed on components.

    L_v(c dx_I) = v(c) dx_I + c * sum over legs of dx_I with dx_i replaced by d(v_i).
    """
    R = phi.ring
    coeffs = v.vector_coefficients()
    out: t.Dict[Indices, PolyScalar] = {}

    def add(idx: t.Sequence[int], value: PolyScalar):
        sign, key = sort_sign(tuple(idx))
        if sign and value:
            out[key] = out.get(key, R.zero) + (value if sign > 0 else -value)

    for idx, c in phi.components.items():
        add(idx, v.apply(c))
        for pos, leg in enumerate(idx):
            vi = coeffs[leg]
            if not vi:
                continue
            for m in range(2 * phi.n):
                dvi = vi.diff(R.gens[m])
                if dvi:
                    replaced = list(idx)
                    replaced[pos] = m
                    add(replaced, c * dvi)
    return Form(R, out)


# ---------- Schouten bracket --------------------------------------------------

def _partial(P: Polyvector, k: int) -> Polyvector:
    gen = P.ring.gens[k]
    return Polyvector(P.ring, {i: c.diff(gen) for i, c in P.components.items()})


def _right_partial_odd(P: Polyvector, k: int) -> Polyvector:
    out = {}
    for idx, c in P.components.items():
        if k not in idx:
            continue
        pos = idx.index(k)
        rest = idx[:pos] + idx[pos + 1:]
        out[rest] = -c if (len(idx) - 1 - pos) % 2 else c
    return Polyvector(P.ring, out)


def _schouten_homogeneous(P: Polyvector, p: int, Q: Polyvector, q: int) -> Polyvector:
    R = P.ring
    result = Polyvector.zero(R)
    sign = -1 if ((p - 1) * (q - 1)) % 2 else 1
    for k in range(2 * P.n):
        rp, rq = _right_partial_odd(P, k), _right_partial_odd(Q, k)
        if not rp.is_zero():
            result = result + rp.wedge(_partial(Q, k))
        if not rq.is_zero():
            term = rq.wedge(_partial(P, k))
            result = result - term if sign > 0 else result + term
    return result


def schouten(P: Polyvector, Q: Polyvector) -> Polyvector:
    """Schouten-Nijenhuis bracket, bilinear over homogeneous parts.

    [P, Q] = sum_k dP/dtheta_k ^ dQ/dx_k - (-1)^{(p-1)(q-1)} dQ/dtheta_k ^ dP/dx_k,
    with right derivatives in the odd variables theta_k.
    """
    if P.ring != Q.ring:
        raise DimensionMismatchError("Schouten bracket across different charts")
    result = Polyvector.zero(P.ring)
    for p in P.degrees():
        for q in Q.degrees():
            result = result + _schouten_homogeneous(P.degree_part(p), p, Q.degree_part(q), q)
    return result


def lie_bracket(v: Polyvector, w: Polyvector) -> Polyvector:
    return schouten(v, w)


def is_poisson(beta: Polyvector) -> bool:
    return schouten(beta, beta).is_zero()


def poisson_bracket(beta: Polyvector, f: PolyScalar, g: PolyScalar) -> PolyScalar:
    """{f, g} = contract(beta, df ^ dg)."""
    form = contract(beta, differential(f).wedge(differential(g)))
    return form.coefficient(())


# ---------- Kaehler data ------------------------------------------------------

def standard_kahler_form(R: PolyRing) -> Form:
    """omega = (i/2) sum_j dz_j ^ dzb_j = sum_j dx_j ^ dy_j, the flat Kaehler form."""
    n = chart_dim(R)
    half_i = QQ_I(0, QQ(1, 2))
    return Form(R, {(j, n + j): half_i for j in range(n)})


def canonical_form(R: PolyRing) -> Form:
    """dz_1 ^ ... ^ dz_n."""
    return Form.basis(R, tuple(range(chart_dim(R))))


def form_exp(phi: Form) -> Form:
    """exp(phi) = sum_k phi^k / k! for an even form without scalar part."""
    if phi.coefficient(()):
        raise UsageError("form_exp needs a form without scalar part")
    if any(k % 2 for k in phi.degrees()):
        raise UsageError("form_exp needs an even form")
    R = phi.ring
    result = Form.scalar(R, 1)
    power = Form.scalar(R, 1)
    for k in range(1, phi.n + 1):
        power = power.wedge(phi)
        if power.is_zero():
            break
        result = result + power * QQ_I(QQ(1, factorial(k)))
    return result


def kahler_exponential(omega: Form) -> Form:
    """The pure spinor e^{i omega}."""
    return form_exp(omega * I_UNIT)


def hermitian_matrix(omega: Form) -> t.List[t.List[t.Any]]:
    """Matrix W with omega = sum W[j][k] dz_j ^ dzb_k for a constant (1,1) form."""
    n = omega.n
    if omega.bidegrees() not in ([], [(1, 1)]):
        raise UsageError("expected a (1,1) form")
    values = omega.constant_values()
    return [[values.get((j, n + k), QQ_I.zero) for k in range(n)] for j in range(n)]


def lefschetz_contract(p: Form, omega: Form) -> PolyScalar:
    """Trace of a (1,1) form against a constant Kaehler form: tr(W^{-1} P).

    Args:
        p: Form of bidegree (1,1), polynomial coefficients allowed
        omega: Constant nondegenerate (1,1) form

    Returns:
        Lambda_omega p; equals n for p = omega

    Raises:
        UsageError: If p is not of bidegree (1,1)
        DegenerateError: If omega is degenerate
    """
    R = p.ring
    n = p.n
    if p.is_zero():
        return R.zero
    if p.bidegrees() != [(1, 1)]:
        raise UsageError(f"Lefschetz contraction needs a (1,1) form, got bidegrees {p.bidegrees()}")
    W = to_matrix(hermitian_matrix(omega), n)
    if not W.det():
        raise DegenerateError("Kaehler form is degenerate")
    Winv = inverse(W).to_list()
    total = R.zero
    for (j, kk), c in p.components.items():
        k = kk - n
        if Winv[k][j]:
            total += c * R.ground_new(Winv[k][j])
    return total


# ---------- homotopy operator -------------------------------------------------

def radial_homotopy(phi: Form) -> Form:
    """Radial homotopy K(x^a dx_I) = x^a i_E dx_I / (|I| + |a|), E the Euler field.

    Satisfies dK + Kd = id on forms without a degree-0 part; t is a parameter.
    """
    R = phi.ring
    n = phi.n
    out: t.Dict[Indices, PolyScalar] = {}
    for idx, c in phi.components.items():
        if not idx:
            continue
        for monom, coeff in c.items():
            weight = len(idx) + sum(monom[:2 * n])
            scaled = coeff * QQ_I(QQ(1, weight))
            for pos, leg in enumerate(idx):
                exps = list(monom)
                exps[leg] += 1
                term = R.term_new(tuple(exps), -scaled if pos % 2 else scaled)
                rest = idx[:pos] + idx[pos + 1:]
                out[rest] = out.get(rest, R.zero) + term
    return Form(R, out)


def homotopy(phi: Form) -> Form:
    """Primitive alpha with d(alpha) = phi for a closed form of positive degree.

    Raises:
        UsageError: If phi has a nonzero degree-0 part
        NotClosedError: If d(phi) is not zero
    """
    if phi.coefficient(()):
        raise UsageError("homotopy needs a form of positive degree")
    if not exterior_d(phi).is_zero():
        raise NotClosedError("form is not closed")
    return radial_homotopy(phi)


# ---------- Poisson examples --------------------------------------------------

def beta_f(f: PolyScalar) -> Polyvector:
    """Jacobian Poisson structure f_1 d2^d3 + f_2 d3^d1 + f_3 d1^d2 on a 3-dimensional chart."""
    R = f.ring
    if chart_dim(R) != 3:
        raise DimensionMismatchError("beta_f lives on a chart of dimension 3")
    f1, f2, f3 = (f.diff(R.gens[k]) for k in range(3))
    return Polyvector(R, {(1, 2): f1, (2, 0): f2, (0, 1): f3})


def wedge_of_fields(
    fields: t.Sequence[Polyvector],
    coefficients: t.Optional[t.Mapping[t.Tuple[int, int], t.Any]] = None,
) -> Polyvector:
    """sum_{i<j} c_ij V_i ^ V_j; all c_ij = 1 when no coefficients are given."""
    if not fields:
        raise UsageError("need at least one vector field")
    R = fields[0].ring
    result = Polyvector.zero(R)
    for i, j in itertools.combinations(range(len(fields)), 2):
        c = 1 if coefficients is None else coefficients.get((i, j), 0)
        if c:
            result = result + fields[i].wedge(fields[j]) * c
    return result


# ---------- sections of T + T* ------------------------------------------------

@dataclasses.dataclass(frozen=True)
class GenSection:
    """Section v + theta of (T + T*) tensored with C.

    Attributes:
        vector: Degree-1 polyvector
        oneform: Degree-1 form
    """
    vector: Polyvector
    oneform: Form

    def __post_init__(self):
        if self.vector.ring != self.oneform.ring:
            raise DimensionMismatchError("vector and form parts on different charts")
        if not (self.vector.is_zero() or self.vector.is_homogeneous(1)):
            raise UsageError("vector part must be a vector field")
        if not (self.oneform.is_zero() or self.oneform.is_homogeneous(1)):
            raise UsageError("form part must be a 1-form")

    @property
    def ring(self) -> PolyRing:
        return self.vector.ring

    @classmethod
    def zero(cls, R: PolyRing) -> "GenSection":
        return cls(Polyvector.zero(R), Form.zero(R))

    @classmethod
    def from_vector(cls, R: PolyRing, entries: t.Sequence[t.Any]) -> "GenSection":
        """Section from 4n coefficients in the frame (d_z, d_zb, dz, dzb)."""
        n = chart_dim(R)
        if len(entries) != 4 * n:
            raise DimensionMismatchError(f"expected {4 * n} entries, got {len(entries)}")
        return cls(
            Polyvector.vector(R, entries[:2 * n]),
            Form(R, {(k,): c for k, c in enumerate(entries[2 * n:]) if c}),
        )

    def entries(self) -> t.List[PolyScalar]:
        n = chart_dim(self.ring)
        covector = [self.oneform.components.get((k,), self.ring.zero) for k in range(2 * n)]
        return self.vector.vector_coefficients() + covector

    def to_vector(self, point, t_value: t.Any = None) -> t.List[t.Any]:
        """Evaluated 4n-vector in the frame (d_z, d_zb, dz, dzb)."""
        return [eval_at(c, point, t_value) for c in self.entries()]

    def constant_entries(self) -> t.List[t.Any]:
        zero_monom = self.ring.zero_monom
        out = []
        for c in self.entries():
            if not c.is_ground:
                raise UsageError("section has non-constant coefficients")
            out.append(c.get(zero_monom, QQ_I.zero))
        return out

    def conj(self) -> "GenSection":
        return GenSection(self.vector.conj(), self.oneform.conj())

    def is_zero(self) -> bool:
        return self.vector.is_zero() and self.oneform.is_zero()

    def __add__(self, other: "GenSection") -> "GenSection":
        return GenSection(self.vector + other.vector, self.oneform + other.oneform)

    def __sub__(self, other: "GenSection") -> "GenSection":
        return GenSection(self.vector - other.vector, self.oneform - other.oneform)

    def __neg__(self) -> "GenSection":
        return GenSection(-self.vector, -self.oneform)

    def __mul__(self, scalar) -> "GenSection":
        return GenSection(self.vector * scalar, self.oneform * scalar)

    __rmul__ = __mul__


def pairing(e1: GenSection, e2: GenSection) -> PolyScalar:
    """<E1, E2> = (theta_2(v_1) + theta_1(v_2)) / 2."""
    half = QQ_I(QQ(1, 2))
    a = contract(e1.vector, e2.oneform).coefficient(())
    b = contract(e2.vector, e1.oneform).coefficient(())
    return (a + b) * e1.ring.ground_new(half)


def courant(e1: GenSection, e2: GenSection) -> GenSection:
    """Courant bracket [v1,v2] + (L_{v1}th2 - L_{v2}th1 - i_{v2}dth1 + i_{v1}dth2) / 2."""
    v1, th1 = e1.vector, e1.oneform
    v2, th2 = e2.vector, e2.oneform
    form_part = (
        lie_derivative(v1, th2)
        - lie_derivative(v2, th1)
        - interior(v2, exterior_d(th1))
        + interior(v1, exterior_d(th2))
    )
    return GenSection(lie_bracket(v1, v2), form_part * QQ_I(QQ(1, 2)))
