"""
Exact linear algebra over the Gaussian rationals.

Thin helpers around sympy's DomainMatrix for the pointwise kernels, spans,
intersections and affine solves used throughout the toolkit. Vectors are plain
lists of domain elements.
"""
import logging
import typing as t

from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

# Set up logging
logger = logging.getLogger(__name__)

Vector = t.List[t.Any]


def to_matrix(rows: t.Sequence[Vector], ncols: int, domain=QQ_I) -> DomainMatrix:
    """Dense DomainMatrix from a list of rows."""
    return DomainMatrix([list(r) for r in rows], (len(rows), ncols), domain)


def identity(size: int, domain=QQ_I) -> DomainMatrix:
    return DomainMatrix.eye(size, domain).to_dense()


def rank(vectors: t.Sequence[Vector], ncols: int, domain=QQ_I) -> int:
    if not vectors:
        return 0
    return to_matrix(vectors, ncols, domain).rank()


def kernel(rows: t.Sequence[Vector], ncols: int, domain=QQ_I) -> t.List[Vector]:
    """Basis of {x : rows . x = 0}."""
    if not rows:
        return [[domain.one if i == j else domain.zero for j in range(ncols)] for i in range(ncols)]
    return to_matrix(rows, ncols, domain).nullspace().to_list()


def independent(vectors: t.Sequence[Vector], ncols: int, domain=QQ_I) -> t.List[Vector]:
    """Basis of the span of ``vectors`` (rows of the reduced echelon form)."""
    if not vectors:
        return []
    return to_matrix(vectors, ncols, domain).rowspace().to_list()


def span_contains(basis: t.Sequence[Vector], vector: Vector, ncols: int, domain=QQ_I) -> bool:
    if not any(vector):
        return True
    return rank(list(basis) + [vector], ncols, domain) == rank(basis, ncols, domain)


def spans_equal(a: t.Sequence[Vector], b: t.Sequence[Vector], ncols: int, domain=QQ_I) -> bool:
    ra, rb = rank(a, ncols, domain), rank(b, ncols, domain)
    return ra == rb == rank(list(a) + list(b), ncols, domain)


def intersection_dim(a: t.Sequence[Vector], b: t.Sequence[Vector], ncols: int, domain=QQ_I) -> int:
    return rank(a, ncols, domain) + rank(b, ncols, domain) - rank(list(a) + list(b), ncols, domain)


def intersection_basis(a: t.Sequence[Vector], b: t.Sequence[Vector], ncols: int, domain=QQ_I) -> t.List[Vector]:
    """Basis of span(a) ∩ span(b)."""
    a = independent(a, ncols, domain)
    b = independent(b, ncols, domain)
    if not a or not b:
        return []
    # columns are the vectors of a followed by the negated vectors of b
    rows = [[v[i] for v in a] + [-w[i] for w in b] for i in range(ncols)]
    combos = kernel(rows, len(a) + len(b), domain)
    vectors = []
    for c in combos:
        vec = [domain.zero] * ncols
        for coeff, v in zip(c[:len(a)], a):
            if coeff:
                vec = [x + coeff * y for x, y in zip(vec, v)]
        vectors.append(vec)
    return independent(vectors, ncols, domain)


def matvec(matrix: DomainMatrix, vector: Vector) -> Vector:
    rows = matrix.to_list()
    return [sum((m * v for m, v in zip(row, vector)), matrix.domain.zero) for row in rows]


def inverse(matrix: DomainMatrix) -> DomainMatrix:
    return matrix.inv()


def solve_affine(
    equations: t.Dict[int, t.Dict[int, t.Any]],
    rhs: t.Dict[int, t.Any],
    nrows: int,
    nunknowns: int,
    domain,
) -> t.Optional[Vector]:
    """Particular solution of a sparse linear system, or None if inconsistent.

    Args:
        equations: Sparse coefficient rows {row: {col: value}}
        rhs: Sparse right-hand side {row: value}
        nrows: Number of equations
        nunknowns: Number of unknowns
        domain: Field of the entries (QQ for real unknowns)

    Returns:
        A solution with all free unknowns set to zero, or None
    """
    augmented = {}
    for i in range(nrows):
        row = dict(equations.get(i, {}))
        if rhs.get(i):
            row[nunknowns] = rhs[i]
        row = {j: v for j, v in row.items() if v}
        if row:
            augmented[i] = row
    if not augmented:
        return [domain.zero] * nunknowns
    M = DomainMatrix.from_dod(augmented, (nrows, nunknowns + 1), domain)
    reduced, pivots = M.rref()
    if pivots and pivots[-1] == nunknowns:
        return None
    dod = reduced.to_dod()
    solution = [domain.zero] * nunknowns
    for i, col in enumerate(pivots):
        solution[col] = dod.get(i, {}).get(nunknowns, domain.zero)
    logger.debug(f"Solved {nrows}x{nunknowns} system, rank {len(pivots)}")
    return solution


def is_positive_definite(hermitian: DomainMatrix) -> bool:
    """Sylvester's criterion for a Hermitian matrix over QQ_I."""
    size = hermitian.shape[0]
    for k in range(1, size + 1):
        minor = hermitian.extract(range(k), range(k)).det()
        if minor.y or minor.x <= 0:
            return False
    return True
