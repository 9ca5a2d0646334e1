"""
Exception hierarchy for genkahler.

Every error carries a machine-readable ``code`` that the command line echoes
into reports. The three direct subclasses of :class:`GenKahlerError` decide the
process exit code: usage problems exit with 2, undecided computations with 3,
everything else fails the task that raised it.
"""
import typing as t


class GenKahlerError(Exception):
    """Base class for all toolkit errors."""
    code = "error"


class UsageError(GenKahlerError):
    """Malformed input: bad expressions, unknown names, wrong dimensions."""
    code = "usage"


class VerificationError(GenKahlerError):
    """A mathematical precondition of an operation does not hold."""
    code = "verification"


class UndecidedError(GenKahlerError):
    """A computation hit a configured cap before reaching a verdict."""
    code = "undecided"


class ParseError(UsageError):
    """Syntax error in the expression language."""
    code = "parse_error"

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class DimensionMismatchError(UsageError):
    """Objects or points live on charts of different dimension."""
    code = "dimension_mismatch"


class DegreeOverflowError(UsageError):
    """A polynomial exceeded the total-degree guard."""
    code = "degree_overflow"


class NoParametrizationError(UsageError):
    """An operation needs a graph parametrization the model does not carry."""
    code = "no_parametrization"


class SampleSearchError(UsageError):
    """No rational sample points could be found; supply them explicitly."""
    code = "sample_search"


class FiltrationOverflowError(VerificationError):
    """A Clifford product left the configured filtration degree."""
    code = "filtration_overflow"


class NotPoissonError(VerificationError):
    """A bivector has a nonzero Schouten square."""
    code = "not_poisson"


class NotClosedError(VerificationError):
    """A form that must be closed is not."""
    code = "not_closed"


class NotPureError(VerificationError):
    """A form is not a pure spinor at the given point."""
    code = "not_pure"


class DegenerateError(VerificationError):
    """A symplectic form, spinor or structure is degenerate."""
    code = "degenerate"


class SingularPointError(VerificationError):
    """The differentials of the defining ideal drop rank at a point."""
    code = "singular_point"


class NonCommutingError(VerificationError):
    """Two generalized complex structures do not commute."""
    code = "non_commuting"


class IndefiniteMetricError(VerificationError):
    """The generalized metric of a pair is not positive definite."""
    code = "indefinite_metric"


class UndecidedAtCapError(UndecidedError):
    """Buchberger completion exceeded its reduction cap."""
    code = "undecided_at_cap"


class DegreeBoundError(UndecidedError):
    """No solution of the order-k equation within the polynomial degree bound.

    Attributes:
        order: the order k that failed
        degree_bound: the bound D that was searched
        obstruction_in_k2: whether Ob_k has the form eta ^ e^{i omega} with eta of bidegree
            (1,0), (0,1), (2,1) or (1,2); when it does, a larger bound may still succeed
    """
    code = "degree_bound"

    def __init__(self, message: str, order: int, degree_bound: int, obstruction_in_k2: bool):
        super().__init__(message)
        self.order = order
        self.degree_bound = degree_bound
        self.obstruction_in_k2 = obstruction_in_k2

    def details(self) -> t.Dict[str, t.Any]:
        return {
            "order": self.order,
            "degree_bound": self.degree_bound,
            "obstruction_in_k2": self.obstruction_in_k2,
        }
