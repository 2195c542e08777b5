"""Exception and warning types shared across the package.

The hierarchy mirrors how failures are reported downstream: domain errors
are bad arguments, contract violations are structurally invalid inputs
(e.g. an unnormalized distribution), numeric errors are computations that
could not produce a finite answer, and data errors come from rating files.
The CLI maps these onto its exit codes.
"""


class NoisyEvalError(Exception):
    """Base class for all package-specific errors."""


class DomainError(NoisyEvalError, ValueError):
    """An argument is outside its mathematical domain."""


class ContractViolationError(NoisyEvalError, ValueError):
    """A structured input violates its invariants (e.g. masses do not sum to 1)."""


class NumericError(NoisyEvalError, ArithmeticError):
    """A computation failed numerically (underflow, non-convergence)."""


class UndefinedEstimatorError(NumericError):
    """The closed-form success-rate estimator is undefined (rho + eta = 1)."""


class DataError(NoisyEvalError, ValueError):
    """A rating file or persisted report is invalid."""


class ParseError(DataError):
    """A file could not be parsed; the message carries the line number."""


class DuplicateKeyError(DataError):
    """Two records share the same (input, output, system, source) key."""


class SchemaError(DataError):
    """A persisted JSON report violates its schema."""


class NotFittedError(NoisyEvalError, ValueError, AttributeError):
    """An estimator method requiring a fitted model was called before fit."""


class LowEvidenceWarning(UserWarning):
    """Metric performance is estimated from very few gold-labeled samples."""


class OverlapWarning(UserWarning):
    """Some pairs were rated by both the human source and the metric source."""
