from typing import Optional


class CommutatorError(Exception):
    """Base class for all exceptions raised by the commutator SDK."""

    def __init__(self, message: str = "Computation failed."):  # noqa: D107
        self.message = message
        super().__init__(self.message)


class AlgebraValidationError(CommutatorError):
    """Exception raised when an algebra violates one of its invariants."""

    def __init__(  # noqa: D107
        self,
        message: str,
        symbol: Optional[str] = None,
        index: Optional[int] = None,
    ):
        self.symbol = symbol
        self.index = index
        super().__init__(message)


class AlgebraParseError(CommutatorError):
    """Exception raised when an algebra document cannot be parsed."""

    def __init__(  # noqa: D107
        self,
        message: str,
        line: Optional[int] = None,
        field: Optional[str] = None,
    ):
        self.line = line
        self.field = field
        super().__init__(message)


class UnknownBuiltinError(CommutatorError):
    """Exception raised for a builtin algebra name that is not in the corpus."""


class PartitionParseError(CommutatorError):
    """Exception raised for malformed partition text."""


class TermError(CommutatorError):
    """Exception raised for malformed terms or terms that do not fit a signature."""


class NotACongruenceError(CommutatorError):
    """Exception raised when a relation passed as a congruence is not compatible."""


class NotAHomomorphismError(NotACongruenceError):
    """Exception raised when an element map is not a surjective homomorphism."""


class NotRelatedError(CommutatorError):
    """Exception raised when two elements are not related by a generated congruence."""


class PremiseViolationError(CommutatorError):
    """Exception raised when the premise diagram of a shifting check does not hold."""


class CapExceededError(CommutatorError):
    """
    Exception raised when a closure was cut short by its cap.

    Incomplete closures are never used to answer a question that needs the whole
    generated set, so callers receive this exception instead of a partial answer.
    """

    def __init__(self, message: str, cap: Optional[int] = None):  # noqa: D107
        self.cap = cap
        super().__init__(message)


class NotModularError(CommutatorError):
    """Exception raised when a computation that needs congruence modularity fails."""


class TernaryGroupError(CommutatorError):
    """Exception raised when a ternary operation is not a ternary Abelian group."""


class NotAbelianError(CommutatorError):
    """Exception raised when an Abelian algebra or congruence was required."""


class NotAffineError(CommutatorError):
    """Exception raised when an algebra has no Mal'tsev polynomial to build on."""


class AxiomViolationError(CommutatorError):
    """Exception raised when an exhaustive axiom check finds a violation."""
