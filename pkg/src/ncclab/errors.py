"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 1 for domain errors
(the math says no), 2 for malformed input, 3 for failed internal
verification (a bug, never expected).
"""


class NccLabError(Exception):
    exit_code = 1


class DomainError(NccLabError):
    exit_code = 1


class InputError(NccLabError):
    exit_code = 2


class VerificationError(NccLabError):
    exit_code = 3


# finite fields
class NotPrime(DomainError):
    pass


class MixedFields(DomainError):
    pass


class DivisionByZero(DomainError, ZeroDivisionError):
    pass


class NoSuchRoot(DomainError):
    pass


class LengthMismatch(DomainError):
    pass


class DuplicatePoint(DomainError):
    pass


# data structures
class BudgetExceeded(VerificationError):
    pass


class NonAdaptivityViolation(VerificationError):
    pass


class Unanswerable(DomainError):
    pass


class NotAPermutation(DomainError):
    pass


# reduction
class AdaptiveDSRejected(DomainError):
    pass


class MissingMessage(VerificationError):
    pass


class InconsistentInput(DomainError):
    pass


class EmptyInput(DomainError):
    pass


class DegenerateSize(DomainError):
    pass


# network coding
class CyclicNetwork(DomainError):
    pass


class ArityMismatch(VerificationError):
    pass


class EmptyCodebook(DomainError):
    pass


class SearchSpaceTooLarge(DomainError):
    pass


# LP
class Unbounded(VerificationError):
    pass


class Infeasible(VerificationError):
    pass


# circuits
class WidthMismatch(DomainError):
    pass


class UnsupportedWidth(DomainError):
    pass


class InvalidCut(VerificationError):
    pass


class ParseError(InputError):
    pass
