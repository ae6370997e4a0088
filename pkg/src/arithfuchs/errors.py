"""Exception types raised across the package.

Every error carries a human readable message; some also carry a structured
payload (``details``) so that drivers can print a precise diagnosis.
"""

from __future__ import annotations

from typing import Any


class ArithFuchsError(Exception):
    """Base class for all package errors."""

    def __init__(self, message: str = "", details: Any = None) -> None:
        super().__init__(message)
        self.details = details


# numfield
class NotTotallyReal(ArithFuchsError):
    pass


class Reducible(ArithFuchsError):
    pass


class DiscriminantMismatch(ArithFuchsError):
    pass


class DivisionByZero(ArithFuchsError, ZeroDivisionError):
    pass


class PrecisionExhausted(ArithFuchsError):
    pass


# ideals
class PeriodNotSupported(ArithFuchsError):
    pass


# volume
class NonHyperbolic(ArithFuchsError):
    pass


class AmbiguousRecognition(ArithFuchsError):
    pass


class BasisHypothesisFails(ArithFuchsError):
    pass


# quatalg
class ParityViolation(ArithFuchsError):
    pass


# orders
class NotIntegral(ArithFuchsError):
    pass


class HypothesisFails(ArithFuchsError):
    pass


class MaximalityCheckFailed(ArithFuchsError):
    pass


class SearchExhausted(ArithFuchsError):
    pass


# ford
class WrongPlace(ArithFuchsError):
    pass


class EmptyEnumeration(ArithFuchsError):
    pass


class RefineEpsilon(ArithFuchsError):
    pass


class UnclosedCycle(ArithFuchsError):
    pass


class AreaMismatch(ArithFuchsError):
    pass


class NotSupportedIndex(ArithFuchsError):
    pass


# classify
class SimplificationInapplicable(ArithFuchsError):
    pass


class RowMismatch(ArithFuchsError):
    pass


class ScreenInconclusive(ArithFuchsError):
    pass
