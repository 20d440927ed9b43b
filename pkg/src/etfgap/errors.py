"""Exception hierarchy shared by every module."""


class EtfError(Exception):
    """Base class for all errors raised by etfgap."""


# matcore
class NotHermitian(EtfError, ValueError):
    pass


class NoConvergence(EtfError, RuntimeError):
    pass


class ZeroVector(EtfError, ValueError):
    pass


# finite_field
class NotPrime(EtfError, ValueError):
    pass


class TooLarge(EtfError, ValueError):
    pass


class DivisionByZero(EtfError, ZeroDivisionError):
    pass


class SubfieldMismatch(EtfError, ValueError):
    pass


# constructions
class NotPrimePower(EtfError, ValueError):
    pass


class SearchSpaceTooLarge(EtfError, ValueError):
    pass


class NotAnEtf(EtfError, ValueError):
    pass


class DegenerateComplement(EtfError, ValueError):
    pass


# verification / admissibility
class InvalidPair(EtfError, ValueError):
    pass


# gap_certificate
class PhaseDegeneracy(EtfError, ValueError):
    pass


class InvariantViolation(EtfError, ArithmeticError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PairingViolation(EtfError, ArithmeticError):
    pass


class RankChainViolation(EtfError, ArithmeticError):
    pass
