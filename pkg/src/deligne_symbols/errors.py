"""Exception types shared across the package."""


class DeligneError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(DeligneError, ValueError):
    pass


class DegreeCapExceeded(DeligneError):
    pass


class PoleAtPoint(DeligneError, ZeroDivisionError):
    pass


class ZeroFunction(DeligneError, ValueError):
    pass


class IndeterminateSymbol(DeligneError, ArithmeticError):
    pass


class InvalidCover(DeligneError, ValueError):
    pass


class EmptyRegion(DeligneError):
    pass


class BranchGuardViolation(DeligneError):
    pass


class OutOfChart(DeligneError):
    pass


class DegreeOverflow(DeligneError):
    pass


class SlotMismatch(DeligneError, TypeError):
    pass


class PairingUndefined(DeligneError):
    pass


class HomotopyUndefined(DeligneError):
    pass


class MetricIncompatible(DeligneError):
    pass


class NotInKernel(DeligneError):
    pass


class LiftMismatch(DeligneError):
    pass
