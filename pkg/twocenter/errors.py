"""Exception hierarchy shared by the library and the CLI."""


class TwoCenterError(Exception):
    """Root of every error raised by the package."""


class ConfigurationError(TwoCenterError):
    """Problem instance or run configuration is invalid (CLI exit code 1)."""


class NumericalError(TwoCenterError):
    """A numerical kernel could not deliver a result (CLI exit code 2)."""


# params-core
class UnrealizableGeometry(ConfigurationError):
    pass


class NonPositiveShiftedEnergy(ConfigurationError):
    pass


class SingularPoint(NumericalError):
    pass


# specfun
class PoleInB(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


# ode-engine
class DomainEdge(NumericalError):
    pass


class TailTooClose(NumericalError):
    pass


class StepUnderflow(NumericalError):
    pass


# eigensolver
class BracketFailure(NumericalError):
    def __init__(self, message: str, interval: tuple = None):
        super().__init__(message)
        self.interval = interval


class NoRootInBracket(NumericalError):
    pass


class NodeCountMismatch(NumericalError):
    pass


# asymptotics
class ZeroCharge(ConfigurationError):
    pass


class DegenerateTransition(NumericalError):
    pass


class LogBranch(NumericalError):
    pass


# oracle-grid
class FactorizationFailure(NumericalError):
    pass


class IterationStall(NumericalError):
    pass


# cli
class InsufficientPoints(TwoCenterError):
    pass
