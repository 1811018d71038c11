"""Exception types shared across the package."""


class ContractivityError(Exception):
    """Base class for all domain errors raised by this package."""


class DimensionMismatch(ContractivityError):
    pass


class NumericalFailure(ContractivityError):
    pass


class NotPositiveDefinite(ContractivityError):
    pass


class SingularBlock(ContractivityError):
    pass


class SingularP(ContractivityError):
    pass


class SingularA(ContractivityError):
    pass


class InvalidRate(ContractivityError):
    pass


class InfeasibleAtAllRates(ContractivityError):
    pass


class ReCheckFailed(ContractivityError):
    pass


class FeasibilityNotFound(ContractivityError):
    """A synthesis step required a certificate the solver could not find."""


class AlphaOutOfRange(ContractivityError):
    pass


class NoRealRoot(ContractivityError):
    pass


class RankDeficientV(ContractivityError):
    pass


class SlopeBoundViolated(ContractivityError):
    pass


class DegenerateRate(ContractivityError):
    pass


class NoConvergence(ContractivityError):
    pass


class NonFiniteState(ContractivityError):
    pass


class DegenerateTraces(ContractivityError):
    pass
