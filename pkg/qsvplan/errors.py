"""Exception hierarchy shared by the core, the CLI and the API."""


class QsvError(Exception):
    """Base class for every error raised by qsvplan."""


class StrategyError(QsvError, ValueError):
    """Invalid verification protocol, operator or spectrum."""


class HedgeRequiredError(StrategyError):
    """The operator is singular (smallest eigenvalue 0); hedge it first."""


class GuardError(QsvError):
    """A combinatorial size guard of the oracle or simulator was exceeded."""


class InfeasibleError(QsvError):
    """No adversary configuration reaches the requested pass probability."""
