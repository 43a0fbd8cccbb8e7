"""Shared exception types."""


class ContractError(ValueError):
    """An input violates a documented precondition."""


class SizeCapError(ContractError):
    """An exhaustive computation would exceed its configured size cap."""


class SolverExhausted(RuntimeError):
    """A complete search finished without finding the object it was asked for."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = dict(details or {})
