"""
Error hierarchy shared by the numerical services and the CLI.

Every error names the parameter that caused it so the runner can report it.
"""

from typing import Optional


class LabError(Exception):
    def __init__(self, message: str, parameter: Optional[str] = None):
        super().__init__(message)
        self.parameter = parameter


class InvalidArgumentError(LabError, ValueError):
    pass


class InvalidDataError(LabError, ValueError):
    pass


class ConfigError(LabError, ValueError):
    pass


class ResolutionError(LabError):
    """A profile, band or transported support does not fit the grid."""


class SingularMultiplierError(LabError):
    pass


class DegenerateInputError(LabError):
    pass


class NoPairError(LabError):
    pass


class WrongBranchError(LabError):
    pass


class NumericalInstabilityError(LabError):
    pass
