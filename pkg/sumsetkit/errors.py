class SumsetError(Exception):
    """Base class for every error raised by sumsetkit."""


class ParseError(SumsetError, ValueError):
    def __init__(self, message: str, token: str = ""):
        super().__init__(message)
        self.token = token


class ContractViolation(SumsetError, ValueError):
    """A documented precondition of an operation does not hold."""


class NotRealizableError(SumsetError, LookupError):
    def __init__(self, target):
        super().__init__(f"target {target} is not a realizable sum")
        self.target = target


class GuardExceeded(SumsetError):
    """Exhaustive enumeration refused because the input is too large."""


class ConfigError(SumsetError):
    pass
