"""Exception hierarchy shared by every module."""


class ConeCertError(Exception):
    """Base class for all library errors."""


class InputError(ConeCertError):
    """Malformed or inconsistent input (CLI exit code 3)."""


class PreconditionFailed(ConeCertError):
    """A mathematical precondition of an operation does not hold (CLI exit code 1)."""


class ParseError(InputError):
    def __init__(self, message, source="<string>", line=None, col=None):
        self.source = source
        self.line = line
        self.col = col
        where = source
        if line is not None:
            where += f":{line}"
            if col is not None:
                where += f":{col}"
        super().__init__(f"{where}: {message}")


class DimensionMismatch(InputError):
    pass


class NotSymmetric(InputError):
    pass


class DidNotConverge(ConeCertError):
    pass


class UnsupportedCone(InputError):
    pass


class SingularGenerators(InputError):
    pass


class NotSelfDual(InputError):
    pass


class NotQuasiMonotone(PreconditionFailed):
    pass


class NotKNonnegative(PreconditionFailed):
    pass


class NotDiffusive(PreconditionFailed):
    pass


class NotStable(PreconditionFailed):
    pass


class NotInterior(PreconditionFailed):
    pass


class SingularE(InputError):
    pass


class ScaleTooLarge(InputError):
    pass


class InternalVerificationFailed(ConeCertError):
    """A constructed certificate failed its own independent re-check."""
