"""Exception hierarchy shared by all critexp modules."""


class CritexpError(Exception):
    """Base class for every error raised by the package."""


class DomainError(CritexpError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(CritexpError, ValueError):
    """A hypothesis required by an estimate (e.g. a lower bound on ell) fails."""


class InsufficientDataError(CritexpError, ValueError):
    pass


class DataError(CritexpError, ValueError):
    """Sampled input data violates an invariant such as nonnegativity."""


class ConfigError(CritexpError, ValueError):
    pass


class CertificationError(CritexpError, RuntimeError):
    """A certification check ran and failed.

    ``check`` names the failing check and ``point`` the grid location
    (radius) where it failed, when one applies.
    """

    def __init__(self, check, point=None, detail=""):
        self.check = check
        self.point = point
        msg = f"certification failed: {check}"
        if point is not None:
            msg += f" at r={point:.6g}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
