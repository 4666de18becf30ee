"""Exception hierarchy.

Each family maps to its own CLI exit code (see :data:`EXIT_CODES`).
"""


class WindTreeError(Exception):
    """Base class for every error raised by the package."""

    family = "general"


class AmbiguousComparison(WindTreeError, ArithmeticError):
    family = "precision"


class InvalidIET(WindTreeError, ValueError):
    family = "input"


class NonPositiveLength(InvalidIET):
    pass


class ReduciblePermutation(InvalidIET):
    pass


class SizeMismatch(InvalidIET):
    pass


class OutOfDomain(WindTreeError, ValueError):
    family = "input"


class BudgetExceeded(WindTreeError, RuntimeError):
    family = "budget"


class DegenerateSubinterval(WindTreeError, ValueError):
    family = "input"


class TieAmbiguous(AmbiguousComparison):
    pass


class NotPrimitive(WindTreeError, ValueError):
    family = "spectral"


class ComplexStableSpace(WindTreeError, ValueError):
    family = "spectral"


class NearUnitEigenvalue(WindTreeError, ValueError):
    family = "spectral"


class UnderdeterminedTau(WindTreeError, ValueError):
    family = "spectral"


class SingularHit(WindTreeError, RuntimeError):
    family = "geometry"


class CornerHit(SingularHit):
    pass


class StartInsideObstacle(WindTreeError, ValueError):
    family = "geometry"


class NotInSpan(WindTreeError, ValueError):
    family = "spectral"


class SingularC(WindTreeError, ValueError):
    family = "spectral"


class GapUndetermined(WindTreeError, RuntimeError):
    family = "precision"


class InvalidParams(WindTreeError, ValueError):
    family = "input"


class InsufficientDepths(WindTreeError, ValueError):
    family = "input"


class ConfigError(WindTreeError, ValueError):
    family = "input"


EXIT_CODES = {
    "general": 1,
    "input": 2,
    "precision": 3,
    "budget": 4,
    "spectral": 5,
    "geometry": 6,
}
