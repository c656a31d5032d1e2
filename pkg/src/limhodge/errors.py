"""Exception hierarchy shared by every module.

Verdict failures that are data (a failed axiom, an Indeterminate sign) are
returned as values; the classes below are for violated preconditions.
"""


class LimHodgeError(Exception):
    """Base class."""


class TwistError(LimHodgeError, ValueError):
    """Addition or comparison across different powers of 2*pi."""


class ShapeError(LimHodgeError, ValueError):
    """Dimension mismatch."""


class ContainmentError(LimHodgeError, ValueError):
    """A subspace is not contained where it must be."""


class NotDecidable(LimHodgeError, ArithmeticError):
    """A sign question cannot be settled from the exact data."""


class ValidationError(LimHodgeError, ValueError):
    """Input failed structural validation."""


class NotUnipotent(LimHodgeError, ValueError):
    pass


class ZeroVector(LimHodgeError, ValueError):
    pass


class MissingPairing(LimHodgeError, KeyError):
    pass


class NotACocycle(LimHodgeError, ValueError):
    pass


class LiftError(LimHodgeError, ValueError):
    pass


class HypothesisFailure(LimHodgeError, ValueError):
    """A hypothesis the construction relies on does not hold on the instance."""


class SingularLeadingBlock(LimHodgeError, ArithmeticError):
    pass


class GrowthError(LimHodgeError, ValueError):
    pass


class UnsupportedDiamond(LimHodgeError, ValueError):
    pass


class UnsupportedOrder(LimHodgeError, ValueError):
    pass


class ConsistencyError(LimHodgeError, ArithmeticError):
    """A formal variable that must cancel survived."""


class GramDegenerate(LimHodgeError, ValueError):
    pass


class FriedmanConditionFailure(LimHodgeError, ValueError):
    pass


class ParseError(LimHodgeError, ValueError):
    pass


class SchemaError(LimHodgeError, ValueError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
