"""Exception types shared across the package."""


class MissingVariable(KeyError):
    """An assignment does not cover a variable occurring in an expression."""


class ZeroDenominator(ZeroDivisionError):
    """A rational expression was evaluated where its denominator vanishes."""


class Inconsistent(ValueError):
    """A linear system has no solution."""


class OrderTooLow(ValueError):
    """A jet germ is too short for the requested computation."""


class DegenerateSample(RuntimeError):
    """Random sampling hit a singular configuration and the retry budget ran out."""


class BadParameter(ValueError):
    """A symmetry parameter depends on variables other than t and z."""


class SingularJacobian(ZeroDivisionError):
    """A Jacobian that must be invertible is singular at the sample."""


class ZeroG44(ZeroDivisionError):
    """The normalising entry G_44 of the invariant metric matrix vanishes."""
