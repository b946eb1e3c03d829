"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a curvature function."""


class ConeError(DomainError):
    """Principal curvatures outside the admissible cone."""

    def __init__(self, message, lambdas=None, inequality=None):
        super().__init__(message)
        self.lambdas = lambdas
        self.inequality = inequality


class RangeError(DomainError):
    """A value outside ``(0, gamma)`` was passed to the inverse of ``rho_hat``.

    ``side`` is ``"low"`` for ``y <= 0`` and ``"high"`` for ``y >= gamma``.
    """

    def __init__(self, message, side, value):
        super().__init__(message)
        self.side = side
        self.value = value


class DomainExit(ArithmeticError):
    """The profile ODE left the region where it is defined."""

    def __init__(self, side, h, y):
        super().__init__(f"domain exit ({side}) at h={h!r}, y={y!r}")
        self.side = side
        self.h = h
        self.y = y


class SingularityError(ZeroDivisionError):
    """The denominator ``r - rdot*h`` of the quotient Q vanished."""


class InvariantViolation(AssertionError):
    """A property that holds for every exact solution failed numerically."""


class InvalidConfiguration(ValueError):
    """Family or initial conditions rejected before integration."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
