"""Exception hierarchy shared by all certquad modules."""


class CertQuadError(Exception):
    """Base class for every error raised by certquad."""


class ExprSyntaxError(CertQuadError, ValueError):
    """Malformed expression source; ``offset`` is the byte offset of the fault."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class UnknownIdentifier(ExprSyntaxError):
    pass


class DomainError(CertQuadError, ValueError):
    """Evaluation left the domain of the function (log of t <= 0, 1/0, overflow)."""


class NonDifferentiable(CertQuadError, ValueError):
    pass


class OutOfDomain(CertQuadError, ValueError):
    """A point lies outside the admissible range for the operation."""


class InvalidInterval(CertQuadError, ValueError):
    pass


class InvalidPartition(CertQuadError, ValueError):
    pass


class InvalidN(CertQuadError, ValueError):
    pass


class NegativeNorm(CertQuadError, ValueError):
    pass


class XiOutOfRange(CertQuadError, ValueError):
    def __init__(self, index, xi, lo, hi, side):
        super().__init__(
            f"xi[{index}]={xi!r} violates the {side} bound of [{lo!r}, {hi!r}]"
        )
        self.index = index
        self.xi = xi
        self.side = side


class OracleNoConvergence(CertQuadError, RuntimeError):
    pass


class NormalizationError(CertQuadError, ValueError):
    pass


class ToleranceNotMet(CertQuadError, RuntimeError):
    """The adaptive integrator stopped above tolerance; ``result`` is the best achieved."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class BudgetExceeded(ToleranceNotMet):
    pass
