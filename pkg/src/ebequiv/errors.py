"""Exception hierarchy shared by every layer of the package."""


class EbError(Exception):
    """Base class for all package errors."""


class AssumptionMissing(EbError):
    """A radical simplification needs a sign assumption that was not registered."""


class InconsistentBinding(EbError):
    pass


class NotPolynomial(EbError):
    pass


class SingularJacobian(EbError):
    pass


class DegenerateChart(EbError):
    pass


class ChartBoundary(EbError):
    """Composed Moebius map has a vanishing constant denominator term."""


class NonInvertible(EbError):
    pass


class UnboundSymbol(EbError):
    pass


class DomainError(EbError):
    """Numeric evaluation left the real domain (e.g. negative radicand)."""


class SingularPoint(EbError):
    pass


class ParseError(EbError):
    pass
