"""Exception types shared across modules."""


class FatouLabError(Exception):
    pass


class PoleHit(FatouLabError, ArithmeticError):
    """The point sits on (or numerically at) a pole of the map."""

    def __init__(self, point):
        super().__init__(f"pole hit at {point!r}")
        self.point = point


class OverflowDomain(FatouLabError, OverflowError):
    """An intermediate exponential left the double-precision range."""

    def __init__(self, point):
        super().__init__(f"exponential overflow at {point!r}")
        self.point = point


class RootSearchFailed(FatouLabError, RuntimeError):
    pass


class InsufficientData(FatouLabError, ValueError):
    pass


class RealPoleCrossing(FatouLabError, ArithmeticError):
    pass


class EmptyCloud(FatouLabError, ValueError):
    pass


class UnlabeledSeed(FatouLabError, ValueError):
    pass


class OrbitTooShort(FatouLabError, ValueError):
    pass


class NoPointsFound(FatouLabError, ValueError):
    pass


class SetupInfeasible(FatouLabError, ValueError):
    pass


class MarginInconclusive(FatouLabError):
    """Sampled sup and safety margin straddle the threshold.

    The partially filled report is attached as ``report``.
    """

    def __init__(self, report):
        super().__init__(report.notes)
        self.report = report
