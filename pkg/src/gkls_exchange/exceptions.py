"""Exception hierarchy shared by all modules."""


class GklsExchangeError(ValueError):
    """Base class for domain failures raised by this package."""


# algebra
class CollinearInput(GklsExchangeError):
    pass


class InvalidBasis(GklsExchangeError):
    pass


# gkls
class InvalidSystem(GklsExchangeError):
    pass


class NotUnitary(GklsExchangeError):
    pass


class ZeroScale(GklsExchangeError):
    pass


class UnsupportedTermCount(GklsExchangeError):
    pass


# decompose
class NotExchangeCandidate(GklsExchangeError):
    """Raised when a system cannot enter the exchange decomposition.

    ``classification`` carries the :class:`~gkls_exchange.gkls.Classification`
    that was found instead.
    """

    def __init__(self, classification, message=None):
        self.classification = classification
        super().__init__(message or f"system classified as {classification.name}")


class CollinearSpan(GklsExchangeError):
    pass


class NotInSpan(GklsExchangeError):
    pass


class NegativeRate(GklsExchangeError):
    def __init__(self, gamma_p, gamma_m):
        self.gamma_p = gamma_p
        self.gamma_m = gamma_m
        super().__init__(
            f"exchange matching requires a negative rate "
            f"(gamma_p={gamma_p:.6g}, gamma_m={gamma_m:.6g})"
        )


# dynamics
class SingularGenerator(GklsExchangeError):
    pass


# thermo
class PureState(GklsExchangeError):
    pass


class RankDeficientBasis(GklsExchangeError):
    pass


class DegenerateDenominator(GklsExchangeError):
    pass
