"""Exception hierarchy shared by every koenigslab module."""


class KoenigsLabError(Exception):
    """Base class for all library errors."""


class TruncationMismatch(KoenigsLabError):
    pass


class NoLeadingTerm(KoenigsLabError):
    pass


class CharacteristicError(KoenigsLabError):
    pass


class NonConvergence(KoenigsLabError):
    pass


class ResonanceError(KoenigsLabError):
    pass


class TruncationOverflow(KoenigsLabError):
    pass


class SpectrumError(KoenigsLabError):
    pass


class PowerError(KoenigsLabError):
    pass


class EmptyPointSpectrum(KoenigsLabError):
    pass


class ZeroFactor(KoenigsLabError):
    pass


class ConstantTermError(KoenigsLabError):
    pass


class BranchError(KoenigsLabError):
    pass


class NotInvertible(KoenigsLabError):
    pass


class OrderError(KoenigsLabError):
    pass


class ZeroDerivative(KoenigsLabError):
    pass


class NotAttracting(KoenigsLabError):
    pass


class Inconclusive(KoenigsLabError):
    pass


class ParseError(KoenigsLabError):
    pass
