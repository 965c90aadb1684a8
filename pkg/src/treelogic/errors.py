"""Exception types shared across the package."""


class TreelogicError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(TreelogicError):
    pass


class UnknownAtom(TreelogicError):
    pass


class NotInNNF(TreelogicError):
    pass


class UnsupportedFragment(TreelogicError):
    pass


class NotPureFuture(UnsupportedFragment):
    pass


class NotSimpleForm(TreelogicError):
    pass


class WrongFragment(TreelogicError):
    pass


class BadModel(TreelogicError):
    pass


class DepthNegative(BadModel):
    pass


class BadWord(TreelogicError):
    pass


class LetterOutOfAlphabet(BadWord):
    pass


class WrongKind(TreelogicError):
    pass


class NotUBA(WrongKind):
    pass


class TwoWayUnsupported(WrongKind):
    pass


class NotLinearHesitant(WrongKind):
    pass


class NotPolarisedHesitant(WrongKind):
    pass


class NotTwoWayLinear(WrongKind):
    pass


class BadAutomaton(TreelogicError):
    pass


class TransientComponent(TreelogicError):
    pass


class TransitionBlowup(TreelogicError):
    pass


class InsufficientFuel(TreelogicError):
    pass


class VisibilityViolated(TreelogicError):
    pass
