# Exception hierarchy shared by every exal2 module


class Exal2Error(ValueError):
    """Base class of all library errors."""


class _Violation(Exal2Error):
    """A law failed on an explicit witness."""

    def __init__(self, law, witness=None):
        self.law = law
        self.witness = witness
        super().__init__(f"{law} fails at {witness}")


class AxiomViolation(_Violation):
    pass


class CrossedViolation(_Violation):
    pass


class ExtensionViolation(_Violation):
    pass


class TwoExtViolation(_Violation):
    pass


class ButterflyViolation(_Violation):
    """Raised with the number of the failing butterfly axiom."""

    @property
    def axiom(self):
        return self.law


class TargetMismatch(Exal2Error):
    pass


class NotComposable(Exal2Error):
    pass


class NotAnIdeal(Exal2Error):
    pass


class NotSurjective(Exal2Error):
    pass


class NotAnAutomorphism(Exal2Error):
    pass


class ShapeMismatch(Exal2Error):
    pass


class TooLarge(Exal2Error):
    pass


class NotAChainMap(Exal2Error):
    pass


class NotInvertible(Exal2Error):
    pass


class NotALift(Exal2Error):
    pass


class NoSection(Exal2Error):
    pass


class NoMatch(Exal2Error):
    pass


class DegreeOverflow(Exal2Error):
    pass


class NotConfluent(Exal2Error):
    pass


class NotFiniteDimensional(Exal2Error):
    pass


class UsageError(Exal2Error):
    pass


class FixtureError(Exal2Error):
    pass
