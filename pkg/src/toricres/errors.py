"""Exception hierarchy.

Every error carries a short witness in its message so that the CLI can print
something actionable.  ``exit_code`` is what the command-line front end
returns when the error escapes a subcommand.
"""


class ToricResError(Exception):
    exit_code = 1


class ParseError(ToricResError):
    exit_code = 2


class ValidationError(ToricResError):
    exit_code = 3


class RankDeficient(ValidationError):
    pass


class DimensionTooLarge(ValidationError):
    pass


class NotSaturated(ValidationError):
    pass


class RankError(ValidationError):
    pass


class BadUserBasis(ValidationError):
    pass


class InvalidContraction(ValidationError):
    pass


class TooLarge(ValidationError):
    pass


class NotTypeI(ValidationError):
    pass


class NotTypeII(ValidationError):
    pass


class NoPositiveGrading(ToricResError):
    exit_code = 4

    def __init__(self, message, epsilon=None):
        super().__init__(message)
        self.epsilon = epsilon


class VerificationFailure(ToricResError):
    exit_code = 5


class NotAComplex(VerificationFailure):
    def __init__(self, message, degree=None, entry=None):
        super().__init__(message)
        self.degree = degree
        self.entry = entry


class InconsistentGrading(VerificationFailure):
    pass


class NonNilpotent(VerificationFailure):
    pass


class NotMinimal(VerificationFailure):
    pass


class IdentityFailure(VerificationFailure):
    def __init__(self, message, identity=None, degree=None, entry=None):
        super().__init__(message)
        self.identity = identity
        self.degree = degree
        self.entry = entry


class Mismatch(VerificationFailure):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair
