"""Exception hierarchy shared by all ffexpand modules.

Every error names the violated precondition or hypothesis so that CLI
diagnostics can be read without source access. Errors deriving from
ValidationError map to CLI exit code 3; TheoremViolation (raised only
by audit code when an identity that must hold fails) maps to exit 2.
"""


class FFExpandError(Exception):
    """Base class for all package errors."""


class ValidationError(FFExpandError):
    """Bad input, failed precondition or exceeded cap (CLI exit 3)."""


class TheoremViolation(FFExpandError):
    """An identity that is a theorem failed empirically (CLI exit 2)."""


class NonPrime(ValidationError):
    def __init__(self, p):
        super().__init__(f"{p} is not prime; field characteristic must be prime")
        self.p = p


class SizeCapExceeded(ValidationError):
    def __init__(self, what, value, cap):
        super().__init__(f"{what} = {value} exceeds cap {cap} "
                         "(override with FFEXPAND_CAP_OVERRIDE)")
        self.what, self.value, self.cap = what, value, cap


class DivisionByZero(ValidationError, ZeroDivisionError):
    pass


class MixedFields(ValidationError):
    pass


class MissingVariable(ValidationError):
    pass


class PolyParseError(ValidationError):
    pass


class NotBivariate(ValidationError):
    pass


class NotSymmetric(ValidationError):
    """Kernel hypothesis violated: F(a,x) must equal F(x,a)."""


class Diagonal(ValidationError):
    """Kernel hypothesis violated: F must contain a mixed monomial."""


class DegreeTooLarge(ValidationError):
    """Kernel hypothesis violated: deg(F) must be below the characteristic."""

    def __init__(self, degree, char):
        super().__init__(f"kernel degree {degree} is not below the field "
                         f"characteristic {char}")
        self.degree, self.char = degree, char


class DegenerateCurve(FFExpandError):
    """Curve equation vanished identically; impossible for a validated kernel."""


class DegreeCapExceeded(ValidationError):
    pass


class ZeroPolynomial(ValidationError):
    pass


class NotAbsolutelyIrreducible(ValidationError):
    pass


class ConvergenceFailure(FFExpandError):
    def __init__(self, residual, iterations):
        super().__init__(f"power iteration did not converge: residual {residual:.3e} "
                         f"after {iterations} iterations")
        self.residual, self.iterations = residual, iterations


class SymmetryViolation(FFExpandError):
    """Adjacency of the incidence graph came out asymmetric; kernel bug."""


class ConstantQ(ValidationError):
    pass


class NotAdditiveShape(ValidationError):
    def __init__(self, exponent):
        super().__init__(f"exponent {exponent} is not a power of the characteristic")
        self.exponent = exponent


class DependentGH(ValidationError):
    """Hypothesis violated: the two inner polynomials must be algebraically independent."""


class CharTooSmall(ValidationError):
    def __init__(self, k, char):
        super().__init__(f"preset exponent k = {k} requires characteristic > k, got {char}")
        self.k, self.char = k, char


class CapTooSmallWarning(UserWarning):
    """Independence search ran below the complete elimination bound."""
