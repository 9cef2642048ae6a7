"""Exception hierarchy for ratlink."""


class RatlinkError(Exception):
    """Base class for all ratlink errors."""


class PlueckerViolation(RatlinkError):
    """Line coordinates do not satisfy the Pluecker condition."""


class StudyViolation(RatlinkError):
    """Pose coordinates do not satisfy the Study condition."""


class DegeneratePose(RatlinkError):
    """Pose has (numerically) vanishing primal norm; the action is undefined."""


class CoincidentPoints(RatlinkError):
    """Two points expected to be distinct coincide."""


class CoincidentAxes(RatlinkError):
    """Two joint axes coincide; no unique common perpendicular exists."""


class NotAMotionPolynomial(RatlinkError):
    """The dual part of C(t) C*(t) does not vanish identically."""


class RealRootPresent(RatlinkError):
    """The norm polynomial has a real root (degenerate motion parameter)."""


class RootFindingFailure(RatlinkError):
    """Numerical root isolation or polishing did not converge."""


class NotFactorableOverRationals(RatlinkError):
    """Exact-mode factorization would require an algebraic extension field."""


class NonInvertibleLeadingCoefficient(RatlinkError):
    """Division requires a leading coefficient with nonzero primal norm."""


class NonGenericRemainder(RatlinkError):
    """A linear remainder with non-invertible leading part stopped factorization."""


class TranslationalFactor(RatlinkError):
    """Linear factor has no rotational part; prismatic joints are unsupported."""


class FewerThanTwoFactorizations(RatlinkError):
    """A single-loop mechanism needs at least two factorizations of the curve."""


class BranchMismatch(RatlinkError):
    """The two factorizations do not reproduce the same motion."""


class NoCubicInterpolant(RatlinkError):
    """No cubic motion through the given poses exists over the reals."""


class DegenerateConfiguration(RatlinkError):
    """Input poses imply a degenerate (planar/spherical/prismatic) mechanism."""


class DegenerateParameter(RatlinkError):
    """The motion is undefined at this curve parameter (norm vanishes)."""


class DegenerateSegment(RatlinkError):
    """A physical segment has zero length."""


class FormatVersionMismatch(RatlinkError):
    """Mechanism file has an unsupported format version."""


class ParseError(RatlinkError):
    """Mechanism or input file is malformed."""
