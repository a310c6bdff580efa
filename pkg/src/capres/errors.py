"""Exception hierarchy shared by all capres modules."""


class CapresError(Exception):
    """Base class for all capres errors."""


class ConstraintViolation(CapresError):
    """A construction-time constraint failed (bad profile or shape parameters)."""


class GeometryViolation(CapresError):
    """A deformation-geometry clause failed; names the clause and offending point."""

    def __init__(self, clause, x, detail=""):
        self.clause = clause
        self.x = x
        super().__init__(f"geometry clause {clause!r} failed at x={x!r}: {detail}")


class DomainViolation(CapresError):
    """Evaluation requested outside the admissible region of a potential or grid."""


class ConvergenceFailure(CapresError):
    """Eigendecomposition reported unconverged eigenvalues."""

    def __init__(self, count, detail=""):
        self.count = count
        super().__init__(f"{count} unconverged eigenvalue(s) {detail}")


class NearSingular(CapresError):
    """Shifted solve requested at a point too close to the spectrum."""


class MatchFailure(CapresError):
    """Spectra could not be paired within tolerance."""


class SplitInvertibilityFailure(CapresError):
    """The chi-split operator is singular (or has spectrum) on/inside a contour."""


class CountUnstable(CapresError):
    """Argument-principle count failed to stabilise under subdivision."""


class FitDegenerate(CapresError):
    """Extrapolation design matrix is rank deficient."""


class EvaluationFailure(CapresError):
    """A closed-form evaluation hit a pole or overflowed."""


class ConfigError(CapresError):
    """Run configuration is malformed or violates the schema."""
