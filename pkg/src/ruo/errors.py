"""Exception hierarchy. The CLI maps these onto exit codes."""


class RuoError(Exception):
    pass


class ShapeError(RuoError, ValueError):
    pass


class NumericError(RuoError, ArithmeticError):
    pass


class EnsembleValidationError(RuoError, ValueError):
    """Raised with every violated ensemble invariant, not only the first."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid ensemble: " + "; ".join(self.violations))


class StateValidationError(RuoError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid density matrix: " + "; ".join(self.violations))


class DocumentError(RuoError, ValueError):
    """Malformed ensemble/state document. ``where`` is a field path or line:col."""

    def __init__(self, where, message):
        self.where = where
        self.message = message
        super().__init__(f"{where}: {message}" if where else message)


class AttractorConsistencyError(NumericError):
    """Kernel and commutant constructions of an eigenspace disagree."""
