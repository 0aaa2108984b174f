"""Exception hierarchy. Every error carries a stable ``code`` used by the CLI."""


class QuartopError(Exception):
    code = "error"


class InvalidRange(QuartopError, ValueError):
    code = "invalid-range"


class TooFewPoints(QuartopError, ValueError):
    code = "too-few-points"


class UnsupportedOrder(QuartopError, ValueError):
    code = "unsupported-order"


class SchemeGridMismatch(QuartopError, ValueError):
    code = "scheme-grid-mismatch"


class GridMismatch(QuartopError, ValueError):
    code = "grid-mismatch"


class SolverFailure(QuartopError, RuntimeError):
    code = "solver-failure"


class LinearDependence(QuartopError, ValueError):
    code = "linear-dependence"


class WronskianVanishes(QuartopError, ArithmeticError):
    code = "wronskian-vanishes"


class IdentityViolation(QuartopError, ValueError):
    code = "identity-violation"


class InvalidKappa(QuartopError, ValueError):
    code = "invalid-kappa"


class NonintegrablePotential(QuartopError, ValueError):
    code = "nonintegrable-potential"


class BlowUp(QuartopError, FloatingPointError):
    code = "blow-up"


class CFLViolation(QuartopError, ValueError):
    code = "cfl-violation"


class UnknownExample(QuartopError, KeyError):
    code = "unknown-example"

    def __str__(self):
        return Exception.__str__(self)


class MissingK(QuartopError, ValueError):
    code = "missing-k"
