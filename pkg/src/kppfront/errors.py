"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the command line
front end can print ``CODE: message`` and tests can match on it.
"""


class KppError(Exception):
    """Base class for all toolkit errors."""

    code = "KPP_ERROR"

    def __init__(self, message="", **info):
        super().__init__(message)
        self.info = info

    def __str__(self):
        msg = super().__str__()
        if self.info:
            extra = ", ".join(f"{k}={v!r}" for k, v in sorted(self.info.items()))
            msg = f"{msg} ({extra})" if msg else extra
        return msg


def _make(name, code, doc, base=KppError):
    cls = type(name, (base,), {"code": code, "__doc__": doc})
    return cls


# cross_section
HypothesisViolation = _make(
    "HypothesisViolation", "HYPOTHESIS_VIOLATION",
    "A reaction/loss/flow hypothesis fails on the discrete model.")
BadGrid = _make("BadGrid", "BAD_GRID", "Grid sizes or lengths are invalid.")
NegativeTemperature = _make(
    "NegativeTemperature", "NEGATIVE_TEMPERATURE",
    "Reaction or loss evaluated at T < 0.")

# eigen
EigenNoConvergence = _make(
    "EigenNoConvergence", "EIGEN_NO_CONVERGENCE",
    "Bisection or inverse iteration exhausted its budget.")
SignAmbiguity = _make(
    "SignAmbiguity", "SIGN_AMBIGUITY",
    "Principal eigenvector could not be made strictly positive.")

# dispersion
PreconditionMu0 = _make(
    "PreconditionMu0", "PRECONDITION_MU0",
    "Minimal speed requested but mu(0) >= 0.")
BracketNotFound = _make(
    "BracketNotFound", "BRACKET_NOT_FOUND",
    "k(lambda)/lambda has no interior minimum on the search range.")
SpeedBelowMinimal = _make(
    "SpeedBelowMinimal", "SPEED_BELOW_MINIMAL",
    "Requested speed is below (or at) the minimal speed.")
UpperBracketNotFound = _make(
    "UpperBracketNotFound", "UPPER_BRACKET_NOT_FOUND",
    "No sign change of k(lambda) - c lambda above lambda*.")
DegenerateMuZero = _make(
    "DegenerateMuZero", "DEGENERATE_MU_ZERO",
    "mu(0) is numerically zero; the regime is not classified.")

# ivp
CflViolation = _make(
    "CflViolation", "CFL_VIOLATION", "Time step above the stability bound.")
BoundInvariantBroken = _make(
    "BoundInvariantBroken", "BOUND_INVARIANT_BROKEN",
    "T >= 0 or 0 <= Y <= 1 violated beyond rounding.")
FrontTouchedBoundary = _make(
    "FrontTouchedBoundary", "FRONT_TOUCHED_BOUNDARY",
    "A front came within the guard margin of an x-end.")
SandwichInfeasible = _make(
    "SandwichInfeasible", "SANDWICH_INFEASIBLE",
    "Initial-profile constants are inconsistent.")

# diagnostics
NoCrossing = _make("NoCrossing", "NO_CROSSING", "Field never crosses the threshold.")
TooFewSamples = _make(
    "TooFewSamples", "TOO_FEW_SAMPLES", "Not enough samples for a fit.")
RegionOutsideGrid = _make(
    "RegionOutsideGrid", "REGION_OUTSIDE_GRID",
    "Fit window is not contained in the grid.")
UnderflowRegion = _make(
    "UnderflowRegion", "UNDERFLOW_REGION",
    "Field too small for a logarithmic fit.")
FrontInStrip = _make(
    "FrontInStrip", "FRONT_IN_STRIP",
    "The left strip is not a plateau.")
NotConverged = _make(
    "NotConverged", "NOT_CONVERGED", "Front solution did not converge.")

# traveling_front
SpeedNotAdmissible = _make(
    "SpeedNotAdmissible", "SPEED_NOT_ADMISSIBLE",
    "Speed must exceed max(0, c*).")
ParameterSearchFailed = _make(
    "ParameterSearchFailed", "PARAMETER_SEARCH_FAILED",
    "Sub/super-solution parameters could not be found.")
LinearSolveFailed = _make(
    "LinearSolveFailed", "LINEAR_SOLVE_FAILED",
    "Sparse linear solve did not meet its residual target.")
Condition42Fails = _make(
    "Condition42Fails", "SUP_CONDITION_FAILS",
    "sup_lambda (mu(lambda) - lambda^2) is not negative.")


class ConfigError(KppError):
    """Configuration problems (exit status 2 on the command line)."""

    code = "CONFIG_ERROR"


ConfigNotFound = _make("ConfigNotFound", "CONFIG_NOT_FOUND",
                       "Configuration file missing.", ConfigError)
ConfigParseError = _make("ConfigParseError", "CONFIG_PARSE",
                         "Configuration file is not valid TOML.", ConfigError)
ConfigUnknownKey = _make("ConfigUnknownKey", "CONFIG_UNKNOWN_KEY",
                         "Unknown section or key.", ConfigError)
ConfigInvalid = _make("ConfigInvalid", "CONFIG_INVALID",
                      "A configuration value has the wrong type or range.",
                      ConfigError)
