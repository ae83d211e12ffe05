"""Exception types shared across the package."""


class EitmagError(Exception):
    """Base class for model and tooling errors."""


class DegenerateParametersError(EitmagError):
    """Susceptibility denominator vanished exactly (no dissipative channel left)."""


class RegimeViolationError(EitmagError):
    """A closed-form expression was requested outside its validity regime."""


class NoPeakFoundError(EitmagError):
    """No transparency peak with usable contrast in the scanned window."""


class NoBracketError(EitmagError):
    """Coarse scan found no interior extremum to refine."""


class StepUnderflowError(EitmagError):
    """Finite-difference step does not change the evaluation point representably."""


class QuadratureDivergenceError(EitmagError):
    """Velocity-average integrand is pathologically large at the outermost node."""


class ConfigError(EitmagError):
    """Malformed run configuration (unknown key, bad value, unwritable path)."""
