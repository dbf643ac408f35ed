"""Exception hierarchy shared by all solver modules.

Everything raised during a run derives from SolverError so the CLI can map
numerical failures to a single exit code.
"""


class SolverError(Exception):
    """Base class for all runtime solver failures."""


class NonPositiveDensity(SolverError):
    """Density hit zero or went negative somewhere on the grid."""


class NonPositivePressure(SolverError):
    """EOS produced a non-positive pressure (full Euler)."""


class NonPositiveCoefficient(SolverError):
    """Variable-coefficient elliptic operator received a non-positive coefficient."""


class NonPositiveIterate(SolverError):
    """Newton damping could not keep the pressure iterate positive."""


class NewtonDivergence(SolverError):
    """Newton iteration exhausted its budget without meeting the tolerance."""


class CgStagnation(SolverError):
    """Conjugate gradients hit the iteration cap before converging."""


class SingularSystem(SolverError):
    """Direct linear solve met a (numerically) singular matrix."""


class ZeroWaveSpeed(SolverError):
    """CFL denominator vanished: no waves to resolve."""


class NonZeroMeanVorticity(SolverError):
    """Spectral Poisson solve requires zero-mean vorticity."""


class DegenerateTableau(SolverError):
    """Requested IMEX tableau parameter makes the pair ill-defined."""
