"""All-Mach-number semi-implicit staggered central schemes for the
isentropic and full compressible Euler equations, with the experiment
harness reproducing the convergence, shock and low-Mach limit studies."""

from .core import (ConservedState, FieldGrid, GasModel, RunConfig,
                   StepMonitor, classical_courant, pressure, sound_speed,
                   time_step)
from .imex import (ImexTableau, make_first_order, make_second_order,
                   validate_gsa, validate_order2)

__all__ = [
    "ConservedState", "FieldGrid", "GasModel", "RunConfig", "StepMonitor",
    "classical_courant", "pressure", "sound_speed", "time_step",
    "ImexTableau", "make_first_order", "make_second_order",
    "validate_gsa", "validate_order2",
]

__version__ = "0.1.0"
