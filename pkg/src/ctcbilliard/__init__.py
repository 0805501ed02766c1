"""Self-consistent scattering of a Gaussian wave packet off its own time-shifted image.

Submodules:
    specfun     Gamma/Beta, scaled I0, Kummer's function, Legendre recurrences
    model       packet, scattered-state and kernel parameter records
    kernel      closed-form scattering kernel and its branch-cut quadrature
    selfcons    self-consistency relations, Gaussian solutions, fixed-point map
    stability   Lyapunov exponent of the linearised map, stability scans
    nls         split-step solver for the variable-coefficient NLS equation
    cli         command-line front end
"""

from .errors import (AccuracyError, BlowUpError, CTCError, DegenerateCouplingError,
                     DivergenceError, DomainError, NoRootError, PreconditionError)
from .model import GaussianPacket, KernelParams, ScatteredState, Variant, normalize
from .quadrature import QuadratureSpec

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "BlowUpError", "CTCError", "DegenerateCouplingError", "DivergenceError",
    "DomainError", "NoRootError", "PreconditionError",
    "GaussianPacket", "KernelParams", "ScatteredState", "Variant", "normalize",
    "QuadratureSpec",
]
