"""Heat kernels of fractional powers of flat-torus Laplacians.

Ground-truth evaluation (eigensums, Poisson sums, inverse Mellin contours,
subordination), continued spectral zeta functions, predicted small-time
expansions and least-squares fits that check them.
"""

from .errors import (
    FracHeatError,
    PoleEncountered,
    NearPoleWarning,
    DomainError,
    CutoffTooLarge,
    BudgetExceeded,
    ContourTooShort,
    AbscissaTooSmall,
    OnDiagonal,
    NeedsFinitePart,
    InconsistentLaurent,
    IllConditioned,
    InsufficientSamples,
    TemplateMismatch,
    QuadratureFailure,
)
from .power import RationalPower

__version__ = "0.1.0"

__all__ = [
    "FracHeatError",
    "PoleEncountered",
    "NearPoleWarning",
    "DomainError",
    "CutoffTooLarge",
    "BudgetExceeded",
    "ContourTooShort",
    "AbscissaTooSmall",
    "OnDiagonal",
    "NeedsFinitePart",
    "InconsistentLaurent",
    "IllConditioned",
    "InsufficientSamples",
    "TemplateMismatch",
    "QuadratureFailure",
    "RationalPower",
]
