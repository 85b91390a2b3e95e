"""Laws of the highest complete excursion of reflected Brownian motion.

Submodules:
    series       closed-form densities, CDFs and transforms
    samplers     xi, lambda(x) and weighted (u, theta) draws
    joint        Monte Carlo expectations and the joint density
    lindley      discrete walks and their excursion statistics
    convergence  goodness of fit of the discrete statistics
    cli          command line front end
"""

from .errors import AccuracyError, ConfigurationError, DomainError, ExcursionError
from .rng import RngStream
from .series import EvalResult, Route, SeriesPolicy

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "ConfigurationError",
    "DomainError",
    "ExcursionError",
    "EvalResult",
    "Route",
    "RngStream",
    "SeriesPolicy",
    "__version__",
]
