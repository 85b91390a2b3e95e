"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import from ``EXCURSION_BACKEND``
(``numba`` or ``numpy``; default ``numba``). If numba cannot be imported the
numpy path is used. Both backends expose the same functions:

    xi_pdf, xi_cdf, xi_sf, xi_quantile   Bessel-3 hitting time law of level 1
    lambda_sum                           truncated lambda(x) series
    lindley, excursions                  Lindley paths and their excursion indices
    theta_series                         alternating series behind the theta* density
    ustar_sf_scaled                      termwise erfc series of P(U* > x)
"""

from __future__ import annotations

import logging
import os
from types import ModuleType

log = logging.getLogger(__name__)

KERNEL_NAMES = (
    "xi_pdf",
    "xi_cdf",
    "xi_sf",
    "xi_quantile",
    "lambda_sum",
    "lindley",
    "excursions",
    "theta_series",
    "ustar_sf_scaled",
)


def load_backend(name: str) -> ModuleType:
    """Import a backend module by name (``numba`` or ``numpy``)."""
    if name == "numba":
        from . import _numba

        return _numba
    if name == "numpy":
        from . import _numpy

        return _numpy
    raise ValueError(f"unknown kernel backend {name!r}")


def _select() -> tuple[str, ModuleType]:
    wanted = os.environ.get("EXCURSION_BACKEND", "numba").strip().lower() or "numba"
    if wanted == "numba":
        try:
            return "numba", load_backend("numba")
        except ImportError:
            log.warning("numba unavailable, falling back to numpy kernels")
            return "numpy", load_backend("numpy")
    return wanted, load_backend(wanted)


BACKEND, _impl = _select()

xi_pdf = _impl.xi_pdf
xi_cdf = _impl.xi_cdf
xi_sf = _impl.xi_sf
xi_quantile = _impl.xi_quantile
lambda_sum = _impl.lambda_sum
lindley = _impl.lindley
excursions = _impl.excursions
theta_series = _impl.theta_series
ustar_sf_scaled = _impl.ustar_sf_scaled
