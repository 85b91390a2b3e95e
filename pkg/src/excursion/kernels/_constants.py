"""Fixed truncation constants shared by both kernel backends."""

import numpy as np
from scipy.special import bernoulli, euler, factorial

# crossover between the image (small-time) and spectral (large-time)
# representations of the Bessel-3 hitting time law
U_CROSS = 0.6
# at u < 0.6 the 6th image term is below exp(-100); at u >= 0.6 the
# 7th spectral term is below exp(-140)
XI_IMAGE_TERMS = 6
XI_SPECTRAL_TERMS = 7

# below this argument the alternating theta* series is replaced by its
# Boole (Euler-Maclaurin alternating) expansion in odd powers of h
SMALL_H = 0.08
_N_COEFFS = 14


def _boole_coefficients(n_coeffs: int) -> np.ndarray:
    # sum_{k>=1} (-1)^(k+1) g(kh) = sum_m c_m h^(2m-1) with g = sinh/cosh^2,
    # c_m = E_{2m} E_{2m-1}(0) / (2 (2m-1)!)
    e = euler(2 * n_coeffs)
    b = bernoulli(2 * n_coeffs + 1)
    out = np.empty(n_coeffs)
    for m in range(1, n_coeffs + 1):
        n = 2 * m - 1
        euler_poly_at_zero = -2.0 * (2.0 ** (n + 1) - 1.0) * b[n + 1] / (n + 1)
        out[m - 1] = e[2 * m] * euler_poly_at_zero / (2.0 * factorial(n, exact=True))
    return out


SMALL_H_COEFFS = _boole_coefficients(_N_COEFFS)


# 2 sum_{k>=1} (-1)^(k-1) erfc(k y) = 1 + sum_j d_j y^(2j+1) for small y
ERFC_SMALL_Y = 0.1


def _erfc_boole_coefficients(n_coeffs: int) -> np.ndarray:
    b = bernoulli(2 * n_coeffs + 2)
    out = np.empty(n_coeffs)
    for j in range(n_coeffs):
        n = 2 * j + 1
        euler_poly_at_zero = -2.0 * (2.0 ** (n + 1) - 1.0) * b[n + 1] / (n + 1)
        ratio = factorial(2 * j, exact=True) / factorial(j, exact=True) / factorial(n, exact=True)
        out[j] = 2.0 / np.sqrt(np.pi) * (-1.0) ** j * ratio * euler_poly_at_zero
    return out


ERFC_COEFFS = _erfc_boole_coefficients(12)
