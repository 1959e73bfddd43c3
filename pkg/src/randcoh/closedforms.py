"""Closed-form ensemble averages as exact functions of (m, n, k).

Order-k mixing averages come from the substitution n -> k*n in the k = 1
formulas, which is exactly what the block construction of the mixing
ensemble implies.  The two m = 2 eigenvalue densities at the bottom give
the same curve through two independent routes (Vandermonde-squared joint
law vs. the diagonal law hit with the derivative operator), which is what
the pointwise verification leans on.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError
from .functionals import EULER_GAMMA, harmonic, subentropy

_LN2 = math.log(2.0)


def _check_mn(m: int, n: int) -> None:
    if m < 1:
        raise ParameterError(f"m must be >= 1, got {m}")
    if m > n:
        raise ParameterError(f"requires m <= n, got m={m}, n={n}")


def _check_k(k: int) -> None:
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")


def avg_entropy_page(m: int, n: int) -> float:
    """Average von Neumann entropy of induced states: H_mn - H_n - (m-1)/(2n)."""
    _check_mn(m, n)
    return harmonic(m * n) - harmonic(n) - (m - 1) / (2.0 * n)


def avg_diag_entropy(m: int, n: int, k: int = 1) -> float:
    """Average diagonal entropy of the order-k ensemble: H_mkn - H_kn."""
    _check_mn(m, n)
    _check_k(k)
    return harmonic(m * k * n) - harmonic(k * n)


def avg_coherence(m: int, n: int, k: int = 1) -> float:
    """Average relative entropy of coherence of the order-k ensemble: (m-1)/(2kn)."""
    _check_mn(m, n)
    _check_k(k)
    return (m - 1) / (2.0 * k * n)


def avg_subentropy(m: int, n: int) -> float:
    """Average subentropy of induced states: 1 + H_mn - H_m - H_n."""
    _check_mn(m, n)
    return 1.0 + harmonic(m * n) - harmonic(m) - harmonic(n)


def max_subentropy(m: int) -> float:
    """Largest possible subentropy in dimension m: 1 + ln m - H_m, attained
    only at the uniform spectrum; tends to 1 - gamma_Euler as m grows."""
    if m < 1:
        raise ParameterError(f"m must be >= 1, got {m}")
    return 1.0 + math.log(m) - harmonic(m)


def isospectral_avg_diag_entropy(lam) -> float:
    """Haar average of the diagonal entropy on a fixed-spectrum orbit:
    H_m - 1 + Q(lam)."""
    lam = np.asarray(lam, dtype=np.float64)
    return harmonic(lam.size) - 1.0 + subentropy(lam)


def concentration_bound(m: int, n: int, epsilon: float) -> float:
    """Tail bound on |C(rho) - (m-1)/2n| exceeding epsilon,
    min(1, 2 exp(-m n eps^2 / (144 pi^3 ln2 (ln m)^2))).

    Stated only for m >= 3.  The raw expression exceeds 1 at desk-scale
    (m, n), so the clamp keeps the return value an honest probability.
    """
    if m < 3:
        raise ParameterError(f"the tail bound requires m >= 3, got {m}")
    if n < m:
        raise ParameterError(f"requires m <= n, got m={m}, n={n}")
    if epsilon <= 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    exponent = -(m * n * epsilon**2) / (144.0 * math.pi**3 * _LN2 * math.log(m) ** 2)
    return min(1.0, 2.0 * math.exp(exponent))


def _log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def eigen_density_m2(n: int, x: float) -> float:
    """Density of the larger-or-smaller eigenvalue coordinate x of an
    m = 2 induced state (the partner eigenvalue is 1 - x).

    Proportional to (2x-1)^2 (x(1-x))^(n-2) on (0, 1); the normalizer is
    the exact Beta-function combination B(n-1,n-1) - 4 B(n,n).
    """
    if n < 2:
        raise ParameterError(f"m = 2 spectra need n >= 2, got n={n}")
    if not 0.0 < x < 1.0:
        return 0.0
    norm = math.exp(_log_beta(n - 1, n - 1)) - 4.0 * math.exp(_log_beta(n, n))
    return (2.0 * x - 1.0) ** 2 * (x * (1.0 - x)) ** (n - 2) / norm


_DP_NORMALIZERS: dict[int, float] = {}


def _dp_unnormalized(n: int, x: np.ndarray | float):
    # (lam2 - lam1) * d/dx of the diagonal density (x(1-x))^(n-1)/B(n,n),
    # with the operator d/d lam1 - d/d lam2 restricted to lam2 = 1 - lam1
    beta_nn = math.exp(_log_beta(n, n))
    return (1.0 - 2.0 * x) * (n - 1) * (x * (1.0 - x)) ** (n - 2) * (1.0 - 2.0 * x) / beta_nn


def _dp_normalizer(n: int) -> float:
    z = _DP_NORMALIZERS.get(n)
    if z is None:
        # integrand is a polynomial of degree 2n - 2: Gauss-Legendre is exact
        nodes, weights = np.polynomial.legendre.leggauss(n + 8)
        t = 0.5 * (nodes + 1.0)
        z = float(0.5 * np.sum(weights * _dp_unnormalized(n, t)))
        _DP_NORMALIZERS[n] = z
    return z


def derivative_principle_density_m2(n: int, x: float) -> float:
    """m = 2 eigenvalue density reconstructed from the diagonal law by the
    derivative principle, normalized to unit mass by exact quadrature.

    Agrees pointwise with eigen_density_m2: both reduce to the same
    polynomial profile, but through independent constant factors.
    """
    if n < 2:
        raise ParameterError(f"m = 2 spectra need n >= 2, got n={n}")
    if not 0.0 < x < 1.0:
        return 0.0
    return float(_dp_unnormalized(n, x)) / _dp_normalizer(n)
