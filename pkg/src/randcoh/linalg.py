"""Dense complex linear algebra for small Hermitian problems.

Eigenvalues are delegated to LAPACK (``numpy.linalg.eigvalsh``); the module
adds the contracts the rest of the package relies on: Hermitian symmetry
enforced by averaging, descending spectra, the tiny-negative eigenvalue
clamp, and the Haar phase correction on QR-sampled unitaries.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError, ParameterError
from .randkit import RngStream

HERMITIAN_TOL = 1e-10
EIG_CLAMP = 1e-12
SPECTRUM_SUM_TOL = 1e-10


def hermitize(a: np.ndarray) -> np.ndarray:
    """Average a with its conjugate transpose."""
    a = np.asarray(a, dtype=np.complex128)
    return 0.5 * (a + a.conj().T)


def gram(z: np.ndarray) -> np.ndarray:
    """Z Z-dagger: the Hermitian PSD Gram matrix of the rows of z."""
    z = np.atleast_2d(np.asarray(z, dtype=np.complex128))
    return hermitize(z @ z.conj().T)


def _check_square_hermitian(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParameterError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max()))
    if float(np.abs(a - a.conj().T).max()) > HERMITIAN_TOL * scale:
        raise ParameterError("matrix is not Hermitian within tolerance")
    return a


def hermitian_eigenvalues(a: np.ndarray) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, real, in descending order."""
    a = _check_square_hermitian(a)
    try:
        vals = np.linalg.eigvalsh(hermitize(a))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration failed to converge: {exc}") from exc
    return vals[::-1].copy()


def clamp_spectrum(values: np.ndarray, check_sum: bool = True) -> np.ndarray:
    """Clamp eigenvalues of a density matrix into a valid spectrum.

    Values in [-EIG_CLAMP, 0) are rounding noise and are set to 0; anything
    more negative signals a broken sampler and raises.
    """
    vals = np.asarray(values, dtype=np.float64).copy()
    if vals.min() < -EIG_CLAMP:
        raise NumericalError(f"eigenvalue {vals.min():.3e} below clamp tolerance -{EIG_CLAMP:.0e}")
    np.clip(vals, 0.0, None, out=vals)
    if check_sum and abs(vals.sum() - 1.0) > SPECTRUM_SUM_TOL:
        raise NumericalError(f"spectrum sums to {vals.sum()!r}, expected 1")
    return vals


def haar_unitary(stream: RngStream, m: int) -> np.ndarray:
    """An m x m unitary distributed with Haar measure.

    QR-factorize a square Ginibre matrix and multiply column j of Q by the
    phase conj(r_jj)/|r_jj|.  Without the phase correction the QR convention
    biases the law away from Haar.
    """
    if m < 1:
        raise ParameterError(f"dimension must be >= 1, got {m}")
    z = stream.complex_gaussians(m * m).reshape(m, m)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    phases = d / np.abs(d)
    return q * phases.conj()


def unitary_conjugate_diagonal(u: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Diagonal of U diag(lam) U-dagger, i.e. d_i = sum_j |U_ij|^2 lam_j.

    Never forms the conjugated matrix; the diagonal is a doubly stochastic
    mixture of lam, so it is again a probability vector when lam is one.
    """
    u = np.asarray(u, dtype=np.complex128)
    lam = np.asarray(lam, dtype=np.float64)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] != lam.size:
        raise ParameterError(f"dimension mismatch: U is {u.shape}, lambda has length {lam.size}")
    return (u.real**2 + u.imag**2) @ lam
