"""Entropy-family functionals on probability vectors and spectra.

Subentropy is the delicate one: the literal quotient formula
-sum_i lam_i^m ln(lam_i) / prod_{j != i}(lam_i - lam_j) cancels
catastrophically once eigenvalue gaps shrink below ~1e-5, which random
spectra hit routinely.  It is evaluated here as the negated (m-1)-th
divided difference of g(x) = x^m ln x, with near-coincident nodes merged
and handled confluently through the exact derivatives of g.
"""

from __future__ import annotations

import math
import threading

import numpy as np

from .errors import DomainError, ParameterError

EULER_GAMMA = 0.5772156649015329

_NEG_TOL = 1e-12
_SUM_TOL = 1e-8
_CLUSTER_GAP = 1e-7
_ZERO_NODE = 1e-14
_COHERENCE_FLOOR = -1e-9


class HarmonicTable:
    """Cached harmonic numbers H_1..H_K, grown on demand.

    Growth uses Kahan-compensated accumulation so the table stays within a
    few ulps of the exact partial sums regardless of K.  Beyond the table
    limit the Euler-Maclaurin expansion is exact to double precision.
    """

    TABLE_LIMIT = 1 << 16

    def __init__(self):
        self._values = [0.0, 1.0]  # index k holds H_k; H_0 = 0 placeholder
        self._carry = 0.0
        self._lock = threading.Lock()

    def value(self, k: int) -> float:
        if k < 1:
            raise ParameterError(f"harmonic index must be >= 1, got {k}")
        if k > self.TABLE_LIMIT:
            return self._asymptotic(k)
        if k >= len(self._values):
            with self._lock:
                self._grow(k)
        return self._values[k]

    def _grow(self, k: int) -> None:
        total = self._values[-1]
        carry = self._carry
        for j in range(len(self._values), k + 1):
            term = 1.0 / j - carry
            new_total = total + term
            carry = (new_total - total) - term
            total = new_total
            self._values.append(total)
        self._carry = carry

    @staticmethod
    def _asymptotic(k: int) -> float:
        # H_k = ln k + gamma + 1/2k - 1/12k^2 + 1/120k^4 - 1/252k^6 + O(k^-8)
        inv = 1.0 / k
        inv2 = inv * inv
        return (math.log(k) + EULER_GAMMA + 0.5 * inv
                - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0)))


_TABLE = HarmonicTable()


def harmonic(k: int) -> float:
    """The k-th harmonic number H_k = sum_{j=1}^{k} 1/j."""
    return _TABLE.value(k)


def _validated_probabilities(p) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size < 1:
        raise DomainError(f"expected a 1-d probability vector, got shape {p.shape}")
    if p.min() < -_NEG_TOL:
        raise DomainError(f"negative probability {p.min():.3e} beyond tolerance")
    if abs(p.sum() - 1.0) > _SUM_TOL:
        raise DomainError(f"probabilities sum to {p.sum()!r}, expected 1")
    return np.clip(p, 0.0, None)


def shannon_entropy(p) -> float:
    """-sum p_i ln p_i in nats, with the 0 ln 0 = 0 convention.

    Terms are combined with exact (fsum) summation; for the dimensions this
    package sees that is cheap insurance against cancellation.
    """
    p = _validated_probabilities(p)
    mask = p > 0.0
    terms = p[mask] * np.log(p[mask])
    return max(0.0, -math.fsum(terms))


def von_neumann_entropy(rho) -> float:
    """Shannon entropy of the spectrum of a density matrix, in nats."""
    return shannon_entropy(rho.spectrum)


def relative_entropy_of_coherence(rho) -> float:
    """S(rho_diag) - S(rho), clamped at 0; zero exactly for diagonal states."""
    c = shannon_entropy(rho.diagonal) - von_neumann_entropy(rho)
    if c < _COHERENCE_FLOOR:
        raise DomainError(f"coherence {c!r} below the numerical floor; sampler or solver is broken")
    return max(c, 0.0)


def _g(x: float, m: int) -> float:
    # g(x) = x^m ln x, continued by 0 at x = 0
    if x == 0.0:
        return 0.0
    return x**m * math.log(x)


def _g_derivative(x: float, m: int, r: int) -> float:
    """r-th derivative of g(x) = x^m ln x for 0 <= r < m.

    d^r/dx^r [x^m ln x] = (m!/(m-r)!) x^(m-r) (ln x + H_m - H_{m-r}),
    which extends by 0 to x = 0 since r < m.
    """
    if r == 0:
        return _g(x, m)
    if x == 0.0:
        return 0.0
    falling = math.factorial(m) // math.factorial(m - r)
    return falling * x ** (m - r) * (math.log(x) + harmonic(m) - harmonic(m - r))


def _clustered_nodes(lam: np.ndarray) -> np.ndarray:
    """Sort nodes ascending, snap near-zeros to 0, and merge clusters of
    nodes closer than the confluence gap to their common mean."""
    nodes = np.sort(lam)
    nodes[nodes < _ZERO_NODE] = 0.0
    out = np.empty_like(nodes)
    i = 0
    while i < nodes.size:
        j = i + 1
        while j < nodes.size and nodes[j] - nodes[j - 1] <= _CLUSTER_GAP:
            j += 1
        out[i:j] = nodes[i:j].mean() if j - i > 1 else nodes[i]
        i = j
    return out


def subentropy(lam) -> float:
    """Subentropy Q of a spectrum, in nats.

    Equal to the negated (m-1)-th divided difference of g(x) = x^m ln x
    over the eigenvalues; repeated (or nearly repeated) eigenvalues are
    handled by the confluent limit g[x,...,x] (r+1 nodes) = g^(r)(x)/r!.
    Ranges over [0, 1 + ln m - H_m], the maximum at the uniform spectrum.
    """
    lam = _validated_probabilities(lam)
    m = lam.size
    if m == 1:
        return 0.0
    z = _clustered_nodes(lam)
    col = [_g(float(x), m) for x in z]
    for order in range(1, m):
        nxt = []
        for i in range(m - order):
            lo, hi = z[i], z[i + order]
            if hi == lo:
                nxt.append(_g_derivative(float(lo), m, order) / math.factorial(order))
            else:
                nxt.append((col[i + 1] - col[i]) / (hi - lo))
        col = nxt
    q = -col[0]
    if q < -_NEG_TOL:
        # divided-difference noise only ever shows up at the bottom of the range
        raise DomainError(f"subentropy {q!r} escaped its lower bound")
    return max(q, 0.0)
