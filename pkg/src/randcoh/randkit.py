"""Deterministic, splittable random streams and the scalar distributions
every sampler in this package is built on.

The generator is Philox-4x64, a counter-based PRNG whose raw 64-bit output
sequence is a fixed function of its 128-bit key.  Stream derivation is the
simplest documented rule there is: the key is the pair
``(master_seed, stream_index)``.  Distinct keys give statistically
independent counter sequences by construction, so parallel workers get
independent streams by using their worker index as ``stream_index``, and a
fixed seed pair reproduces the identical byte stream on every platform and
numpy version.

Distributions are implemented as explicit transforms of the uniform stream:
polar Box-Muller for normals, Marsaglia-Tsang for Gamma, normalized Gamma
variates for the symmetric Dirichlet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Philox

from .errors import ParameterError

_U64_MAX = 2**64 - 1
_U32_MAX = 2**32 - 1
_BLOCK = 4096
_INV_2_53 = 2.0**-53
_SQRT_HALF = math.sqrt(0.5)


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus substream index identifying one random stream."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed <= _U64_MAX:
            raise ParameterError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if not 0 <= self.stream_index <= _U32_MAX:
            raise ParameterError(f"stream_index must be a 32-bit unsigned integer, got {self.stream_index}")


class RngStream:
    """Single-owner random stream; never share one between concurrent tasks.

    All derived draws consume the underlying uniform sequence in a fixed,
    documented order, so any fixed call sequence is bit-reproducible.  The
    i-th uniform is the top 53 bits of the i-th raw Philox output, scaled
    to [0, 1).
    """

    def __init__(self, seed: SeedSpec):
        self.seed = seed
        key = np.array([seed.master_seed, seed.stream_index], dtype=np.uint64)
        self._bitgen = Philox(key=key)
        self._buf = np.empty(0, dtype=np.float64)
        self._pos = 0
        self._spare_normal: float | None = None

    @classmethod
    def from_seeds(cls, master_seed: int, stream_index: int = 0) -> "RngStream":
        return cls(SeedSpec(master_seed, stream_index))

    # -- uniform layer ------------------------------------------------------

    def uniforms(self, n: int) -> np.ndarray:
        """Next n i.i.d. uniforms on [0, 1) as float64."""
        if n < 0:
            raise ParameterError("n must be nonnegative")
        out = np.empty(n, dtype=np.float64)
        filled = 0
        while filled < n:
            if self._pos == self._buf.size:
                # block size only affects buffering; the i-th uniform is
                # always derived from the i-th raw output
                raw = self._bitgen.random_raw(max(_BLOCK, n - filled))
                self._buf = (raw >> np.uint64(11)) * _INV_2_53
                self._pos = 0
            take = min(n - filled, self._buf.size - self._pos)
            out[filled:filled + take] = self._buf[self._pos:self._pos + take]
            self._pos += take
            filled += take
        return out

    def uniform(self) -> float:
        return float(self.uniforms(1)[0])

    # -- normal layer -------------------------------------------------------

    def normals(self, n: int) -> np.ndarray:
        """Next n i.i.d. standard normals via the polar Box-Muller transform.

        Pairs (u, v) uniform on [-1, 1)^2 are accepted when s = u^2 + v^2
        lies in (0, 1); each accepted pair yields the two normals
        u*sqrt(-2 ln s / s), v*sqrt(-2 ln s / s).  A single leftover normal
        is cached on the stream and used first by the next call.
        """
        out = np.empty(n, dtype=np.float64)
        filled = 0
        if self._spare_normal is not None and n > 0:
            out[0] = self._spare_normal
            self._spare_normal = None
            filled = 1
        while filled < n:
            npairs = (n - filled + 1) // 2
            u = self.uniforms(2 * npairs) * 2.0 - 1.0
            x = u[0::2]
            y = u[1::2]
            s = x * x + y * y
            ok = (s > 0.0) & (s < 1.0)
            if not ok.any():
                continue
            xs, ys, ss = x[ok], y[ok], s[ok]
            f = np.sqrt(-2.0 * np.log(ss) / ss)
            block = np.empty(2 * xs.size, dtype=np.float64)
            block[0::2] = f * xs
            block[1::2] = f * ys
            take = min(block.size, n - filled)
            out[filled:filled + take] = block[:take]
            filled += take
            if take < block.size:
                # 2*npairs <= n - filled + 1, so at most one normal is left over
                self._spare_normal = float(block[take])
        return out

    def standard_normal(self) -> float:
        """One draw from N(0, 1)."""
        return float(self.normals(1)[0])

    # -- complex Gaussian layer ----------------------------------------------

    def complex_gaussians(self, n: int) -> np.ndarray:
        """Next n complex standard Gaussians: Re, Im i.i.d. N(0, 1/2), E|z|^2 = 1.

        Consumes 2n normals in (re, im) interleaved order.
        """
        nrm = self.normals(2 * n)
        return _SQRT_HALF * (nrm[0::2] + 1j * nrm[1::2])

    def complex_standard_gaussian(self) -> complex:
        return complex(self.complex_gaussians(1)[0])

    # -- Gamma / Dirichlet layer ----------------------------------------------

    def gammas(self, shape: float, n: int) -> np.ndarray:
        """Next n draws from Gamma(shape, scale=1) by Marsaglia-Tsang.

        Each rejection round consumes one normal and one uniform per pending
        slot (the uniform is drawn unconditionally; it is independent of the
        candidate, so discarding it on squeeze failure is harmless).  For
        shape < 1 the draw is boosted from Gamma(shape + 1) by the factor
        (1 - U)^(1/shape).
        """
        if shape <= 0:
            raise ParameterError(f"gamma shape must be positive, got {shape}")
        boosted = shape < 1.0
        a = shape + 1.0 if boosted else float(shape)
        d = a - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)

        out = np.empty(n, dtype=np.float64)
        pending = np.arange(n)
        while pending.size:
            k = pending.size
            x = self.normals(k)
            u = self.uniforms(k)
            t = 1.0 + c * x
            v = t * t * t
            pos = v > 0.0
            accept = np.zeros(k, dtype=bool)
            if pos.any():
                xp, vp, up = x[pos], v[pos], u[pos]
                squeeze = up < 1.0 - 0.0331 * xp**4
                logtest = np.log(up) < 0.5 * xp * xp + d * (1.0 - vp + np.log(vp))
                accept[pos] = squeeze | logtest
            out[pending[accept]] = d * v[accept]
            pending = pending[~accept]
        if boosted:
            u = self.uniforms(n)
            out *= (1.0 - u) ** (1.0 / shape)
        return out

    def sample_gamma(self, shape: float) -> float:
        """One draw from Gamma(shape, scale=1)."""
        return float(self.gammas(shape, 1)[0])

    def sample_symmetric_dirichlet(self, m: int, alpha: float) -> np.ndarray:
        """One draw from Dirichlet(alpha, ..., alpha) of length m.

        Built as m independent Gamma(alpha) variates normalized by their sum.
        """
        if m < 1:
            raise ParameterError(f"Dirichlet length must be >= 1, got {m}")
        if alpha <= 0:
            raise ParameterError(f"Dirichlet concentration must be positive, got {alpha}")
        g = self.gammas(alpha, m)
        return g / g.sum()
