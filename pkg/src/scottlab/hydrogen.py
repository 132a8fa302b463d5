"""Exact Coulomb spectral sums and the chemical-potential Scott route.

With kinetic energy -Delta the hydrogen levels are e_n = -1/(4 n^2) with
degeneracy 2 n^2 (spin included), so every mu-shifted trace is a finite
Faulhaber sum.  Subtracting the closed-form Weyl integral gives
d(mu) = 1/4 + sqrt(mu)/6 exactly at the threshold values mu = 1/(4 N^2);
extrapolating the sqrt(mu) remainder to zero recovers the non-magnetic
Scott constant 2 S(0) = 1/4 without any discretization error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ScottEstimate
from .weyl import weyl_coulomb_mu


@dataclass(frozen=True)
class CoulombSpectrum:
    """Levels e_n = -1/(4 n^2) with spin-included degeneracy 2 n^2, n <= n_max."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, self.n_max + 1)

    @property
    def levels(self) -> np.ndarray:
        return -0.25 / self.n.astype(float) ** 2

    @property
    def degeneracies(self) -> np.ndarray:
        return 2 * self.n ** 2

    def expand(self) -> np.ndarray:
        """All levels repeated by degeneracy."""
        return np.repeat(self.levels, self.degeneracies)


def _threshold_n(mu: float) -> int:
    """Largest n with -1/(4 n^2) + mu < 0 (exact boundary handling)."""
    n = int(math.floor(0.5 / math.sqrt(mu)))
    while n >= 1 and -0.25 / n ** 2 + mu >= 0.0:
        n -= 1
    while -0.25 / (n + 1) ** 2 + mu < 0.0:
        n += 1
    return n


def trace_neg_coulomb(mu: float) -> float:
    """Tr[-Delta - 1/|x| + mu]_- = sum over n < 1/(2 sqrt(mu)) of 2 n^2 (e_n + mu).

    Closed Faulhaber form; mu must be positive (the untruncated sum diverges).
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    n = _threshold_n(mu)
    if n < 1:
        return 0.0
    # sum 2 k^2 (-1/(4 k^2) + mu) = -n/2 + 2 mu n(n+1)(2n+1)/6
    return -0.5 * n + mu * n * (n + 1) * (2 * n + 1) / 3.0


def scott_mu_limit(mu_schedule) -> ScottEstimate:
    """Extrapolate d(mu) = trace - Weyl to mu -> 0 (estimate of 2 S(0)).

    The schedule must be positive, strictly decreasing, length >= 3.  The
    remainder is linear in sqrt(mu) at the threshold points, so a linear
    least-squares fit in sqrt(mu) is the right extrapolation order.
    """
    mus = np.asarray(list(mu_schedule), dtype=float)
    if mus.size < 3:
        raise ValueError("schedule needs at least 3 points")
    if np.any(mus <= 0) or np.any(np.diff(mus) >= 0):
        raise ValueError("schedule must be positive and strictly decreasing")
    d = np.array([trace_neg_coulomb(m) - weyl_coulomb_mu(m, 1.0) for m in mus])
    A = np.vstack([np.ones_like(mus), np.sqrt(mus)]).T
    coef, *_ = np.linalg.lstsq(A, d, rcond=None)
    return ScottEstimate(value=float(coef[0]), route="mu-limit", kappa=0.0,
                         meta={"slope_sqrt_mu": float(coef[1]),
                               "mu_schedule": [float(m) for m in mus],
                               "d_values": [float(v) for v in d]})


def scott_z_scaling(z: float, kappa: float, s_provider) -> float:
    """Per-nucleus Scott contribution z^2 S(z kappa) given a provider for S."""
    if z <= 0:
        raise ValueError("z must be positive")
    return z ** 2 * s_provider(z * kappa)
