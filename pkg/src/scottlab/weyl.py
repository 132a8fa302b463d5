"""Phase-space (Weyl) integrals with exact momentum reduction.

The momentum integral of the classical symbol is done in closed form,
int [p^2 - v]_- dp = -(8 pi / 15) [v]_+^(5/2), leaving a configuration
integral that is evaluated by panel Gauss quadrature: sqrt(r) panels to
absorb Coulomb-type cores, explicit panel breaks at the turning radii
where [V - mu]_+ has its 5/2-power kink, and a dyadic tail test that
flags non-integrable inputs instead of silently truncating them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

MOMENTUM_COEFF = 8.0 * math.pi / 15.0


class WeylDivergenceError(ValueError):
    """The configuration integral fails the integrability tail test."""


def momentum_reduce(v: float) -> float:
    """int over R^3 of [p^2 - v]_- dp = -(8 pi / 15) max(v, 0)^(5/2)."""
    v = float(v)
    if not math.isfinite(v):
        raise ValueError("v must be finite")
    return -MOMENTUM_COEFF * max(v, 0.0) ** 2.5


@dataclass(frozen=True)
class WeylIntegrand:
    """Data of a Weyl integral 2 (2 pi h)^-3 iint w(q) [p^2 - V(q) + mu]_-.

    V and weight must accept numpy arrays (radius for radial=True, (n,3)
    points otherwise).  weight defaults to 1; support optionally bounds the
    weight's support radius; box gives the integration box for non-radial
    inputs as (lo, hi) per axis.
    """

    V: Callable
    weight: Optional[Callable] = None
    mu: float = 0.0
    h: float = 1.0
    radial: bool = True
    support: Optional[float] = None
    box: Optional[tuple] = None

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("h must be positive")
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")

    def w(self, r):
        if self.weight is None:
            return np.ones_like(np.asarray(r, dtype=float))
        return self.weight(r)


_GL24 = leggauss(24)


def _turning_points(V, mu, r_hi):
    """Radii where V - mu changes sign, on (0, r_hi]."""
    if mu <= 0:
        return []
    grid = np.geomspace(1e-8 * r_hi, r_hi, 600)
    vals = V(grid) - mu
    out = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            out.append(float(a))
        elif fa * fb < 0:
            out.append(float(brentq(lambda r: float(V(np.array([r]))[0]) - mu, a, b, xtol=1e-14 * b)))
    return out


def _radial_profile_integral(f, r_lo, r_hi, breaks=(), n_panels=120):
    """integral f(r) dr over [r_lo, r_hi] in x = sqrt(r) panels with breaks."""
    xg, wg = _GL24
    if r_lo == 0.0:
        edges = np.concatenate([[0.0], np.geomspace(math.sqrt(r_hi) * 1e-6, math.sqrt(r_hi), n_panels)])
    else:
        edges = np.sqrt(np.geomspace(r_lo, r_hi, n_panels + 1))
    edges = np.unique(np.concatenate([edges, np.sqrt([b for b in breaks if r_lo < b < r_hi])]))
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        xm = 0.5 * (a + b) + 0.5 * (b - a) * xg
        ww = 0.5 * (b - a) * wg
        total += float(np.sum(ww * 2.0 * xm * f(xm ** 2)))
    return total


def weyl_integral(wi: WeylIntegrand, n_panels: int = 160,
                  tail_tol: float = 1e-12, max_octaves: int = 60) -> float:
    """2 (2 pi h)^-3 iint w(q) [p^2 - V(q) + mu]_- dp dq.

    Radial inputs use the sqrt(r) panel quadrature split at the turning
    radii; non-radial inputs use tensor Gauss quadrature over wi.box.
    Raises WeylDivergenceError when the dyadic tail test finds
    non-decaying shell contributions (for example the bare Coulomb
    potential at mu = 0 with no cutoff).
    """
    if not wi.radial:
        return _weyl_integral_box(wi)

    def profile(r):
        return wi.w(r) * np.maximum(wi.V(r) - wi.mu, 0.0) ** 2.5 * r ** 2

    coeff = -(8.0 / (15.0 * math.pi)) * wi.h ** -3

    r_up = wi.support
    if r_up is None and wi.mu > 0.0:
        # outermost turning radius bounds the positive region for decaying V
        probe = np.geomspace(1e-8, 1e12, 81)
        pos = wi.V(probe) - wi.mu > 0
        if pos[-1]:
            raise WeylDivergenceError("V - mu stays positive out to 1e12")
        r_up = float(probe[np.nonzero(pos)[0].max() + 1]) if pos.any() else 0.0
    if r_up == 0.0:
        return 0.0

    if r_up is not None:
        # panel edges at the 5/2-power kinks of [V - mu]_+
        breaks = _turning_points(wi.V, wi.mu, r_up) if wi.mu > 0.0 else ()
        return coeff * _radial_profile_integral(profile, 0.0, r_up, breaks, n_panels)

    # mu = 0, unbounded support: integrate [0, 1], then dyadic shells with a
    # growth flag; shells must decay geometrically for convergence
    total = _radial_profile_integral(profile, 0.0, 1.0, (), n_panels)
    prev = math.inf
    grow_count = 0
    for k in range(max_octaves):
        shell = _radial_profile_integral(profile, 2.0 ** k, 2.0 ** (k + 1), (), 12)
        total += shell
        if shell >= prev * 0.95 and shell > tail_tol * max(abs(total), 1.0):
            grow_count += 1
            if grow_count >= 3:
                raise WeylDivergenceError(
                    f"dyadic shells near r ~ 2^{k} do not decay; integral diverges")
        else:
            grow_count = 0
        if shell < tail_tol * max(abs(total), 1.0):
            return coeff * total
        prev = shell
    raise WeylDivergenceError("tail did not converge within the octave budget")


def _weyl_integral_box(wi: WeylIntegrand, n: int = 48) -> float:
    if wi.box is None:
        raise ValueError("non-radial integrand needs an integration box")
    (x0, x1), (y0, y1), (z0, z1) = wi.box
    xg, wg = leggauss(n)

    def axis(a, b):
        return 0.5 * (a + b) + 0.5 * (b - a) * xg, 0.5 * (b - a) * wg

    xs, wx = axis(x0, x1)
    ys, wy = axis(y0, y1)
    zs, wz = axis(z0, z1)
    total = 0.0
    for x, wwx in zip(xs, wx):
        X = np.full((n * n, 3), x)
        Y, Z = np.meshgrid(ys, zs, indexing="ij")
        X[:, 1] = Y.ravel()
        X[:, 2] = Z.ravel()
        f = np.maximum(wi.V(X) - wi.mu, 0.0) ** 2.5
        if wi.weight is not None:
            f = f * wi.weight(X)
        total += wwx * float(np.sum(f * np.outer(wy, wz).ravel()))
    return -(MOMENTUM_COEFF) * 2.0 * (2.0 * math.pi * wi.h) ** -3 * total


def weyl_coulomb_mu(mu: float, z: float = 1.0) -> float:
    """Closed form of the mu-regularized Coulomb Weyl integral, -(z^3/6)/sqrt(mu).

    2 (2 pi)^-3 iint [p^2 - z/|q| + mu]_- reduces through the Beta integral
    B(1/2, 7/2) = 5 pi/16 to -(1/6) z^3 mu^(-1/2).
    """
    if mu <= 0:
        raise ValueError("mu must be positive (the mu = 0 integral diverges)")
    if z <= 0:
        raise ValueError("z must be positive")
    return -(z ** 3 / 6.0) / math.sqrt(mu)
