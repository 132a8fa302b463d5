"""Shared domain types, units and sign conventions.

Units fix the length scale to hbar^2/(2 m e^2) and the energy scale to
2 m e^4 / hbar^2, so the kinetic operator is -Delta (no 1/2), the nuclear
attraction is Z/|x|, and the hydrogen ground state of -Delta - 1/|x| sits
at exactly -1/4.  All other modules inherit these conventions.

Sign convention used throughout: the "negative part trace" of a
self-adjoint operator is the sum of its negative eigenvalues, a number
<= 0.  (The literature sometimes writes [a]_- for the nonnegative
quantity -min(a,0); phase-space energy identities such as the two-sided
Thomas-Fermi energy formula only close with the negative-valued choice,
so that is the one fixed here, once.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# spin degeneracy of all scalar (Schroedinger) traces
SPIN_FACTOR = 2

# hydrogen ground state of -Delta - 1/|x| in these units
HYDROGEN_GROUND_STATE = -0.25

# non-magnetic Scott coefficient S(0); the limiting difference objects
# computed in this package approach 2*S0
S0 = 0.125


def neg_part_sum(eigenvalues) -> float:
    """Sum of the negative entries, i.e. sum_i min(e_i, 0)."""
    e = np.asarray(eigenvalues, dtype=float)
    if e.size == 0:
        return 0.0
    if not np.all(np.isfinite(e)):
        raise ValueError("eigenvalue list must be finite")
    return float(np.sum(np.minimum(e, 0.0)))


def f_scale(d):
    """Envelope f(d) = min(d^-1/2, d^-2) controlling Coulomb-type potentials."""
    d = np.asarray(d, dtype=float)
    return np.minimum(d ** -0.5, d ** -2.0)


@dataclass(frozen=True)
class NuclearConfig:
    """Nuclear charges and geometry in mean-field scaled variables.

    z are the relative charges (sum 1), r the scaled positions, Z the total
    charge and alpha the fine structure constant.  Derived couplings:
    kappa = 8 pi Z alpha^2 and kappa_k = 8 pi Z_k alpha^2 with Z_k = Z z_k.
    """

    z: tuple = (1.0,)
    r: tuple = ((0.0, 0.0, 0.0),)
    Z: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        z = tuple(float(v) for v in self.z)
        r = tuple(tuple(float(c) for c in pos) for pos in self.r)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "r", r)
        if len(z) != len(r):
            raise ValueError("need one position per charge")
        if any(v <= 0 for v in z):
            raise ValueError("all relative charges must be positive")
        if abs(math.fsum(z) - 1.0) > 1e-12:
            raise ValueError("relative charges must sum to 1 within 1e-12")
        if any(len(pos) != 3 for pos in r):
            raise ValueError("positions must be 3-vectors")
        if self.Z <= 0:
            raise ValueError("total charge must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if self.r_min <= 0:
            raise ValueError("nuclear positions must be distinct")

    @property
    def M(self) -> int:
        return len(self.z)

    @property
    def Z_k(self) -> tuple:
        return tuple(self.Z * v for v in self.z)

    @property
    def kappa(self) -> float:
        return 8.0 * math.pi * self.Z * self.alpha ** 2

    @property
    def kappa_k(self) -> tuple:
        return tuple(8.0 * math.pi * Zk * self.alpha ** 2 for Zk in self.Z_k)

    @property
    def r_min(self) -> float:
        if self.M == 1:
            return math.inf
        d = math.inf
        for i in range(self.M):
            for j in range(i + 1, self.M):
                d = min(d, math.dist(self.r[i], self.r[j]))
        return d

    def distance(self, x):
        """d(x): distance from x to the nearest nucleus (vectorized over rows)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        pos = np.asarray(self.r)
        d = np.min(np.linalg.norm(x[:, None, :] - pos[None, :, :], axis=2), axis=1)
        return d if d.size > 1 else float(d[0])


ROUTES = ("mu-limit", "cutoff-R", "spectral-fit", "ansatz-min")


@dataclass(frozen=True)
class ScottEstimate:
    """One evaluation of the Scott-function difference object (value ~ 2 S(kappa))."""

    value: float
    route: str
    kappa: float = 0.0
    R: float = math.inf
    beta: float | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.route not in ROUTES:
            raise ValueError(f"unknown route {self.route!r}")
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        if self.beta is not None and self.kappa > 0:
            # admissible outer coefficient: 0 < beta <= 1/(2 kappa)
            if not 0 < self.beta <= 0.5 / self.kappa:
                raise ValueError("beta must lie in (0, 1/(2 kappa)]")

    @property
    def S(self) -> float:
        """The Scott value itself, value/2 (spin factor stripped)."""
        return 0.5 * self.value
