"""Magnetic sector: Pauli quadratic forms, field energy, the localized
Scott functional and its parametric minimization.

Axisymmetric divergence-free vector potentials A = a(rho, z) e_phi
conserve j_z = m + s_z, so the Pauli operator [sigma.(-i h grad + A)]^2 - V
splits into two-component blocks over the cylindrical half-plane: the
spin-up component carries orbital angular momentum m, spin-down m + 1,
with diagonal terms (h m / rho + a)^2 -+ h B_z and off-diagonal coupling
-h B_rho.  Blocks are discretized by a symmetric finite-volume scheme on
a sinh-graded (rho, z) tensor mesh (fine at the Coulomb core, natural
flux condition at the axis) and their lowest eigenvalues extracted by
shift-invert Lanczos.  Spinors are explicit, so no extra spin factor is
applied anywhere in this module.

Blocks j and -j are degenerate only at A = 0 (for A != 0 they map into
each other under a field flip), so traces loop over signed blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
from numpy.polynomial.legendre import leggauss
from scipy.optimize import minimize
from scipy.sparse.linalg import LinearOperator, eigsh, splu

from .core import ScottEstimate
from .cutoffs import SmoothCutoff
from .radial_eig import cutoff_weyl_coulomb


class BlockCascadeError(RuntimeError):
    """More angular blocks carry negative eigenvalues than the configured cap."""


# ---------------------------------------------------------------------------
# field ansatz
# ---------------------------------------------------------------------------


def _bump(q):
    out = np.zeros_like(q)
    inside = q < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - q[inside] ** 2))
    return out


def _dbump(q):
    out = np.zeros_like(q)
    inside = q < 1.0
    qi = q[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - qi ** 2)) * (-2.0 * qi / (1.0 - qi ** 2) ** 2)
    return out


@dataclass(frozen=True)
class FieldAnsatz:
    """Sum of azimuthal bump modes, automatically divergence free.

    Mode k is a_k = (rho / s_k) bump(|x| / s_k) with s_k = support_radius
    * scale_k; the coefficient vector theta mixes them linearly.  B = curl A
    has components B_rho = -da/dz and B_z = da/drho + a/rho.
    """

    theta: tuple
    support_radius: float
    scales: tuple = (1.0, 0.5, 0.25)

    def __post_init__(self):
        th = tuple(float(v) for v in self.theta)
        object.__setattr__(self, "theta", th)
        if len(th) > len(self.scales):
            raise ValueError("more coefficients than modes")
        if self.support_radius <= 0:
            raise ValueError("support radius must be positive")

    @property
    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.theta)

    def _mode_fields(self, rho, z):
        rho = np.asarray(rho, dtype=float)
        z = np.asarray(z, dtype=float)
        s_all = np.sqrt(rho ** 2 + z ** 2)
        a = np.zeros_like(rho)
        da_drho = np.zeros_like(rho)
        da_dz = np.zeros_like(rho)
        for th, frac in zip(self.theta, self.scales):
            if th == 0.0:
                continue
            s = self.support_radius * frac
            q = s_all / s
            b = _bump(q)
            db = _dbump(q)
            qsafe = np.maximum(q, 1e-300)
            a += th * (rho / s) * b
            da_drho += th * (b / s + (rho ** 2 / (s ** 3 * qsafe)) * db)
            da_dz += th * (rho * z / (s ** 3 * qsafe)) * db
        return a, da_drho, da_dz

    def a(self, rho, z):
        return self._mode_fields(rho, z)[0]

    def B_cyl(self, rho, z):
        """(B_rho, B_z) of the curl."""
        a, dr, dz = self._mode_fields(rho, z)
        rho = np.asarray(rho, dtype=float)
        return -dz, dr + a / np.maximum(rho, 1e-300)

    def A_vec(self, points):
        """Cartesian samples of A at (n, 3) points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        rho = np.hypot(pts[:, 0], pts[:, 1])
        a = self.a(rho, pts[:, 2])
        out = np.zeros_like(pts)
        safe = rho > 0
        out[safe, 0] = -a[safe] * pts[safe, 1] / rho[safe]
        out[safe, 1] = a[safe] * pts[safe, 0] / rho[safe]
        return out


_GL32 = leggauss(32)


def _polar_panels(f, r_lo, r_hi, n_r=40):
    """2 pi int f(rho, z) rho ds dtheta over the shell r_lo < |x| < r_hi."""
    if r_hi <= r_lo:
        return 0.0
    xg, wg = _GL32
    th = 0.5 * math.pi * (xg + 1.0)
    wth = 0.5 * math.pi * wg
    edges = np.linspace(r_lo, r_hi, n_r + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        sm = 0.5 * (a + b) + 0.5 * (b - a) * xg
        ws = 0.5 * (b - a) * wg
        S, T = np.meshgrid(sm, th, indexing="ij")
        rho = S * np.sin(T)
        z = S * np.cos(T)
        vals = f(rho, z) * rho * S
        total += float(np.einsum("i,j,ij->", ws, wth, vals))
    return 2.0 * math.pi * total


def field_energy(A: FieldAnsatz, r_lo: float = 0.0,
                 r_hi: Optional[float] = None) -> float:
    """int |grad A|^2 over the shell r_lo < |x| < r_hi (default: full space).

    For the divergence-free azimuthal family the Frobenius density is
    (da/drho)^2 + (da/dz)^2 + (a/rho)^2, and the integral equals
    int |curl A|^2 (checked in the tests by quadrature of both forms).
    """
    if A.is_zero:
        return 0.0
    if r_hi is None:
        r_hi = A.support_radius

    def dens(rho, z):
        a, dr, dz = A._mode_fields(rho, z)
        return dr ** 2 + dz ** 2 + (a / np.maximum(rho, 1e-300)) ** 2

    return _polar_panels(dens, r_lo, min(r_hi, A.support_radius * 1.0000001))


def curl_energy(A: FieldAnsatz) -> float:
    """int |curl A|^2, for cross-checking field_energy."""
    if A.is_zero:
        return 0.0

    def dens(rho, z):
        br, bz = A.B_cyl(rho, z)
        return br ** 2 + bz ** 2

    return _polar_panels(dens, 0.0, A.support_radius)


def gauge_center(values, weights=None):
    """Subtract the (weighted) average of sampled field values.

    values is (n, 3); the output has zero mean by construction, which is
    the constant shift minimizing the L^2 norm on the sample.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 2 or v.shape[1] != 3:
        raise ValueError("expected (n, 3) samples")
    if weights is None:
        mean = v.mean(axis=0)
    else:
        w = np.asarray(weights, dtype=float)
        mean = (v * w[:, None]).sum(axis=0) / w.sum()
    return v - mean


# ---------------------------------------------------------------------------
# cylindrical mesh and block assembly
# ---------------------------------------------------------------------------


def _graded_faces(scale, span, n):
    xi = np.linspace(0.0, math.asinh(span / scale), n + 1)
    return scale * np.sinh(xi)


@dataclass
class PauliGrid:
    """Tensor (rho, z) finite-volume mesh; kinetic stencils cached per h."""

    rho_faces: np.ndarray
    z_faces: np.ndarray
    _kin_cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def for_ball(cls, radius: float, n_rho: int = 96, n_z: int = 192,
                 r_core: float = 0.15) -> "PauliGrid":
        half = _graded_faces(r_core, radius, n_z // 2)
        zf = np.concatenate([-half[::-1], half[1:]])
        return cls(rho_faces=_graded_faces(r_core, radius, n_rho), z_faces=zf)

    def __post_init__(self):
        self.rho = 0.5 * (self.rho_faces[1:] + self.rho_faces[:-1])
        self.z = 0.5 * (self.z_faces[1:] + self.z_faces[:-1])
        self.drho = np.diff(self.rho_faces)
        self.dz = np.diff(self.z_faces)
        self.nr = self.rho.size
        self.nz = self.z.size
        self.R, self.Z = np.meshgrid(self.rho, self.z, indexing="ij")

    @property
    def shape(self):
        return (self.nr, self.nz)

    def kinetic(self, h: float) -> sp.csr_matrix:
        """Symmetrized FV of -h^2 (rho^-1 d_rho rho d_rho + d_zz), Dirichlet outer."""
        if h in self._kin_cache:
            return self._kin_cache[h]
        nr, nz = self.nr, self.nz
        rho, drho, rf = self.rho, self.drho, self.rho_faces
        z, dz, zf = self.z, self.dz, self.z_faces
        h2 = h * h
        delr = rho[1:] - rho[:-1]
        cr = -h2 * rf[1:-1] / (delr * np.sqrt(rho[:-1] * drho[:-1] * rho[1:] * drho[1:]))
        delz = z[1:] - z[:-1]
        cz = -h2 / (delz * np.sqrt(dz[:-1] * dz[1:]))
        diag = np.zeros((nr, nz))
        for i in range(nr):
            g_in = 0.0 if i == 0 else h2 * rf[i] / (rho[i] - rho[i - 1])
            g_out = h2 * rf[i + 1] / ((rho[i + 1] - rho[i]) if i + 1 < nr else (rf[i + 1] - rho[i]))
            diag[i, :] += (g_in + g_out) / (rho[i] * drho[i])
        for j in range(nz):
            g_dn = h2 / ((z[j] - z[j - 1]) if j > 0 else (z[j] - zf[0]))
            g_up = h2 / ((z[j + 1] - z[j]) if j + 1 < nz else (zf[-1] - z[j]))
            diag[:, j] += (g_dn + g_up) / dz[j]
        n = nr * nz
        I = np.arange(n)
        rows = [I]
        cols = [I]
        vals = [diag.ravel()]
        ii, jj = np.meshgrid(np.arange(nr - 1), np.arange(nz), indexing="ij")
        a = (ii * nz + jj).ravel()
        b = ((ii + 1) * nz + jj).ravel()
        v = np.repeat(cr, nz)
        rows += [a, b]
        cols += [b, a]
        vals += [v, v]
        ii, jj = np.meshgrid(np.arange(nr), np.arange(nz - 1), indexing="ij")
        a = (ii * nz + jj).ravel()
        b = (ii * nz + jj + 1).ravel()
        v = np.tile(cz, nr)
        rows += [a, b]
        cols += [b, a]
        vals += [v, v]
        K = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(n, n))
        self._kin_cache[h] = K
        return K

    def z_derivative(self) -> sp.csr_matrix:
        """Skew-symmetric FV first derivative in z (symmetrized basis)."""
        nr, nz = self.nr, self.nz
        g = 0.5 / np.sqrt(self.dz[:-1] * self.dz[1:])
        ii, jj = np.meshgrid(np.arange(nr), np.arange(nz - 1), indexing="ij")
        a = (ii * nz + jj).ravel()
        b = (ii * nz + jj + 1).ravel()
        v = np.tile(g, nr)
        n = nr * nz
        return sp.csr_matrix((np.concatenate([v, -v]),
                              (np.concatenate([a, b]), np.concatenate([b, a]))),
                             shape=(n, n))


def block_matrix(grid: PauliGrid, h: float, m: int, V2d: np.ndarray,
                 a2d: np.ndarray, Bz2d: np.ndarray, Brho2d: np.ndarray,
                 mu: float = 0.0, phi2d: Optional[np.ndarray] = None,
                 const_Az: float = 0.0):
    """Assemble the j = m + 1/2 block (up component m, down m + 1)."""
    K = grid.kinetic(h)
    if const_Az != 0.0:
        Dz = grid.z_derivative()
        K = K + (-2.0j * h * const_Az) * Dz + sp.identity(K.shape[0]) * const_Az ** 2
    R = grid.R
    blocks = []
    for mm, sgn in ((m, +1), (m + 1, -1)):
        U = (h * mm / R + a2d) ** 2 - V2d + mu - sgn * h * Bz2d
        blocks.append(K + sp.diags(U.ravel()))
    coupling = sp.diags(-h * Brho2d.ravel())
    H = sp.bmat([[blocks[0], coupling], [coupling, blocks[1]]], format="csc")
    if phi2d is not None:
        f = np.concatenate([phi2d.ravel(), phi2d.ravel()])
        Dw = sp.diags(f)
        H = (Dw @ H @ Dw).tocsc()
    return H


def inertia_below(H, tau: float) -> int:
    """Number of eigenvalues of the sparse Hermitian H strictly below tau.

    Sylvester's law applied to an unpivoted (diagonal-threshold) LU of
    H - tau I in SuperLU symmetric mode: when the row and column
    permutations agree the factorization is a symmetric congruence and the
    signs of diag(U) carry the inertia.
    """
    n = H.shape[0]
    A = (H - tau * sp.identity(n, dtype=H.dtype, format="csc")).tocsc()
    lu = splu(A, diag_pivot_thresh=0.0, permc_spec="MMD_AT_PLUS_A",
              options=dict(SymmetricMode=True))
    if not np.array_equal(lu.perm_r, lu.perm_c):
        raise RuntimeError("row pivoting occurred; inertia count unavailable")
    return int(np.sum(lu.U.diagonal().real < 0.0))


def _bisect_eigenvalues(H, lo, hi, count, tol=1e-8, _n_lo=None):
    """Approximate the count eigenvalues in (lo, hi) by inertia bisection."""
    if count == 0:
        return []
    if hi - lo < tol:
        return [0.5 * (lo + hi)] * count
    mid = 0.5 * (lo + hi)
    n_mid = inertia_below(H, mid)
    n_lo = inertia_below(H, lo) if _n_lo is None else _n_lo
    left = n_mid - n_lo
    return (_bisect_eigenvalues(H, lo, mid, left, tol, _n_lo=n_lo)
            + _bisect_eigenvalues(H, mid, hi, count - left, tol, _n_lo=n_mid))


def eigs_below(H, threshold: float, sigma: float) -> np.ndarray:
    """All eigenvalues below threshold, certified by an inertia count.

    Cutoff-sandwiched operators carry a dense near-zero cluster (the
    exterior region), which stalls any Lanczos window whose boundary lands
    inside it; counting first and requesting exactly that many shift-invert
    eigenpairs keeps the window boundary out of the cluster.  sigma must
    lie below the spectrum bottom so the closest-to-sigma set is exactly
    the negative part.  Unconverged stragglers (shallow states hugging the
    threshold) are refined by inertia bisection instead.
    """
    from scipy.sparse.linalg import ArpackNoConvergence

    count = inertia_below(H, threshold)
    if count == 0:
        return np.array([])
    n = H.shape[0]
    k = min(count, n - 2)
    lu = splu((H - sigma * sp.identity(n, dtype=H.dtype, format="csc")).tocsc())
    op = LinearOperator(H.shape, matvec=lu.solve, dtype=H.dtype)
    # fixed start vector keeps repeated runs byte-identical
    v0 = np.full(n, 1.0 / math.sqrt(n), dtype=float)
    try:
        vals = eigsh(H, k=k, sigma=sigma, which="LM", OPinv=op, v0=v0,
                     maxiter=1000, ncv=min(n - 1, max(3 * k + 20, 40)),
                     return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        vals = np.asarray(exc.eigenvalues)
    vals = np.sort(np.real(vals))
    vals = vals[vals < threshold]
    if vals.size < count:
        lo = float(vals[-1]) if vals.size else float(sigma)
        extra = _bisect_eigenvalues(H, lo + 1e-12, threshold, count - vals.size)
        vals = np.sort(np.concatenate([vals, extra]))
    return vals


@dataclass(frozen=True)
class PauliTraceResult:
    trace: float
    blocks: dict
    mesh_shape: tuple
    mu: float


def pauli_trace_neg(A: Optional[FieldAnsatz], V, h: float = 1.0,
                    phi: Optional[SmoothCutoff] = None, mu: float = 0.0,
                    grid: Optional[PauliGrid] = None, sigma: float = -0.75,
                    const_Az: float = 0.0, jmax: int = 30,
                    domain_radius: Optional[float] = None,
                    mesh=(96, 192)) -> PauliTraceResult:
    """Trace of [phi (T_h(A) - V) phi + mu]_- summed over signed j_z blocks.

    V is a radial accessor V(|x|); phi an optional radial cutoff (the
    negative spectrum then lives inside supp phi and the mesh stops
    there).  Blocks stop after two consecutive empty ones per side.  No
    extra spin factor: the spinor components are explicit.
    """
    if grid is None:
        if domain_radius is None:
            if phi is not None:
                domain_radius = phi.R
            else:
                domain_radius = 1.2 * _outer_radius_estimate(V, mu, h)
        grid = PauliGrid.for_ball(domain_radius, n_rho=mesh[0], n_z=mesh[1])
    S = np.sqrt(grid.R ** 2 + grid.Z ** 2)
    V2d = np.asarray(V(S), dtype=float)
    phi2d = None if phi is None else np.asarray(phi(S), dtype=float)
    if A is None or A.is_zero:
        a2d = np.zeros_like(V2d)
        Bz = np.zeros_like(V2d)
        Br = np.zeros_like(V2d)
        zero_field = const_Az == 0.0
    else:
        a2d = A.a(grid.R, grid.Z)
        Br, Bz = A.B_cyl(grid.R, grid.Z)
        zero_field = False

    blocks = {}
    # keep sigma under the spectrum bottom even when the Zeeman term deepens it
    zeeman = float(np.max(np.abs(Bz)) + np.max(np.abs(Br)))
    sigma_use = min(sigma, -0.3 - 1.2 * h * zeeman)

    def solve_block(m):
        H = block_matrix(grid, h, m, V2d, a2d, Bz, Br, mu=mu, phi2d=phi2d,
                         const_Az=const_Az)
        return eigs_below(H, -1e-12, sigma_use)

    if zero_field:
        # blocks j and -j are degenerate at A = 0: compute m >= 0, weight 2
        empties = 0
        for m in range(jmax):
            vals = solve_block(m)
            if vals.size == 0:
                empties += 1
                if empties >= 2 or m > 0:
                    break
                continue
            empties = 0
            blocks[m + 0.5] = vals
            blocks[-(m + 0.5)] = vals.copy()
        else:
            raise BlockCascadeError(f"blocks still nonempty at the j cap {jmax}")
    else:
        for side, start in ((1, 0), (-1, -1)):
            m = start
            empties = 0
            steps = 0
            while steps < jmax:
                vals = solve_block(m)
                if vals.size == 0:
                    empties += 1
                    if empties >= 2:
                        break
                else:
                    empties = 0
                    blocks[m + 0.5] = vals
                m += side
                steps += 1
            if steps >= jmax:
                raise BlockCascadeError(f"blocks still nonempty at the j cap {jmax}")

    trace = float(sum(np.sum(v) for v in blocks.values()))
    return PauliTraceResult(trace=trace, blocks=blocks, mesh_shape=grid.shape, mu=mu)


def _outer_radius_estimate(V, mu, h):
    probe = np.geomspace(1e-3, 1e6, 80)
    vals = np.asarray(V(probe), dtype=float)
    thresh = mu if mu > 0 else 0.25 * h * h / np.maximum(probe, 1e-300) ** 2
    above = vals > thresh
    if not above.any():
        return 10.0 * h
    return float(min(1e4, 4.0 * probe[np.nonzero(above)[0].max()]))


# ---------------------------------------------------------------------------
# the localized Scott functional
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScottFunctionalParts:
    """trace + field_inner / kappa + beta * field_outer - weyl."""

    trace: float
    field_inner: float
    field_outer: float
    weyl: float

    def value(self, kappa: float, beta: float) -> float:
        if kappa <= 0:
            raise ValueError("kappa must be positive")
        if not 0 < beta <= 0.5 / kappa:
            raise ValueError("beta must lie in (0, 1/(2 kappa)]")
        return self.trace + self.field_inner / kappa + beta * self.field_outer - self.weyl


def scott_functional_parts(A: Optional[FieldAnsatz], R: float,
                           grid: Optional[PauliGrid] = None,
                           mesh=(96, 192), inner: float = 0.5,
                           sigma: float = -0.75) -> ScottFunctionalParts:
    """kappa- and beta-independent pieces of the localized Scott functional.

    The trace is Tr[phi_R (T_1(A) - 1/|x|) phi_R]_-; the field zones are
    B(R/4) and B(2R) minus B(R/4); the Weyl term is the phi_R^2-weighted
    Coulomb phase-space integral.
    """
    phi = SmoothCutoff(R, inner=inner)
    tr = pauli_trace_neg(A, lambda r: 1.0 / r, h=1.0, phi=phi, grid=grid,
                         mesh=mesh, sigma=sigma)
    if A is None or A.is_zero:
        f_in = f_out = 0.0
    else:
        if A.support_radius > R / 4.0 + 1e-12:
            f_in = field_energy(A, 0.0, R / 4.0)
            f_out = field_energy(A, R / 4.0, 2.0 * R)
        else:
            f_in = field_energy(A)
            f_out = 0.0
    return ScottFunctionalParts(trace=tr.trace, field_inner=f_in,
                                field_outer=f_out,
                                weyl=cutoff_weyl_coulomb(phi))


def scott_functional(A: Optional[FieldAnsatz], R: float, kappa: float,
                     beta: float, grid: Optional[PauliGrid] = None,
                     mesh=(96, 192), inner: float = 0.5,
                     sigma: float = -0.75) -> float:
    """E_{R,kappa,beta}(A), an upper-bound probe for 2 S(R, kappa, beta)."""
    return scott_functional_parts(A, R, grid=grid, mesh=mesh, inner=inner,
                                  sigma=sigma).value(kappa, beta)


@dataclass(frozen=True)
class MinimizeScottResult:
    estimate: ScottEstimate
    theta: tuple
    history: list
    budget_exhausted: bool
    zero_field_value: float


def minimize_scott(kappa: float, beta: float, R: float, n_modes: int = 2,
                   budget: int = 60, seed: int = 0, restarts: int = 1,
                   theta_scale: float = 0.6, mesh=(80, 160),
                   grid: Optional[PauliGrid] = None,
                   inner: float = 0.5) -> MinimizeScottResult:
    """Derivative-free (Nelder-Mead, seeded restarts) upper bound on 2 S(R, kappa, beta).

    theta = 0 is always evaluated first, so the result never exceeds the
    zero-field functional value.  Exhausting the evaluation budget returns
    the best value found with budget_exhausted set.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if not 0 < beta <= 0.5 / kappa:
        raise ValueError("beta must lie in (0, 1/(2 kappa)]")
    if grid is None:
        grid = PauliGrid.for_ball(R, n_rho=mesh[0], n_z=mesh[1])
    rng = np.random.default_rng(seed)
    cache: dict = {}
    history: list = []
    evals = 0

    def parts_for(theta):
        key = tuple(np.round(theta, 12))
        if key not in cache:
            A = None if all(v == 0.0 for v in key) else FieldAnsatz(
                theta=key, support_radius=R / 4.0,
                scales=tuple(0.5 ** i for i in range(n_modes)))
            cache[key] = scott_functional_parts(A, R, grid=grid, inner=inner)
        return cache[key]

    def objective(theta):
        nonlocal evals
        evals += 1
        val = parts_for(theta).value(kappa, beta)
        history.append((evals, float(np.linalg.norm(theta)), val))
        return val

    f0 = objective(np.zeros(n_modes))
    best_val, best_theta = f0, tuple(np.zeros(n_modes))
    exhausted = False
    for attempt in range(restarts):
        if evals >= budget:
            exhausted = True
            break
        x0 = np.zeros(n_modes) if attempt == 0 else rng.normal(scale=theta_scale, size=n_modes)
        simplex = np.vstack([x0] + [x0 + theta_scale * e
                                    for e in np.eye(n_modes)])
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxfev": max(1, budget - evals),
                                "initial_simplex": simplex,
                                "xatol": 1e-3, "fatol": 1e-5})
        if res.fun < best_val:
            best_val, best_theta = float(res.fun), tuple(res.x)
        if evals >= budget:
            exhausted = True
    est = ScottEstimate(value=best_val, route="ansatz-min", kappa=kappa,
                        R=R, beta=beta,
                        meta={"n_modes": n_modes, "seed": seed,
                              "evaluations": evals,
                              "zero_field_value": f0})
    return MinimizeScottResult(estimate=est, theta=best_theta, history=history,
                               budget_exhausted=exhausted, zero_field_value=f0)


# ---------------------------------------------------------------------------
# magnetic Lieb-Thirring diagnostic
# ---------------------------------------------------------------------------


def magnetic_lt_rhs(V, h: float, C: float, A: Optional[FieldAnsatz] = None,
                    b_squared_integral: Optional[float] = None,
                    r_max: float = 1e4) -> float:
    """C h^-3 int [V]_+^(5/2) + C (h^-2 int B^2)^(3/4) (int [V]_+^4)^(1/4).

    The envelope -rhs <= Tr[T_h(A) - V]_- is a diagnostic; C is whatever
    the caller fits, the universal constant being unspecified.  V is a
    radial accessor; the field term takes either an ansatz (using its
    exact curl energy) or a precomputed integral of B^2.
    """
    from .weyl import _radial_profile_integral  # local import to avoid cycle

    def pos(r):
        return np.maximum(np.asarray(V(r), dtype=float), 0.0)

    tail = pos(np.array([r_max])) * r_max ** 2
    if tail[0] ** 2.5 * r_max > 1e-8:
        raise ValueError("V does not look integrable to the configured r_max")
    i52 = 4.0 * math.pi * _radial_profile_integral(lambda r: pos(r) ** 2.5 * r ** 2, 0.0, r_max)
    i4 = 4.0 * math.pi * _radial_profile_integral(lambda r: pos(r) ** 4 * r ** 2, 0.0, r_max)
    if A is not None:
        b2 = curl_energy(A)
    elif b_squared_integral is not None:
        b2 = float(b_squared_integral)
    else:
        b2 = 0.0
    return C * h ** -3 * i52 + C * (h ** -2 * b2) ** 0.75 * i4 ** 0.25
