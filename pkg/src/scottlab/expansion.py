"""Two-term energy assembly and the mean-field comparison sweep.

The headline object is E(Z) ~ Z^(7/3) E_TF + 2 Z^2 sum_k z_k^2 S(kappa_k)
with kappa_k = 8 pi Z_k alpha^2.  The mean-field side evaluates
Z^(7/3) [h^3 (trace + field terms) - D(rho_TF)] at h = Z^(-1/3), which is
the scaling-reduced one-body energy the expansion approximates; the sweep
records how fast their difference dies relative to Z^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable


from .core import S0, NuclearConfig
from . import radial_eig
from .tf import TFSolution


class UnsupportedConfigError(ValueError):
    """Raised for quantitative requests outside the atomic (M = 1) scope."""


def s_provider_nonmagnetic(kappa: float) -> float:
    """S(kappa) provider for alpha = 0 runs: the exact S(0) = 1/8."""
    if kappa != 0.0:
        raise ValueError("nonmagnetic provider only serves kappa = 0")
    return S0


def two_term_energy(config: NuclearConfig, s_provider: Callable[[float], float],
                    tf_solution: TFSolution) -> float:
    """Z^(7/3) E_atom + 2 Z^2 sum_k z_k^2 S(kappa_k).

    Quantitative leading terms exist only for atoms; molecular requests
    raise UnsupportedConfigError (the Scott sum itself would be available,
    but the molecular TF energy is out of scope).
    """
    if config.M != 1:
        raise UnsupportedConfigError(
            "molecular TF leading term unavailable; expansion is quantitative for M = 1 only")
    Z = config.Z
    leading = tf_solution.E_atom * Z ** (7.0 / 3.0)
    scott = 2.0 * Z ** 2 * sum(z ** 2 * s_provider(kk)
                               for z, kk in zip(config.z, config.kappa_k))
    return leading + scott


def scott_term(config: NuclearConfig, s_provider) -> float:
    """2 Z^2 sum_k z_k^2 S(8 pi Z_k alpha^2) alone."""
    return 2.0 * config.Z ** 2 * sum(z ** 2 * s_provider(kk)
                                     for z, kk in zip(config.z, config.kappa_k))


def mean_field_energy(config: NuclearConfig, tf_solution: TFSolution,
                      route: str = "schrodinger", refine: bool = True,
                      resolution: float = 20.0, max_workers: int = 1,
                      field_terms: float = 0.0) -> float:
    """Z^(7/3) [h^3 (trace + field terms) - D(rho_TF)] at h = Z^(-1/3).

    route "schrodinger" evaluates the A = 0 spectral trace of
    -h^2 Delta - V_TF; route "ansatz-min" accepts the caller's
    (trace + kappa^-1 h^-2 field energy) combination through field_terms
    added to the zero-field trace replacement.
    """
    if config.M != 1:
        raise UnsupportedConfigError("mean-field energy implemented for atoms only")
    if route not in ("schrodinger", "ansatz-min"):
        raise ValueError(f"unsupported route {route!r}")
    Z = config.Z
    h = Z ** (-1.0 / 3.0)
    if route == "schrodinger":
        s = radial_eig.trace_neg(tf_solution.potential(), h, mu=0.0,
                                 refine=refine, resolution=resolution,
                                 max_workers=max_workers)
        one_body = s.trace
    else:
        one_body = field_terms
    return Z ** (7.0 / 3.0) * (h ** 3 * one_body - tf_solution.D_rho)


@dataclass(frozen=True)
class ExpansionReport:
    Z: float
    alpha: float
    kappa: float
    leading: float
    scott: float
    mean_field: float

    @property
    def two_term(self) -> float:
        return self.leading + self.scott

    @property
    def residual(self) -> float:
        return self.mean_field - self.two_term

    @property
    def residual_over_Z2(self) -> float:
        return abs(self.residual) / self.Z ** 2


def expansion_sweep(Z_list, alpha: float, tf_solution: TFSolution,
                    s_provider=None, refine: bool = True,
                    resolution: float = 20.0,
                    max_workers: int = 1) -> list:
    """ExpansionReport per Z; with alpha = 0 the provider defaults to S(0)."""
    if s_provider is None:
        if alpha != 0.0:
            raise ValueError("a Scott provider is required when alpha > 0")
        s_provider = s_provider_nonmagnetic
    out = []
    for Z in Z_list:
        cfg = NuclearConfig(z=(1.0,), r=((0.0, 0.0, 0.0),), Z=float(Z), alpha=alpha)
        leading = tf_solution.E_atom * cfg.Z ** (7.0 / 3.0)
        scott = scott_term(cfg, s_provider)
        mf = mean_field_energy(cfg, tf_solution, refine=refine,
                               resolution=resolution, max_workers=max_workers)
        out.append(ExpansionReport(Z=cfg.Z, alpha=alpha, kappa=cfg.kappa,
                                   leading=leading, scott=scott, mean_field=mf))
    return out
