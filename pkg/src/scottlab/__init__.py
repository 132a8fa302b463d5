"""scottlab: Thomas-Fermi theory, Weyl integrals, negative-eigenvalue
traces and Scott-correction estimates at desk scale."""

__version__ = "0.1.0"

from .core import NuclearConfig, ScottEstimate, neg_part_sum  # noqa: F401
