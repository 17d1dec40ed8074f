"""Level-2 Hölder rough paths on dyadic grids.

Submodules: :mod:`hrp.core` (paths, Chen algebra, metrics),
:mod:`hrp.sampler` (enhanced Brownian motion), :mod:`hrp.approx`
(dyadic, adapted and translated approximations), :mod:`hrp.rde`
(the Ito-map solver), :mod:`hrp.io` (text formats) and
:mod:`hrp.experiments` (seeded reproduction runs).
"""

from hrp.core import (
    Flavor,
    GridRoughPath,
    HolderParams,
    convert_flavor,
    holder_norm,
    pvar_dist,
    rho,
    verify_chen,
)
from hrp.sampler import EbmConfig, RngStream, sample_ebm

__version__ = "0.1.0"

__all__ = [
    "Flavor",
    "GridRoughPath",
    "HolderParams",
    "convert_flavor",
    "holder_norm",
    "pvar_dist",
    "rho",
    "verify_chen",
    "EbmConfig",
    "RngStream",
    "sample_ebm",
]
