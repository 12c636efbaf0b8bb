"""Fermionic quantum walkers coupled to a fermionic reservoir.

Reduced one- and two-body dynamics of a finite sample that exchanges
particles with a quasifree reservoir through one site, closed forms for the
shift sample and repeated interactions, coined walk builders, and an exact
Fock-space simulator used as the reference for all of them.

Modules
-------
core         wedge spaces, minors, spectral reports, Toeplitz sections
model        coupling, reservoir symbol, sample unitary, effective matrices
onebody      one-body recursion and its fixed point
twobody      two-body recursion on the wedge space
shift_exact  closed forms for the shift sample, correlated reservoirs
ris          repeated interactions: p-body mixtures, number law, flux, Gibbs state
fock         exact Fock-space oracle
walks        coined walks, genericity and cyclicity checks
cli          experiment runner
"""

from . import core, fock, model, onebody, ris, shift_exact, twobody, walks
from .core import (
    SpectralReport,
    WedgeBasis,
    antisymmetric_sandwich,
    gamma_on_wedge,
    spectral_report,
    toeplitz_section,
    wedge_basis,
    wedge_embed,
)
from .errors import (
    FermiWalkError,
    InvalidArgument,
    InvalidSymbol,
    NumericFailure,
    PreconditionViolation,
    ResourceLimit,
)
from .model import (
    CouplingParams,
    EffectiveMatrices,
    ReservoirSymbol,
    SampleUnitary,
    build_effective,
    shift_matrix,
    validate_symbol,
)
from .onebody import OneBodyDensity
from .twobody import TwoBodyDensity
from .walks import CoinConfig

__version__ = "0.1.0"

__all__ = [
    "core",
    "fock",
    "model",
    "onebody",
    "ris",
    "shift_exact",
    "twobody",
    "walks",
    "SpectralReport",
    "WedgeBasis",
    "antisymmetric_sandwich",
    "gamma_on_wedge",
    "spectral_report",
    "toeplitz_section",
    "wedge_basis",
    "wedge_embed",
    "FermiWalkError",
    "InvalidArgument",
    "InvalidSymbol",
    "NumericFailure",
    "PreconditionViolation",
    "ResourceLimit",
    "CouplingParams",
    "EffectiveMatrices",
    "ReservoirSymbol",
    "SampleUnitary",
    "build_effective",
    "shift_matrix",
    "validate_symbol",
    "OneBodyDensity",
    "TwoBodyDensity",
    "CoinConfig",
]
