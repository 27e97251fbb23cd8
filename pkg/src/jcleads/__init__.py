"""Multichannel scattering and steady-state currents for a two-level dot
coupled to two semi-infinite tight-binding leads and a one-mode resonator."""

from .currents import (
    CurrentReport,
    NumericsSpec,
    compute_currents,
    contact_electron_current,
    contact_photon_current,
    light_absorbing_scenario,
    photon_current,
    photon_induced_electron_current,
    total_electron_current,
)
from .dot import build_dot_hamiltonian, jc_spectrum_closed_form
from .model import (
    DotParams,
    LeadParams,
    ModelConfig,
    PhotonParams,
    Side,
    ThermalState,
    contact_basis,
    make_config,
    validate,
)
from .scattering import (
    Channel,
    ChannelSet,
    SMatrix,
    contact_smatrix,
    cross_sections,
    open_channels,
    self_energy,
    smatrix,
)
from .symmetry import SymmetryFlags, classify, mirror_swap

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "ChannelSet",
    "CurrentReport",
    "DotParams",
    "LeadParams",
    "ModelConfig",
    "NumericsSpec",
    "PhotonParams",
    "SMatrix",
    "Side",
    "SymmetryFlags",
    "ThermalState",
    "build_dot_hamiltonian",
    "classify",
    "compute_currents",
    "contact_basis",
    "contact_electron_current",
    "contact_photon_current",
    "contact_smatrix",
    "cross_sections",
    "jc_spectrum_closed_form",
    "light_absorbing_scenario",
    "make_config",
    "mirror_swap",
    "open_channels",
    "photon_current",
    "photon_induced_electron_current",
    "self_energy",
    "smatrix",
    "total_electron_current",
    "validate",
]
