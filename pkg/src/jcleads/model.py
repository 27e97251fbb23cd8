"""Physical parameter types, validation, and the two dot bases.

Energy unit: the hopping magnitude of the discrete lead Laplacian.  Each
semi-infinite lead contributes a band ``[bias, bias + 4]`` per photon number.
The two-level dot has eigenvalues ``{level_base, level_base + spacing}`` in
its eigenbasis; the leads attach to a possibly rotated *contact* basis
parametrized by one angle and one phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, NonPositiveOmega, NonPositiveSpacing, ZeroCutoff

BAND_WIDTH = 4.0  # spectrum of the Dirichlet discrete Laplacian is [0, 4]


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def other(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


@dataclass(frozen=True)
class LeadParams:
    """One semi-infinite tight-binding lead with a constant potential bias."""

    bias: float
    side: Side

    def band(self, n: int = 0, omega: float = 0.0) -> tuple[float, float]:
        """Spectral support ``[bias + n*omega, bias + 4 + n*omega]`` of the
        lead channel with ``n`` photons."""
        lo = self.bias + n * omega
        return (lo, lo + BAND_WIDTH)


@dataclass(frozen=True)
class DotParams:
    """Two-level dot: eigenvalues and the contact-basis rotation.

    The contact basis is obtained from the eigenbasis by

        delta0 = cos(theta) e0 + exp(i phi) sin(theta) e1
        delta1 = exp(-i phi) sin(theta) e0 - cos(theta) e1

    which at ``theta = pi/4, phi = 0`` reproduces the real pair
    ``((1,1)/sqrt2, (1,-1)/sqrt2)``.  Overall per-vector phases are
    physically irrelevant (only rank-one projectors onto the contact
    vectors enter the couplings).
    """

    spacing: float
    level_base: float = 0.0
    contact_angle: float = 0.0
    contact_phase: float = 0.0

    @property
    def levels(self) -> tuple[float, float]:
        return (self.level_base, self.level_base + self.spacing)


@dataclass(frozen=True)
class PhotonParams:
    """Single-mode resonator truncated to ``cutoff`` Fock states (n = 0..cutoff-1)."""

    omega: float
    cutoff: int


@dataclass(frozen=True)
class ModelConfig:
    left: LeadParams
    right: LeadParams
    dot: DotParams
    photon: PhotonParams
    g_el: float
    g_ph: float

    def lead(self, side: Side) -> LeadParams:
        return self.left if side is Side.LEFT else self.right


@dataclass(frozen=True)
class ThermalState:
    """Lead occupations and photon Gibbs weights.

    ``beta`` may be ``math.inf``, in which case the electron distribution is
    the exact step function and the photon state is the Fock vacuum.  A
    custom bounded non-negative distribution may replace Fermi-Dirac; it must
    accept and return numpy arrays.
    """

    beta: float
    mu_left: float
    mu_right: float
    distribution: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.beta > 0):
            raise ConfigError("thermal.beta", f"inverse temperature must be in (0, inf], got {self.beta!r}")
        for name in ("mu_left", "mu_right"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"thermal.{name}", "chemical potential must be finite")

    def mu(self, side: Side) -> float:
        return self.mu_left if side is Side.LEFT else self.mu_right

    def occupation(self, x) -> np.ndarray:
        """Occupation f(x); Fermi-Dirac unless a custom distribution is set."""
        x = np.asarray(x, dtype=float)
        if self.distribution is not None:
            return np.asarray(self.distribution(x), dtype=float)
        return fermi_dirac(x, self.beta)


def fermi_dirac(x, beta: float) -> np.ndarray:
    """f_FD(x) = 1/(1 + e^{beta x}); the indicator of x < 0 at beta = inf."""
    x = np.asarray(x, dtype=float)
    if math.isinf(beta):
        return np.where(x < 0.0, 1.0, np.where(x > 0.0, 0.0, 0.5))
    # expit(-beta*x) is overflow-safe for both signs
    from scipy.special import expit

    return expit(-beta * x)


def gibbs_photon_weights(beta: float, omega: float, nph: int) -> np.ndarray:
    """Truncated Gibbs weights rho(n) = (1 - e^{-beta omega}) e^{-n beta omega}.

    Not renormalized after truncation; the deficit 1 - sum is e^{-nph beta omega}.
    At beta = inf the vacuum weight is 1.
    """
    n = np.arange(nph)
    if math.isinf(beta):
        return np.where(n == 0, 1.0, 0.0)
    return -np.expm1(-beta * omega) * np.exp(-n * beta * omega)


def contact_basis(dot: DotParams) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal contact pair (delta0, delta1) as coordinates in the eigenbasis."""
    th, ph = dot.contact_angle, dot.contact_phase
    c, s = math.cos(th), math.sin(th)
    e_iph = complex(math.cos(ph), math.sin(ph))
    delta0 = np.array([c, e_iph * s], dtype=complex)
    delta1 = np.array([s / e_iph, -c], dtype=complex)
    return delta0, delta1


@dataclass(frozen=True, eq=False)
class ValidatedConfig:
    """A :class:`ModelConfig` plus cached derived quantities.

    Immutable after construction; safe to share across threads.
    """

    config: ModelConfig
    delta0: np.ndarray
    delta1: np.ndarray

    @property
    def omega(self) -> float:
        return self.config.photon.omega

    @property
    def cutoff(self) -> int:
        return self.config.photon.cutoff

    @property
    def g_el(self) -> float:
        return self.config.g_el

    @property
    def g_ph(self) -> float:
        return self.config.g_ph

    @property
    def dot_levels(self) -> tuple[float, float]:
        return self.config.dot.levels

    def lead(self, side: Side) -> LeadParams:
        return self.config.lead(side)

    def contact_rotation(self) -> np.ndarray:
        """2x2 unitary whose columns are the contact vectors in eigen coordinates."""
        return np.column_stack([self.delta0, self.delta1])

    def band_edges(self) -> np.ndarray:
        """Sorted, de-duplicated channel band edges {v_a + n*omega + {0, 4}}."""
        edges = []
        for side in (Side.LEFT, Side.RIGHT):
            v = self.lead(side).bias
            for n in range(self.cutoff):
                lo = v + n * self.omega
                edges.extend((lo, lo + BAND_WIDTH))
        return np.unique(np.asarray(edges, dtype=float))


def _require_finite(value: float, name: str) -> None:
    if not math.isfinite(value):
        raise ConfigError(name, f"must be finite, got {value!r}")


def validate(config: ModelConfig) -> ValidatedConfig:
    """Check all parameter constraints and cache derived data.

    Raises :class:`NonPositiveOmega`, :class:`NonPositiveSpacing`,
    :class:`ZeroCutoff` or a generic :class:`ConfigError` naming the field.
    """
    ph = config.photon
    if not (math.isfinite(ph.omega) and ph.omega > 0):
        raise NonPositiveOmega(ph.omega)
    if not isinstance(ph.cutoff, (int, np.integer)) or ph.cutoff < 1:
        raise ZeroCutoff(ph.cutoff)
    dot = config.dot
    if not (math.isfinite(dot.spacing) and dot.spacing > 0):
        raise NonPositiveSpacing(dot.spacing)
    _require_finite(dot.level_base, "dot.level_base")
    if not (0.0 <= dot.contact_angle < math.pi):
        raise ConfigError("dot.contact_angle", f"must lie in [0, pi), got {dot.contact_angle!r}")
    if not (0.0 <= dot.contact_phase < 2 * math.pi):
        raise ConfigError("dot.contact_phase", f"must lie in [0, 2*pi), got {dot.contact_phase!r}")
    for lead, name in ((config.left, "left"), (config.right, "right")):
        _require_finite(lead.bias, f"leads.{name}.bias")
    if config.left.side is not Side.LEFT or config.right.side is not Side.RIGHT:
        raise ConfigError("leads", "left/right fields must carry matching side tags")
    _require_finite(config.g_el, "g_el")
    _require_finite(config.g_ph, "g_ph")
    d0, d1 = contact_basis(dot)
    return ValidatedConfig(config=config, delta0=d0, delta1=d1)


def make_config(
    v_left: float = 0.0,
    v_right: float = 0.0,
    spacing: float = 1.0,
    level_base: float = 0.0,
    contact_angle: float = math.pi / 4,
    contact_phase: float = 0.0,
    omega: float = 4.0,
    cutoff: int = 4,
    g_el: float = 0.2,
    g_ph: float = 0.2,
) -> ModelConfig:
    """Convenience constructor used by the CLI, the service and the tests."""
    return ModelConfig(
        left=LeadParams(bias=v_left, side=Side.LEFT),
        right=LeadParams(bias=v_right, side=Side.RIGHT),
        dot=DotParams(
            spacing=spacing,
            level_base=level_base,
            contact_angle=contact_angle,
            contact_phase=contact_phase,
        ),
        photon=PhotonParams(omega=omega, cutoff=cutoff),
        g_el=g_el,
        g_ph=g_ph,
    )


def with_cutoff(config: ModelConfig, cutoff: int) -> ModelConfig:
    return replace(config, photon=replace(config.photon, cutoff=int(cutoff)))
