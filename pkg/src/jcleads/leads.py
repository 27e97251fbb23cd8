"""Exact analytics of one semi-infinite Dirichlet tight-binding lead.

The lead Hamiltonian acts on sites x = 1, 2, ... as

    (h f)(x) = -f(x+1) + (2 + v) f(x) - f(x-1),     f(0) = 0,

so the channel with ``n`` photons has chain onsite constant
``a = v + n*omega + 2`` and hopping -1, with dispersion
``lambda = a - 2 cos k``, ``k in (0, pi)``.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .errors import BandEdgeSingularity, OutOfBand
from .model import LeadParams


def channel_onsite(lead: LeadParams, n: int, omega: float) -> float:
    return lead.bias + n * omega + 2.0


def momentum(lead: LeadParams, n: int, lam: float, omega: float) -> Optional[float]:
    """Momentum k in (0, pi) of the open channel, or ``None`` if the channel
    is closed (band edges excluded)."""
    x = lam - channel_onsite(lead, n, omega)
    if not -2.0 < x < 2.0:
        return None
    return math.acos(-x / 2.0)


def eigenfunction(lead: LeadParams, lam_rel: float, x: int) -> float:
    """Energy-normalized generalized eigenfunction g(x, lambda_rel).

    ``lam_rel`` is the energy relative to the channel (no photon shift) and
    must lie strictly inside the band (bias, bias + 4); ``x >= 0`` is the
    lattice site, with g(0) = 0 by the Dirichlet condition.
    """
    y = (-lam_rel + 2.0 + lead.bias) / 2.0  # cos k
    if not -1.0 < y < 1.0:
        raise OutOfBand(f"lambda_rel={lam_rel!r} outside open band {lead.band()}")
    if x == 0:
        return 0.0
    k = math.acos(y)
    return math.pi ** -0.5 * (1.0 - y * y) ** -0.25 * math.sin(k * x)


def retarded_surface_gf(x) -> np.ndarray:
    """Surface Green function of the chain at relative energy ``x = lambda - a``.

    In band: g = (x - i sqrt(4 - x^2))/2 (Im g <= 0, retarded branch).
    Out of band: the real root of g^2 - x g + 1 = 0 with |g| <= 1.
    Raises :class:`BandEdgeSingularity` when |x| == 2 exactly.
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) == 2.0):
        raise BandEdgeSingularity("energy coincides with a band edge")
    inband = np.abs(x) < 2.0
    g = np.where(
        inband,
        0.5 * (x - 1j * np.sqrt(np.abs(4.0 - x * x))),
        0.5 * (x - np.sign(x) * np.sqrt(np.abs(x * x - 4.0))),
    )
    return g


def surface_gf(lead: LeadParams, n: int, z, omega: float) -> complex:
    """Retarded surface Green function of the (lead, n) channel at energy z.

    Real z uses the retarded branch (Im g <= 0 in band, |g| <= 1 out of
    band); complex z with Im z > 0 selects the decaying root directly.
    """
    a = channel_onsite(lead, n, omega)
    z = complex(z)
    if z.imag == 0.0:
        return complex(retarded_surface_gf(z.real - a))
    w = z - a
    root = np.sqrt(w * w - 4.0)
    g1 = 0.5 * (w - root)
    g2 = 0.5 * (w + root)
    return g1 if abs(g1) <= abs(g2) else g2


def gamma(lead: LeadParams, n: int, lam: float, g_el: float, omega: float) -> float:
    """Level-width function Gamma = -2 g_el^2 Im g_surface >= 0 (0 out of band)."""
    x = lam - channel_onsite(lead, n, omega)
    if not -2.0 < x < 2.0:
        return 0.0
    return g_el * g_el * math.sqrt(4.0 - x * x)
