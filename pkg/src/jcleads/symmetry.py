"""Structural symmetry predicates and cross-section table transforms.

Detection is exact on configured values (no floating tolerance): time
reversal reduces to realness of all matrix data in the chosen bases, mirror
symmetry to equal biases plus the canonical real contact pair
(theta = pi/4, phi = 0).  Other mirror-symmetric bases may exist but are not
auto-detected.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .model import BAND_WIDTH, ModelConfig, Side, ThermalState
from .scattering import Channel, CrossSectionTable


@dataclass(frozen=True)
class SymmetryFlags:
    time_reversible: bool
    mirror_symmetric: bool
    case_E: bool
    case_S: bool
    case_C: bool

    def commuting_case(self) -> bool:
        return self.case_E or self.case_S or self.case_C

    def to_dict(self) -> dict:
        return asdict(self)


def classify(config: ModelConfig, thermal: ThermalState) -> SymmetryFlags:
    """Evaluate the structural predicates for (config, thermal)."""
    v_l, v_r = config.left.bias, config.right.bias
    theta, phi = config.dot.contact_angle, config.dot.contact_phase
    time_reversible = phi == 0.0
    mirror_symmetric = time_reversible and v_l == v_r and theta == math.pi / 4
    case_e = thermal.mu_left == thermal.mu_right
    case_s = v_l >= v_r + BAND_WIDTH or v_r >= v_l + BAND_WIDTH
    case_c = theta == 0.0
    return SymmetryFlags(
        time_reversible=time_reversible,
        mirror_symmetric=mirror_symmetric,
        case_E=case_e,
        case_S=case_s,
        case_C=case_c,
    )


def mirror_swap(table: CrossSectionTable) -> CrossSectionTable:
    """Relabel left<->right in both indices of a cross-section table.

    Every open channel must have its mirror partner open (guaranteed when
    the biases are equal); otherwise the swap is undefined.
    """
    cs = table.channel_set
    perm = []
    for ch in cs.channels:
        partner = Channel(ch.side.other, ch.n)
        try:
            perm.append(cs.index(partner))
        except ValueError:
            raise ValueError(f"channel {ch} has no open mirror partner") from None
    sigma = table.sigma[perm, :][:, perm]
    return CrossSectionTable(channel_set=cs, sigma=sigma)


_ = Side  # re-exported for callers matching on table labels
