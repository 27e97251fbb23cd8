import math

import numpy as np
import pytest

from jcleads.model import make_config, validate
from jcleads.scattering import open_channels


def random_config(rng, nph_max=6, omega_range=(1.2, 6.0), special=None):
    """Random physical configuration; `special` forces a Prop-III.4 case."""
    theta = float(rng.uniform(0.05, math.pi - 0.05))
    phi = float(rng.uniform(0.0, 2 * math.pi - 1e-6))
    v_l = float(rng.uniform(-2.0, 2.0))
    v_r = float(rng.uniform(-2.0, 2.0))
    if special == "S":
        v_l = v_r + 4.0 + float(rng.uniform(0.2, 2.0))
    elif special == "C":
        theta = 0.0
    if special in ("S", "C", "E"):
        phi = 0.0 if rng.uniform() < 0.5 else phi
    return make_config(
        v_left=v_l,
        v_right=v_r,
        spacing=float(rng.uniform(0.3, 3.0)),
        level_base=float(rng.uniform(-0.5, 0.5)),
        contact_angle=theta,
        contact_phase=phi,
        omega=float(rng.uniform(*omega_range)),
        cutoff=int(rng.integers(2, nph_max + 1)),
        g_el=float(rng.uniform(0.1, 0.8)),
        g_ph=float(rng.uniform(0.05, 0.6)),
    )


def random_inband_energy(vcfg, rng, margin=1e-4):
    """Total energy with at least one open channel, away from band edges."""
    edges = vcfg.band_edges()
    lo, hi = float(edges[0]), float(edges[-1])
    while True:
        lam = float(rng.uniform(lo, hi))
        if float(np.min(np.abs(edges - lam))) < margin:
            continue
        if len(open_channels(vcfg, lam)) > 0:
            return lam


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


__all__ = ["random_config", "random_inband_energy", "make_config", "validate"]
