import numpy as np
import pytest

from conftest import random_config, random_inband_energy

from jcleads.model import make_config, validate
from jcleads.oracle import wavematch_smatrix
from jcleads.scattering import cross_sections, smatrix


def align_phases(reference, other):
    """Remove one arbitrary phase per channel (row/column gauge)."""
    d = np.diag(other.conj().T @ reference)
    phases = d / np.where(np.abs(d) > 0, np.abs(d), 1.0)
    return other * phases[None, :]


def test_identity_without_coupling(rng):
    vcfg = validate(make_config(g_el=0.0, g_ph=0.3, omega=1.6, cutoff=3))
    lam = random_inband_energy(vcfg, rng)
    s = wavematch_smatrix(vcfg, lam)
    np.testing.assert_array_equal(s.entries, np.eye(len(s.channel_set)))


def test_oracle_unitarity(rng):
    for _ in range(5):
        vcfg = validate(random_config(rng, nph_max=4))
        for _ in range(4):
            lam = random_inband_energy(vcfg, rng)
            assert wavematch_smatrix(vcfg, lam).unitarity_defect() <= 1e-10


def test_agreement_with_resolvent_path(rng):
    for _ in range(8):
        vcfg = validate(random_config(rng, nph_max=4))
        for _ in range(5):
            lam = random_inband_energy(vcfg, rng)
            main = smatrix(vcfg, lam)
            alt = wavematch_smatrix(vcfg, lam)
            assert alt.channel_set.channels == main.channel_set.channels
            sig_dev = np.max(np.abs(cross_sections(main).sigma - cross_sections(alt).sigma))
            assert sig_dev <= 1e-10
            aligned = align_phases(main.entries, alt.entries)
            assert np.max(np.abs(aligned - main.entries)) <= 1e-8


def test_window_independence(rng):
    vcfg = validate(random_config(rng, nph_max=3))
    lam = random_inband_energy(vcfg, rng)
    base = wavematch_smatrix(vcfg, lam, window=1).entries
    for window in (2, 5):
        other = wavematch_smatrix(vcfg, lam, window=window).entries
        assert np.max(np.abs(other - base)) <= 1e-10


def test_window_validation():
    vcfg = validate(make_config())
    with pytest.raises(ValueError):
        wavematch_smatrix(vcfg, 2.0, window=0)
