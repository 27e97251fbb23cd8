import math

import numpy as np
import pytest

from conftest import random_config

from jcleads.currents import (
    NumericsSpec,
    compute_currents,
    contact_electron_current,
    contact_photon_current,
    fermi,
    initial_cutoff,
    light_absorbing_scenario,
    spectral_currents,
)
from jcleads.errors import ScenarioAssertionFailed
from jcleads.model import (
    Side,
    ThermalState,
    gibbs_photon_weights,
    make_config,
    validate,
    with_cutoff,
)

NUM = NumericsSpec()


def make_thermal(rng, equal_mu=False, beta_range=(1.0, 4.0)):
    mu_l = float(rng.uniform(-1.0, 2.5))
    mu_r = mu_l if equal_mu else float(rng.uniform(-1.0, 2.5))
    return ThermalState(beta=float(rng.uniform(*beta_range)), mu_left=mu_l, mu_right=mu_r)


def test_fermi_examples():
    th = ThermalState(beta=2.0, mu_left=0.3, mu_right=-0.1)
    assert fermi(th, Side.LEFT, 0.3 + 2 * 1.5, 2, 1.5) == pytest.approx(0.5, abs=1e-15)
    th1 = ThermalState(beta=1.0, mu_left=0.0, mu_right=0.0)
    assert fermi(th1, Side.RIGHT, math.log(3.0), 0, 1.0) == pytest.approx(0.25, abs=1e-15)
    th_inf = ThermalState(beta=math.inf, mu_left=1.0, mu_right=0.0)
    assert fermi(th_inf, Side.LEFT, 0.9, 0, 1.0) == 1.0
    assert fermi(th_inf, Side.LEFT, 3.1, 1, 2.0) == 0.0


def test_contact_current_zero_cases():
    # (E) equal potentials
    cfg = make_config(v_left=0.4, v_right=0.0, omega=2.0, cutoff=3, g_el=0.5)
    (jl, jr), _ = contact_electron_current(validate(cfg), ThermalState(beta=1.0, mu_left=0.7, mu_right=0.7), NUM)
    assert jl == 0.0 and jr == 0.0
    # (S) disjoint bands
    cfg_s = make_config(v_left=4.5, v_right=0.0, omega=2.0, cutoff=3, g_el=0.5)
    (jl, jr), _ = contact_electron_current(validate(cfg_s), ThermalState(beta=1.0, mu_left=2.0, mu_right=0.2), NUM)
    assert jl == 0.0
    # (C) aligned contact basis: transmission is exactly zero
    cfg_c = make_config(v_left=0.4, v_right=0.0, omega=2.0, cutoff=3, g_el=0.5, contact_angle=0.0)
    (jl, jr), _ = contact_electron_current(validate(cfg_c), ThermalState(beta=1.0, mu_left=2.0, mu_right=0.2), NUM)
    assert abs(jl) <= 1e-12


def test_contact_current_sign_and_antisymmetry():
    cfg = make_config(v_left=0.2, v_right=0.0, omega=3.0, cutoff=3, g_el=0.5)
    th = ThermalState(beta=2.0, mu_left=1.5, mu_right=0.3)
    (jl, jr), err = contact_electron_current(validate(cfg), th, NUM)
    assert jl < 0  # current leaves the fuller left lead
    assert jl == -jr
    assert err < 1e-9


def test_total_equals_contact_without_photon_coupling(rng):
    for _ in range(3):
        cfg = random_config(rng, nph_max=4, omega_range=(1.5, 4.0))
        cfg = with_cutoff(cfg, 3)
        cfg = make_config(
            v_left=cfg.left.bias, v_right=cfg.right.bias, spacing=cfg.dot.spacing,
            contact_angle=cfg.dot.contact_angle, contact_phase=cfg.dot.contact_phase,
            omega=cfg.photon.omega, cutoff=3, g_el=cfg.g_el, g_ph=0.0,
        )
        th = make_thermal(rng)
        (jc_l, _), jc_err = contact_electron_current(validate(cfg), th, NUM)
        cur = spectral_currents(validate(cfg), th, NUM)
        assert abs(cur.total_left - jc_l) <= 10 * (jc_err + cur.error) + 1e-10
        assert abs(cur.photon) <= 1e-12


def test_report_decomposition_and_conservation(rng):
    for _ in range(4):
        cfg = random_config(rng, nph_max=4, omega_range=(1.5, 5.0))
        th = make_thermal(rng)
        report = compute_currents(cfg, th, NUM)
        assert report.j_total_left == report.j_contact_left + report.j_photon_left
        assert abs(report.j_total_left + report.j_total_right) <= 1e-8
        assert report.converged


def test_zero_temperature_equilibrium_is_quiet():
    cfg = make_config(v_left=0.3, v_right=0.0, omega=2.0, cutoff=3, g_el=0.5, g_ph=0.4)
    th = ThermalState(beta=math.inf, mu_left=1.0, mu_right=1.0)
    report = compute_currents(cfg, th, NUM)
    assert report.j_total_left == 0.0
    assert report.j_photon_number == 0.0


def test_direct_method_matches_decomposition_in_special_cases(rng):
    for special in ("E", "S", "C"):
        cfg = random_config(rng, nph_max=4, omega_range=(1.5, 4.5), special=special)
        th = make_thermal(rng, equal_mu=(special == "E"))
        report = compute_currents(cfg, th, NUM)
        assert report.method == "direct"
        # difference method: total integral minus the (theorem-zero) contact part
        cur = spectral_currents(validate(with_cutoff(cfg, report.nph_used)), th, NUM)
        jph_difference = cur.total_left - report.j_contact_left
        assert abs(report.j_photon_left - jph_difference) <= 1e-8


def test_mirror_symmetric_case_e_zero_electron_current(rng):
    cfg = make_config(v_left=0.1, v_right=0.1, omega=2.0, cutoff=4,
                      g_el=0.5, g_ph=0.35, contact_angle=math.pi / 4)
    th = ThermalState(beta=1.0, mu_left=1.6, mu_right=1.6)
    report = compute_currents(cfg, th, NUM)
    assert abs(report.j_photon_left) <= 1e-8
    assert abs(report.j_total_left) <= 1e-8
    assert report.j_photon_number > 1e-6  # emits even with zero electron current


def test_photon_current_nonnegative_case_e_time_reversible(rng):
    for _ in range(3):
        cfg = random_config(rng, nph_max=4, omega_range=(1.2, 3.5), special="E")
        cfg = make_config(
            v_left=cfg.left.bias, v_right=cfg.right.bias, spacing=cfg.dot.spacing,
            contact_angle=cfg.dot.contact_angle, contact_phase=0.0,
            omega=cfg.photon.omega, cutoff=cfg.photon.cutoff, g_el=cfg.g_el, g_ph=cfg.g_ph,
        )
        th = make_thermal(rng, equal_mu=True)
        report = compute_currents(cfg, th, NUM)
        assert report.j_photon_number >= -1e-9


def test_zero_temperature_photon_current_nonnegative(rng):
    cfg = make_config(v_left=0.5, v_right=0.0, omega=1.8, cutoff=4, g_el=0.5, g_ph=0.4,
                      contact_angle=0.7)
    th = ThermalState(beta=math.inf, mu_left=2.4, mu_right=1.1)
    report = compute_currents(cfg, th, NUM)
    assert report.j_photon_number >= -1e-12


def test_photon_induced_current_zero_when_bands_fit_in_omega():
    # v_l = v_r = v with omega >= v + 4 leaves a single open photon sector
    cfg = make_config(v_left=0.5, v_right=0.5, omega=4.6, cutoff=3, g_el=0.5, g_ph=0.5,
                      contact_angle=0.9)
    th = ThermalState(beta=1.0, mu_left=1.4, mu_right=1.4)
    report = compute_currents(cfg, th, NUM)
    assert abs(report.j_photon_left) <= 1e-9


def test_photon_assisted_current_sign_raised_left_band():
    # v_l = 2, v_r = 0, omega = 4, equal potentials: emission cascade l -> r
    cfg = make_config(v_left=2.0, v_right=0.0, omega=4.0, cutoff=4, g_el=0.4, g_ph=0.4,
                      contact_angle=math.pi / 4)
    th = ThermalState(beta=1.0, mu_left=1.0, mu_right=1.0)
    report = compute_currents(cfg, th, NUM)
    assert report.j_photon_left <= 1e-9
    assert report.j_photon_number >= -1e-12
    assert abs(report.j_photon_left + report.j_photon_number) <= 1e-9


def test_monotone_photon_occupation_weights():
    # rho(n) f(lam - mu - n w) strictly decreasing in n underpins the sign results
    beta, omega, mu = 1.3, 1.7, 0.4
    rho = gibbs_photon_weights(beta, omega, 12)
    for lam in np.linspace(-3.0, 8.0, 23):
        vals = rho * 1.0 / (1.0 + np.exp(np.clip(beta * (lam - mu - np.arange(12) * omega), -500, 500)))
        assert np.all(np.diff(vals) < 0)


def test_contact_photon_current_is_zero():
    cfg = make_config(v_left=0.4, v_right=0.0, omega=2.2, cutoff=4, g_el=0.5, g_ph=0.45)
    th = ThermalState(beta=1.5, mu_left=1.2, mu_right=0.3)
    assert contact_photon_current(cfg, th) == 0.0
    assert abs(contact_photon_current(cfg, th, debug=True)) <= 1e-12
    assert contact_photon_current(make_config(g_el=0.0), th) == 0.0


def test_light_absorbing_scenario():
    for beta in (0.5, 1.0, 2.0):
        report = light_absorbing_scenario(4.0, beta=beta, g_el=0.2, g_ph=0.2)
        assert report.j_photon_number <= 1e-9
        assert abs(report.j_photon_left + report.j_photon_number) <= 1e-9
        assert report.symmetry.case_S
    with pytest.raises(ValueError):
        light_absorbing_scenario(3.0)


def test_light_absorbing_scenario_trivial_coupling():
    report = light_absorbing_scenario(4.0, beta=1.0, g_el=0.2, g_ph=0.0)
    assert report.j_photon_number == 0.0
    assert report.j_photon_left == 0.0


def test_gauge_shift_invariance(rng):
    shift = 0.41
    cfg = make_config(v_left=0.6, v_right=-0.2, omega=2.1, cutoff=4, g_el=0.45, g_ph=0.3,
                      contact_angle=0.8, contact_phase=0.9, level_base=0.1)
    th = ThermalState(beta=1.4, mu_left=1.1, mu_right=0.2)
    cfg2 = make_config(v_left=0.6 + shift, v_right=-0.2 + shift, omega=2.1, cutoff=4,
                       g_el=0.45, g_ph=0.3, contact_angle=0.8, contact_phase=0.9,
                       level_base=0.1 + shift)
    th2 = ThermalState(beta=1.4, mu_left=1.1 + shift, mu_right=0.2 + shift)
    r1 = compute_currents(cfg, th, NUM)
    r2 = compute_currents(cfg2, th2, NUM)
    for field in ("j_contact_left", "j_photon_left", "j_total_left", "j_photon_number"):
        assert abs(getattr(r1, field) - getattr(r2, field)) <= 1e-9


def test_initial_cutoff_covers_gibbs_tail():
    cfg = make_config(omega=1.0, cutoff=4)
    th = ThermalState(beta=0.5, mu_left=1.0, mu_right=1.0)
    assert initial_cutoff(cfg, th, NUM) >= 42
    th_inf = ThermalState(beta=math.inf, mu_left=1.0, mu_right=1.0)
    assert initial_cutoff(cfg, th_inf, NUM) == 4  # energetic bound only
    assert initial_cutoff(cfg, th, NumericsSpec(nph_override=6)) == 6


def test_cutoff_convergence_metadata(rng):
    cfg = make_config(v_left=0.0, v_right=0.3, omega=2.4, cutoff=2, g_el=0.5, g_ph=0.4,
                      contact_angle=0.7)
    th = ThermalState(beta=1.1, mu_left=1.3, mu_right=0.2)
    report = compute_currents(cfg, th, NUM)
    assert report.converged
    # +2 beyond the accepted cutoff moves nothing beyond the policy tolerance
    cur_a = spectral_currents(validate(with_cutoff(cfg, report.nph_used)), th, NUM)
    cur_b = spectral_currents(validate(with_cutoff(cfg, report.nph_used + 2)), th, NUM)
    scale = sum(abs(x) for x in (cur_b.total_left, cur_b.total_right, cur_b.photon))
    for a, b in zip(cur_a[:3], cur_b[:3]):
        assert abs(a - b) <= max(1e-8 * scale, 1e-12)


def test_charge_scale_applies_to_electron_currents():
    cfg = make_config(v_left=0.2, v_right=0.0, omega=2.6, cutoff=3, g_el=0.5, g_ph=0.3)
    th = ThermalState(beta=1.5, mu_left=1.2, mu_right=0.1)
    r1 = compute_currents(cfg, th, NUM)
    r2 = compute_currents(cfg, th, NumericsSpec(charge_scale=2.0))
    assert r2.j_total_left == pytest.approx(2.0 * r1.j_total_left, rel=1e-12)
    assert r2.j_photon_number == pytest.approx(r1.j_photon_number, rel=1e-12)


def test_paired_photon_form_raises_on_disagreement(monkeypatch):
    # tampered paired value must trip the time-reversal consistency check
    import jcleads.currents as cur_mod

    cfg = make_config(v_left=0.0, v_right=0.0, omega=2.0, cutoff=3, g_el=0.5, g_ph=0.4)
    th = ThermalState(beta=1.0, mu_left=1.0, mu_right=1.0)
    original = cur_mod.spectral_currents

    def tampered(*args, **kwargs):
        out = original(*args, **kwargs)
        return out._replace(photon_paired=out.photon_paired + 1.0)

    monkeypatch.setattr(cur_mod, "spectral_currents", tampered)
    with pytest.raises(ScenarioAssertionFailed):
        compute_currents(cfg, th, NUM)


def test_public_current_functions():
    cfg = make_config(v_left=0.3, v_right=0.0, omega=2.4, cutoff=3, g_el=0.5, g_ph=0.35,
                      contact_angle=0.8)
    th = ThermalState(beta=1.5, mu_left=1.2, mu_right=0.2)
    from jcleads.currents import (
        photon_current,
        photon_induced_electron_current,
        total_electron_current,
    )

    total = total_electron_current(cfg, th, NUM)
    assert abs(total.left + total.right) <= 1e-8
    (jph_l, jph_r), method = photon_induced_electron_current(cfg, th, NUM)
    assert method == "decomposition"
    (jc_l, jc_r), _ = contact_electron_current(validate(cfg), th, NUM)
    assert abs(total.left - jc_l - jph_l) <= 1e-8
    jph = photon_current(cfg, th, NUM)
    report = compute_currents(cfg, th, NUM)
    assert jph == report.j_photon_number
