"""Structural assertion suite behind the `validate` CLI command and endpoint.

Each check returns (name, passed, detail).  The suite exercises unitarity,
the cross-section sum rule, reciprocity and mirror relations, the closed-form
spectrum, the zero-current theorems and the oracle agreement on small,
deterministic configurations.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import oracle
from .currents import NumericsSpec, compute_currents, contact_photon_current
from .dot import build_dot_hamiltonian, jc_spectrum_closed_form
from .model import ThermalState, make_config, validate
from .scattering import cross_sections, open_channels, smatrix
from .symmetry import classify, mirror_swap


def _sample_energies(vcfg, count, rng):
    edges = vcfg.band_edges()
    lo, hi = float(edges[0]), float(edges[-1])
    out = []
    while len(out) < count:
        lam = float(rng.uniform(lo, hi))
        if np.min(np.abs(edges - lam)) < 1e-6:
            continue
        if len(open_channels(vcfg, lam)) > 0:
            out.append(lam)
    return out


def run_suite() -> list[tuple[str, bool, str]]:
    rng = np.random.default_rng(20240817)
    checks: list[tuple[str, bool, str]] = []

    def record(name: str, fn: Callable[[], tuple[bool, str]]):
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        checks.append((name, ok, detail))

    config = make_config(v_left=0.5, v_right=0.0, omega=2.5, cutoff=5,
                         g_el=0.4, g_ph=0.3, spacing=1.2)
    vcfg = validate(config)

    def check_spectrum():
        ham = build_dot_hamiltonian(vcfg)
        numeric = np.linalg.eigvalsh(ham.matrix)
        exact = jc_spectrum_closed_form(vcfg, vcfg.cutoff - 1)
        dev = max(float(np.min(np.abs(numeric - x))) for x in exact)
        return dev < 1e-12, f"max closed-form deviation {dev:.2e}"

    def check_unitarity():
        worst = 0.0
        for lam in _sample_energies(vcfg, 40, rng):
            worst = max(worst, smatrix(vcfg, lam).unitarity_defect())
        return worst < 1e-10, f"worst defect {worst:.2e}"

    def check_sum_rule():
        worst = 0.0
        for lam in _sample_energies(vcfg, 20, rng):
            sig = cross_sections(smatrix(vcfg, lam)).sigma
            worst = max(worst, float(np.max(np.abs(sig.sum(0) - sig.sum(1)))))
        return worst < 1e-10, f"worst defect {worst:.2e}"

    def check_reciprocity():
        worst = 0.0
        for lam in _sample_energies(vcfg, 20, rng):
            sig = cross_sections(smatrix(vcfg, lam)).sigma
            worst = max(worst, float(np.max(np.abs(sig - sig.T))))
        return worst < 1e-10, f"worst asymmetry {worst:.2e}"

    mirror_cfg = make_config(v_left=0.0, v_right=0.0, omega=2.0, cutoff=4,
                             g_el=0.35, g_ph=0.25, contact_angle=math.pi / 4)
    mirror_vcfg = validate(mirror_cfg)

    def check_mirror():
        worst = 0.0
        for lam in _sample_energies(mirror_vcfg, 20, rng):
            table = cross_sections(smatrix(mirror_vcfg, lam))
            worst = max(worst, float(np.max(np.abs(mirror_swap(table).sigma - table.sigma))))
        return worst < 1e-10, f"worst mirror defect {worst:.2e}"

    def check_oracle():
        worst = 0.0
        small = validate(make_config(v_left=0.3, v_right=0.0, omega=2.0, cutoff=3,
                                     g_el=0.4, g_ph=0.3))
        for lam in _sample_energies(small, 5, rng):
            main = cross_sections(smatrix(small, lam)).sigma
            alt = cross_sections(oracle.wavematch_smatrix(small, lam)).sigma
            worst = max(worst, float(np.max(np.abs(main - alt))))
        return worst < 1e-10, f"worst oracle deviation {worst:.2e}"

    def check_currents():
        thermal = ThermalState(beta=2.0, mu_left=1.0, mu_right=0.2)
        numerics = NumericsSpec(rel_tol=1e-8)
        report = compute_currents(mirror_cfg, thermal, numerics)
        conserved = abs(report.j_total_left + report.j_total_right)
        decomposed = abs(report.j_total_left - report.j_contact_left - report.j_photon_left)
        ok = conserved < 1e-8 and decomposed == 0.0 and report.converged
        return ok, f"|J_l + J_r| = {conserved:.2e}"

    def check_contact_photon():
        thermal = ThermalState(beta=1.5, mu_left=0.8, mu_right=0.1)
        value = contact_photon_current(vcfg, thermal, debug=True)
        return abs(value) < 1e-12, f"debug integral {value:.2e}"

    def check_zero_contact_cases():
        # case E: equal potentials force a pointwise-zero contact integrand
        th = ThermalState(beta=2.0, mu_left=0.7, mu_right=0.7)
        flags = classify(config, th)
        report = compute_currents(config, th)
        ok = flags.case_E and report.j_contact_left == 0.0
        return ok, f"J^c(E) = {report.j_contact_left!r}"

    record("jc_spectrum_closed_form", check_spectrum)
    record("smatrix_unitarity", check_unitarity)
    record("cross_section_sum_rule", check_sum_rule)
    record("time_reversal_reciprocity", check_reciprocity)
    record("mirror_symmetry", check_mirror)
    record("oracle_agreement", check_oracle)
    record("current_conservation", check_currents)
    record("contact_photon_current_zero", check_contact_photon)
    record("zero_contact_current_case_E", check_zero_contact_cases)
    return checks
