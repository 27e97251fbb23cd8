"""Landauer-Buttiker current integrals for the dot-leads-resonator system.

All electron currents are reported with the elementary charge set to 1 (an
optional ``charge_scale`` rescales outputs).  Sign convention: a current is
the flux *entering* the named lead from the sample, so ``mu_left > mu_right``
drives ``j_*_left <= 0``.

Total and photon-resolved integrals share one spectral quadrature: at each
energy the full cross-section matrix over the channel ladder is evaluated
once and contracted against the occupation weights of every requested
current.  The contact current is a separate one-dimensional integral of the
pure electron problem over the band intersection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

import numpy as np

from .errors import CutoffNotConverged, ScenarioAssertionFailed
from .model import (
    BAND_WIDTH,
    ModelConfig,
    Side,
    ThermalState,
    ValidatedConfig,
    gibbs_photon_weights,
    make_config,
    validate,
    with_cutoff,
)
from .quadrature import integrate_adaptive, panels_from_points
from .scattering import SpectralKernel, contact_config
from .symmetry import SymmetryFlags, classify

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class NumericsSpec:
    """Tolerances and budgets for the quadrature and the photon cutoff policy."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-14
    cutoff_rel: float = 1e-8
    cutoff_abs: float = 1e-12
    max_panels: int = 4096
    nph_override: Optional[int] = None
    nph_max: int = 128
    charge_scale: float = 1.0


class LeadPair(NamedTuple):
    left: float
    right: float


@dataclass(frozen=True)
class CurrentReport:
    """Steady-state currents with quadrature and cutoff metadata.

    ``j_total_* = j_contact_* + j_photon_*`` holds exactly as computed.
    ``method`` records whether the photon-induced part came from the direct
    spectral formula (commuting cases) or from the total-minus-contact
    decomposition.
    """

    j_contact_left: float
    j_photon_left: float
    j_total_left: float
    j_total_right: float
    j_photon_number: float
    quad_error: float
    nph_used: int
    converged: bool
    method: str
    symmetry: SymmetryFlags
    j_contact_right: float = field(repr=False, default=0.0)
    j_photon_right: float = field(repr=False, default=0.0)

    def to_json_dict(self) -> dict:
        return {
            "j_contact_left": self.j_contact_left,
            "j_photon_left": self.j_photon_left,
            "j_total_left": self.j_total_left,
            "j_total_right": self.j_total_right,
            "j_photon_number": self.j_photon_number,
            "quad_error": self.quad_error,
            "nph_used": self.nph_used,
            "converged": self.converged,
            "method": self.method,
            "symmetry": self.symmetry.to_dict(),
        }


def fermi(thermal: ThermalState, side: Side, lam: float, n: int, omega: float) -> float:
    """Occupation f(lam - mu_side - n*omega) of the (side, n) channel."""
    return float(thermal.occupation(lam - thermal.mu(side) - n * omega))


def _coerce(config: Union[ModelConfig, ValidatedConfig]) -> ValidatedConfig:
    return config if isinstance(config, ValidatedConfig) else validate(config)


# ---------------------------------------------------------------------------
# contact-induced electron current (pure electron problem, photon-free)


class _ContactIntegrand:
    def __init__(self, vcfg: ValidatedConfig, thermal: ThermalState):
        self.kernel = SpectralKernel(contact_config(vcfg))
        self.thermal = thermal
        self.mu = np.array([thermal.mu_left, thermal.mu_right])

    def __call__(self, lam: np.ndarray) -> np.ndarray:
        sigma, _ = self.kernel.cross_sections_batch(lam)
        occ = self.thermal.occupation(lam[:, None] - self.mu[None, :])
        return (-(occ[:, 0] - occ[:, 1]) * sigma[:, 0, 1] / TWO_PI)[:, None]


def _contact_panels(vcfg: ValidatedConfig, thermal: ThermalState):
    lo = max(vcfg.lead(Side.LEFT).bias, vcfg.lead(Side.RIGHT).bias)
    hi = min(vcfg.lead(Side.LEFT).bias, vcfg.lead(Side.RIGHT).bias) + BAND_WIDTH
    points = []
    if math.isinf(thermal.beta) and thermal.distribution is None:
        # occupation difference is supported between the chemical potentials
        lo = max(lo, min(thermal.mu_left, thermal.mu_right))
        hi = min(hi, max(thermal.mu_left, thermal.mu_right))
        points = [thermal.mu_left, thermal.mu_right]
    return panels_from_points(lo, hi, points)


def contact_electron_current(
    config: Union[ModelConfig, ValidatedConfig],
    thermal: ThermalState,
    numerics: NumericsSpec = NumericsSpec(),
) -> tuple[LeadPair, float]:
    """Contact-induced electron current per lead and its quadrature error.

    J^c_left = -(1/2 pi) Int (f(lam - mu_l) - f(lam - mu_r)) sigma_c(lam) dlam
    over the band intersection; the right current is its exact negative.
    """
    vcfg = _coerce(config)
    if thermal.mu_left == thermal.mu_right and thermal.distribution is None:
        return LeadPair(0.0, -0.0), 0.0
    panels = _contact_panels(vcfg, thermal)
    if not panels:
        return LeadPair(0.0, -0.0), 0.0
    res = integrate_adaptive(
        _ContactIntegrand(vcfg, thermal),
        panels,
        rel_tol=numerics.rel_tol,
        abs_tol=numerics.abs_tol,
        max_panels=numerics.max_panels,
    )
    j_left = float(res.value[0])
    return LeadPair(j_left, -j_left), res.error


# ---------------------------------------------------------------------------
# spectral (total-energy) integrals over the full channel ladder


class SpectralCurrents(NamedTuple):
    total_left: float
    total_right: float
    photon: float
    photon_paired: float
    error: float


class _SpectralIntegrand:
    """Vector integrand [j_total_left, j_total_right, j_ph, j_ph_paired](lam).

    Evaluates in chunks; each chunk contracts the compressed cross-section
    block over the locally open channels only.
    """

    _CHUNK = 180

    def __init__(self, vcfg: ValidatedConfig, thermal: ThermalState):
        self.kernel = SpectralKernel(vcfg)
        self.thermal = thermal
        k = self.kernel
        self.shift = np.array(
            [thermal.mu(ch.side) + ch.n * vcfg.omega for ch in k.channels]
        )
        self.rho = gibbs_photon_weights(thermal.beta, vcfg.omega, vcfg.cutoff)[k.photon_number]
        self.nphot = k.photon_number

    def __call__(self, lam: np.ndarray) -> np.ndarray:
        out = np.empty((lam.shape[0], 4))
        for start in range(0, lam.shape[0], self._CHUNK):
            sl = slice(start, min(start + self._CHUNK, lam.shape[0]))
            out[sl] = self._chunk(lam[sl])
        return out

    def _chunk(self, lam: np.ndarray) -> np.ndarray:
        sigma, _, idx = self.kernel.cross_sections_chunk(lam)
        occ = self.thermal.occupation(lam[:, None] - self.shift[None, idx])
        p = self.rho[None, idx] * occ  # (K, m): rho(n) f(lam - mu - n w)
        left = self.kernel.is_left[idx]
        ndiff = self.nphot[idx][:, None] - self.nphot[idx][None, :]
        rowsum = sigma.sum(axis=2)
        into = np.einsum("kcj,kj->kc", sigma, p)
        tot = -(p * rowsum - into) / TWO_PI  # (K, m) contribution per out-channel
        tot_l = tot[:, left].sum(axis=1)
        tot_r = tot[:, ~left].sum(axis=1)
        jph = np.einsum("kcj,cj,kj->k", sigma, ndiff, p) / TWO_PI
        dp = p[:, None, :] - p[:, :, None]  # (K, out, in): P_in - P_out
        jph_paired = np.einsum("kcj,cj,kcj->k", sigma, ndiff * (ndiff > 0), dp) / TWO_PI
        return np.stack([tot_l, tot_r, jph, jph_paired], axis=1)


def _open_segments(vcfg: ValidatedConfig) -> list[tuple[float, float]]:
    """Maximal intervals where at least one channel is open.

    Spectral gaps are excluded: every cross section vanishes there, and the
    closed-channel dot system can host true bound states that would make the
    resolvent solve singular for no physical gain.
    """
    edges = vcfg.band_edges()
    bands = []
    for side in (Side.LEFT, Side.RIGHT):
        v = vcfg.lead(side).bias
        for n in range(vcfg.cutoff):
            bands.append((v + n * vcfg.omega, v + n * vcfg.omega + BAND_WIDTH))
    segments = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        if any(b_lo < mid < b_hi for b_lo, b_hi in bands):
            if segments and segments[-1][1] == lo:
                segments[-1] = (segments[-1][0], hi)
            else:
                segments.append((float(lo), float(hi)))
    return segments


def _spectral_panels(vcfg: ValidatedConfig, thermal: ThermalState):
    mu_max = max(thermal.mu_left, thermal.mu_right)
    top = mu_max + (vcfg.cutoff - 1) * vcfg.omega
    points = list(vcfg.band_edges())
    hi_cap = math.inf
    if thermal.distribution is None:
        if math.isinf(thermal.beta):
            hi_cap = top
            for mu in (thermal.mu_left, thermal.mu_right):
                points.extend(mu + n * vcfg.omega for n in range(vcfg.cutoff))
        else:
            hi_cap = top + 40.0 / thermal.beta  # occupancy tail < 1e-17 beyond
    panels = []
    for lo, hi in _open_segments(vcfg):
        panels.extend(panels_from_points(lo, min(hi, hi_cap), points))
    return panels


def spectral_currents(
    config: Union[ModelConfig, ValidatedConfig],
    thermal: ThermalState,
    numerics: NumericsSpec = NumericsSpec(),
) -> SpectralCurrents:
    """Total electron currents, photon current and its time-reversal-paired
    form, all from one shared adaptive quadrature at the config's cutoff."""
    vcfg = _coerce(config)
    panels = _spectral_panels(vcfg, thermal)
    if not panels:
        return SpectralCurrents(0.0, 0.0, 0.0, 0.0, 0.0)
    res = integrate_adaptive(
        _SpectralIntegrand(vcfg, thermal),
        panels,
        rel_tol=numerics.rel_tol,
        abs_tol=numerics.abs_tol,
        max_panels=numerics.max_panels,
    )
    v = res.value
    return SpectralCurrents(float(v[0]), float(v[1]), float(v[2]), float(v[3]), res.error)


# ---------------------------------------------------------------------------
# photon cutoff policy


def initial_cutoff(config: ModelConfig, thermal: ThermalState, numerics: NumericsSpec) -> int:
    """Starting photon cutoff: the energetic bound ceil((mu_max - lam_min)/w) + 3
    plus, at finite temperature, the Gibbs tail bound ceil(21/(beta w))."""
    if numerics.nph_override is not None:
        return max(1, int(numerics.nph_override))
    omega = config.photon.omega
    lam_min = min(config.left.bias, config.right.bias)
    mu_max = max(thermal.mu_left, thermal.mu_right)
    n0 = max(4, math.ceil((mu_max - lam_min) / omega) + 3, config.photon.cutoff)
    if not math.isinf(thermal.beta):
        n0 = max(n0, math.ceil(21.0 / (thermal.beta * omega)))
    return n0


def _moved(prev: SpectralCurrents, cur: SpectralCurrents, numerics: NumericsSpec) -> bool:
    scale = sum(abs(x) for x in (cur.total_left, cur.total_right, cur.photon))
    tol = max(numerics.cutoff_rel * scale, numerics.cutoff_abs)
    return any(
        abs(a - b) > tol
        for a, b in zip((prev.total_left, prev.total_right, prev.photon),
                        (cur.total_left, cur.total_right, cur.photon))
    )


def _converged_spectral(
    config: ModelConfig,
    thermal: ThermalState,
    numerics: NumericsSpec,
) -> tuple[SpectralCurrents, int, bool]:
    n = initial_cutoff(config, thermal, numerics)
    if n + 2 > numerics.nph_max:
        raise CutoffNotConverged(
            f"photon cutoff policy needs at least {n + 2} states (cap {numerics.nph_max})"
        )
    prev = spectral_currents(with_cutoff(config, n), thermal, numerics)
    while True:
        if n + 2 > numerics.nph_max:
            raise CutoffNotConverged(
                f"currents still moving at photon cutoff {n} (cap {numerics.nph_max})"
            )
        cur = spectral_currents(with_cutoff(config, n + 2), thermal, numerics)
        if not _moved(prev, cur, numerics):
            return cur, n + 2, True
        prev, n = cur, n + 2


# ---------------------------------------------------------------------------
# public current operations


def total_electron_current(
    config: Union[ModelConfig, ValidatedConfig],
    thermal: ThermalState,
    numerics: NumericsSpec = NumericsSpec(),
    check_cutoff: bool = True,
) -> LeadPair:
    """Total electron current per lead from the full-S cross sections."""
    vcfg = _coerce(config)
    if check_cutoff:
        cur, _, _ = _converged_spectral(vcfg.config, thermal, numerics)
    else:
        cur = spectral_currents(vcfg, thermal, numerics)
    return LeadPair(cur.total_left, cur.total_right)


def photon_induced_electron_current(
    config: Union[ModelConfig, ValidatedConfig],
    thermal: ThermalState,
    numerics: NumericsSpec = NumericsSpec(),
) -> tuple[LeadPair, str]:
    """Photon-induced electron current per lead, with its method tag."""
    report = compute_currents(_coerce(config).config, thermal, numerics)
    return LeadPair(report.j_photon_left, report.j_photon_right), report.method


def photon_current(
    config: Union[ModelConfig, ValidatedConfig],
    thermal: ThermalState,
    numerics: NumericsSpec = NumericsSpec(),
) -> float:
    """Photon production rate from photon-number-changing cross sections."""
    report = compute_currents(_coerce(config).config, thermal, numerics)
    return report.j_photon_number


def contact_photon_current(
    config: Union[ModelConfig, ValidatedConfig],
    thermal: ThermalState,
    numerics: NumericsSpec = NumericsSpec(),
    debug: bool = False,
) -> float:
    """Exactly zero: contact scattering conserves the photon number.

    With ``debug=True`` the defining integral is evaluated; its integrand is
    the per-block unitarity defect of s_c weighted by the photon number, so
    the result must stay below 1e-12 in magnitude.
    """
    if not debug:
        return 0.0
    vcfg = _coerce(config)
    kernel = SpectralKernel(contact_config(vcfg))
    rho = gibbs_photon_weights(thermal.beta, vcfg.omega, vcfg.cutoff)
    mu = np.array([thermal.mu_left, thermal.mu_right])

    def integrand(lam_el: np.ndarray) -> np.ndarray:
        # tr(rho_ac (Q - S_c* Q S_c)) with Q = -n per photon block reduces to
        # sum_n n * rho(n) * f * (unitarity defect of s_c at lam - n w)
        g = kernel.surface_gf_batch(lam_el)
        m = kernel.greens_batch(lam_el, g)
        sq = np.sqrt(-2.0 * vcfg.g_el ** 2 * g.imag)
        s = np.eye(2)[None, :, :] - 1j * (sq[:, :, None] * sq[:, None, :]) * m
        defect = np.eye(2)[None, :, :] - np.einsum("kij,kil->kjl", s.conj(), s)
        occ = thermal.occupation(lam_el[:, None] - mu[None, :])
        per_block = -np.einsum("kjj,kj->k", defect.real, occ)
        weights = float(np.sum(np.arange(vcfg.cutoff) * rho))
        return (weights * per_block / TWO_PI)[:, None]

    lo = min(vcfg.lead(Side.LEFT).bias, vcfg.lead(Side.RIGHT).bias)
    hi = max(vcfg.lead(Side.LEFT).bias, vcfg.lead(Side.RIGHT).bias) + BAND_WIDTH
    edges = [vcfg.lead(s).bias + e for s in (Side.LEFT, Side.RIGHT) for e in (0.0, BAND_WIDTH)]
    res = integrate_adaptive(integrand, panels_from_points(lo, hi, edges),
                             rel_tol=numerics.rel_tol, abs_tol=numerics.abs_tol,
                             max_panels=numerics.max_panels)
    return float(res.value[0])


def compute_currents(
    config: ModelConfig,
    thermal: ThermalState,
    numerics: NumericsSpec = NumericsSpec(),
) -> CurrentReport:
    """Full current report at a converged photon cutoff.

    The cutoff policy starts from :func:`initial_cutoff` and accepts once a
    +2 increase moves no reported current by more than
    max(cutoff_rel * scale, cutoff_abs), scale = sum of current magnitudes.
    """
    vcfg = validate(config)
    flags = classify(config, thermal)
    (jc_l, jc_r), jc_err = contact_electron_current(vcfg, thermal, numerics)
    cur, nph_used, converged = _converged_spectral(config, thermal, numerics)
    if flags.commuting_case():
        method = "direct"
        jph_l, jph_r = cur.total_left, cur.total_right
    else:
        method = "decomposition"
        jph_l, jph_r = cur.total_left - jc_l, cur.total_right - jc_r
    quad_error = max(jc_err, cur.error)
    if flags.time_reversible:
        scale = max(1.0, abs(cur.photon))
        if abs(cur.photon - cur.photon_paired) > max(100.0 * quad_error, 1e-9 * scale):
            raise ScenarioAssertionFailed(
                "photon current disagrees with its time-reversal-paired form: "
                f"{cur.photon!r} vs {cur.photon_paired!r}"
            )
    e = numerics.charge_scale
    return CurrentReport(
        j_contact_left=e * jc_l,
        j_photon_left=e * jph_l,
        j_total_left=e * (jc_l + jph_l),
        j_total_right=e * (jc_r + jph_r),
        j_photon_number=cur.photon,
        quad_error=quad_error,
        nph_used=nph_used,
        converged=converged,
        method=method,
        symmetry=flags,
        j_contact_right=e * jc_r,
        j_photon_right=e * jph_r,
    )


def light_absorbing_scenario(
    omega: float,
    beta: float = 1.0,
    g_el: float = 0.2,
    g_ph: float = 0.2,
    spacing: float = 1.0,
    numerics: NumericsSpec = NumericsSpec(),
    tol: float = 1e-9,
) -> CurrentReport:
    """Light-absorbing setup: v_r = 0, v_l = omega >= 4, mu_l = 0, mu_r = omega.

    The bands are disjoint (the contact current vanishes identically) and the
    right band is flooded while the shifted left band is empty, so photons
    are absorbed while lifting electrons into the left lead.  Postconditions:
    J_ph <= tol, and the photon-induced electron current into the left lead
    equals -J_ph (one absorbed photon per transferred electron).
    """
    if not omega >= BAND_WIDTH:
        raise ValueError(f"scenario requires omega >= {BAND_WIDTH}, got {omega!r}")
    config = make_config(
        v_left=omega, v_right=0.0, spacing=spacing,
        contact_angle=math.pi / 4, contact_phase=0.0,
        omega=omega, cutoff=4, g_el=g_el, g_ph=g_ph,
    )
    thermal = ThermalState(beta=beta, mu_left=0.0, mu_right=omega)
    report = compute_currents(config, thermal, numerics)
    bound = max(tol, 10.0 * report.quad_error)
    if report.j_photon_number > bound:
        raise ScenarioAssertionFailed(
            f"expected photon absorption, got J_ph = {report.j_photon_number!r}"
        )
    if abs(report.j_photon_left + report.j_photon_number) > bound:
        raise ScenarioAssertionFailed(
            "photon-to-electron conversion identity violated: "
            f"J^ph_el,left = {report.j_photon_left!r}, J_ph = {report.j_photon_number!r}"
        )
    return report
