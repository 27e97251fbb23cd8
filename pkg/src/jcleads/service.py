"""FastAPI service exposing the engine.

Request/response schemas are pydantic models mirroring the core dataclasses;
handlers convert, delegate to the core package and serialize.  Configuration
problems map to HTTP 400 and numerical failures to HTTP 409, so thin clients
can translate them into exit codes without parsing messages.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Optional, Union

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, field_validator

from . import validation
from .currents import (
    CurrentReport,
    NumericsSpec,
    compute_currents,
    contact_electron_current,
    initial_cutoff,
    spectral_currents,
)
from .dot import build_dot_hamiltonian, jc_spectrum_closed_form
from .errors import ConfigError, JclError, NumericalError
from .model import (
    DotParams,
    LeadParams,
    ModelConfig,
    PhotonParams,
    Side,
    ThermalState,
    validate,
    with_cutoff,
)
from .scattering import sweep_rows
from .symmetry import classify


class LeadModel(BaseModel):
    bias: float = 0.0


class DotModel(BaseModel):
    spacing: float
    level_base: float = 0.0
    contact_angle: float = 0.0
    contact_phase: float = 0.0


class PhotonModel(BaseModel):
    omega: float
    cutoff: int = 4


class ConfigModel(BaseModel):
    left: LeadModel
    right: LeadModel
    dot: DotModel
    photon: PhotonModel
    g_el: float = 0.0
    g_ph: float = 0.0

    def to_core(self) -> ModelConfig:
        return ModelConfig(
            left=LeadParams(bias=self.left.bias, side=Side.LEFT),
            right=LeadParams(bias=self.right.bias, side=Side.RIGHT),
            dot=DotParams(
                spacing=self.dot.spacing,
                level_base=self.dot.level_base,
                contact_angle=self.dot.contact_angle,
                contact_phase=self.dot.contact_phase,
            ),
            photon=PhotonParams(omega=self.photon.omega, cutoff=self.photon.cutoff),
            g_el=self.g_el,
            g_ph=self.g_ph,
        )


class ThermalModel(BaseModel):
    beta: Union[float, str] = 1.0  # "inf" selects zero temperature
    mu_left: float = 0.0
    mu_right: float = 0.0

    @field_validator("beta")
    @classmethod
    def _parse_beta(cls, v):
        if isinstance(v, str):
            if v.strip().lower() in ("inf", "+inf", "infinity"):
                return math.inf
            return float(v)
        return v

    def to_core(self) -> ThermalState:
        return ThermalState(beta=float(self.beta), mu_left=self.mu_left, mu_right=self.mu_right)


class NumericsModel(BaseModel):
    rel_tol: float = 1e-8
    abs_tol: float = 1e-14
    cutoff_rel: float = 1e-8
    nph: Optional[int] = None
    nph_max: int = 128
    charge_scale: float = 1.0

    def to_core(self) -> NumericsSpec:
        return NumericsSpec(
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            cutoff_rel=self.cutoff_rel,
            nph_override=self.nph,
            nph_max=self.nph_max,
            charge_scale=self.charge_scale,
        )


class SymmetryModel(BaseModel):
    time_reversible: bool
    mirror_symmetric: bool
    case_E: bool
    case_S: bool
    case_C: bool


class CurrentReportModel(BaseModel):
    j_contact_left: float
    j_photon_left: float
    j_total_left: float
    j_total_right: float
    j_photon_number: float
    quad_error: float
    nph_used: int
    converged: bool
    method: str
    symmetry: SymmetryModel

    @classmethod
    def from_core(cls, report: CurrentReport) -> "CurrentReportModel":
        return cls(**report.to_json_dict())


class SpectrumRequest(BaseModel):
    config: ConfigModel
    n_max: Optional[int] = None


class SpectrumRow(BaseModel):
    index: int
    closed_form: float
    numeric: float
    abs_error: float


class SpectrumResponse(BaseModel):
    rows: list[SpectrumRow]
    max_deviation: float


class SMatrixRequest(BaseModel):
    config: ConfigModel
    lambdas: list[float]


class SMatrixRow(BaseModel):
    lam: float = Field(serialization_alias="lambda")
    n: int
    alpha: str
    m: int
    kappa: str
    sigma: float


class SMatrixResponse(BaseModel):
    rows: list[SMatrixRow]


class CurrentsRequest(BaseModel):
    config: ConfigModel
    thermal: ThermalModel = ThermalModel()
    numerics: NumericsModel = NumericsModel()


class SweepAxis(BaseModel):
    key: str
    start: float
    stop: float
    steps: int


class SweepRequest(CurrentsRequest):
    axis: SweepAxis


class ConvergenceRequest(CurrentsRequest):
    nph_values: Optional[list[int]] = None


class ValidationCheck(BaseModel):
    name: str
    passed: bool
    detail: str


class ValidationResponse(BaseModel):
    passed: int
    failed: int
    checks: list[ValidationCheck]


AXIS_KEYS = (
    "g_el", "g_ph", "omega", "spacing", "level_base", "contact_angle",
    "contact_phase", "bias_left", "bias_right", "beta", "mu_left", "mu_right",
)


def apply_axis(config: ModelConfig, thermal: ThermalState, key: str, value: float):
    if key == "g_el":
        return replace(config, g_el=value), thermal
    if key == "g_ph":
        return replace(config, g_ph=value), thermal
    if key == "omega":
        return replace(config, photon=replace(config.photon, omega=value)), thermal
    if key in ("spacing", "level_base", "contact_angle", "contact_phase"):
        return replace(config, dot=replace(config.dot, **{key: value})), thermal
    if key == "bias_left":
        return replace(config, left=replace(config.left, bias=value)), thermal
    if key == "bias_right":
        return replace(config, right=replace(config.right, bias=value)), thermal
    if key in ("beta", "mu_left", "mu_right"):
        return config, replace(thermal, **{key: value})
    raise ConfigError("sweep.key", f"unknown axis {key!r}; expected one of {AXIS_KEYS}")


def sweep_workers(n_points: int) -> int:
    raw = os.environ.get("JCL_THREADS", "").strip()
    if raw in ("", "1"):
        return 1
    cap = os.cpu_count() or 1
    if raw == "0":
        return max(1, min(cap, n_points))
    try:
        return max(1, min(int(raw), n_points))
    except ValueError:
        return 1


app = FastAPI(title="jcleads", description="Quantum dot-leads-resonator transport engine")


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=f"{type(exc).__name__}: {exc}") from exc
    except NumericalError as exc:
        raise HTTPException(status_code=409, detail=f"{type(exc).__name__}: {exc}") from exc
    except JclError as exc:
        raise HTTPException(status_code=400, detail=f"{type(exc).__name__}: {exc}") from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/spectrum", response_model=SpectrumResponse)
def spectrum(req: SpectrumRequest) -> SpectrumResponse:
    def run():
        vcfg = validate(req.config.to_core())
        n_max = req.n_max if req.n_max is not None else vcfg.cutoff - 1
        if n_max > vcfg.cutoff - 1:
            raise ConfigError("n_max", "closed-form blocks beyond cutoff-1 are truncated")
        exact = jc_spectrum_closed_form(vcfg, n_max)
        numeric = np.linalg.eigvalsh(build_dot_hamiltonian(vcfg).matrix)
        rows = []
        for i, x in enumerate(exact):
            nearest = float(numeric[np.argmin(np.abs(numeric - x))])
            rows.append(SpectrumRow(index=i, closed_form=float(x), numeric=nearest,
                                    abs_error=abs(nearest - float(x))))
        dev = max((r.abs_error for r in rows), default=0.0)
        return SpectrumResponse(rows=rows, max_deviation=dev)

    return _guard(run)


@app.post("/smatrix", response_model=SMatrixResponse)
def smatrix_endpoint(req: SMatrixRequest) -> SMatrixResponse:
    def run():
        vcfg = validate(req.config.to_core())
        rows = [
            SMatrixRow(lam=lam, n=n, alpha=alpha, m=m, kappa=kappa, sigma=sigma)
            for (lam, n, alpha, m, kappa, sigma) in sweep_rows(vcfg, req.lambdas)
        ]
        return SMatrixResponse(rows=rows)

    return _guard(run)


@app.post("/currents", response_model=CurrentReportModel)
def currents_endpoint(req: CurrentsRequest) -> CurrentReportModel:
    def run():
        report = compute_currents(req.config.to_core(), req.thermal.to_core(),
                                  req.numerics.to_core())
        return CurrentReportModel.from_core(report)

    return _guard(run)


@app.post("/sweep")
def sweep_endpoint(req: SweepRequest) -> dict:
    def run():
        if req.axis.steps < 1:
            raise ConfigError("sweep.steps", "need at least one step")
        if req.axis.key not in AXIS_KEYS:
            raise ConfigError("sweep.key", f"unknown axis {req.axis.key!r}")
        base_cfg = req.config.to_core()
        base_th = req.thermal.to_core()
        numerics = req.numerics.to_core()
        values = np.linspace(req.axis.start, req.axis.stop, req.axis.steps)

        def one(value: float) -> dict:
            cfg, th = apply_axis(base_cfg, base_th, req.axis.key, float(value))
            report = compute_currents(cfg, th, numerics)
            return {req.axis.key: float(value), **report.to_json_dict()}

        workers = sweep_workers(len(values))
        if workers == 1:
            rows = [one(v) for v in values]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(one, values))  # submission order: deterministic
        return {"rows": rows}

    return _guard(run)


@app.post("/convergence")
def convergence_endpoint(req: ConvergenceRequest) -> dict:
    """Raw currents at a ladder of forced photon cutoffs."""

    def run():
        cfg = req.config.to_core()
        th = req.thermal.to_core()
        numerics = req.numerics.to_core()
        flags = classify(cfg, th)
        (jc_l, jc_r), _ = contact_electron_current(validate(cfg), th, numerics)
        if req.nph_values:
            values = sorted(set(int(n) for n in req.nph_values))
        else:
            base = numerics.nph_override or initial_cutoff(cfg, th, numerics)
            values = [base + 2 * i for i in range(5)]
        e = numerics.charge_scale
        rows = []
        for nph in values:
            cur = spectral_currents(validate(with_cutoff(cfg, nph)), th, numerics)
            if flags.commuting_case():
                jph_l, jph_r = cur.total_left, cur.total_right
            else:
                jph_l, jph_r = cur.total_left - jc_l, cur.total_right - jc_r
            rows.append({
                "nph": nph,
                "j_contact_left": e * jc_l,
                "j_photon_left": e * jph_l,
                "j_total_left": e * (jc_l + jph_l),
                "j_total_right": e * (jc_r + jph_r),
                "j_photon_number": cur.photon,
            })
        return {"rows": rows}

    return _guard(run)


@app.post("/validate", response_model=ValidationResponse)
def validate_endpoint() -> ValidationResponse:
    checks = [ValidationCheck(name=n, passed=p, detail=d) for n, p, d in validation.run_suite()]
    return ValidationResponse(
        passed=sum(c.passed for c in checks),
        failed=sum(not c.passed for c in checks),
        checks=checks,
    )
