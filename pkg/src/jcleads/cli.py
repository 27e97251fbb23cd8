"""Command-line driver: a thin client over the service layer.

Requests are built from an INI config file and posted to the FastAPI app,
in-process by default or to a remote instance via ``--server URL``.  Outputs
are deterministic CSV/JSON files (17 significant digits, LF endings).

Exit codes: 0 success, 1 config error, 2 numerical non-convergence,
3 assertion failure in `validate`.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional

from .configio import LoadedRun, load_run, write_csv, write_json
from .errors import ConfigError

REPORT_COLUMNS = (
    "j_contact_left", "j_photon_left", "j_total_left", "j_total_right",
    "j_photon_number", "quad_error", "nph_used", "converged", "method",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jcl",
        description="Scattering and steady-state currents for the dot-leads-resonator model",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("spectrum", "closed-form vs numeric dot-photon eigenvalues"),
        ("smatrix", "cross-section CSV over an energy grid"),
        ("currents", "one current report as JSON"),
        ("sweep", "current reports along a parameter axis (CSV)"),
        ("convergence", "currents vs photon cutoff (CSV)"),
        ("validate", "run the structural assertion suite"),
        ("serve", "run the HTTP service"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="INI config file")
        p.add_argument("--out", help="output path (defaults to stdout)")
        p.add_argument("--tol", type=float, help="relative quadrature tolerance override")
        p.add_argument("--nph", type=int, help="force the photon cutoff")
        p.add_argument("--sweep", help="axis as KEY:START:STOP:STEPS")
        p.add_argument("--debug-dump-matrices", action="store_true",
                       help="dump the dot-photon Hamiltonian in both bases as CSV")
        p.add_argument("--server", help="base URL of a running service (default: in-process)")
        if name == "serve":
            p.add_argument("--host", default="127.0.0.1")
            p.add_argument("--port", type=int, default=8000)
    return parser


def make_client(server: Optional[str]):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=600.0)
    from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def parse_sweep(spec: str):
    parts = spec.split(":")
    if len(parts) != 4:
        raise ConfigError("sweep", f"expected KEY:START:STOP:STEPS, got {spec!r}")
    key, start, stop, steps = parts
    try:
        return key, float(start), float(stop), int(steps)
    except ValueError as exc:
        raise ConfigError("sweep", f"malformed axis spec {spec!r}") from exc


def config_payload(run: LoadedRun, args) -> dict:
    cfg = run.config
    numerics = {
        "rel_tol": args.tol if args.tol is not None else run.numerics.rel_tol,
        "abs_tol": run.numerics.abs_tol,
        "cutoff_rel": run.numerics.cutoff_rel,
        "nph": args.nph if args.nph is not None else run.numerics.nph_override,
        "nph_max": run.numerics.nph_max,
        "charge_scale": run.numerics.charge_scale,
    }
    beta = run.thermal.beta
    return {
        "config": {
            "left": {"bias": cfg.left.bias},
            "right": {"bias": cfg.right.bias},
            "dot": {
                "spacing": cfg.dot.spacing,
                "level_base": cfg.dot.level_base,
                "contact_angle": cfg.dot.contact_angle,
                "contact_phase": cfg.dot.contact_phase,
            },
            "photon": {"omega": cfg.photon.omega, "cutoff": cfg.photon.cutoff},
            "g_el": cfg.g_el,
            "g_ph": cfg.g_ph,
        },
        "thermal": {
            "beta": "inf" if math.isinf(beta) else beta,
            "mu_left": run.thermal.mu_left,
            "mu_right": run.thermal.mu_right,
        },
        "numerics": numerics,
    }


def _emit(text: str, out: Optional[str]):
    if not out:
        sys.stdout.write(text)


def _fail_from_response(resp) -> int:
    detail = ""
    try:
        detail = resp.json().get("detail", "")
    except Exception:
        detail = resp.text
    sys.stderr.write(f"error ({resp.status_code}): {detail}\n")
    if resp.status_code in (400, 422):
        return 1
    return 2


def _dump_matrices(run: LoadedRun, out: Optional[str]):
    from .dot import CONTACT_BASIS, EIGENBASIS, build_dot_hamiltonian, dump_matrix_csv
    from .model import validate

    vcfg = validate(run.config)
    stem = (out or "jcl_debug") + ".hdot"
    for tag in (EIGENBASIS, CONTACT_BASIS):
        dump_matrix_csv(build_dot_hamiltonian(vcfg, tag), f"{stem}_{tag}.csv")


def run_command(args) -> int:
    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    if args.command == "validate":
        client = make_client(args.server)
        resp = client.post("/validate", json={})
        if resp.status_code != 200:
            return _fail_from_response(resp)
        payload = resp.json()
        for check in payload["checks"]:
            status = "PASS" if check["passed"] else "FAIL"
            sys.stdout.write(f"[{status}] {check['name']}: {check['detail']}\n")
        sys.stdout.write(f"{payload['passed']} passed, {payload['failed']} failed\n")
        if args.out:
            write_json(args.out, payload)
        return 0 if payload["failed"] == 0 else 3

    if not args.config:
        sys.stderr.write("error: --config is required for this command\n")
        return 1
    try:
        run = load_run(args.config)
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1

    if args.debug_dump_matrices:
        _dump_matrices(run, args.out)

    client = make_client(args.server)
    payload = config_payload(run, args)

    try:
        if args.command == "spectrum":
            body = {"config": payload["config"]}
            resp = client.post("/spectrum", json=body)
            if resp.status_code != 200:
                return _fail_from_response(resp)
            rows = [(r["index"], r["closed_form"], r["numeric"], r["abs_error"])
                    for r in resp.json()["rows"]]
            _emit(write_csv(args.out, ("index", "closed_form", "numeric", "abs_error"), rows),
                  args.out)
            return 0

        if args.command == "smatrix":
            if args.sweep:
                key, start, stop, steps = parse_sweep(args.sweep)
                if key != "lambda":
                    raise ConfigError("sweep", "smatrix sweeps over the energy axis 'lambda'")
            else:
                from .model import validate as _validate

                edges = _validate(run.config).band_edges()
                start, stop, steps = float(edges[0]), float(edges[-1]), 201
            span = stop - start
            lams = [start + span * (i + 0.5) / steps for i in range(steps)]
            resp = client.post("/smatrix", json={"config": payload["config"], "lambdas": lams})
            if resp.status_code != 200:
                return _fail_from_response(resp)
            rows = [(r["lambda"], r["n"], r["alpha"], r["m"], r["kappa"], r["sigma"])
                    for r in resp.json()["rows"]]
            _emit(write_csv(args.out, ("lambda", "n", "alpha", "m", "kappa", "sigma"), rows),
                  args.out)
            return 0

        if args.command == "currents":
            resp = client.post("/currents", json=payload)
            if resp.status_code != 200:
                return _fail_from_response(resp)
            _emit(write_json(args.out, resp.json()), args.out)
            return 0

        if args.command == "sweep":
            if not args.sweep:
                raise ConfigError("sweep", "--sweep KEY:START:STOP:STEPS is required")
            key, start, stop, steps = parse_sweep(args.sweep)
            body = {**payload, "axis": {"key": key, "start": start, "stop": stop, "steps": steps}}
            resp = client.post("/sweep", json=body)
            if resp.status_code != 200:
                return _fail_from_response(resp)
            rows = [
                tuple([r[key]] + [r[c] for c in REPORT_COLUMNS])
                for r in resp.json()["rows"]
            ]
            _emit(write_csv(args.out, (key,) + REPORT_COLUMNS, rows), args.out)
            return 0

        if args.command == "convergence":
            resp = client.post("/convergence", json=payload)
            if resp.status_code != 200:
                return _fail_from_response(resp)
            cols = ("nph", "j_contact_left", "j_photon_left", "j_total_left",
                    "j_total_right", "j_photon_number")
            rows = [tuple(r[c] for c in cols) for r in resp.json()["rows"]]
            _emit(write_csv(args.out, cols, rows), args.out)
            return 0
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1

    sys.stderr.write(f"error: unknown command {args.command!r}\n")
    return 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run_command(args)


if __name__ == "__main__":
    sys.exit(main())
