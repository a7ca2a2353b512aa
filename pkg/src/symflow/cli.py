"""Batch front-end: scenario files in, JSON-line reports out.

Exit codes: 0 all good, 1 an asserted identity failed, 2 schema error,
3 numerical resolution failure (refinement or eta convergence).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Any, Callable, Optional

import numpy as np

from . import model_dirac as md
from . import verification
from .errors import (
    BracketingFailure,
    ConvergenceTooSlow,
    RefinementExhausted,
    SchemaError,
    SymflowError,
    WindowEscape,
)
from .lagrangian_indices import (
    LagrangianPairPath,
    m_pairing,
    maslov,
    maslov_orientation_check,
    tau_mu,
    tsig,
    tsig_tau_mu_conversion,
)
from .serialization import (
    complex_to_json,
    hermitian_path_from_json,
    lagrangian_from_json,
    matrix_from_json,
    matrix_to_json,
    model_from_json,
    require_fields,
    space_from_json,
    unitary_path_from_json,
)
from .spectral_flow import eta_finite, sf_eta_consistency, spectral_flow
from .symplectic_core import intersection_dim, subspace_distance
from .unitary_invariants import tau_w, tr_log, wind, wind_plus_inverse_check

RESOLUTION_ERRORS = (RefinementExhausted, ConvergenceTooSlow, BracketingFailure,
                     WindowEscape)


def _crossing_log_json(log) -> list:
    return [{"t": c.t, "direction": c.direction,
             "phase_before": c.phase_before, "phase_after": c.phase_after}
            for c in log.crossings]


def _op_tr_log(inputs, tol):
    require_fields(inputs, ("U",), (), "tr_log inputs")
    val = tr_log(matrix_from_json(inputs["U"], "U"), tol)
    return {"value": complex_to_json(val)}


def _op_wind(inputs, tol):
    require_fields(inputs, ("path",), (), "wind inputs")
    r = wind(unitary_path_from_json(inputs["path"]), tol)
    return {"value": r.value, "log": _crossing_log_json(r.log)}


def _op_tau_w(inputs, tol):
    require_fields(inputs, ("U", "V"), (), "tau_w inputs")
    val = tau_w(matrix_from_json(inputs["U"], "U"), matrix_from_json(inputs["V"], "V"),
                tol)
    return {"value": val}


def _op_wind_inverse(inputs, tol):
    require_fields(inputs, ("path",), (), "wind_plus_inverse_check inputs")
    wf, wi, d0, d1 = wind_plus_inverse_check(unitary_path_from_json(inputs["path"]), tol)
    return {"value": [wf, wi, d0, d1], "pass": True}


def _triple_inputs(inputs, names, tol):
    space = space_from_json(inputs["space"], tol) if "space" in inputs else None
    return [lagrangian_from_json(inputs[k], space, tol) for k in names]


def _op_tau_mu(inputs, tol):
    require_fields(inputs, ("P", "Q", "R"), ("space",), "tau_mu inputs")
    p, q, r = _triple_inputs(inputs, ("P", "Q", "R"), tol)
    return {"value": tau_mu(p, q, r, tol)}


def _op_m(inputs, tol):
    require_fields(inputs, ("V", "W"), ("space",), "m inputs")
    v, w = _triple_inputs(inputs, ("V", "W"), tol)
    return {"value": m_pairing(v, w, tol)}


def _op_tsig(inputs, tol):
    require_fields(inputs, ("V", "W", "U"), ("space",), "tsig inputs")
    v, w, u = _triple_inputs(inputs, ("V", "W", "U"), tol)
    return {"value": tsig(v, w, u, tol)}


def _op_conversion(inputs, tol):
    require_fields(inputs, ("V", "W", "U"), ("space",), "conversion inputs")
    v, w, u = _triple_inputs(inputs, ("V", "W", "U"), tol)
    rec = tsig_tau_mu_conversion(v, w, u, tol)
    return {"value": rec, "pass": True}


def _op_intersection(inputs, tol):
    require_fields(inputs, ("L1", "L2"), ("space",), "intersection inputs")
    l1, l2 = _triple_inputs(inputs, ("L1", "L2"), tol)
    return {"value": intersection_dim(l1, l2, tol)}


def _op_maslov(inputs, tol):
    require_fields(inputs, ("space", "samples"), (), "maslov inputs")
    space = space_from_json(inputs["space"], tol)
    samples = []
    for item in inputs["samples"]:
        if not isinstance(item, list) or len(item) != 3:
            raise SchemaError("maslov samples must be [t, frame_f, frame_g]")
        t, ff, fg = item
        samples.append((float(t),
                        lagrangian_from_json({"frame": ff}, space, tol),
                        lagrangian_from_json({"frame": fg}, space, tol)))
    r = maslov(LagrangianPairPath(samples), tol)
    return {"value": r.value, "log": _crossing_log_json(r.log)}


def _op_eta_finite(inputs, tol):
    require_fields(inputs, ("H",), (), "eta_finite inputs")
    eta, ker, red = eta_finite(matrix_from_json(inputs["H"], "H"), tol)
    return {"value": {"eta": eta, "dim_ker": ker, "eta_tilde": red}}


def _op_spectral_flow(inputs, tol):
    require_fields(inputs, ("path",), (), "spectral_flow inputs")
    r = spectral_flow(hermitian_path_from_json(inputs["path"]))
    return {"value": r.value, "log": _crossing_log_json(r.log)}


def _op_sf_eta(inputs, tol):
    require_fields(inputs, ("path",), (), "sf_eta inputs")
    rec = sf_eta_consistency(hermitian_path_from_json(inputs["path"]))
    return {"value": rec, "pass": True}


OPS: dict[str, Callable] = {
    "tr_log": _op_tr_log,
    "wind": _op_wind,
    "tau_w": _op_tau_w,
    "wind_plus_inverse_check": _op_wind_inverse,
    "tau_mu": _op_tau_mu,
    "m": _op_m,
    "tsig": _op_tsig,
    "tsig_tau_mu_conversion": _op_conversion,
    "intersection_dim": _op_intersection,
    "maslov": _op_maslov,
    "eta_finite": _op_eta_finite,
    "spectral_flow": _op_spectral_flow,
    "sf_eta": _op_sf_eta,
}


def _default_tol(args) -> float:
    if getattr(args, "tol", None) is not None:
        return float(args.tol)
    env = os.environ.get("SYMFLOW_TOL")
    return float(env) if env else 1e-9


def run_scenario(scenario: dict, default_tol: float, timing: bool = False) -> dict:
    require_fields(scenario, ("name", "op", "inputs"),
                   ("seed", "tolerances"), "scenario")
    name = scenario["name"]
    op = scenario["op"]
    if op not in OPS:
        raise SchemaError(f"unknown op {op!r}; available: {sorted(OPS)}")
    tolerances = scenario.get("tolerances", {})
    require_fields(tolerances, (), ("tol",), "tolerances")
    tol = float(tolerances.get("tol", default_tol))
    t0 = time.perf_counter()
    report = {"name": name, "op": op, "tolerances": {"tol": tol}}
    report.update(OPS[op](scenario["inputs"], tol))
    report.setdefault("pass", True)
    if timing:
        report["wall_ms"] = round(1000.0 * (time.perf_counter() - t0), 3)
    return report


def _emit(reports, out_path: Optional[str], pretty: bool):
    text = "\n".join(
        json.dumps(r, indent=2 if pretty else None,
                   separators=None if pretty else (",", ":"), sort_keys=True,
                   default=_json_default)
        for r in reports
    ) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return complex_to_json(obj)
    raise TypeError(f"cannot serialize {type(obj)}")


def cmd_run(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read scenario file: {exc}", file=sys.stderr)
        return 2
    if isinstance(doc, dict) and "scenarios" in doc:
        require_fields(doc, ("scenarios",), (), "scenario file")
        scenarios = doc["scenarios"]
    elif isinstance(doc, list):
        scenarios = doc
    elif isinstance(doc, dict):
        scenarios = [doc]
    else:
        print("scenario file must hold an object or an array", file=sys.stderr)
        return 2
    default_tol = _default_tol(args)
    reports = []
    worst = 0
    for sc in scenarios:
        try:
            reports.append(run_scenario(sc, default_tol, timing=args.timing))
            if not reports[-1].get("pass", True):
                worst = max(worst, 1)
        except SchemaError as exc:
            print(f"schema error: {exc}", file=sys.stderr)
            return 2
        except RESOLUTION_ERRORS as exc:
            reports.append({"name": sc.get("name", "?"), "op": sc.get("op", "?"),
                            "error": type(exc).__name__, "detail": str(exc),
                            "pass": False})
            worst = max(worst, 3)
        except SymflowError as exc:
            reports.append({"name": sc.get("name", "?"), "op": sc.get("op", "?"),
                            "error": type(exc).__name__, "detail": str(exc),
                            "pass": False})
            worst = max(worst, 1)
    _emit(reports, args.out, args.pretty)
    return worst


def cmd_verify(args) -> int:
    try:
        reports = verification.run_suite(args.suite, seed=args.seed, count=args.count)
    except KeyError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    lines = []
    ok = True
    for rep in reports:
        lines.extend(rep.lines())
        ok &= rep.ok
    lines.append(f"result: {'all identities verified' if ok else 'FAILURES PRESENT'} "
                 f"(seed {args.seed})")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def cmd_model(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            doc = json.load(fh)
        parsed = model_from_json(doc, _default_tol(args))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read model file: {exc}", file=sys.stderr)
        return 2
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    op = parsed["op"]
    try:
        if args.what == "spectrum":
            if isinstance(op.geometry, md.Circle):
                lams = md.circle_spectrum(op, parsed["window"])
            else:
                if "p" not in parsed or "q" not in parsed:
                    raise SchemaError("interval spectrum needs boundary P and Q")
                lams = md.interval_spectrum(op, parsed["p"], parsed["q"],
                                            parsed["window"])
            report = {"kind": "spectrum", "window": parsed["window"],
                      "eigenvalues": [float(x) for x in lams]}
        elif args.what == "cauchy":
            dbs = md.double_boundary(op)
            lx = md.cauchy_data(op, dbs)
            report = {"kind": "cauchy", "frame": matrix_to_json(lx.frame),
                      "phi": matrix_to_json(lx.phi)}
        elif args.what == "stretch":
            stretch = parsed["stretch"]
            require_fields(stretch, (), ("nu", "lengths"), "stretch")
            nu = float(stretch.get("nu", 0.0))
            dbs = md.double_boundary(op)
            lim = md.adiabatic_limit(op, nu=nu, dbs=dbs)
            lengths = stretch.get("lengths") or [2.0, 5.0, 10.0, 20.0, 50.0]
            dists = [
                {"length": float(r),
                 "distance": subspace_distance(
                     md.cauchy_data(op, dbs, side="+", length=float(r)), lim)}
                for r in lengths
            ]
            report = {"kind": "stretch", "nu": nu, "limit_frame":
                      matrix_to_json(lim.frame), "distances": dists}
        elif args.what == "glue":
            glue = parsed["glue"]
            require_fields(glue, ("length_minus", "P"), ("n_max",), "glue")
            op_minus = md.build_model(op.space, op.a_matrix,
                                      md.Interval(float(glue["length_minus"])))
            dbs = md.double_boundary(op)
            p = lagrangian_from_json(glue["P"], dbs.space)
            rec = md.glue_verify(op, op_minus, p,
                                 n_max=int(glue.get("n_max", parsed["n_max"])),
                                 eta_tol=parsed["eta_tol"])
            report = {"kind": "glue", **rec, "pass": True}
        else:  # pragma: no cover - argparse restricts choices
            raise SchemaError(f"unknown model action {args.what!r}")
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except RESOLUTION_ERRORS as exc:
        _emit([{"kind": args.what, "error": type(exc).__name__, "detail": str(exc),
                "pass": False}], args.out, args.pretty)
        return 3
    except SymflowError as exc:
        _emit([{"kind": args.what, "error": type(exc).__name__, "detail": str(exc),
                "pass": False}], args.out, args.pretty)
        return 1
    _emit([report], args.out, args.pretty)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symflow",
        description="symplectic spectral invariants: batch scenarios, "
                    "verification suites, and the solvable model operator")
    parser.add_argument("--tol", type=float, default=None,
                        help="default tolerance (overrides SYMFLOW_TOL)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario file")
    p_run.add_argument("file")
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--pretty", action="store_true")
    p_run.add_argument("--timing", action="store_true",
                       help="include wall-clock fields (breaks byte determinism)")
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", help="run a seeded verification suite")
    p_verify.add_argument("suite",
                          choices=sorted(verification.SUITES) + ["all"])
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--count", type=int, default=None)
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_model = sub.add_parser("model", help="model-operator computations")
    p_model.add_argument("what", choices=["spectrum", "cauchy", "stretch", "glue"])
    p_model.add_argument("file")
    p_model.add_argument("--out", default=None)
    p_model.add_argument("--pretty", action="store_true")
    p_model.set_defaults(func=cmd_model)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
