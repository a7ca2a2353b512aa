"""JSON wire formats: complex scalars as [re, im], matrices row-major,
Lagrangians by frame or graph unitary, paths by samples or parametric form.

Every parser validates shape and rejects unknown fields with SchemaError so
the CLI can map malformed input to its own exit code.
"""

from __future__ import annotations

from typing import Any, Optional

import numpy as np

from .errors import SchemaError
from .model_dirac import Circle, Interval, ModelOperator, build_model
from .spectral_flow import HermitianPath
from .symplectic_core import (
    Lagrangian,
    SymplecticSpace,
    lagrangian_from_frame,
    lagrangian_from_phi,
    space_from_gamma,
    standard_space,
)
from .unitary_invariants import UnitaryPath

__all__ = [
    "complex_to_json", "complex_from_json", "matrix_to_json", "matrix_from_json",
    "space_from_json", "lagrangian_from_json", "unitary_path_from_json",
    "hermitian_path_from_json", "model_from_json", "require_fields",
]


def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(obj) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    if (isinstance(obj, (list, tuple)) and len(obj) == 2
            and all(isinstance(x, (int, float)) for x in obj)):
        return complex(obj[0], obj[1])
    raise SchemaError(f"complex scalar must be a number or [re, im], got {obj!r}")


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[complex_to_json(z) for z in row] for row in m]


def matrix_from_json(obj, what: str = "matrix") -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise SchemaError(f"{what} must be a nonempty array of rows")
    rows = []
    width = None
    for row in obj:
        if not isinstance(row, list):
            raise SchemaError(f"{what} rows must be arrays")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SchemaError(f"{what} has ragged rows ({len(row)} vs {width})")
        rows.append([complex_from_json(z) for z in row])
    return np.array(rows, dtype=complex)


def require_fields(obj: dict, required: tuple, optional: tuple = (),
                   what: str = "object") -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"{what} must be a JSON object")
    missing = [k for k in required if k not in obj]
    if missing:
        raise SchemaError(f"{what} is missing fields {missing}")
    unknown = [k for k in obj if k not in required and k not in optional]
    if unknown:
        raise SchemaError(f"{what} has unknown fields {unknown}")


def space_from_json(obj, tol: float = 1e-9) -> SymplecticSpace:
    if isinstance(obj, str):
        if obj.startswith("standard:"):
            try:
                return standard_space(int(obj.split(":", 1)[1]))
            except ValueError as exc:
                raise SchemaError(f"bad standard space spec {obj!r}") from exc
        raise SchemaError(f"space string must be 'standard:n', got {obj!r}")
    return space_from_gamma(matrix_from_json(obj, "gamma"), tol)


def lagrangian_from_json(obj, space: Optional[SymplecticSpace] = None,
                         tol: float = 1e-9) -> Lagrangian:
    """{"space": ..., "frame": matrix} or {"space": ..., "phi": matrix};
    the space may be supplied externally instead."""
    require_fields(obj, (), ("space", "frame", "phi"), "Lagrangian")
    if "space" in obj:
        space = space_from_json(obj["space"], tol)
    if space is None:
        raise SchemaError("Lagrangian needs a space (inline or from context)")
    if ("frame" in obj) == ("phi" in obj):
        raise SchemaError("Lagrangian needs exactly one of 'frame' or 'phi'")
    if "frame" in obj:
        return lagrangian_from_frame(space, matrix_from_json(obj["frame"], "frame"), tol)
    return lagrangian_from_phi(space, matrix_from_json(obj["phi"], "phi"), tol)


def _samples_from_json(obj, what: str):
    if not isinstance(obj, list) or len(obj) < 2:
        raise SchemaError(f"{what} needs at least two [t, matrix] samples")
    out = []
    for item in obj:
        if not isinstance(item, list) or len(item) != 2:
            raise SchemaError(f"{what} samples must be [t, matrix] pairs")
        t, m = item
        if not isinstance(t, (int, float)):
            raise SchemaError(f"{what} sample time must be a number")
        out.append((float(t), matrix_from_json(m, f"{what} sample")))
    return out


def unitary_path_from_json(obj) -> UnitaryPath:
    """{"samples": [[t, U], ...]} or {"parametric": {"kind": ..., ...}}."""
    require_fields(obj, (), ("samples", "parametric"), "unitary path")
    if ("samples" in obj) == ("parametric" in obj):
        raise SchemaError("unitary path needs exactly one of 'samples' or 'parametric'")
    if "samples" in obj:
        return UnitaryPath(_samples_from_json(obj["samples"], "unitary path"))
    par = obj["parametric"]
    if not isinstance(par, dict) or "kind" not in par:
        raise SchemaError("parametric path needs a 'kind'")
    kind = par["kind"]
    if kind == "exp-interp":
        require_fields(par, ("kind", "u0", "u1"), ("samples",), "exp-interp path")
        u0 = matrix_from_json(par["u0"], "u0")
        u1 = matrix_from_json(par["u1"], "u1")
        from scipy.linalg import expm

        from .unitary_invariants import _principal_log_matrix

        rel = _principal_log_matrix(u1 @ u0.conj().T)
        n = int(par.get("samples", 17))
        return UnitaryPath.from_generator(lambda t: expm(t * rel) @ u0,
                                          initial_samples=n)
    if kind == "rotation":
        require_fields(par, ("kind", "phases", "rates"), ("frame", "samples"),
                       "rotation path")
        phases = np.asarray(par["phases"], dtype=float)
        rates = np.asarray(par["rates"], dtype=float)
        if phases.shape != rates.shape or phases.ndim != 1:
            raise SchemaError("rotation path needs equal-length phases and rates")
        v = (matrix_from_json(par["frame"], "frame") if "frame" in par
             else np.eye(len(phases), dtype=complex))
        n = int(par.get("samples", 33))

        def gen(t):
            d = np.exp(1j * (phases + rates * t))
            return v @ np.diag(d) @ v.conj().T

        return UnitaryPath.from_generator(gen, initial_samples=n)
    raise SchemaError(f"unknown parametric kind {kind!r}")


def hermitian_path_from_json(obj) -> HermitianPath:
    """{"samples": [[t, H], ...]} or {"parametric": {"kind": "linear", ...}}."""
    require_fields(obj, (), ("samples", "parametric"), "hermitian path")
    if ("samples" in obj) == ("parametric" in obj):
        raise SchemaError("hermitian path needs exactly one of 'samples' or 'parametric'")
    if "samples" in obj:
        return HermitianPath(_samples_from_json(obj["samples"], "hermitian path"))
    par = obj["parametric"]
    if not isinstance(par, dict) or par.get("kind") != "linear":
        raise SchemaError("hermitian parametric paths support kind 'linear'")
    require_fields(par, ("kind", "h0", "h1"), ("samples",), "linear path")
    h0 = matrix_from_json(par["h0"], "h0")
    h1 = matrix_from_json(par["h1"], "h1")
    n = int(par.get("samples", 17))
    return HermitianPath.from_generator(lambda t: (1 - t) * h0 + t * h1,
                                        initial_samples=n)


def model_from_json(obj, tol: float = 1e-9) -> dict:
    """Parse the model document; returns the operator plus optional pieces.

    { "gamma": ..., "A": ..., "geometry": {"interval": L} | {"circle": C},
      "boundary": {"P": Lagrangian, "Q": Lagrangian}?, "window": ...?,
      "eta": {"N_max": ..., "tol": ...}?, "stretch": {...}?, "glue": {...}? }
    """
    require_fields(obj, ("gamma", "A", "geometry"),
                   ("boundary", "window", "eta", "stretch", "glue"), "model")
    space = space_from_json(obj["gamma"], tol)
    a = matrix_from_json(obj["A"], "A")
    geo = obj["geometry"]
    require_fields(geo, (), ("interval", "circle"), "geometry")
    if ("interval" in geo) == ("circle" in geo):
        raise SchemaError("geometry needs exactly one of 'interval' or 'circle'")
    geometry = (Interval(float(geo["interval"])) if "interval" in geo
                else Circle(float(geo["circle"])))
    op = build_model(space, a, geometry, tol)
    out: dict[str, Any] = {"op": op, "space": space}
    if "boundary" in obj:
        require_fields(obj["boundary"], (), ("P", "Q"), "boundary")
        if "P" in obj["boundary"]:
            out["p"] = lagrangian_from_json(obj["boundary"]["P"], space, tol)
        if "Q" in obj["boundary"]:
            out["q"] = lagrangian_from_json(obj["boundary"]["Q"], space, tol)
    out["window"] = float(obj.get("window", 10.0))
    eta = obj.get("eta", {})
    require_fields(eta, (), ("N_max", "tol"), "eta")
    out["n_max"] = int(eta.get("N_max", 2000))
    out["eta_tol"] = float(eta.get("tol", 1e-9))
    out["stretch"] = obj.get("stretch", {})
    out["glue"] = obj.get("glue", {})
    return out
