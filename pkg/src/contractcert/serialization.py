"""JSON schemas for matrices, certificates, plants, gains, and reports.

Matrices serialize as {"rows", "cols", "data"} with row-major data, or the
{"diag": [...]} shorthand for diagonal matrices. Parsing rejects NaN and Inf.
Reports are rendered with sorted keys and no timestamps so identical inputs
and seeds reproduce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
import os
from typing import Any

import numpy as np

from .conditions import Certificate, ConditionId, Rate, RateKind
from .integral_control import GainResult, PlantModel
from .parameterization import ParamSeed

SCHEMA_VERSION = "0.1.0"


def matrix_to_json(arr) -> dict:
    arr = np.asarray(arr, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    rows, cols = arr.shape
    return {"rows": rows, "cols": cols, "data": [float(v) for v in arr.ravel()]}


def diag_to_json(q) -> dict:
    return {"diag": [float(v) for v in np.asarray(q, dtype=float)]}


def _check_finite(values, what: str):
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite entries")
    return arr


def matrix_from_json(obj: Any, what: str = "matrix") -> np.ndarray:
    """Parse a matrix object; the diag shorthand expands to a full matrix."""
    if not isinstance(obj, dict):
        raise ValueError(f"{what} must be a JSON object")
    if "diag" in obj:
        return np.diag(_check_finite(obj["diag"], what))
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{what} needs rows, cols, data fields") from exc
    arr = _check_finite(data, what)
    if arr.size != rows * cols:
        raise ValueError(f"{what} data length {arr.size} != rows*cols {rows * cols}")
    return arr.reshape(rows, cols)


def diag_from_json(obj: Any, what: str = "diagonal matrix") -> np.ndarray:
    """Parse a diagonal matrix to its 1-D diagonal."""
    if isinstance(obj, dict) and "diag" in obj:
        return _check_finite(obj["diag"], what)
    mat = matrix_from_json(obj, what)
    if mat.shape[0] != mat.shape[1] or np.any(mat != np.diag(np.diag(mat))):
        raise ValueError(f"{what} must be diagonal")
    return np.diag(mat)


def rate_to_json(rate: Rate) -> dict:
    return {"kind": rate.kind.value, "value": float(rate.value)}


def rate_from_json(obj: Any) -> Rate:
    return Rate(RateKind(obj["kind"]), float(obj["value"]))


def certificate_to_json(cert: Certificate) -> dict:
    return {
        "condition": str(cert.cond),
        "rate": rate_to_json(cert.rate),
        "W": matrix_to_json(cert.w),
        "P": matrix_to_json(cert.p),
        "Q": diag_to_json(cert.q),
        "margin": float(cert.margin),
    }


def certificate_from_json(obj: Any) -> Certificate:
    return Certificate(
        cond=ConditionId.parse(obj["condition"]),
        w=matrix_from_json(obj["W"], "W"),
        p=matrix_from_json(obj["P"], "P"),
        q=diag_from_json(obj["Q"], "Q"),
        rate=rate_from_json(obj["rate"]),
        margin=float(obj["margin"]),
    )


def seed_to_json(seed: ParamSeed) -> dict:
    return {
        "d": [float(v) for v in seed.d],
        "S": matrix_to_json(seed.s),
        "V": matrix_to_json(seed.v),
        "c": float(seed.c),
    }


def seed_from_json(obj: Any) -> ParamSeed:
    return ParamSeed(
        d=_check_finite(obj["d"], "d"),
        s=matrix_from_json(obj["S"], "S"),
        v=matrix_from_json(obj["V"], "V"),
        c=float(obj["c"]),
    )


def plant_to_json(plant: PlantModel) -> dict:
    out = {
        "W": matrix_to_json(plant.w),
        "B": matrix_to_json(plant.b),
        "C": matrix_to_json(plant.c),
        "delta": float(plant.delta),
    }
    if plant.cert is not None:
        out["certificate"] = certificate_to_json(plant.cert)
    return out


def plant_from_json(obj: Any) -> PlantModel:
    cert = certificate_from_json(obj["certificate"]) if "certificate" in obj else None
    return PlantModel(
        w=matrix_from_json(obj["W"], "W"),
        b=matrix_from_json(obj["B"], "B"),
        c=matrix_from_json(obj["C"], "C"),
        delta=float(obj["delta"]),
        cert=cert,
    )


def gain_to_json(gain: GainResult) -> dict:
    return {
        "K": matrix_to_json(gain.k),
        "P": matrix_to_json(gain.p),
        "Q": diag_to_json(gain.q),
        "Y": matrix_to_json(gain.y),
        "c_r": float(gain.c_r),
        "margin": float(gain.margin),
    }


def gain_from_json(obj: Any) -> GainResult:
    return GainResult(
        k=matrix_from_json(obj["K"], "K"),
        p=matrix_from_json(obj["P"], "P"),
        q=diag_from_json(obj["Q"], "Q"),
        y=matrix_from_json(obj["Y"], "Y"),
        c_r=float(obj["c_r"]),
        margin=float(obj["margin"]),
    )


def load_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    # json.loads accepts bare NaN/Infinity by default; reject them.
    return json.loads(text, parse_constant=_reject_constant)


def _reject_constant(name: str):
    raise ValueError(f"non-finite literal {name!r} not allowed")


def render_report(report: dict) -> str:
    """Deterministic report rendering: sorted keys, two-space indent."""
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_atomic(path: str, text: str):
    """Write the full payload then rename into place."""
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)
