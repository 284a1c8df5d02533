"""JSON state and channel files.

State file::

    {"dims": [d_a, d_b], "re": [[...]], "im": [[...]]}

Channel file::

    {"kraus": [{"re": [[...]], "im": [[...]]}, ...]}
"""

from __future__ import annotations

import json

import numpy as np

from .channels import KrausMap, QuantumChannel
from .errors import DimensionMismatch, ValidationError
from .linalg import BipartiteState, DensityMatrix


class FileFormatError(ValidationError):
    invariant = "file-format"


def _read(path):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: not valid JSON ({exc})") from exc


def _matrix(obj, where: str) -> np.ndarray:
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"{where}: expected 're' and 'im' numeric 2-D arrays") from exc
    if re.ndim != 2 or re.shape != im.shape:
        raise FileFormatError(f"{where}: 're' and 'im' must be 2-D arrays of equal shape")
    return re + 1j * im


def _encode(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def load_state(path) -> BipartiteState:
    obj = _read(path)
    if not isinstance(obj, dict) or "dims" not in obj:
        raise FileFormatError(f"{path}: state file needs a 'dims' entry")
    try:
        da, db = (int(x) for x in obj["dims"])
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"{path}: 'dims' must be a pair of positive integers") from exc
    if da < 1 or db < 1:
        raise FileFormatError(f"{path}: 'dims' must be positive")
    m = _matrix(obj, str(path))
    if m.shape != (da * db, da * db):
        raise DimensionMismatch(f"{path}: matrix shape {m.shape} does not match dims {da}x{db}")
    return BipartiteState(da, db, DensityMatrix(m))


def _write(target, obj):
    if hasattr(target, "write"):
        json.dump(obj, target, indent=1)
        target.write("\n")
        return
    with open(target, "w") as fh:
        _write(fh, obj)


def save_state(target, state: BipartiteState):
    """Write ``state`` to a path or an open text file."""
    _write(target, {"dims": [state.dim_a, state.dim_b], **_encode(state.matrix)})


def load_channel(path, allow_nontp: bool = False) -> KrausMap:
    obj = _read(path)
    if not isinstance(obj, dict) or not isinstance(obj.get("kraus"), list) or not obj["kraus"]:
        raise FileFormatError(f"{path}: channel file needs a non-empty 'kraus' list")
    ops = [_matrix(k, f"{path}: kraus[{i}]") for i, k in enumerate(obj["kraus"])]
    if len({k.shape for k in ops}) != 1 or ops[0].shape[0] != ops[0].shape[1]:
        raise DimensionMismatch(f"{path}: Kraus operators must be square and of equal size")
    return KrausMap(ops) if allow_nontp else QuantumChannel(ops)


def save_channel(target, phi: KrausMap):
    _write(target, {"kraus": [_encode(k) for k in phi.kraus_ops]})
