"""Reading and writing state files.

JSON schemas for every file type ship in ``qsep/schemas``. Structural checks
go through ``jsonschema``; index bounds, norms and weights are checked here so
the error message can point at the offending entry.
"""

from __future__ import annotations

import hashlib
import json
import math
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np
from referencing import Registry, Resource

from qsep.errors import InvalidInput
from qsep.state import (
    CoefficientTensor,
    DensityMatrix,
    PureState,
    RankTwoState,
    as_profile,
    make_pure_state,
)

WEIGHT_SUM_TOL = 1e-9
# already-normalized input is kept bit-for-bit so files round-trip exactly
NORMALIZED_TOL = 1e-15


class MalformedInput(InvalidInput):
    """File content that cannot be parsed into the requested object."""


@lru_cache(maxsize=None)
def _schema(name: str) -> dict:
    return json.loads(resources.files("qsep").joinpath("schemas", name).read_text())


@lru_cache(maxsize=None)
def _validator(name: str):
    registry = Registry().with_resources(
        (s["$id"], Resource.from_contents(s))
        for s in (_schema(n) for n in ("state.schema.json", "mixed.schema.json", "report.schema.json"))
    )
    return jsonschema.Draft202012Validator(_schema(name), registry=registry)


def validate(obj, schema_name: str):
    errors = sorted(_validator(schema_name).iter_errors(obj), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise MalformedInput(f"{where}: {err.message}")


def read_json(path) -> tuple[object, str]:
    """Return the parsed document and ``sha256:<hex>`` of the raw bytes."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from exc
    try:
        obj = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedInput(f"{path}: not valid JSON ({exc})") from exc
    return obj, "sha256:" + hashlib.sha256(raw).hexdigest()


def _state_tensor(obj, paper_indices: bool, where: str) -> CoefficientTensor:
    dims = tuple(obj["dims"])
    profile = as_profile(dims)
    amp = np.zeros(dims, dtype=np.complex128)
    shift = 1 if paper_indices else 0
    for n, entry in enumerate(obj["amplitudes"]):
        index = entry["index"]
        pos = f"{where}amplitudes[{n}].index"
        if len(index) != len(dims):
            raise MalformedInput(f"{pos} has {len(index)} entries, expected {len(dims)}")
        index = tuple(i - shift for i in index)
        for k, (i, d) in enumerate(zip(index, dims)):
            if not 0 <= i < d:
                lo, hi = shift, d - 1 + shift
                raise MalformedInput(f"{pos}[{k}] = {i + shift} out of range [{lo}, {hi}]")
        value = complex(entry.get("re", 0.0), entry.get("im", 0.0))
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise MalformedInput(f"{where}amplitudes[{n}] is not finite")
        amp[index] += value
    if not np.any(amp):
        raise MalformedInput(f"{where}amplitudes: all amplitudes are zero")
    return CoefficientTensor(profile, amp)


def parse_state(obj, paper_indices: bool = False, where: str = "") -> PureState:
    if not where:
        validate(obj, "state.schema.json")
    tensor = _state_tensor(obj, paper_indices, where)
    if abs(tensor.norm_sq - 1.0) <= NORMALIZED_TOL:
        return PureState(tensor)
    return make_pure_state(tensor)


def _weighted(obj, key, paper_indices):
    weights, states = [], []
    for n, item in enumerate(obj[key]):
        weights.append(float(item["weight"]))
        states.append(parse_state(item["state"], paper_indices, where=f"{key}[{n}].state."))
    dims = {s.dims for s in states}
    if len(dims) != 1:
        raise MalformedInput(f"{key}: states have different dims {sorted(dims)}")
    total = sum(weights)
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise MalformedInput(f"{key}: weights sum to {total!r}, expected 1")
    return weights, states


def _dense_matrix(obj) -> DensityMatrix:
    profile = as_profile(obj["dims"])
    d = profile.total_dim
    rows = obj["dense"]
    try:
        arr = np.array(rows, dtype=float)
    except ValueError as exc:
        raise MalformedInput("dense: ragged matrix") from exc
    if arr.shape == (d * d, 2):
        arr = arr.reshape(d, d, 2)
    if arr.shape != (d, d, 2):
        raise MalformedInput(f"dense: expected {d}x{d} entries of [re, im], got shape {arr.shape[:-1]}")
    return DensityMatrix(profile, arr[..., 0] + 1j * arr[..., 1])


def parse_mixed(obj, paper_indices: bool = False):
    """Return ``(form, value)`` where form is ``eigen``, ``dense`` or ``mixture``.

    ``eigen`` yields a :class:`RankTwoState`; the other forms yield a
    :class:`DensityMatrix` that still needs an eigendecomposition.
    """
    validate(obj, "mixed.schema.json")
    if "eigen" in obj:
        weights, states = _weighted(obj, "eigen", paper_indices)
        return "eigen", RankTwoState(weights[0] / sum(weights), states[0], states[1])
    if "dense" in obj:
        return "dense", _dense_matrix(obj)
    weights, states = _weighted(obj, "mixture", paper_indices)
    return "mixture", DensityMatrix.from_mixture(weights, states)


def complex_pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def state_to_obj(state: PureState, label: str | None = None) -> dict:
    """Sparse JSON form; exact zeros are omitted, everything else is kept verbatim."""
    amps = []
    for index in zip(*np.nonzero(state.amp)):
        z = complex(state.amp[index])
        amps.append({"index": [int(i) for i in index], "re": z.real, "im": z.imag})
    out = {"dims": list(state.dims), "amplitudes": amps}
    if label is not None:
        out["label"] = label
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"
