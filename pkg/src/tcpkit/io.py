"""JSON wire format for tensors and vectors.

Tensor files look like::

    {"order": 4, "dim": 2, "entries": [[[1, 1, 1, 1], 1.0], [[1, 1, 1, 2], -2.0]]}

with 1-based indices and omitted entries zero, or ``{"order": 4, "dim": 2,
"diag": [1, 1]}`` for diagonal tensors.
"""

from __future__ import annotations

import json
from importlib import resources
import math
from pathlib import Path

import numpy as np

from .tensor import Tensor, TensorError


class InputError(ValueError):
    """Malformed tensor or vector input."""


def _finite(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{where}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise InputError(f"{where}: non-finite value {value!r}")
    return value


def tensor_from_dict(obj: dict) -> Tensor:
    if not isinstance(obj, dict):
        raise InputError("tensor document must be a JSON object")
    try:
        order, dim = obj["order"], obj["dim"]
    except KeyError as exc:
        raise InputError(f"missing key {exc.args[0]!r}") from None
    if not isinstance(order, int) or not isinstance(dim, int) or order < 2 or dim < 1:
        raise InputError(f"need integer order >= 2 and dim >= 1, got order={order!r}, dim={dim!r}")
    has_diag, has_entries = "diag" in obj, "entries" in obj
    if has_diag == has_entries:
        raise InputError("exactly one of 'entries' or 'diag' is required")
    try:
        if has_diag:
            diag = obj["diag"]
            if not isinstance(diag, list) or len(diag) != dim:
                raise InputError(f"'diag' must be a list of {dim} numbers")
            return Tensor.diagonal([_finite(v, f"diag[{k}]") for k, v in enumerate(diag)], order)
        entries = []
        seen = set()
        for k, item in enumerate(obj["entries"]):
            where = f"entries[{k}]"
            if not isinstance(item, list) or len(item) != 2 or not isinstance(item[0], list):
                raise InputError(f"{where}: expected [[i1, ..., im], value]")
            index, value = item
            if len(index) != order:
                raise InputError(f"{where}: index {index} has length {len(index)}, expected order {order}")
            if not all(isinstance(i, int) and not isinstance(i, bool) for i in index):
                raise InputError(f"{where}: index {index} must hold integers")
            if any(i < 1 or i > dim for i in index):
                raise InputError(f"{where}: index {index} out of range 1..{dim}")
            key = tuple(index)
            if key in seen:
                raise InputError(f"{where}: duplicate index {index}")
            seen.add(key)
            entries.append(([i - 1 for i in index], _finite(value, where)))
        return Tensor.from_entries(order, dim, entries)
    except TensorError as exc:
        raise InputError(str(exc)) from None


def tensor_to_dict(A: Tensor) -> dict:
    """Canonical form: every nonzero entry, row-major, 1-based."""
    return {
        "order": A.order,
        "dim": A.dim,
        "entries": [[[i + 1 for i in index], value] for index, value in A.nonzero_entries()],
    }


def dumps_tensor(A: Tensor) -> str:
    return json.dumps(tensor_to_dict(A), separators=(", ", ": "))


def loads_tensor(text: str) -> Tensor:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return tensor_from_dict(obj)


def parse_tensor_file(path) -> Tensor:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    try:
        return loads_tensor(text)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None


def write_tensor_file(A: Tensor, path) -> None:
    Path(path).write_text(dumps_tensor(A) + "\n", encoding="utf-8")


def parse_vector(spec: str, dim: int | None = None) -> np.ndarray:
    """Comma-separated reals, a JSON array literal, or a path to a JSON array file."""
    text = spec.strip()
    path = Path(text)
    if not text.startswith("[") and path.suffix == ".json":
        try:
            text = path.read_text(encoding="utf-8").strip()
        except OSError as exc:
            raise InputError(f"{path}: {exc.strerror or exc}") from None
    if text.startswith("["):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"vector: {exc.msg}") from None
        if not isinstance(values, list):
            raise InputError("vector must be a JSON array")
    else:
        values = []
        for part in text.split(","):
            try:
                values.append(float(part))
            except ValueError:
                raise InputError(f"vector: cannot parse {part.strip()!r} as a number") from None
    vec = np.array([_finite(v, f"vector[{k}]") for k, v in enumerate(values)])
    if dim is not None and vec.shape[0] != dim:
        raise InputError(f"vector has length {vec.shape[0]}, expected {dim}")
    return vec


def fixture_names() -> list[str]:
    """Names of the bundled tensors (file stems under ``tcpkit/fixtures``)."""
    root = resources.files("tcpkit") / "fixtures"
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def load_fixture(name: str) -> Tensor:
    root = resources.files("tcpkit") / "fixtures"
    item = root / f"{name}.json"
    if not item.is_file():
        raise InputError(f"no bundled tensor named {name!r}; available: {', '.join(fixture_names())}")
    return loads_tensor(item.read_text(encoding="utf-8"))
