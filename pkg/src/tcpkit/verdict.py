from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

STATUSES = ("true", "false", "unknown")
METHODS = ("exact", "spectral", "sampled")


def jsonable(obj: Any) -> Any:
    """Convert numpy containers and scalars into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return obj


@dataclass
class PropertyVerdict:
    """Outcome of one property check.

    Sampled checks can refute a property with a witness but never confirm it.
    """

    property: str
    status: str
    method: str
    certificate: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}, got {self.status!r}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.method == "sampled" and self.status == "true":
            raise ValueError("a sampled check cannot establish a property")

    @property
    def holds(self) -> bool:
        return self.status == "true"

    @property
    def refuted(self) -> bool:
        return self.status == "false"

    @property
    def decided(self) -> bool:
        return self.status != "unknown"

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "status": self.status,
            "method": self.method,
            "certificate": jsonable(self.certificate),
        }


def status_of(flag: bool | None) -> str:
    return "unknown" if flag is None else ("true" if flag else "false")


def one_based(index) -> list[int]:
    return [int(i) + 1 for i in index]
