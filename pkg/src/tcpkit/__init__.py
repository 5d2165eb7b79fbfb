"""Tensor complementarity toolkit: Z/M-tensor spectral analysis, TCP solvers and degree checks."""

from .tensor import (
    DimensionError,
    DomainError,
    NotZTensorError,
    Tensor,
    TensorError,
    ZDecomposition,
    contract,
    jacobian,
    power_vec,
    principal_subtensor,
    quad_form,
    z_decompose,
)

__version__ = "0.1.0"

__all__ = [
    "DimensionError",
    "DomainError",
    "NotZTensorError",
    "Tensor",
    "TensorError",
    "ZDecomposition",
    "contract",
    "jacobian",
    "power_vec",
    "principal_subtensor",
    "quad_form",
    "z_decompose",
]
