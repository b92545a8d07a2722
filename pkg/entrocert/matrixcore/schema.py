from __future__ import annotations

from typing import Annotated, Any, Callable, Literal

import numpy as np
from pydantic import BeforeValidator, PlainSerializer
from pydantic_core import PydanticCustomError

from entrocert.cmn.base import Base


def to_complex_matrix(v: Any) -> np.ndarray:
    """Accept an ndarray, a real nested list, or the ``[[[re, im], ...], ...]`` wire form."""
    if isinstance(v, np.ndarray):
        arr = v
    else:
        try:
            arr = np.asarray(v, dtype=float)
        except (TypeError, ValueError):
            raise PydanticCustomError("matrix_format", "matrix entries must be numbers or [re, im] pairs")
        if arr.ndim == 3 and arr.shape[-1] == 2:
            arr = arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim != 2:
        raise PydanticCustomError("matrix_format", "expected a 2-d matrix, got {ndim} dimensions", {"ndim": arr.ndim})
    if not np.all(np.isfinite(arr)):
        raise PydanticCustomError("matrix_format", "matrix entries must be finite")
    return np.array(arr, dtype=np.complex128)


def from_complex_matrix(m: np.ndarray) -> list[list[list[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


ComplexMatrix = Annotated[
    np.ndarray,
    BeforeValidator(to_complex_matrix),
    PlainSerializer(from_complex_matrix, when_used="json"),
]

Subsystem = Literal["first", "second"]
MatrixMap = Callable[[np.ndarray], np.ndarray]


class EigenSystem(Base):
    eigenvalues: np.ndarray   # real, nonincreasing
    eigenvectors: np.ndarray  # orthonormal columns, same order

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T

    def apply(self, func: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Matrix function V f(s) V† evaluated on the eigenvalues."""
        return (self.eigenvectors * func(self.eigenvalues)) @ self.eigenvectors.conj().T

    def gram_residual(self) -> float:
        v = self.eigenvectors
        return float(np.max(np.abs(v.conj().T @ v - np.eye(self.dim)))) if self.dim else 0.0
