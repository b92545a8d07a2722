from __future__ import annotations

import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import Field, PrivateAttr, model_validator

from entrocert.cmn.base import Base
from entrocert.cmn.errors import ResidualError
from entrocert.config import get_settings
from entrocert.matrixcore.schema import ComplexMatrix, EigenSystem
from entrocert.matrixcore.service import MatrixService


class DensityMatrix(Base):
    """Hermitian, positive semidefinite, trace-one matrix."""

    dim: int = Field(..., ge=1)
    matrix: ComplexMatrix

    _eig: Optional[EigenSystem] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def check_state(self):
        settings = get_settings()
        if self.matrix.shape != (self.dim, self.dim):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match dim {self.dim}")
        residual = MatrixService.hermitian_residual(self.matrix)
        if residual > settings.tol("HERMITIAN"):
            raise ResidualError(f"Hermiticity residual {residual:.3e}", residual)
        trace_residual = abs(complex(np.trace(self.matrix)) - 1.0)
        if trace_residual > settings.tol("PROB_SUM"):
            raise ResidualError(f"trace residual {trace_residual:.3e}", trace_residual)
        eig = MatrixService.hermitian_eig(self.matrix)
        lowest = float(eig.eigenvalues[-1])
        if lowest < -settings.tol("CLAMP"):
            raise ResidualError(f"negative eigenvalue {lowest:.3e}", -lowest)
        self._eig = eig
        return self

    # ---- constructors ----
    @classmethod
    def of(cls, matrix) -> "DensityMatrix":
        matrix = np.asarray(matrix, dtype=np.complex128)
        return cls(dim=matrix.shape[0], matrix=matrix)

    @classmethod
    def from_spectrum(cls, values: np.ndarray, vectors: np.ndarray) -> "DensityMatrix":
        """Build Σ sⱼ|eⱼ⟩⟨eⱼ| from a known nonnegative spectrum and orthonormal basis."""
        values = np.asarray(values, dtype=float)
        order = np.argsort(-values, kind="stable")
        values, vectors = values[order], vectors[:, order]
        eig = EigenSystem(eigenvalues=values, eigenvectors=vectors)
        rho = cls.model_construct(dim=values.size, matrix=eig.reconstruct())
        rho._eig = eig
        return rho

    @classmethod
    def diagonal(cls, probs) -> "DensityMatrix":
        probs = np.asarray(probs, dtype=float)
        return cls.from_spectrum(probs, np.eye(probs.size, dtype=np.complex128))

    @classmethod
    def pure(cls, vector) -> "DensityMatrix":
        psi = np.asarray(vector, dtype=np.complex128)
        psi = psi / np.linalg.norm(psi)
        return cls.of(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls.diagonal(np.full(dim, 1.0 / dim))

    # ---- spectral data ----
    @property
    def eig(self) -> EigenSystem:
        if self._eig is None:
            self._eig = MatrixService.hermitian_eig(self.matrix)
        return self._eig

    @property
    def spectrum(self) -> np.ndarray:
        """Eigenvalues with rounding negatives clamped to zero, renormalised, nonincreasing."""
        vals = np.clip(self.eig.eigenvalues, 0.0, None)
        return vals / math.fsum(vals)

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.eig.eigenvectors


class QuantumEnsemble(Base):
    weights: Tuple[float, ...] = Field(..., min_length=1)
    members: List[DensityMatrix] = Field(..., min_length=1)

    @model_validator(mode="after")
    def check_members(self):
        if len(self.weights) != len(self.members):
            raise ValueError(f"{len(self.weights)} weights for {len(self.members)} members")
        for i, w in enumerate(self.weights):
            if not w > 0:
                raise ValueError(f"weights[{i}] must be positive, got {w}")
        residual = abs(math.fsum(self.weights) - 1.0)
        if residual > get_settings().tol("PROB_SUM"):
            raise ResidualError(f"weights sum residual {residual:.3e}", residual)
        dims = {m.dim for m in self.members}
        if len(dims) != 1:
            raise ValueError(f"members have different dimensions {sorted(dims)}")
        return self

    @property
    def dim(self) -> int:
        return self.members[0].dim

    def barycenter(self) -> np.ndarray:
        return sum(w * m.matrix for w, m in zip(self.weights, self.members))
