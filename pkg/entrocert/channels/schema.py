from __future__ import annotations

from typing import List

import numpy as np
from pydantic import Field, model_validator

from entrocert.cmn.base import Base
from entrocert.cmn.errors import ResidualError
from entrocert.config import get_settings
from entrocert.matrixcore.schema import ComplexMatrix


def kraus_sum_residual(kraus: List[np.ndarray], dim_in: int) -> float:
    """‖Σⱼ Vⱼ†Vⱼ − I‖_max."""
    total = sum(v.conj().T @ v for v in kraus)
    return float(np.max(np.abs(total - np.eye(dim_in))))


class KrausChannel(Base):
    """Φ(A) = Σⱼ VⱼAVⱼ† with Σⱼ Vⱼ†Vⱼ = I."""

    dim_in: int = Field(..., ge=1)
    dim_out: int = Field(..., ge=1)
    kraus: List[ComplexMatrix] = Field(..., min_length=1)

    @model_validator(mode="after")
    def check_kraus(self):
        settings = get_settings()
        if len(self.kraus) > settings.KRAUS_MAX:
            raise ValueError(f"{len(self.kraus)} Kraus operators exceed the limit {settings.KRAUS_MAX}")
        for j, v in enumerate(self.kraus):
            if v.shape != (self.dim_out, self.dim_in):
                raise ValueError(f"kraus[{j}] has shape {v.shape}, expected {(self.dim_out, self.dim_in)}")
        residual = kraus_sum_residual(self.kraus, self.dim_in)
        if residual > settings.tol("KRAUS_SUM"):
            raise ResidualError(f"trace-preservation residual {residual:.3e}", residual)
        return self

    @classmethod
    def of(cls, kraus) -> "KrausChannel":
        ops = [np.asarray(v, dtype=np.complex128) for v in kraus]
        return cls(dim_in=ops[0].shape[1], dim_out=ops[0].shape[0], kraus=ops)

    @property
    def environment_dim(self) -> int:
        return len(self.kraus)

    @property
    def stack(self) -> np.ndarray:
        return np.stack(self.kraus)


class ComplementaryChannel(Base):
    """Environment-side map A ↦ [Tr VᵢAVⱼ†]ᵢⱼ of a Kraus channel."""

    channel: KrausChannel

    @property
    def dim_in(self) -> int:
        return self.channel.dim_in

    @property
    def dim_out(self) -> int:
        return self.channel.environment_dim

    def __call__(self, a: np.ndarray) -> np.ndarray:
        v = self.channel.stack
        return np.einsum("iab,bc,jac->ij", v, np.asarray(a, dtype=np.complex128), v.conj())


class MiBracket(Base):
    """Σπᵢ H(ρᵢ‖ρ), Σπᵢ H(Φρᵢ‖Φρ) and Σπᵢ H(Φ̃ρᵢ‖Φ̃ρ) for one ensemble."""

    input_term: float
    output_term: float
    environment_term: float

    @property
    def value(self) -> float:
        return self.input_term + self.output_term - self.environment_term
