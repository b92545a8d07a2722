from __future__ import annotations

import math
from typing import List, Literal, Tuple

import numpy as np
from pydantic import Field, field_validator, model_validator

from entrocert.cmn.base import Base
from entrocert.cmn.errors import ResidualError
from entrocert.config import get_settings


Ordering = Literal["as-given", "nonincreasing"]


class Distribution(Base):
    """Finite-support probability vector.

    Ingestion renormalises when the missing (truncated tail) mass is small and
    rejects anything else.
    """

    probs: Tuple[float, ...] = Field(..., min_length=1)

    @field_validator("probs")
    @classmethod
    def check_probs(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        settings = get_settings()
        for i, p in enumerate(v):
            if not math.isfinite(p):
                raise ValueError(f"probs[{i}] is not finite: {p}")
            if p < 0:
                raise ResidualError(f"probs[{i}] is negative: {p}", -p)
        total = math.fsum(v)
        deficit = 1.0 - total
        if deficit < -settings.tol("PROB_SUM") or deficit > max(settings.tol("PROB_SUM"), settings.tol("TRUNCATION_TAIL")):
            raise ResidualError(f"probabilities sum to {total!r}, residual {abs(deficit):.3e}", abs(deficit))
        return tuple(p / total for p in v)

    @classmethod
    def of(cls, values) -> "Distribution":
        return cls(probs=tuple(float(p) for p in np.ravel(values)))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def __len__(self) -> int:
        return len(self.probs)

    def padded(self, n: int) -> np.ndarray:
        arr = self.array
        if n <= arr.size:
            return arr
        return np.concatenate([arr, np.zeros(n - arr.size)])


class ClassicalEnsemble(Base):
    """Atomic measure {πᵢ, xᵢ}: positive weights and matching member distributions."""

    weights: Tuple[float, ...] = Field(..., min_length=1)
    members: List[Distribution] = Field(..., min_length=1)

    @model_validator(mode="after")
    def check_weights(self):
        if len(self.weights) != len(self.members):
            raise ValueError(f"{len(self.weights)} weights for {len(self.members)} members")
        for i, w in enumerate(self.weights):
            if not w > 0:
                raise ValueError(f"weights[{i}] must be positive, got {w}")
        residual = abs(math.fsum(self.weights) - 1.0)
        if residual > get_settings().tol("PROB_SUM"):
            raise ResidualError(f"weights sum residual {residual:.3e}", residual)
        return self

    @property
    def support_length(self) -> int:
        return max(len(m) for m in self.members)

    def barycenter(self, n: int = 0) -> np.ndarray:
        n = max(n, self.support_length)
        return sum(w * m.padded(n) for w, m in zip(self.weights, self.members))
