from __future__ import annotations

from functools import lru_cache
from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    APP_NAME: str = Field(default="entrocert")
    ENV: str = Field(default="local")
    DEBUG: bool = Field(default=False)
    LOG_LEVEL: str = Field(default="WARNING")

    # Uniform multiplier for every *_TOL below (debugging aid).
    TOL_SCALE: float = Field(default=1.0, gt=0)

    # ---- tolerance table ----
    HERMITIAN_TOL: float = Field(default=1e-10)
    JACOBI_OFF_TOL: float = Field(default=1e-12)
    PROB_SUM_TOL: float = Field(default=1e-10)
    TRUNCATION_TAIL_TOL: float = Field(default=1e-9)
    SUPPORT_TOL: float = Field(default=1e-12)
    QUANTUM_SUPPORT_TOL: float = Field(default=1e-10)
    CLAMP_TOL: float = Field(default=1e-10)
    BARYCENTER_TOL: float = Field(default=1e-9)
    GAP_IDENTITY_TOL: float = Field(default=1e-9)
    EXACTNESS_TOL: float = Field(default=1e-10)
    QUANTUM_IDENTITY_TOL: float = Field(default=1e-8)
    KRAUS_SUM_TOL: float = Field(default=1e-9)
    DEGRADING_TOL: float = Field(default=1e-8)
    MI_AGREEMENT_TOL: float = Field(default=1e-7)
    DPI_TOL: float = Field(default=1e-9)
    SANDWICH_TOL: float = Field(default=1e-9)
    MONOTONE_TOL: float = Field(default=1e-10)
    PARTIAL_TRACE_TOL: float = Field(default=1e-12)
    MAJORIZATION_TOL: float = Field(default=1e-12)

    # ---- solver / size limits ----
    JACOBI_MAX_SWEEPS: int = Field(default=100, ge=1)
    EIG_ROUND_DIGITS: int = Field(default=12, ge=1)
    KRAUS_MAX: int = Field(default=16, ge=1)
    ORACLE_MAX_SUPPORT: int = Field(default=10, ge=1)

    # ---- experiment defaults ----
    DEFAULT_K_MAX: int = Field(default=10, ge=1)
    DEFAULT_THRESHOLD: float = Field(default=1e-3, gt=0)
    K_GRID: Literal["linear", "geometric"] = Field(default="linear")
    CSV_DIGITS: int = Field(default=12, ge=1)
    AUDIT_SAMPLES: int = Field(default=25, ge=1)
    AUDIT_MAX_DIM: int = Field(default=4, ge=2)

    model_config = SettingsConfigDict(
        env_prefix="ENTROCERT_",
        env_file=str(Path(__file__).resolve().parent / ".env"),
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    def tol(self, name: str) -> float:
        """Scaled tolerance, e.g. ``tol("HERMITIAN")``."""
        return float(getattr(self, f"{name.upper()}_TOL")) * self.TOL_SCALE

    def k_grid(self, k_max: int) -> list[int]:
        if k_max < 1:
            return []
        if self.K_GRID == "linear":
            return list(range(1, k_max + 1))
        grid, k = [], 1
        while k < k_max:
            grid.append(k)
            k *= 2
        grid.append(k_max)
        return grid


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
