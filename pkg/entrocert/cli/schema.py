from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import Field, computed_field, model_validator

from entrocert.cmn.base import Base


class Experiment(str, Enum):
    SHANNON_CONVERGENCE = "shannon-convergence"
    VN_CONVERGENCE = "vn-convergence"
    MI_AUDIT = "mi-audit"
    CHI_AUDIT = "chi-audit"
    IDENTITY_AUDIT = "identity-audit"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class ExperimentConfig(Base):
    experiment: Experiment
    inputs: List[Path] = Field(default_factory=list)
    channel: Optional[Path] = None
    degrading_map: Optional[Path] = None
    k_max: int = Field(..., ge=1)
    threshold: float = Field(..., gt=0)
    seed: int = Field(0, ge=0)
    out: Path
    format: OutputFormat = OutputFormat.CSV
    require_certified: bool = False

    @model_validator(mode="after")
    def check_inputs(self):
        if self.experiment in (Experiment.MI_AUDIT, Experiment.CHI_AUDIT) and self.channel is None:
            raise ValueError(f"{self.experiment.value} needs --channel")
        if self.experiment != Experiment.IDENTITY_AUDIT and not self.inputs:
            raise ValueError(f"{self.experiment.value} needs at least one --input")
        return self


class FamilyResult(Base):
    family: str
    samples: int
    max_violation: float
    tolerance: float

    @computed_field
    @property
    def passed(self) -> bool:
        return self.max_violation < self.tolerance


class IdentityAuditReport(Base):
    seed: int
    max_dim: int
    families: List[FamilyResult]

    @computed_field
    @property
    def passed(self) -> bool:
        return all(f.passed for f in self.families)


class ValidationReport(Base):
    path: str
    kind: str
    residuals: Dict[str, float]
    errors: List[str] = Field(default_factory=list)

    @computed_field
    @property
    def valid(self) -> bool:
        return not self.errors
