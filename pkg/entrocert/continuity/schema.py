from __future__ import annotations

from typing import Dict, List, Literal, Optional

from pydantic import Field, computed_field, model_validator

from entrocert.classical.schema import Distribution
from entrocert.cmn.base import Base
from entrocert.quantum.schema import DensityMatrix


SetKind = Literal["explicit-list", "majorization-ball", "spectrum-family"]


class StateSet(Base):
    """A set of distributions or states, given explicitly or by a dominating element.

    - explicit-list: ``distributions`` or ``states``
    - majorization-ball: every x with x ≺ ``dominator``
    - spectrum-family: all states whose spectrum is one of ``spectra``
    """

    kind: SetKind
    descriptor: str = ""
    distributions: Optional[List[Distribution]] = None
    states: Optional[List[DensityMatrix]] = None
    dominator: Optional[Distribution] = None
    spectra: Optional[List[Distribution]] = None

    @model_validator(mode="after")
    def check_payload(self):
        if self.kind == "explicit-list":
            given = [p for p in (self.distributions, self.states) if p]
            if len(given) != 1:
                raise ValueError("explicit-list needs exactly one non-empty list of distributions or states")
        elif self.kind == "majorization-ball" and self.dominator is None:
            raise ValueError("majorization-ball needs a dominator")
        elif self.kind == "spectrum-family" and not self.spectra:
            raise ValueError("spectrum-family needs at least one spectrum")
        return self

    @property
    def is_classical(self) -> bool:
        return bool(self.distributions) or self.kind == "majorization-ball"

    def describe(self) -> str:
        if self.descriptor:
            return self.descriptor
        if self.kind == "majorization-ball":
            return f"majorization-ball around a {len(self.dominator)}-outcome dominator"
        if self.kind == "spectrum-family":
            return f"spectrum-family of {len(self.spectra)} spectra"
        members = self.distributions or self.states
        noun = "distributions" if self.distributions else "states"
        return f"explicit-list of {len(members)} {noun}"


class ConvergenceReport(Base):
    """k ↦ certified upper bound on the sup over a set of the k-th entropy gap."""

    functional: str
    k_values: List[int]
    gap_bounds: List[float]
    set_descriptor: str
    threshold: float = Field(..., gt=0)
    certified: bool
    bound_based: bool = True
    notes: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_rows(self):
        if len(self.k_values) != len(self.gap_bounds):
            raise ValueError("k_values and gap_bounds differ in length")
        if any(b <= a for a, b in zip(self.k_values, self.k_values[1:])):
            raise ValueError("k_values must be strictly increasing")
        if any(g < 0 for g in self.gap_bounds):
            raise ValueError("gap bounds must be nonnegative")
        expected = bool(self.gap_bounds) and self.gap_bounds[-1] < self.threshold
        if self.certified != expected:
            raise ValueError("certified must equal (final gap bound < threshold)")
        return self

    def rows(self) -> List[tuple[int, float, bool]]:
        out, seen = [], False
        for k, g in zip(self.k_values, self.gap_bounds):
            seen = seen or g < self.threshold
            out.append((k, g, seen))
        return out

    def is_monotone(self, tol: float) -> bool:
        return all(b <= a + tol for a, b in zip(self.gap_bounds, self.gap_bounds[1:]))

    @property
    def certified_at(self) -> Optional[int]:
        for k, g in zip(self.k_values, self.gap_bounds):
            if g < self.threshold:
                return k
        return None


class InequalityCheck(Base):
    """``slack`` is the margin of the inequality; it passes when slack ≥ −tolerance."""

    name: str
    slack: float
    tolerance: float

    @computed_field
    @property
    def passed(self) -> bool:
        return self.slack >= -self.tolerance


class AuditRow(Base):
    k: int
    values: Dict[str, float]
    checks: List[InequalityCheck]


class AuditRecord(Base):
    audit: str
    set_descriptor: str
    channel_descriptor: str
    rows: List[AuditRow]
    degrading_residual: Optional[float] = None
    degradable: Optional[bool] = None
    notes: List[str] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(c.passed for row in self.rows for c in row.checks)


class ApproximationProfile(Base):
    """Lower bounds on the σ-concave approximants f̂ₖ of f at one point."""

    functional: str
    value: float
    k_values: List[int]
    lower_bounds: List[float]

    def is_nondecreasing(self, tol: float) -> bool:
        return all(b >= a - tol for a, b in zip(self.lower_bounds, self.lower_bounds[1:]))

    def never_exceeds(self, tol: float) -> bool:
        return all(b <= self.value + tol for b in self.lower_bounds)
