from __future__ import annotations

import math
from typing import Callable, List, Optional, Sequence

import numpy as np

from entrocert.channels.schema import KrausChannel, MiBracket
from entrocert.channels.service import ChannelService
from entrocert.classical.schema import Distribution
from entrocert.classical.service import ClassicalService
from entrocert.cmn.errors import InfiniteEntropyDominator, UnsupportedStateSet
from entrocert.cmn.logging import get_logger
from entrocert.config import get_settings
from entrocert.continuity.schema import (
    ApproximationProfile,
    AuditRecord,
    AuditRow,
    ConvergenceReport,
    InequalityCheck,
    StateSet,
)
from entrocert.quantum.schema import DensityMatrix
from entrocert.quantum.service import QuantumService


logger = get_logger("continuity")

SUFFICIENCY_NOTE = (
    "bound-based: decay below the threshold certifies continuity; "
    "a bound that fails to decay decides nothing"
)


def _report(functional: str, grid: List[int], gaps: List[float], s: StateSet, threshold: float,
            notes: Sequence[str] = ()) -> ConvergenceReport:
    report = ConvergenceReport(
        functional=functional,
        k_values=grid,
        gap_bounds=gaps,
        set_descriptor=s.describe(),
        threshold=threshold,
        certified=bool(gaps) and gaps[-1] < threshold,
        notes=[SUFFICIENCY_NOTE, *notes],
    )
    if not report.is_monotone(get_settings().tol("MONOTONE")):
        logger.warning("%s gap bounds are not monotone for %s", functional, report.set_descriptor)
    logger.info("%s: %s, certified=%s at k=%s", functional, report.set_descriptor,
                report.certified, report.certified_at)
    return report


def _check_dominator(x0: Distribution) -> None:
    if not math.isfinite(ClassicalService.shannon_entropy(x0)):
        raise InfiniteEntropyDominator("majorization-ball dominator must have finite entropy")


def _quantum_members(s: StateSet) -> List[DensityMatrix]:
    if s.states:
        return list(s.states)
    if s.kind == "spectrum-family":
        return [DensityMatrix.diagonal(x.array) for x in s.spectra]
    raise UnsupportedStateSet("expected a set of quantum states", kind=s.kind)


def _explicit_states(s: StateSet) -> List[DensityMatrix]:
    if s.kind != "explicit-list" or not s.states:
        raise UnsupportedStateSet("audits need an explicit list of states", kind=s.kind)
    return list(s.states)


def _check(name: str, slacks: Sequence[float], tol_name: str) -> InequalityCheck:
    return InequalityCheck(name=name, slack=min(slacks), tolerance=get_settings().tol(tol_name))


def _running_min(values: Sequence[float]) -> List[float]:
    out, low = [], math.inf
    for v in values:
        low = min(low, v)
        out.append(low)
    return out


class ContinuityService:
    @staticmethod
    def certify_shannon_set(s: StateSet, k_max: int, threshold: Optional[float] = None) -> ConvergenceReport:
        settings = get_settings()
        threshold = threshold if threshold is not None else settings.DEFAULT_THRESHOLD
        grid = settings.k_grid(k_max)
        if not s.is_classical:
            raise UnsupportedStateSet("expected a set of distributions", kind=s.kind)
        if s.kind == "majorization-ball":
            _check_dominator(s.dominator)
            # x ≺ x₀ ⇒ S(k(x)) ≤ S(k(x₀)), so the dominator bounds the whole ball.
            gaps = [ClassicalService.delta_k_shannon_bound(s.dominator, k) for k in grid]
        else:
            gaps = [max(ClassicalService.delta_k_shannon_bound(x, k) for x in s.distributions) for k in grid]
        return _report("shannon", grid, gaps, s, threshold)

    @staticmethod
    def certify_vn_set(s: StateSet, k_max: int, threshold: Optional[float] = None) -> ConvergenceReport:
        settings = get_settings()
        threshold = threshold if threshold is not None else settings.DEFAULT_THRESHOLD
        grid = settings.k_grid(k_max)
        if s.kind == "majorization-ball":
            # unitary invariance: a spectrum ≺ x₀ gives the same bound as the classical ball
            _check_dominator(s.dominator)
            gaps = [ClassicalService.delta_k_shannon_bound(s.dominator, k) for k in grid]
        else:
            members = _quantum_members(s)
            gaps = [max(QuantumService.delta_k_vn_bound(rho, k) for rho in members) for k in grid]
        return _report("von-neumann", grid, gaps, s, threshold,
                       notes=["necessity on compact sets needs the exact infimum and is not decided here"])

    @staticmethod
    def certify_channel_image_set(phi: KrausChannel, s: StateSet, k_max: int,
                                  threshold: Optional[float] = None) -> ConvergenceReport:
        """Gap bounds for {Φ(ρ)} at rank levels m·k, m the number of Kraus operators.

        Pushing the eigenblock ensemble of ρ through Φ decomposes Φ(ρ) into states
        of rank ≤ m·k with gap Σπᵢ H(Φρᵢ‖Φρ) ≤ Σπᵢ H(ρᵢ‖ρ).
        """
        settings = get_settings()
        threshold = threshold if threshold is not None else settings.DEFAULT_THRESHOLD
        grid = settings.k_grid(k_max)
        members = _quantum_members(s)
        raw = [
            max(ChannelService.output_entropy_gap(phi, rho, QuantumService.rank_k_decomposition(rho, k))
                for rho in members)
            for k in grid
        ]
        m = phi.environment_dim
        levels = sorted({m * k for k in grid})
        # a bound at level m·k also holds at every higher level
        return _report("channel-image", levels, _running_min(raw), s, threshold,
                       notes=[f"levels are m*k with m={m} Kraus operators"])

    @staticmethod
    def audit_corollary_mi(phi: KrausChannel, s: StateSet, k_max: int,
                           degrading: Optional[KrausChannel] = None) -> AuditRecord:
        states = _explicit_states(s)
        residual = degradable = None
        if degrading is not None:
            residual = ChannelService.verify_degrading(phi, degrading)
            degradable = residual < get_settings().tol("DEGRADING")
        rows = []
        for k in get_settings().k_grid(k_max):
            vn, mi, env, inp = [], [], [], []
            for rho in states:
                vn.append(QuantumService.delta_k_vn_bound(rho, k))
                if QuantumService.rank(rho) <= k:
                    bracket = MiBracket(input_term=0.0, output_term=0.0, environment_term=0.0)
                else:
                    bracket = ChannelService.mi_bracket(phi, rho, QuantumService.rank_k_decomposition(rho, k))
                mi.append(bracket.value)
                env.append(bracket.environment_term)
                inp.append(bracket.input_term)
            checks = [
                _check("mi_le_2vn", [2 * a - b for a, b in zip(vn, mi)], "SANDWICH"),
                _check("environment_le_input", [a - b for a, b in zip(inp, env)], "SANDWICH"),
            ]
            if degradable:
                checks.append(_check("mi_ge_vn", [b - a for a, b in zip(vn, mi)], "DEGRADING"))
            rows.append(AuditRow(
                k=k,
                values={"vn_bound": max(vn), "mi_bound": max(mi), "environment_term": max(env)},
                checks=checks,
            ))
        record = AuditRecord(
            audit="corollary-mi",
            set_descriptor=s.describe(),
            channel_descriptor=f"{phi.dim_in}->{phi.dim_out}, {phi.environment_dim} Kraus operators",
            rows=rows,
            degrading_residual=residual,
            degradable=degradable,
        )
        logger.info("corollary-mi audit passed=%s", record.passed)
        return record

    @staticmethod
    def audit_corollary_chi(phi: KrausChannel, s: StateSet, k_max: int) -> AuditRecord:
        states = _explicit_states(s)
        rows = []
        for k in get_settings().k_grid(k_max):
            vn, out, resid = [], [], []
            for rho in states:
                ensemble = QuantumService.rank_k_decomposition(rho, k)
                vn.append(QuantumService.delta_k_vn_bound(rho, k))
                out.append(ChannelService.output_entropy_gap(phi, rho, ensemble))
                resid.append(ChannelService.output_gap_identity_residual(phi, rho, ensemble))
            rows.append(AuditRow(
                k=k,
                values={"vn_bound": max(vn), "output_gap": max(out), "identity_residual": max(resid)},
                checks=[
                    _check("output_gap_le_vn", [a - b for a, b in zip(vn, out)], "SANDWICH"),
                    _check("output_gap_identity", [-r for r in resid], "QUANTUM_IDENTITY"),
                ],
            ))
        record = AuditRecord(
            audit="corollary-chi",
            set_descriptor=s.describe(),
            channel_descriptor=f"{phi.dim_in}->{phi.dim_out}, {phi.environment_dim} Kraus operators",
            rows=rows,
            notes=["output_gap is also the Holevo quantity of the eigenblock ensemble, a lower bound on chi"],
        )
        logger.info("corollary-chi audit passed=%s", record.passed)
        return record

    @staticmethod
    def majorization_samples(x0: Distribution, count: int, rng: np.random.Generator,
                             transfers: int = 8) -> List[Distribution]:
        """Random members of {x : x ≺ x₀}.

        Each step moves mass from a smaller entry to a larger one, which only
        makes the vector less chaotic, so every sample stays inside the ball.
        """
        base = np.sort(x0.array)[::-1]
        samples = []
        for _ in range(count):
            x = base.copy()
            for _ in range(int(rng.integers(1, transfers + 1))):
                if x.size < 2:
                    break
                i, j = sorted(rng.choice(x.size, size=2, replace=False))
                amount = rng.uniform(0.0, x[j])
                x[i] += amount
                x[j] -= amount
                x = np.sort(x)[::-1]
            samples.append(Distribution.of(rng.permutation(x)))
        return samples

    @staticmethod
    def _profile(functional: str, value: float, k_max: int, lower: Callable[[int], float]) -> ApproximationProfile:
        grid = get_settings().k_grid(k_max)
        return ApproximationProfile(functional=functional, value=value, k_values=grid,
                                    lower_bounds=[lower(k) for k in grid])

    @staticmethod
    def approximation_profile(x: Distribution, k_max: int) -> ApproximationProfile:
        return ContinuityService._profile(
            "shannon", ClassicalService.shannon_entropy(x), k_max,
            lambda k: ClassicalService.approximant_lower_bound(x, k),
        )

    @staticmethod
    def vn_approximation_profile(rho: DensityMatrix, k_max: int) -> ApproximationProfile:
        return ContinuityService._profile(
            "von-neumann", QuantumService.von_neumann_entropy(rho), k_max,
            lambda k: QuantumService.vn_approximant_lower_bound(rho, k),
        )
