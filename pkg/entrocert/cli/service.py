from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Type, TypeVar, Union

import numpy as np
import pydantic
from pydantic_core import PydanticCustomError

from entrocert.channels.schema import KrausChannel, kraus_sum_residual
from entrocert.channels.service import ChannelService
from entrocert.classical.schema import ClassicalEnsemble, Distribution
from entrocert.classical.service import ClassicalService
from entrocert.cli.schema import (
    Experiment,
    ExperimentConfig,
    FamilyResult,
    IdentityAuditReport,
    OutputFormat,
    ValidationReport,
)
from entrocert.cmn.base import Base
from entrocert.cmn.errors import CertificationFailed, IoError, ParseError, ValidationError
from entrocert.cmn.logging import get_logger
from entrocert.cmn.sampling import Sampler
from entrocert.config import get_settings
from entrocert.continuity.schema import AuditRecord, ConvergenceReport, StateSet
from entrocert.continuity.service import ContinuityService
from entrocert.matrixcore.schema import to_complex_matrix
from entrocert.matrixcore.service import MatrixService
from entrocert.quantum.schema import DensityMatrix, QuantumEnsemble
from entrocert.quantum.service import QuantumService


logger = get_logger("cli")

M = TypeVar("M", bound=Base)
Report = Union[ConvergenceReport, AuditRecord, IdentityAuditReport]


def _loc(err: Dict[str, Any]) -> str:
    return ".".join(str(p) for p in err.get("loc", ())) or "<root>"


def _parse(model: Type[M], data: Any, path: Path) -> M:
    """Build ``model`` from decoded JSON; value errors are invariant failures, the rest are format errors."""
    try:
        return model.model_validate(data)
    except pydantic.ValidationError as exc:
        errors = exc.errors()
        for err in errors:
            if err["type"] == "value_error":
                cause = err.get("ctx", {}).get("error")
                raise ValidationError(str(cause) if cause is not None else err["msg"],
                                      residual=getattr(cause, "residual", None),
                                      path=str(path), field=_loc(err)) from None
        raise ParseError(errors[0]["msg"], path=str(path), field=_loc(errors[0])) from None


def _detect_kind(data: Any, path: Path) -> str:
    if isinstance(data, dict):
        if "kind" in data:
            return "state-set"
        if "kraus" in data:
            return "channel"
        if "weights" in data:
            members = data.get("members") or [{}]
            first = members[0] if isinstance(members[0], dict) else {}
            return "quantum-ensemble" if "matrix" in first else "classical-ensemble"
        if "matrix" in data:
            return "density-matrix"
        if "probs" in data:
            return "distribution"
    raise ParseError("unrecognised input object", path=str(path))


def _with_dim(item: Dict[str, Any]) -> Dict[str, Any]:
    if "dim" in item or not isinstance(item.get("matrix"), list):
        return item
    return {**item, "dim": len(item["matrix"])}


def _with_channel_dims(item: Dict[str, Any], path: Path) -> Dict[str, Any]:
    if "dim_in" in item and "dim_out" in item:
        return item
    try:
        first = item["kraus"][0]
        return {**item, "dim_out": len(first), "dim_in": len(first[0])}
    except (TypeError, IndexError, KeyError):
        raise ParseError("kraus must be a non-empty list of matrices", path=str(path), field="kraus") from None


def _fmt(x: float) -> str:
    return format(x, f".{get_settings().CSV_DIGITS}g")


def _flag(b: Optional[bool]) -> str:
    return "" if b is None else str(bool(b)).lower()


def _max_over(samples: int, draw: Callable[[], float]) -> float:
    return max(draw() for _ in range(samples))


class ExperimentService:
    # ----- input loading -----
    @staticmethod
    def load_json(path: Path) -> Any:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise IoError(f"cannot read input: {exc.strerror}", path=str(path)) from None
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed JSON: {exc.msg}", path=str(path), field=f"line {exc.lineno}") from None

    @staticmethod
    def load_state_set(paths: List[Path]) -> StateSet:
        """One StateSet file, or any number of files holding distributions or density matrices."""
        items: List[tuple[Path, Dict[str, Any]]] = []
        for path in paths:
            data = ExperimentService.load_json(path)
            if isinstance(data, dict) and "kind" in data:
                if len(paths) > 1:
                    raise ParseError("a state-set file must be the only input", path=str(path))
                if data.get("states"):
                    data = {**data, "states": [_with_dim(s) for s in data["states"]]}
                return _parse(StateSet, data, path)
            for item in data if isinstance(data, list) else [data]:
                items.append((path, item))
        if not items:
            raise ParseError("no inputs given")
        kinds = {_detect_kind(item, path) for path, item in items}
        if kinds == {"distribution"}:
            members = {"distributions": [_parse(Distribution, item, path) for path, item in items]}
        elif kinds == {"density-matrix"}:
            members = {"states": [_parse(DensityMatrix, _with_dim(item), path) for path, item in items]}
        else:
            raise ParseError(f"inputs must all be distributions or all density matrices, got {sorted(kinds)}")
        descriptor = ", ".join(sorted({p.name for p, _ in items}))
        return StateSet(kind="explicit-list", descriptor=descriptor, **members)

    @staticmethod
    def load_channel(path: Path) -> KrausChannel:
        data = ExperimentService.load_json(path)
        if not isinstance(data, dict) or "kraus" not in data:
            raise ParseError("expected a channel object with a kraus list", path=str(path), field="kraus")
        return _parse(KrausChannel, _with_channel_dims(data, path), path)

    # ----- validation without experiments -----
    @staticmethod
    def validate(path: Path) -> ValidationReport:
        """Per-invariant residuals for one input file; constructs the model to collect errors."""
        data = ExperimentService.load_json(path)
        kind = _detect_kind(data, path)
        residuals: Dict[str, float] = {}
        try:
            if kind == "distribution":
                p = np.asarray(data["probs"], dtype=float)
                residuals["probability_sum"] = abs(math.fsum(p) - 1.0)
                residuals["negativity"] = max(0.0, -float(p.min())) if p.size else 0.0
                model: Type[Base] = Distribution
            elif kind == "density-matrix":
                data = _with_dim(data)
                a = to_complex_matrix(data["matrix"])
                residuals["trace"] = abs(complex(np.trace(a)) - 1.0)
                if a.shape[0] == a.shape[1]:
                    residuals["hermiticity"] = MatrixService.hermitian_residual(a)
                    if residuals["hermiticity"] <= get_settings().tol("HERMITIAN"):
                        lowest = float(MatrixService.hermitian_eig(a).eigenvalues[-1])
                        residuals["negativity"] = max(0.0, -lowest)
                model = DensityMatrix
            elif kind == "channel":
                data = _with_channel_dims(data, path)
                ops = [to_complex_matrix(v) for v in data["kraus"]]
                if len({v.shape for v in ops}) == 1:
                    residuals["kraus_sum"] = kraus_sum_residual(ops, ops[0].shape[1])
                model = KrausChannel
            elif kind in ("classical-ensemble", "quantum-ensemble"):
                residuals["weight_sum"] = abs(math.fsum(float(w) for w in data["weights"]) - 1.0)
                if kind == "quantum-ensemble":
                    data = {**data, "members": [_with_dim(m) for m in data.get("members", [])]}
                model = QuantumEnsemble if kind == "quantum-ensemble" else ClassicalEnsemble
            else:
                if data.get("states"):
                    data = {**data, "states": [_with_dim(s) for s in data["states"]]}
                model = StateSet
        except PydanticCustomError as exc:
            raise ParseError(exc.message(), path=str(path), field="matrix") from None
        except (TypeError, ValueError, KeyError) as exc:
            raise ParseError(f"cannot read {kind}: {exc}", path=str(path)) from None

        errors: List[str] = []
        try:
            _parse(model, data, path)
        except ValidationError as exc:
            errors.append(exc.detail)
        report = ValidationReport(path=str(path), kind=kind, residuals=residuals, errors=errors)
        logger.info("validated %s as %s: valid=%s", path, kind, report.valid)
        return report

    @staticmethod
    def require_valid(report: ValidationReport) -> None:
        if not report.valid:
            raise ValidationError("; ".join(report.errors), residual=max(report.residuals.values(), default=None),
                                  path=report.path)

    # ----- identity audit -----
    @staticmethod
    def identity_audit(seed: int, samples: Optional[int] = None, max_dim: Optional[int] = None) -> IdentityAuditReport:
        """Max violation per identity family over seeded random inputs."""
        settings = get_settings()
        samples = samples or settings.AUDIT_SAMPLES
        max_dim = max_dim or settings.AUDIT_MAX_DIM
        sampler = Sampler(seed)
        rng = sampler.rng

        def dim() -> int:
            return int(rng.integers(2, max_dim + 1))

        def channel(d: int):
            d_out = dim()
            # at least ceil(d / d_out) Kraus operators keep the map trace-preserving
            m = -(-d // d_out) + int(rng.integers(0, 3))
            return sampler.channel(d, d_out, m)

        def classical_exactness() -> float:
            n = int(rng.integers(2, 4 * max_dim + 1))
            x = sampler.distribution(n, zeros=int(rng.integers(0, n // 2 + 1)))
            k = int(rng.integers(1, n + 1))
            gap = ClassicalService.ensemble_entropy_gap(x, ClassicalService.coarse_decomposition(x, k))
            return abs(gap - ClassicalService.shannon_entropy(ClassicalService.coarse_grain(x, k)))

        def quantum_identity() -> float:
            e = sampler.quantum_ensemble(dim(), int(rng.integers(1, 5)))
            return QuantumService.entropy_gap_identity_residual(DensityMatrix.of(e.barycenter()), e)

        def lemma_residual() -> float:
            dims = (2, max(2, max_dim // 2))
            return QuantumService.lemma_old_identity_check(sampler.density_matrix(dims[0] * dims[1]), dims)

        def mi_agreement() -> float:
            d = dim()
            phi = channel(d)
            rho = sampler.density_matrix(d)
            return abs(ChannelService.mutual_information_sum(phi, rho) - ChannelService.mutual_information_rel(phi, rho))

        def data_processing() -> float:
            d = dim()
            phi = channel(d)
            slack = ChannelService.data_processing_check(phi, sampler.density_matrix(d), sampler.density_matrix(d))
            return max(0.0, -slack)

        def pure_exchange() -> float:
            d = dim()
            phi = channel(d)
            psi = sampler.pure_state(d)
            return abs(ChannelService.output_entropy(phi, psi) - ChannelService.complementary_output_entropy(phi, psi))

        families = [
            ("classical_decomposition_exactness", classical_exactness, "EXACTNESS"),
            ("quantum_gap_identity", quantum_identity, "QUANTUM_IDENTITY"),
            ("bipartite_identity", lemma_residual, "QUANTUM_IDENTITY"),
            ("mi_definition_agreement", mi_agreement, "MI_AGREEMENT"),
            ("data_processing", data_processing, "DPI"),
            ("pure_state_exchange", pure_exchange, "QUANTUM_IDENTITY"),
        ]
        results = []
        for name, draw, tol_name in families:
            worst = _max_over(samples, draw)
            results.append(FamilyResult(family=name, samples=samples, max_violation=worst,
                                        tolerance=settings.tol(tol_name)))
            logger.info("%s: max violation %.3e", name, worst)
        return IdentityAuditReport(seed=seed, max_dim=max_dim, families=results)

    # ----- experiments -----
    @staticmethod
    def execute(config: ExperimentConfig) -> Report:
        if config.experiment == Experiment.IDENTITY_AUDIT:
            return ExperimentService.identity_audit(config.seed)
        states = ExperimentService.load_state_set(config.inputs)
        channel = ExperimentService.load_channel(config.channel) if config.channel else None
        if config.experiment == Experiment.SHANNON_CONVERGENCE:
            return ContinuityService.certify_shannon_set(states, config.k_max, config.threshold)
        if config.experiment == Experiment.VN_CONVERGENCE:
            if channel is not None:
                return ContinuityService.certify_channel_image_set(channel, states, config.k_max, config.threshold)
            return ContinuityService.certify_vn_set(states, config.k_max, config.threshold)
        if config.experiment == Experiment.MI_AUDIT:
            degrading = ExperimentService.load_channel(config.degrading_map) if config.degrading_map else None
            return ContinuityService.audit_corollary_mi(channel, states, config.k_max, degrading)
        return ContinuityService.audit_corollary_chi(channel, states, config.k_max)

    @staticmethod
    def run(config: ExperimentConfig) -> Report:
        """Execute, write the report, then enforce ``require_certified``."""
        report = ExperimentService.execute(config)
        ExperimentService.emit_report(report, config.format, config.out)
        ok = report.certified if isinstance(report, ConvergenceReport) else report.passed
        if config.require_certified and not ok:
            raise CertificationFailed(f"{config.experiment.value} did not certify", out=str(config.out))
        return report

    # ----- output -----
    @staticmethod
    def render_csv(report: Report) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if isinstance(report, ConvergenceReport):
            writer.writerow(["k", "gap_bound", "certified_so_far"])
            for k, g, seen in report.rows():
                writer.writerow([k, _fmt(g), _flag(seen)])
        elif isinstance(report, AuditRecord):
            values = list(report.rows[0].values) if report.rows else []
            checks = [c.name for c in report.rows[0].checks] if report.rows else []
            writer.writerow(["k", *values, *(f"{c}_{col}" for c in checks for col in ("slack", "passed"))])
            for row in report.rows:
                by_name = {c.name: c for c in row.checks}
                cells = [row.k, *(_fmt(row.values[v]) for v in values)]
                for c in checks:
                    cells += [_fmt(by_name[c].slack), _flag(by_name[c].passed)]
                writer.writerow(cells)
        else:
            writer.writerow(["family", "samples", "max_violation", "tolerance", "passed"])
            for f in report.families:
                writer.writerow([f.family, f.samples, _fmt(f.max_violation), _fmt(f.tolerance), _flag(f.passed)])
        return buf.getvalue()

    @staticmethod
    def render(report: Report, fmt: OutputFormat) -> str:
        if fmt == OutputFormat.JSON:
            return report.model_dump_json(indent=2) + "\n"
        return ExperimentService.render_csv(report)

    @staticmethod
    def emit_report(report: Report, fmt: OutputFormat, path: Path) -> Path:
        text = ExperimentService.render(report, fmt)
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise IoError(f"cannot write report: {exc.strerror}", path=str(path)) from None
        logger.info("wrote %s report to %s", fmt.value, path)
        return Path(path)
