from __future__ import annotations

from pathlib import Path
from typing import Annotated, List, Optional

import pydantic
import typer
from rich import print as rprint

from entrocert.cli.schema import Experiment, ExperimentConfig, OutputFormat
from entrocert.cli.service import ExperimentService
from entrocert.cmn.errors import EntroCertError, ParseError, ValidationError
from entrocert.cmn.logging import get_logger
from entrocert.config import get_settings


logger = get_logger("cli.view")


def _fail(exc: EntroCertError) -> typer.Exit:
    logger.error("%s", exc)
    return typer.Exit(code=exc.exit_code)


def _numerical(exc: Exception) -> ValidationError:
    """An invariant broken inside a computation, e.g. an intermediate state outside tolerance."""
    if isinstance(exc, pydantic.ValidationError):
        err = exc.errors()[0]
        cause = err.get("ctx", {}).get("error")
        return ValidationError(str(cause) if cause is not None else err["msg"], residual=getattr(cause, "residual", None))
    return ValidationError(str(exc))


def run(
    experiment: Annotated[Experiment, typer.Option("--experiment", help="experiment to run")],
    out: Annotated[Path, typer.Option("--out", help="report file")],
    inputs: Annotated[Optional[List[Path]], typer.Option("--input", help="input JSON file, repeatable")] = None,
    channel: Annotated[Optional[Path], typer.Option("--channel", help="channel JSON file")] = None,
    degrading_map: Annotated[Optional[Path], typer.Option("--degrading-map", help="candidate degrading map")] = None,
    k_max: Annotated[Optional[int], typer.Option("--k-max")] = None,
    threshold: Annotated[Optional[float], typer.Option("--threshold")] = None,
    seed: Annotated[int, typer.Option("--seed")] = 0,
    fmt: Annotated[OutputFormat, typer.Option("--format")] = OutputFormat.CSV,
    require_certified: Annotated[bool, typer.Option("--require-certified")] = False,
):
    """Run a certification or audit experiment and write its report."""
    settings = get_settings()
    try:
        config = ExperimentConfig(
            experiment=experiment,
            inputs=inputs or [],
            channel=channel,
            degrading_map=degrading_map,
            k_max=k_max if k_max is not None else settings.DEFAULT_K_MAX,
            threshold=threshold if threshold is not None else settings.DEFAULT_THRESHOLD,
            seed=seed,
            out=out,
            format=fmt,
            require_certified=require_certified,
        )
    except pydantic.ValidationError as exc:
        err = exc.errors()[0]
        raise _fail(ParseError(err["msg"], field=".".join(str(p) for p in err["loc"]) or None))
    try:
        ExperimentService.run(config)
    except EntroCertError as exc:
        raise _fail(exc)
    except (pydantic.ValidationError, ValueError) as exc:
        raise _fail(_numerical(exc))
    rprint(f"wrote {config.out}")


def validate(
    path: Annotated[Path, typer.Argument(help="input JSON file")],
):
    """Report invariant residuals of one input file without running anything."""
    try:
        report = ExperimentService.validate(path)
        typer.echo(report.model_dump_json(indent=2))
        ExperimentService.require_valid(report)
    except EntroCertError as exc:
        raise _fail(exc)
    except (pydantic.ValidationError, ValueError) as exc:
        raise _fail(_numerical(exc))
