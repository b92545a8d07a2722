from __future__ import annotations

from typing import Annotated, Optional

import typer

from entrocert.cli import view as cli_view
from entrocert.cmn.logging import close_logging, init_logging
from entrocert.config import get_settings


settings = get_settings()

app = typer.Typer(
    name=settings.APP_NAME,
    help="Certify entropy continuity on sets of distributions, states and channel images.",
    no_args_is_help=True,
    add_completion=False,
)


@app.callback()
def main(
    ctx: typer.Context,
    log_level: Annotated[Optional[str], typer.Option("--log-level", help="DEBUG, INFO, WARNING or ERROR")] = None,
):
    init_logging(log_level)
    ctx.call_on_close(close_logging)


app.command("run")(cli_view.run)
app.command("validate")(cli_view.validate)


if __name__ == "__main__":
    app()
