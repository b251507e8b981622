# billiard_prop/cli/main.py

import json
import logging
from billiard_prop.utils.compat import StrEnum
from pathlib import Path
from typing import Annotated

import typer
from rich import print as rprint
from rich.console import Console
from rich.markup import escape

from billiard_prop.cli.config import RunConfig, Scenario, parse_config
from billiard_prop.models.errata import ErrataLedger
from billiard_prop.services.scenarios.factory import create_scenario
from billiard_prop.utils.csv_writer import CsvTableWriter
from billiard_prop.utils.exceptions import (
    ConfigParseError,
    ConfigValidationError,
    EigenstateError,
    GeometryError,
    NonConvergentError,
    ObservableError,
    OutputError,
    QuadratureError,
    ThetaError,
    ThetaOverflowError,
)
from billiard_prop.utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

# first match wins, so subclasses precede their bases
EXIT_CODES: tuple[tuple[type[Exception], int], ...] = (
    (ConfigParseError, 2),
    (ConfigValidationError, 3),
    (NonConvergentError, 4),
    (ThetaOverflowError, 5),
    (QuadratureError, 6),
    (OutputError, 7),
    (ThetaError, 8),
    (GeometryError, 8),
    (EigenstateError, 8),
    (ObservableError, 8),
)

ERRATA_HEADER = ["key", "location", "printed", "implemented"]

error_console = Console(stderr=True)


class LogLevel(StrEnum):
    DEBUG = "DEBUG"
    INFO = "INFO"


app = typer.Typer(
    name="billiard-prop",
    help="Eigenstates, theta-function propagators and covariances of quantum billiards",
    add_completion=True,
)

config_option = typer.Option(
    "--config",
    "-c",
    help="Path to the YAML run configuration",
    exists=True,
    file_okay=True,
    dir_okay=False,
    readable=True,
)

out_option = typer.Option(
    None,
    "--out",
    "-o",
    help="Output directory (overrides output.dir)",
)

verbose_option = typer.Option(False, "--verbose", "-v", help="Enable debug logging")

log_file_option = typer.Option(
    None,
    "--log-file",
    help="Also append a DEBUG-level run log to this file",
    dir_okay=False,
)


def exit_code_for(error: Exception) -> int:
    for cls, code in EXIT_CODES:
        if isinstance(error, cls):
            return code
    return 1


def report_error(error: Exception, code: int) -> None:
    """Human-readable message, then one JSON line for machine consumers."""
    error_console.print(f"[red]Error: {escape(str(error))}[/red]")
    payload = {"error": type(error).__name__, "exit_code": code, "message": str(error)}
    typer.echo(json.dumps(payload), err=True)


def prepare_output_dir(path: Path) -> None:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"Cannot create output directory '{path}': {e}") from e
    if not path.is_dir():
        raise OutputError(f"Output path '{path}' is not a directory")


def run(config: RunConfig) -> list[Path]:
    """
    Execute one configured scenario and write its tables plus ``errata.csv``.

    Returns
    -------
    list[Path]
        Every file written, in order.
    """
    prepare_output_dir(config.output_dir)
    writer = CsvTableWriter(config.metadata())
    ledger = ErrataLedger()
    runner = create_scenario(config, writer, ledger)
    outputs = runner.run()
    outputs.append(
        writer.save_table(config.output_dir / "errata.csv", ERRATA_HEADER, ledger.rows())
    )
    logger.info(f"Done! {len(outputs)} file(s) written, {len(ledger)} errata recorded")
    return outputs


def execute(
    scenario: Scenario,
    config_file: Path,
    out: Path | None,
    verbose: bool,
    log_file: Path | None = None,
):
    setup_logging(LogLevel.DEBUG.value if verbose else LogLevel.INFO.value, log_file)
    try:
        try:
            text = config_file.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as e:
            raise ConfigParseError(f"cannot read '{config_file}': {e}") from e
        config = parse_config(text, scenario, out)
        outputs = run(config)
    except Exception as e:
        code = exit_code_for(e)
        logger.debug("Run failed", exc_info=True)
        report_error(e, code)
        raise typer.Exit(code=code) from e
    rprint(f"[green]Wrote {len(outputs)} file(s) to {config.output_dir}[/green]")


@app.command(name="eigen", help="Tabulate eigenstates, energies and residuals")
def eigen_cmd(
    config_file: Annotated[Path, config_option],
    out: Path | None = out_option,
    verbose: bool = verbose_option,
    log_file: Path | None = log_file_option,
):
    execute(Scenario.EIGEN, config_file, out, verbose, log_file)


@app.command(name="evolve", help="Propagate a superposition with the theta kernels")
def evolve_cmd(
    config_file: Annotated[Path, config_option],
    out: Path | None = out_option,
    verbose: bool = verbose_option,
    log_file: Path | None = log_file_option,
):
    execute(Scenario.EVOLVE, config_file, out, verbose, log_file)


@app.command(name="covariance", help="Covariance of the COM and relative coordinates")
def covariance_cmd(
    config_file: Annotated[Path, config_option],
    out: Path | None = out_option,
    verbose: bool = verbose_option,
    log_file: Path | None = log_file_option,
):
    execute(Scenario.COVARIANCE, config_file, out, verbose, log_file)


@app.command(name="greens-check", help="Compare theta kernels with the spectral sum")
def greens_check_cmd(
    config_file: Annotated[Path, config_option],
    out: Path | None = out_option,
    verbose: bool = verbose_option,
    log_file: Path | None = log_file_option,
):
    execute(Scenario.GREENS_CHECK, config_file, out, verbose, log_file)


@app.command(name="domain", help="Vertices of the confinement polygon")
def domain_cmd(
    config_file: Annotated[Path, config_option],
    out: Path | None = out_option,
    verbose: bool = verbose_option,
    log_file: Path | None = log_file_option,
):
    execute(Scenario.DOMAIN, config_file, out, verbose, log_file)


if __name__ == "__main__":
    app()
