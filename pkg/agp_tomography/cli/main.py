import logging
import sys
import time
from enum import Enum
from pathlib import Path
from typing import Annotated

import typer
from rich.logging import RichHandler
from rich.table import Table

import agp_tomography
from agp_tomography.backend.base import GeminalBackend, SweepResult, SweepRow
from agp_tomography.backend.exact import ExactBackend
from agp_tomography.backend.shots import ShotBackend
from agp_tomography.cli import console
from agp_tomography.config import (
    Mode,
    OutputFormat,
    RunConfig,
    build_noise,
    parse_r_list,
)
from agp_tomography.constants import DEFAULT_SEED, DEFAULT_SHOTS, DEFAULT_WORKERS
from agp_tomography.exceptions import AgpError
from agp_tomography.qasm import ExportTarget, export_circuits
from agp_tomography.report import (
    geminal_filename,
    geminal_to_csv,
    reports_to_csv,
    reports_to_json,
    write_text,
)
from agp_tomography.verify import SECTOR_R_MAX, dump_rdms, run_checks

logger = logging.getLogger("main")
error_occurred = False
warning_count = 0

cli = typer.Typer(
    help="Simulate and certify pair condensation in extreme AGP qubit states.",
    add_completion=False,
    no_args_is_help=True,
)


class LogLevel(str, Enum):
    """Supported log levels."""

    CRITICAL = "CRITICAL"
    ERROR = "ERROR"
    WARNING = "WARNING"
    INFO = "INFO"
    DEBUG = "DEBUG"


class ErrorTrackingHandler(logging.Handler):
    """Custom handler to track errors and count warnings."""

    def emit(self, record: logging.LogRecord) -> None:
        """Set error flag on error or critical logs, count warnings."""
        global error_occurred, warning_count
        if record.levelno >= logging.ERROR:
            error_occurred = True
        elif record.levelno >= logging.WARNING:
            warning_count += 1


def configure_logging(level: LogLevel) -> None:
    """Configure logging with Rich handler."""
    global error_occurred, warning_count
    error_occurred = False  # Reset error flag
    warning_count = 0

    level_map = {
        LogLevel.DEBUG: logging.DEBUG,
        LogLevel.INFO: logging.INFO,
        LogLevel.WARNING: logging.WARNING,
        LogLevel.ERROR: logging.ERROR,
        LogLevel.CRITICAL: logging.CRITICAL,
    }

    root_logger = logging.getLogger()
    # Clear existing handlers
    root_logger.handlers.clear()

    # Add Rich handler
    handler = RichHandler(console=console, show_time=True, show_path=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    handler.setLevel(level_map[level])
    root_logger.addHandler(handler)

    # Warnings are counted even when the console shows errors only
    error_tracker = ErrorTrackingHandler()
    error_tracker.setLevel(logging.WARNING)
    root_logger.addHandler(error_tracker)

    root_logger.setLevel(min(level_map[level], logging.WARNING))


def version_callback(value: bool) -> None:
    """Show version and exit."""
    if value:
        console.print(f"agp-tomography version: {agp_tomography.__version__}")
        raise typer.Exit()


@cli.callback()
def main(
    verbosity: Annotated[
        LogLevel,
        typer.Option("-v", "--verbosity", help="Log level"),
    ] = LogLevel.WARNING,
    version: Annotated[
        bool | None,
        typer.Option(
            "--version",
            callback=version_callback,
            is_eager=True,
            help="Show version and exit",
        ),
    ] = None,
) -> None:
    """Simulate and certify pair condensation in extreme AGP qubit states."""
    configure_logging(verbosity)


def make_backend(config: RunConfig) -> GeminalBackend:
    if config.mode is Mode.SHOTS:
        return ShotBackend(
            shots=config.shots or DEFAULT_SHOTS,
            noise=config.noise,
            workers=config.workers,
            console=console,
        )
    return ExactBackend(workers=config.workers, console=console)


def write_matrices(results: list[SweepResult], directory: Path) -> None:
    for result in results:
        if result.geminal is None or result.geminal.m == 0:
            continue
        path = directory / geminal_filename(result.row.num_qubits, result.row.sector)
        write_text(path, geminal_to_csv(result.geminal))


@cli.command()
def sweep(
    r: Annotated[
        str,
        typer.Option(
            "--r",
            help="Even qubit counts: comma list (2,6,10) or inclusive range (0-14)",
        ),
    ],
    sectors: Annotated[
        str,
        typer.Option(
            "--sectors",
            help="'ensemble', 'all' (every even N) or a comma list of particle numbers",
        ),
    ] = "ensemble",
    mode: Annotated[
        Mode,
        typer.Option("--mode", help="Exact statevector or sampled shots"),
    ] = Mode.EXACT,
    shots: Annotated[
        int | None,
        typer.Option("--shots", help=f"Shots per setting (shots mode, default {DEFAULT_SHOTS})"),
    ] = None,
    seed: Annotated[
        int,
        typer.Option("--seed", help="Base seed; the k-th r value samples with seed + k"),
    ] = DEFAULT_SEED,
    noise_preset: Annotated[
        str | None,
        typer.Option("--noise-preset", help="Packaged noise preset (ideal, device-like)"),
    ] = None,
    noise_p1: Annotated[
        float | None,
        typer.Option("--noise-p1", help="Depolarizing probability after 1-qubit gates"),
    ] = None,
    noise_p2: Annotated[
        float | None,
        typer.Option("--noise-p2", help="Depolarizing probability after 2-qubit gates"),
    ] = None,
    noise_readout_01: Annotated[
        float | None,
        typer.Option("--noise-readout-01", help="Probability of reading 1 for a 0"),
    ] = None,
    noise_readout_10: Annotated[
        float | None,
        typer.Option("--noise-readout-10", help="Probability of reading 0 for a 1"),
    ] = None,
    output_format: Annotated[
        OutputFormat,
        typer.Option("--format", help="Report format"),
    ] = OutputFormat.CSV,
    out: Annotated[
        Path | None,
        typer.Option("-o", "--out", help="Report file (stdout when omitted)"),
    ] = None,
    workers: Annotated[
        int,
        typer.Option("--workers", help="Rows evaluated in parallel"),
    ] = DEFAULT_WORKERS,
    matrices_dir: Annotated[
        Path | None,
        typer.Option("--matrices-dir", help="Directory for per-row geminal matrix CSVs"),
    ] = None,
) -> None:
    """Compute lambda_D for every (r, sector) row and write the report."""
    start_time = time.time()

    try:
        noise = build_noise(
            noise_preset, noise_p1, noise_p2, noise_readout_01, noise_readout_10
        )
        if mode is Mode.EXACT and noise is not None:
            logger.info("Noise settings are ignored in exact mode")
            noise = None
        config = RunConfig(
            r_list=parse_r_list(r),
            sectors=sectors,
            mode=mode,
            shots=(DEFAULT_SHOTS if shots is None else shots) if mode is Mode.SHOTS else None,
            seed=seed,
            noise=noise,
            output_format=output_format,
            output=out,
            workers=workers,
            matrices_dir=matrices_dir,
        )
        rows = [
            SweepRow(index, num_qubits, sector, config.seed_for(num_qubits))
            for index, (num_qubits, sector) in enumerate(config.rows())
        ]
        results = make_backend(config).run_sweep(rows)
        reports = [result.report for result in results]
        if config.output_format is OutputFormat.JSON:
            text = reports_to_json(reports)
        else:
            text = reports_to_csv(reports)

        if config.output is None:
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            write_text(config.output, text)
            console.print(f"[green]Wrote {len(reports)} row(s) to {config.output}[/green]")
        if config.matrices_dir is not None:
            write_matrices(results, config.matrices_dir)
    except AgpError as e:
        console.print(f"[red]{e}[/red]")
        raise typer.Exit(1) from e

    unavailable = sum(1 for report in reports if not report.available)
    if unavailable:
        console.print(
            f"[yellow]{unavailable} row(s) flagged unavailable, "
            f"{warning_count} warning(s)[/yellow]"
        )

    logger.info(f"Total execution time: {time.time() - start_time:.2f} seconds")

    exit_app()


@cli.command()
def export(
    r: Annotated[
        int,
        typer.Option("--r", help="Even qubit count (>= 2)"),
    ],
    what: Annotated[
        ExportTarget,
        typer.Option("--what", help="Preparation circuit, setting circuits or both"),
    ] = ExportTarget.PREP,
    out: Annotated[
        Path,
        typer.Option("-o", "--out", help="Output directory"),
    ] = Path("."),
) -> None:
    """Write OpenQASM 2.0 files for the preparation and measurement circuits."""
    if r < 2 or r % 2:
        raise typer.BadParameter(f"r must be an even integer >= 2, got {r}", param_hint="--r")

    try:
        written = export_circuits(r, what, out)
    except AgpError as e:
        console.print(f"[red]{e}[/red]")
        raise typer.Exit(1) from e

    console.print(f"[green]Wrote {len(written)} file(s) to {out}[/green]")
    exit_app()


@cli.command()
def verify(
    r_max: Annotated[
        int,
        typer.Option(
            "--r-max",
            help="Largest r for sector and trace checks (operator checks stop at 8)",
        ),
    ] = SECTOR_R_MAX,
    dump_rdm: Annotated[
        Path | None,
        typer.Option(
            "--dump-rdm",
            help="Also write the brute-force 2-RDM of every checked r as CSV into this directory",
        ),
    ] = None,
) -> None:
    """Cross-check expansions, estimators and closed forms against the oracle."""
    if r_max < 2:
        raise typer.BadParameter(f"r-max must be >= 2, got {r_max}", param_hint="--r-max")

    try:
        results = run_checks(r_max)
        if dump_rdm is not None:
            written = dump_rdms(r_max, dump_rdm)
            console.print(f"[green]Wrote {len(written)} 2-RDM file(s) to {dump_rdm}[/green]")
    except AgpError as e:
        console.print(f"[red]{e}[/red]")
        raise typer.Exit(1) from e

    table = Table(title=f"Verification (r <= {r_max})")
    table.add_column("Check")
    table.add_column("Cases", justify="right")
    table.add_column("Max deviation", justify="right")
    table.add_column("Result")
    for result in results:
        status = "[green]PASS[/green]" if result.passed else "[red]FAIL[/red]"
        table.add_row(result.name, str(result.cases), f"{result.max_deviation:.2e}", status)
    console.print(table)

    failed = [result for result in results if not result.passed]
    if failed:
        console.print(f"[red]First failing identity: {failed[0].name} at {failed[0].first_failure}[/red]")
        raise typer.Exit(1)
    console.print(f"[green]All {len(results)} checks passed[/green]")
    exit_app()


def exit_app() -> None:
    """Exit the application with appropriate exit code."""
    global error_occurred
    if error_occurred:
        raise typer.Exit(1)
    else:
        raise typer.Exit(0)


def app() -> None:
    """Run the application."""
    cli()


if __name__ == "__main__":
    app()
