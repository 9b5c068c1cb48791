"""CSV and JSON rendering of sweep reports and geminal matrices."""

import csv
import io
import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from agp_tomography.constants import REPORT_DIGITS
from agp_tomography.exceptions import OutputError
from agp_tomography.rdm import CondensationReport, GeminalMatrix, Sector, sector_label

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ("r", "sector", "lambda_D", "bound", "condensed", "stderr")


def format_number(value: float | None) -> str:
    """Fixed significant-digit rendering; empty for missing values."""
    if value is None:
        return ""
    if abs(value) < 10.0 ** -(REPORT_DIGITS + 3):
        value = 0.0
    return f"{value:.{REPORT_DIGITS}g}"


def _rounded(value: float | None) -> float | None:
    return None if value is None else float(format_number(value))


def format_complex(value: complex) -> str:
    re = format_number(value.real)
    im = format_number(value.imag)
    sign = "" if im.startswith("-") else "+"
    return f"{re}{sign}{im}j"


def report_row(report: CondensationReport) -> dict[str, str]:
    condensed = "" if report.condensed is None else str(report.condensed).lower()
    return {
        "r": str(report.r),
        "sector": str(report.sector),
        "lambda_D": format_number(report.lambda_D),
        "bound": format_number(report.bound),
        "condensed": condensed,
        "stderr": format_number(report.lambda_stderr),
    }


def reports_to_csv(reports: Sequence[CondensationReport]) -> str:
    """Header r,sector,lambda_D,bound,condensed,stderr then one row per report."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for report in reports:
        writer.writerow(report_row(report))
    return buffer.getvalue()


def report_record(report: CondensationReport) -> dict[str, Any]:
    return {
        "r": report.r,
        "sector": report.sector,
        "lambda_D": _rounded(report.lambda_D),
        "bound": _rounded(report.bound),
        "condensed": report.condensed,
        "stderr": _rounded(report.lambda_stderr),
    }


def reports_to_json(reports: Sequence[CondensationReport]) -> str:
    """JSON array mirroring the CSV columns; missing values are null."""
    return json.dumps([report_record(report) for report in reports], indent=2) + "\n"


def geminal_to_csv(geminal: GeminalMatrix) -> str:
    """m rows of m cells, each cell written as re+imj."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    for row in geminal.entries:
        writer.writerow([format_complex(complex(value)) for value in row])
    return buffer.getvalue()


def write_text(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as e:
        raise OutputError(f"Failed to write {path}: {e}") from e
    logger.debug(f"Wrote {path}")
    return path


def geminal_filename(num_qubits: int, sector: Sector) -> str:
    return f"agp_r{num_qubits}_{sector_label(sector)}_geminal.csv"
