import json

import numpy as np
import pytest

from agp_tomography.exceptions import OutputError
from agp_tomography.rdm import ENSEMBLE, CondensationReport, GeminalMatrix, unavailable_report
from agp_tomography.report import (
    format_complex,
    format_number,
    geminal_filename,
    geminal_to_csv,
    reports_to_csv,
    reports_to_json,
    write_text,
)

pytestmark = pytest.mark.unit


@pytest.fixture
def reports():
    return [
        CondensationReport(r=14, sector=ENSEMBLE, lambda_D=2.0, bound=None, condensed=True),
        CondensationReport(
            r=14,
            sector=8,
            lambda_D=16 / 7,
            bound=8 * (1 - 6 / 14),
            condensed=True,
            lambda_stderr=0.0125,
        ),
        unavailable_report(6, 3),
    ]


class TestFormatting:
    @pytest.mark.parametrize(
        ("value", "expected"),
        [(None, ""), (0.75, "0.75"), (16 / 7, "2.28571428571"), (1e-18, "0"), (-3e-17, "0")],
    )
    def test_format_number(self, value, expected):
        assert format_number(value) == expected

    def test_format_complex(self):
        assert format_complex(0.25 - 0.5j) == "0.25-0.5j"
        assert format_complex(0.5 + 0j) == "0.5+0j"


class TestReportsToCsv:
    def test_rows(self, reports):
        assert reports_to_csv(reports).splitlines() == [
            "r,sector,lambda_D,bound,condensed,stderr",
            "14,ensemble,2,,true,",
            "14,8,2.28571428571,4.57142857143,true,0.0125",
            "6,3,,,,",
        ]

    def test_header_only(self):
        assert reports_to_csv([]) == "r,sector,lambda_D,bound,condensed,stderr\n"


class TestReportsToJson:
    def test_records(self, reports):
        records = json.loads(reports_to_json(reports))
        assert records[0] == {
            "r": 14,
            "sector": "ensemble",
            "lambda_D": 2.0,
            "bound": None,
            "condensed": True,
            "stderr": None,
        }
        assert records[1]["sector"] == 8
        assert records[1]["lambda_D"] == pytest.approx(16 / 7)
        assert records[2]["condensed"] is None

    def test_trailing_newline(self, reports):
        assert reports_to_json(reports).endswith("]\n")


class TestGeminalOutput:
    def test_geminal_csv(self):
        geminal = GeminalMatrix(np.array([[0.5, 0.25 + 0.1j], [0.25 - 0.1j, 0.5]]))
        assert geminal_to_csv(geminal) == "0.5+0j,0.25+0.1j\n0.25-0.1j,0.5+0j\n"

    def test_filenames(self):
        assert geminal_filename(6, ENSEMBLE) == "agp_r6_ensemble_geminal.csv"
        assert geminal_filename(6, 4) == "agp_r6_N4_geminal.csv"

    def test_write_text_creates_parents(self, tmp_path):
        path = write_text(tmp_path / "a" / "b.csv", "x\n")
        assert path.read_text(encoding="utf-8") == "x\n"

    def test_write_text_failure(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        with pytest.raises(OutputError):
            write_text(blocker / "out.csv", "x\n")
