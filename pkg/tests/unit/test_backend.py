import pytest

from agp_tomography.backend.base import SweepRow, check_sector
from agp_tomography.backend.exact import ExactBackend
from agp_tomography.backend.shots import ShotBackend
from agp_tomography.exceptions import EmptySectorError
from agp_tomography.oracle import closed_form_lambda
from agp_tomography.rdm import ENSEMBLE
from agp_tomography.statevector import NoiseModel

pytestmark = pytest.mark.unit


def rows(*cells):
    return [SweepRow(i, r, sector, seed=100 + i) for i, (r, sector) in enumerate(cells)]


class TestCheckSector:
    def test_inside(self):
        check_sector(6, 4)
        check_sector(6, ENSEMBLE)

    @pytest.mark.parametrize("sector", [-2, 8])
    def test_outside(self, sector):
        with pytest.raises(EmptySectorError):
            check_sector(6, sector)


class TestExactBackend:
    def test_sweep_matches_closed_forms_in_row_order(self):
        cells = [(r, sector) for r in (2, 4, 6, 8) for sector in (ENSEMBLE, 2, 4)]
        cells = [(r, s) for r, s in cells if s == ENSEMBLE or s <= r]
        results = ExactBackend(workers=4).run_sweep(rows(*cells))
        assert [(res.row.num_qubits, res.row.sector) for res in results] == cells
        for result in results:
            expected = closed_form_lambda(result.row.sector, result.row.num_qubits)
            assert result.report.lambda_D == pytest.approx(expected, abs=1e-10)
            assert result.geminal is not None

    def test_zero_qubits(self):
        [ensemble, vacuum] = ExactBackend().run_sweep(rows((0, ENSEMBLE), (0, 0)))
        assert ensemble.report.lambda_D == 0.0
        assert ensemble.report.condensed is False
        assert vacuum.report.lambda_D == 0.0
        assert ensemble.geminal.m == 0

    def test_odd_and_oversized_sectors_are_flagged(self, caplog):
        results = ExactBackend().run_sweep(rows((6, 3), (6, 8), (6, 2)))
        assert [res.report.available for res in results] == [False, False, True]
        assert results[0].report.lambda_D is None
        assert results[0].geminal is None
        assert "Sector unavailable" in caplog.text


class TestShotBackend:
    def test_same_seed_same_histograms(self):
        backend = ShotBackend(shots=500)
        assert backend.collect_histograms(4, seed=7) == backend.collect_histograms(4, seed=7)
        assert backend.collect_histograms(4, seed=7) != backend.collect_histograms(4, seed=8)

    def test_setting_count(self):
        histograms = ShotBackend(shots=10).collect_histograms(6, seed=0)
        assert len(histograms) == 7
        assert all(sum(h.values()) == 10 for _, h in histograms)

    def test_ideal_estimate_within_errors(self):
        [result] = ShotBackend(shots=20000).run_sweep(rows((4, ENSEMBLE)))
        report = result.report
        assert report.lambda_stderr is not None and report.lambda_stderr > 0
        assert abs(report.lambda_D - 0.75) < 5 * report.lambda_stderr

    def test_post_selected_sector(self):
        [result] = ShotBackend(shots=20000).run_sweep(rows((4, 2)))
        assert abs(result.report.lambda_D - 1.0) < 5 * result.report.lambda_stderr

    def test_odd_sector_empty_without_noise(self):
        [result] = ShotBackend(shots=1000).run_sweep(rows((4, 1)))
        assert not result.report.available

    def test_readout_noise_populates_odd_sectors(self):
        backend = ShotBackend(shots=2000, noise=NoiseModel(readout_01=0.1, readout_10=0.1))
        [result] = backend.run_sweep(rows((4, 1)))
        assert result.report.available

    def test_sectors_share_one_readout_collection(self, mocker):
        backend = ShotBackend(shots=500)
        spy = mocker.spy(backend, "collect_histograms")
        shared = [SweepRow(i, 4, sector, seed=9) for i, sector in enumerate((ENSEMBLE, 2, 4))]
        results = backend.run_sweep(shared + [SweepRow(3, 4, 2, seed=10)])
        assert spy.call_count == 2
        assert all(result.report.available for result in results)
