import pytest

from agp_tomography.resource_manager import ResourceManager

pytestmark = pytest.mark.unit


class TestNoisePresets:
    def test_packaged_presets(self):
        assert ResourceManager.list_noise_presets() == ["device-like", "ideal"]

    def test_device_like_values(self):
        assert ResourceManager.get_noise_preset("Device-Like") == {
            "p1": 0.002,
            "p2": 0.02,
            "readout_01": 0.03,
            "readout_10": 0.03,
        }

    def test_unknown_preset(self):
        assert ResourceManager.get_noise_preset("loud") is None

    def test_malformed_file(self, mocker, caplog):
        mocker.patch("agp_tomography.resource_manager.YAML.load", return_value=["p1"])
        assert ResourceManager.get_packaged_noise_presets() == {}
        assert "expected a mapping" in caplog.text
