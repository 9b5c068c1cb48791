"""Resource manager for accessing packaged data files."""

import logging
from importlib import resources
from typing import Any

from ruamel.yaml import YAML

logger = logging.getLogger(__name__)

NOISE_PRESETS_FILE = "noise_presets.yaml"


class ResourceManager:
    """Manages access to packaged YAML resources."""

    @staticmethod
    def get_packaged_noise_presets() -> dict[str, dict[str, float]]:
        """
        Get all noise presets from the packaged YAML file.

        Returns:
            Mapping of preset name to its probability fields. Empty when the
            resource is missing or malformed.
        """
        try:
            from agp_tomography import resources as packaged

            resource = resources.files(packaged).joinpath(NOISE_PRESETS_FILE)
            if not resource.is_file():
                logger.debug(f"Packaged noise preset file not found: {resource}")
                return {}

            yaml = YAML(typ="safe", pure=True)
            content: Any = yaml.load(resource.read_text(encoding="utf-8"))
            if not isinstance(content, dict):
                logger.error(
                    "Invalid noise preset file format: expected a mapping of presets"
                )
                return {}

            presets: dict[str, dict[str, float]] = {}
            for name, fields in content.items():
                if not isinstance(fields, dict):
                    logger.error(f"Invalid noise preset '{name}': expected a mapping")
                    continue
                presets[str(name)] = {str(k): float(v) for k, v in fields.items()}
            logger.debug(f"Read packaged noise presets: {sorted(presets)}")
            return presets

        except (ImportError, AttributeError, FileNotFoundError, ValueError) as e:
            logger.debug(f"Failed to read packaged noise presets: {e}")
            return {}

    @staticmethod
    def get_noise_preset(name: str) -> dict[str, float] | None:
        """
        Get one noise preset by name.

        Args:
            name: The preset name (e.g., 'ideal', 'device-like').

        Returns:
            The preset fields if the preset exists, None otherwise.
        """
        return ResourceManager.get_packaged_noise_presets().get(name.lower())

    @staticmethod
    def list_noise_presets() -> list[str]:
        """
        List all packaged noise preset names.

        Returns:
            Sorted list of preset names.
        """
        available = sorted(ResourceManager.get_packaged_noise_presets())
        logger.debug(f"Available noise presets: {available}")
        return available
