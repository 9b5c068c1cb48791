import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from agp_tomography.constants import DEFAULT_SEED, DEFAULT_SHOTS, DEFAULT_WORKERS
from agp_tomography.exceptions import ValidationError
from agp_tomography.rdm import ENSEMBLE, Sector
from agp_tomography.statevector import NoiseModel, max_qubits

logger = logging.getLogger(__name__)


class Mode(str, Enum):
    """How geminal matrices are obtained."""

    EXACT = "exact"
    SHOTS = "shots"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


@dataclass(frozen=True)
class RunConfig:
    """
    Validated sweep configuration, built only from command-line flags.

    Invariants: every r is even and within the capacity cap; shots is set iff
    mode is SHOTS; noise only applies to SHOTS.
    """

    r_list: tuple[int, ...]
    sectors: str = ENSEMBLE
    mode: Mode = Mode.EXACT
    shots: int | None = None
    seed: int = DEFAULT_SEED
    noise: NoiseModel | None = None
    output_format: OutputFormat = OutputFormat.CSV
    output: Path | None = None
    workers: int = DEFAULT_WORKERS
    matrices_dir: Path | None = field(default=None)

    def __post_init__(self) -> None:
        if not self.r_list:
            raise ValidationError("At least one r value is required")
        cap = max_qubits()
        for r in self.r_list:
            if r < 0 or r % 2:
                raise ValidationError(f"r values must be even and non-negative, got {r}")
            if r > cap:
                raise ValidationError(f"r={r} exceeds the capacity cap of {cap} qubits")
        if self.mode is Mode.SHOTS and (self.shots is None or self.shots < 1):
            raise ValidationError("Shots mode needs a positive shot count")
        if self.mode is Mode.EXACT and self.shots is not None:
            raise ValidationError("Exact mode takes no shot count")
        if self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")
        sectors_for(0, self.sectors)

    def rows(self) -> list[tuple[int, Sector]]:
        """(r, sector) pairs in output order."""
        return [(r, sector) for r in self.r_list for sector in sectors_for(r, self.sectors)]

    def seed_for(self, num_qubits: int) -> int:
        """Sampling seed of register r: seed + position of r in r_list, shared by its sectors."""
        return self.seed + self.r_list.index(num_qubits)


def parse_r_list(text: str) -> tuple[int, ...]:
    """
    Parse ``"0-14"`` (every even r in the range) or ``"2,6,10"``.

    Parameters:
        text (str): Comma-separated values and inclusive ranges.

    Returns:
        tuple[int, ...]: r values in the order given, duplicates removed.
    """
    values: list[int] = []
    try:
        for token in text.split(","):
            token = token.strip()
            if not token:
                continue
            if "-" in token[1:]:
                start_text, end_text = token.split("-", 1)
                start, end = int(start_text), int(end_text)
                if start > end:
                    raise ValidationError(f"Empty r range '{token}'")
                values.extend(r for r in range(start, end + 1) if r % 2 == 0)
            else:
                values.append(int(token))
    except ValueError as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(f"Invalid r list '{text}': {e}") from e
    return tuple(dict.fromkeys(values))


def sectors_for(num_qubits: int, text: str) -> list[Sector]:
    """
    Expand a sectors flag for one r.

    ``ensemble`` keeps the full superposition, ``all`` gives every even
    N in [0, r], integers select explicit particle numbers. Tokens combine with
    commas, e.g. ``"ensemble,all"``.
    """
    sectors: list[Sector] = []
    for token in text.split(","):
        token = token.strip().lower()
        if not token:
            continue
        if token == ENSEMBLE:
            sectors.append(ENSEMBLE)
        elif token == "all":
            sectors.extend(range(0, num_qubits + 1, 2))
        else:
            try:
                n_particles = int(token)
            except ValueError as e:
                raise ValidationError(
                    f"Invalid sector '{token}': expected 'ensemble', 'all' or an integer"
                ) from e
            if n_particles < 0:
                raise ValidationError(f"Particle numbers must be >= 0, got {n_particles}")
            sectors.append(n_particles)
    if not sectors and text.strip():
        raise ValidationError(f"No sectors in '{text}'")
    return list(dict.fromkeys(sectors))


def build_noise(
    preset: str | None,
    p1: float | None = None,
    p2: float | None = None,
    readout_01: float | None = None,
    readout_10: float | None = None,
) -> NoiseModel | None:
    """Start from a packaged preset (if any) and override individual rates."""
    overrides = {
        "p1": p1,
        "p2": p2,
        "readout_01": readout_01,
        "readout_10": readout_10,
    }
    if preset is None and all(value is None for value in overrides.values()):
        return None
    base = NoiseModel.from_preset(preset) if preset else NoiseModel()
    fields = {
        "p1": base.p1,
        "p2": base.p2,
        "readout_01": base.readout_01,
        "readout_10": base.readout_10,
    }
    fields.update({name: value for name, value in overrides.items() if value is not None})
    noise = NoiseModel(**fields)
    logger.debug(f"Noise model: {noise}")
    return None if noise.is_ideal else noise
