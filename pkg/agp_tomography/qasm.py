"""OpenQASM 2.0 export of preparation and measurement circuits."""

import logging
from collections.abc import Iterable
from enum import Enum
from pathlib import Path

from agp_tomography.exceptions import UnsupportedGateError, ValidationError
from agp_tomography.report import write_text
from agp_tomography.statevector import Circuit, GateKind, agp_circuit
from agp_tomography.tomography import MeasurementSetting, plan_settings

logger = logging.getLogger(__name__)

QASM_HEADER = ("OPENQASM 2.0;", 'include "qelib1.inc";')

QASM_NAMES: dict[GateKind, str] = {
    GateKind.H: "h",
    GateKind.X: "x",
    GateKind.Y: "y",
    GateKind.Z: "z",
    GateKind.S: "s",
    GateKind.SDG: "sdg",
    GateKind.T: "t",
    GateKind.TDG: "tdg",
    GateKind.CNOT: "cx",
}


class ExportTarget(str, Enum):
    """Which circuits the export command writes."""

    PREP = "prep"
    SETTINGS = "settings"
    ALL = "all"


def export_circuit_text(circuit: Circuit, measured_qubits: Iterable[int] | None = None) -> str:
    """
    Render a circuit as OpenQASM 2.0 with one quantum and one classical register.

    Qubit k maps to q[k-1] and is measured into c[k-1]; by default every qubit is
    measured. Dense UNITARY gates have no qelib1 name and raise UnsupportedGateError.
    """
    n = circuit.num_qubits
    if n < 1:
        raise ValidationError("Cannot export a circuit without qubits")
    lines = [*QASM_HEADER, f"qreg q[{n}];", f"creg c[{n}];"]
    for gate in circuit.gates:
        name = QASM_NAMES.get(gate.kind)
        if name is None:
            raise UnsupportedGateError(
                f"{gate.kind.value} gate on {gate.targets} has no OpenQASM 2.0 equivalent"
            )
        args = ",".join(f"q[{t - 1}]" for t in gate.targets)
        lines.append(f"{name} {args};")
    measured = range(1, n + 1) if measured_qubits is None else measured_qubits
    for qubit in measured:
        if not 1 <= qubit <= n:
            raise ValidationError(f"Cannot measure qubit {qubit} of a {n}-qubit register")
        lines.append(f"measure q[{qubit - 1}] -> c[{qubit - 1}];")
    return "\n".join(lines) + "\n"


def setting_filename(num_qubits: int, setting: MeasurementSetting) -> str:
    return f"agp_r{num_qubits}_{setting.label}.qasm"


def export_circuits(num_qubits: int, what: ExportTarget, directory: Path) -> list[Path]:
    """
    Write the preparation circuit and/or prep+rotation circuits for every setting.

    Files are named agp_r{r}_prep.qasm, agp_r{r}_diagonal.qasm and
    agp_r{r}_pair{p}_{q}_{re|im}.qasm.
    """
    prep = agp_circuit(num_qubits)
    written: list[Path] = []
    if what in (ExportTarget.PREP, ExportTarget.ALL):
        written.append(
            write_text(directory / f"agp_r{num_qubits}_prep.qasm", export_circuit_text(prep))
        )
    if what in (ExportTarget.SETTINGS, ExportTarget.ALL):
        for setting in plan_settings(num_qubits):
            text = export_circuit_text(prep + setting.rotation)
            written.append(write_text(directory / setting_filename(num_qubits, setting), text))
    logger.info(f"Exported {len(written)} circuit(s) for r={num_qubits} to {directory}")
    return written
