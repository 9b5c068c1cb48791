"""
constants.py

This module contains constant values that are used throughout the application.
"""

MAX_QUBITS = 24
MAX_QUBITS_ENV = "AGP_MAX_QUBITS"
ORACLE_MAX_QUBITS = 14

DEFAULT_SHOTS = 8192
DEFAULT_SEED = 0
DEFAULT_WORKERS = 4

NORM_TOL = 1e-12
UNITARY_TOL = 1e-12
HERMITIAN_TOL = 1e-8
VERIFY_TOL = 1e-10
ZERO_WEIGHT_TOL = 1e-14

# Significant digits for CSV/JSON numbers
REPORT_DIGITS = 12

DEFAULT_NOISE_PRESET = "ideal"
