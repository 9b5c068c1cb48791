"""Cross-checks between the Pauli layer, the statevector estimators and the oracle.

Each check walks its cases in a fixed order and stops at the first case whose
deviation exceeds the tolerance, so a failing result names the first broken
identity.
"""

import logging
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import numpy.typing as npt

from agp_tomography.constants import ORACLE_MAX_QUBITS, VERIFY_TOL
from agp_tomography.exceptions import OutputError
from agp_tomography.oracle import (
    brute_force_2rdm,
    closed_form_lambda,
    geminal_block_of,
    paired_subspace_lambda,
    sector_weight,
)
from agp_tomography.pairing import (
    Component,
    FermionOp,
    diagonal_pair_occupation,
    jw_pair_creation,
    pauli_expansion_pair_hopper,
    terms_to_sum,
)
from agp_tomography.rdm import (
    ENSEMBLE,
    assemble_exact,
    assemble_from_shots,
    embed_orbital_block,
    largest_eigenvalue,
    yang_coleman_bound,
)
from agp_tomography.statevector import (
    StateVector,
    exact_distribution,
    prepare_agp,
    project_particle_number,
)
from agp_tomography.tomography import estimates_from_histograms, plan_settings

logger = logging.getLogger(__name__)

OPERATOR_R_MAX = 8
SECTOR_R_MAX = 12

# (case label, deviation)
Case = tuple[str, float]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    cases: int
    max_deviation: float
    first_failure: str | None = None


def _deviation(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    diff = np.asarray(a, dtype=np.complex128) - np.asarray(b, dtype=np.complex128)
    return float(np.max(np.abs(diff))) if diff.size else 0.0


def _even(upper: int, lower: int = 2) -> range:
    return range(lower, upper + 1, 2)


def _sector_states(num_qubits: int) -> Iterator[tuple[int, StateVector, float]]:
    state = prepare_agp(num_qubits)
    for n_particles in range(0, num_qubits + 1, 2):
        projection = project_particle_number(state, n_particles)
        if projection.state is not None:
            yield n_particles, projection.state, projection.weight


def _pair_creation_reference(p: int, num_qubits: int, with_strings: bool) -> npt.NDArray[np.complex128]:
    return FermionOp(((2 * p, True), (2 * p - 1, True)), with_strings).to_matrix(num_qubits)


def check_jw_strings(r_max: int) -> Iterator[Case]:
    """Pair creation with strings equals minus the bare sigma+ sigma+ form, and both match the ladder action."""
    for r in _even(min(r_max, OPERATOR_R_MAX)):
        for p in range(1, r // 2 + 1):
            full = jw_pair_creation(p, True, r).to_matrix()
            bare = jw_pair_creation(p, False, r).to_matrix()
            yield f"r={r} p={p} strings vs -bare", _deviation(full, -bare)
            yield f"r={r} p={p} strings vs ladder", _deviation(
                full, _pair_creation_reference(p, r, True)
            )
            yield f"r={r} p={p} bare vs ladder", _deviation(
                bare, _pair_creation_reference(p, r, False)
            )


def check_hopper_expansions(r_max: int) -> Iterator[Case]:
    """Pauli expansions against hoppers built from the dense ladder matrices."""
    for r in _even(min(r_max, OPERATOR_R_MAX), 4):
        m = r // 2
        creation = {p: _pair_creation_reference(p, r, False) for p in range(1, m + 1)}
        for p in range(1, m + 1):
            for q in range(p + 1, m + 1):
                forward = creation[p] @ creation[q].conj().T
                backward = creation[q] @ creation[p].conj().T
                references = {
                    Component.REAL: forward + backward,
                    Component.IMAGINARY: 1j * (backward - forward),
                }
                for component, reference in references.items():
                    terms = pauli_expansion_pair_hopper(p, q, component, r)
                    matrix = terms_to_sum(terms, r).to_matrix()
                    label = f"r={r} p={p} q={q} {component.value}"
                    yield label, _deviation(matrix, reference)
                    odd = 1 if component is Component.IMAGINARY else 0
                    structure_ok = len(terms) == 8 and all(
                        abs(abs(coeff) - 0.125) < VERIFY_TOL
                        and string.count("Y") % 2 == odd
                        and string.count("Z") == 0
                        for coeff, string in terms
                    )
                    yield f"{label} structure", 0.0 if structure_ok else 1.0


def check_diagonal_expansion(r_max: int) -> Iterator[Case]:
    for r in _even(min(r_max, OPERATOR_R_MAX)):
        dim = 1 << r
        idx = np.arange(dim)
        for p in range(1, r // 2 + 1):
            mask = 0b11 << (2 * p - 2)
            reference = np.diag(((idx & mask) == mask).astype(np.complex128))
            matrix = terms_to_sum(diagonal_pair_occupation(p, r), r).to_matrix()
            yield f"r={r} p={p}", _deviation(matrix, reference)


def check_cross_module(r_max: int) -> Iterator[Case]:
    """Geminal block of the brute-force 2-RDM equals the Pauli-expectation K."""
    for r in _even(min(r_max, SECTOR_R_MAX, ORACLE_MAX_QUBITS)):
        ensemble = prepare_agp(r)
        cases = [(ENSEMBLE, ensemble), *((n, s) for n, s, _ in _sector_states(r))]
        for sector, state in cases:
            oracle = geminal_block_of(brute_force_2rdm(state)).entries
            yield f"r={r} sector={sector}", _deviation(oracle, assemble_exact(state).entries)


def check_closed_form(r_max: int) -> Iterator[Case]:
    for r in _even(min(r_max, SECTOR_R_MAX)):
        value, _ = largest_eigenvalue(assemble_exact(prepare_agp(r)).entries)
        yield f"r={r} ensemble", abs(value - closed_form_lambda(ENSEMBLE, r))
        for n_particles, state, _ in _sector_states(r):
            if r <= ORACLE_MAX_QUBITS:
                entries = geminal_block_of(brute_force_2rdm(state)).entries
            else:
                entries = assemble_exact(state).entries
            value, _ = largest_eigenvalue(entries)
            yield f"r={r} N={n_particles}", abs(value - closed_form_lambda(n_particles, r))


def check_trace_law(r_max: int) -> Iterator[Case]:
    """Ordered-pair trace of the 2-RDM is N(N-1) in every sector."""
    for r in _even(min(r_max, SECTOR_R_MAX, ORACLE_MAX_QUBITS)):
        for n_particles, state, _ in _sector_states(r):
            trace = brute_force_2rdm(state).trace()
            yield f"r={r} N={n_particles}", abs(trace - n_particles * (n_particles - 1))


def check_sector_decomposition(r_max: int) -> Iterator[Case]:
    """K of the ensemble is the weight-averaged sum of the sector K's."""
    for r in _even(min(r_max, SECTOR_R_MAX)):
        total = np.zeros((r // 2, r // 2), dtype=np.complex128)
        for n_particles, state, weight in _sector_states(r):
            total += weight * assemble_exact(state).entries
            yield f"r={r} N={n_particles} weight", abs(weight - sector_weight(r, n_particles))
        yield f"r={r} sum", _deviation(total, assemble_exact(prepare_agp(r)).entries)


def check_factor_two(r_max: int) -> Iterator[Case]:
    """Orbital embedding and the oracle's paired block both double lambda_D."""
    for r in _even(min(r_max, SECTOR_R_MAX, ORACLE_MAX_QUBITS)):
        for n_particles, state, _ in _sector_states(r):
            geminal = assemble_exact(state)
            value, _ = largest_eigenvalue(geminal.entries)
            embedded, _ = largest_eigenvalue(embed_orbital_block(geminal))
            yield f"r={r} N={n_particles} embedding", abs(embedded - 2 * value)
            paired = paired_subspace_lambda(brute_force_2rdm(state))
            yield f"r={r} N={n_particles} paired block", abs(paired - 2 * value)


def check_bound_saturation(r_max: int) -> Iterator[Case]:
    """The extreme AGP sectors reach the N-fermion bound in the orbital-block convention."""
    for r in _even(r_max):
        for n_particles in range(2, r + 1, 2):
            doubled = 2 * closed_form_lambda(n_particles, r)
            yield f"r={r} N={n_particles}", abs(doubled - yang_coleman_bound(n_particles, r))


def check_estimator(r_max: int) -> Iterator[Case]:
    """Exact outcome probabilities fed through the estimator reproduce K."""
    for r in _even(min(r_max, OPERATOR_R_MAX)):
        state = prepare_agp(r)
        histograms = [(s, exact_distribution(state, s.rotation)) for s in plan_settings(r)]
        estimated = assemble_from_shots(r // 2, estimates_from_histograms(histograms))
        yield f"r={r} ensemble", _deviation(estimated.entries, assemble_exact(state).entries)
        for n_particles, sector_state, _ in _sector_states(r):
            selected = assemble_from_shots(
                r // 2, estimates_from_histograms(histograms, n_filter=n_particles)
            )
            yield f"r={r} N={n_particles} post-selected", _deviation(
                selected.entries, assemble_exact(sector_state).entries
            )


CHECKS: dict[str, Callable[[int], Iterator[Case]]] = {
    "jw-pair-strings": check_jw_strings,
    "pair-hopper-expansion": check_hopper_expansions,
    "pair-occupation-expansion": check_diagonal_expansion,
    "geminal-block-cross-check": check_cross_module,
    "closed-form-lambda": check_closed_form,
    "trace-law": check_trace_law,
    "sector-decomposition": check_sector_decomposition,
    "factor-two-embedding": check_factor_two,
    "bound-saturation": check_bound_saturation,
    "estimator-consistency": check_estimator,
}


def run_check(name: str, r_max: int, tol: float = VERIFY_TOL) -> CheckResult:
    cases = 0
    worst = 0.0
    for label, deviation in CHECKS[name](r_max):
        cases += 1
        worst = max(worst, deviation)
        if not deviation <= tol:
            logger.error(f"{name} failed at {label}: deviation {deviation:.3e}")
            return CheckResult(name, False, cases, worst, f"{label}: deviation {deviation:.3e}")
    logger.debug(f"{name}: {cases} case(s), max deviation {worst:.3e}")
    return CheckResult(name, True, cases, worst)


def run_checks(r_max: int = SECTOR_R_MAX, tol: float = VERIFY_TOL) -> list[CheckResult]:
    """Run every check with sizes clipped to r_max; checks with no cases pass vacuously."""
    return [run_check(name, r_max, tol) for name in CHECKS]


def dump_rdms(r_max: int, directory: Path) -> list[Path]:
    """Write the brute-force 2-RDM of AGP(r) as agp_r{r}_2rdm.csv for every even r the oracle covers."""
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"Failed to create {directory}: {e}") from e
    written = [
        brute_force_2rdm(prepare_agp(r)).write_csv(directory / f"agp_r{r}_2rdm.csv")
        for r in _even(min(r_max, ORACLE_MAX_QUBITS))
    ]
    logger.info(f"Dumped {len(written)} two-body density matrix file(s) to {directory}")
    return written
