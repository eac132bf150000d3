from __future__ import annotations

import logging
from enum import Enum
from typing import Dict, Mapping, Optional, Tuple

import numpy as np
from attr import define, field  # type: ignore

from blindqc.exceptions import BlindingMismatchError
from blindqc.mbqc.angle import Angle8
from blindqc.mbqc.lowering import lower_to_circuit
from blindqc.mbqc.pattern import NodeRole, Pattern, PatternNode
from blindqc.qsim.circuit import Gate, Instruction
from blindqc.qsim.simulator import enumerate_branches
from blindqc.qsim.statevector import FIDELITY_TOLERANCE, PROBABILITY_TOLERANCE, Statevector, fidelity
from blindqc.typed_list import DataSequence
from blindqc.ubqc.blinding import RFlags, blind
from blindqc.utils.modes import ProtocolMode

logger = logging.getLogger(__name__)


@define(frozen=True)
class BranchComparison:
    bits: str
    probability: float
    blinded_probability: float
    fidelity: float

    @property
    def passed(self) -> bool:
        return (
            abs(self.probability - self.blinded_probability) <= PROBABILITY_TOLERANCE
            and self.fidelity >= 1.0 - FIDELITY_TOLERANCE
        )


@define(frozen=True)
class BlindingEquivalenceReport:
    theta: Dict[int, Angle8] = field(repr=False)
    branches: DataSequence[BranchComparison]

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.branches)

    @property
    def failures(self) -> DataSequence[BranchComparison]:
        return DataSequence(BranchComparison, [row for row in self.branches if not row.passed])


def blinded_circuit(pattern: Pattern, theta: Mapping[int, Angle8], r_flags: Optional[RFlags] = None):
    """Lowered blinded pattern: measured nodes start in |+_theta> and are measured at delta."""
    blinded = blind(pattern, theta=theta, r_flags=r_flags)
    return lower_to_circuit(pattern, measure_outputs=False, node_phases=blinded.secrets.theta, angles=blinded.delta)


def verify_blinding_equivalence(
    pattern: Pattern, theta: Mapping[int, Angle8], raises: bool = True
) -> BlindingEquivalenceReport:
    """Compares every branch of the blinded execution with the unblinded one.

    The blinded run prepares each measured node in |+_theta> and measures it at
    delta = phi - theta; branch residuals must match with fidelity >= 1 - 1e-9 and branch
    probabilities within 1e-12.

    Raises:
        BlindingMismatchError: some branch differs and `raises` is set
    """
    reference = {branch.bits: branch for branch in enumerate_branches(lower_to_circuit(pattern, measure_outputs=False))}
    blinded = {branch.bits: branch for branch in enumerate_branches(blinded_circuit(pattern, theta))}
    rows = []
    for bits in sorted(set(reference) | set(blinded)):
        plain, hidden = reference.get(bits), blinded.get(bits)
        if plain is None or hidden is None:
            probability = plain.probability if plain else 0.0
            rows.append(BranchComparison(bits, probability, hidden.probability if hidden else 0.0, 0.0))
            continue
        rows.append(
            BranchComparison(
                bits, plain.probability, hidden.probability, fidelity(plain.residual, hidden.residual)  # type: ignore
            )
        )
    report = BlindingEquivalenceReport(dict(theta), DataSequence(BranchComparison, rows))
    if not report.passed:
        message = f"Blinded execution differs on branches {[row.bits for row in report.failures]}"
        if raises:
            raise BlindingMismatchError(message)
        logger.warning(message)
    return report


class RCaseOutcome(str, Enum):
    MATCH = "match, no flip"
    MATCH_AFTER_FLIP = "match after flip"
    NO_CORRECTION = "no bitflip correction works"


@define(frozen=True)
class RCaseResult:
    r: Tuple[int, int]
    outcome: RCaseOutcome
    coefficients: Tuple[complex, complex]
    probability: float
    fidelity_direct: float
    fidelity_flipped: float


@define(frozen=True)
class RCaseReport:
    phi: Tuple[Angle8, Angle8]
    cases: DataSequence[RCaseResult]

    def outcome(self, r1: int, r2: int) -> RCaseOutcome:
        return self.cases.filter(r=(r1, r2)).first().outcome


def two_node_chain(phi1: Angle8, phi2: Angle8) -> Pattern:
    """Input node, one body node and an output node on a single wire."""
    nodes = [
        PatternNode(0, 0, NodeRole.INPUT, phi1),
        PatternNode(1, 0, NodeRole.BODY, phi2),
        PatternNode(2, 0, NodeRole.OUTPUT),
    ]
    return Pattern(nodes, [(0, 1), (1, 2)])


def chain_branch_coefficients(phi1: Angle8, phi2: Angle8, r1: int = 0, r2: int = 0) -> Tuple[complex, complex]:
    """Unnormalized computational-basis amplitudes of the zero branch of the two-node chain.

    With r = (0, 0) these are c1 = 1 + e^{i phi1} + e^{i phi2} - e^{i(phi1+phi2)} and
    c2 = 1 + e^{i phi1} - e^{i phi2} + e^{i(phi1+phi2)}; r_i adds pi to the i-th angle.
    """
    e1 = np.exp(1j * (phi1.radians + np.pi * r1))
    e2 = np.exp(1j * (phi2.radians + np.pi * r2))
    return complex(1 + e1 + e2 - e1 * e2), complex(1 + e1 - e2 + e1 * e2)


def _zero_branch_vector(pattern: Pattern, theta: Mapping[int, Angle8], r_flags: RFlags) -> Tuple[np.ndarray, float]:
    for branch in enumerate_branches(blinded_circuit(pattern, theta, r_flags), include_null=True):
        if branch.bits == "00":
            if branch.is_null or branch.residual is None:
                return np.zeros(2, dtype=complex), 0.0
            return branch.residual.amplitudes * np.sqrt(branch.probability), branch.probability
    raise BlindingMismatchError("Two-node chain has no zero branch")


def verify_r_cases(
    phi1: Angle8, phi2: Angle8, theta: Optional[Tuple[Angle8, Angle8]] = None
) -> RCaseReport:
    """Classifies the four (r1, r2) offsets of the two-node chain against r = (0, 0).

    For each case the zero-branch amplitude vector is compared, up to global phase and with
    equal branch weight, with the r = (0, 0) vector directly and after an output bit flip.
    """
    pattern = two_node_chain(phi1, phi2)
    theta_map = {0: theta[0], 1: theta[1]} if theta else {0: Angle8(0), 1: Angle8(0)}
    reference, reference_probability = _zero_branch_vector(pattern, theta_map, RFlags())
    reference_state = Statevector(1, reference)
    rows = []
    for r1 in (0, 1):
        for r2 in (0, 1):
            flags = RFlags({0: r1, 1: r2}, mode=ProtocolMode.TEST)
            vector, probability = _zero_branch_vector(pattern, theta_map, flags)
            same_weight = abs(probability - reference_probability) <= PROBABILITY_TOLERANCE
            if probability > 0:
                state = Statevector(1, vector)
                direct = fidelity(state, reference_state)
                flipped = fidelity(state.apply(Instruction(Gate.X, 0)), reference_state)
            else:
                direct = flipped = 0.0
            if same_weight and direct >= 1.0 - FIDELITY_TOLERANCE:
                outcome = RCaseOutcome.MATCH
            elif same_weight and flipped >= 1.0 - FIDELITY_TOLERANCE:
                outcome = RCaseOutcome.MATCH_AFTER_FLIP
            else:
                outcome = RCaseOutcome.NO_CORRECTION
            rows.append(
                RCaseResult((r1, r2), outcome, (complex(vector[0]), complex(vector[1])), probability, direct, flipped)
            )
            logger.debug(f"r=({r1},{r2}): {outcome.value} (direct {direct:.6f}, flipped {flipped:.6f})")
    return RCaseReport((phi1, phi2), DataSequence(RCaseResult, rows))
