from __future__ import annotations

import logging
from typing import Dict, Mapping, Optional

import numpy as np
from attr import define, field  # type: ignore

from blindqc.exceptions import FilterError, RFlagsError
from blindqc.mbqc.angle import Angle8
from blindqc.mbqc.frame import PauliFrame
from blindqc.mbqc.pattern import Pattern
from blindqc.models.pattern import PatternModel
from blindqc.qsim.circuit import Circuit, CircuitBuilder
from blindqc.utils.bits import clbit_values, outcome_string
from blindqc.utils.modes import ProtocolMode

logger = logging.getLogger(__name__)


def _bit_map(value: Optional[Mapping[int, int]]) -> Dict[int, int]:
    return {int(node): int(bit) for node, bit in (value or {}).items()}


@define(frozen=True)
class RFlags:
    """Per-node pi offsets added to the published angle. Always zero outside test mode."""

    r: Dict[int, int] = field(factory=dict, converter=_bit_map)
    mode: ProtocolMode = field(default=ProtocolMode.PROTOCOL, converter=ProtocolMode)

    def __attrs_post_init__(self):
        if any(bit not in (0, 1) for bit in self.r.values()):
            raise RFlagsError(f"r-flags must be bits, got {self.r}")
        if self.mode == ProtocolMode.PROTOCOL and any(self.r.values()):
            raise RFlagsError("Non-zero r-flags break non-interactive decoding and are only allowed in test mode")

    def of(self, node: int) -> int:
        return self.r.get(node, 0)


@define(frozen=True)
class BlindingSecrets:
    """Client-side knowledge about a blinded pattern."""

    theta: Dict[int, Angle8] = field(repr=False)
    phi: Dict[int, Angle8] = field(repr=False)


@define(frozen=True)
class BlindedPattern:
    """Pattern whose measured nodes carry delta = phi - theta (+ 4r) instead of phi."""

    pattern: Pattern
    delta: Dict[int, Angle8]
    secrets: BlindingSecrets = field(repr=False)
    r_flags: RFlags = field(factory=RFlags)

    def __attrs_post_init__(self):
        for node in self.pattern.measured_nodes:
            expected = self.secrets.phi[node.id] - self.secrets.theta[node.id] + 4 * self.r_flags.of(node.id)
            if self.delta[node.id] != expected:
                raise RFlagsError(f"Published angle of node {node.id} is inconsistent with its secrets")

    @property
    def public_pattern(self) -> Pattern:
        """Graph with delta as the measurement angles (what the server executes)."""
        return self.pattern.with_angles(self.delta)

    def server_view(self) -> PatternModel:
        return PatternModel.blinded(self.pattern, self.delta)


def blind(
    pattern: Pattern,
    seed: Optional[int] = None,
    r_flags: Optional[RFlags] = None,
    theta: Optional[Mapping[int, Angle8]] = None,
) -> BlindedPattern:
    """Hides every measurement angle behind a uniform secret rotation.

    theta is drawn i.i.d. uniform over Z8 per measured node (id order) from
    ``numpy.random.default_rng(seed)`` unless given explicitly; delta = phi - theta + 4r.

    Example usage:
        >>> blinded = blind(compile_1q([(Gate.RZ, 2)]), seed=11)
        >>> sorted(blinded.server_view().delta)
        [0, 1]
    """
    r_flags = r_flags or RFlags()
    measured = pattern.measured_nodes
    if theta is None:
        draws = np.random.default_rng(seed).integers(0, 8, size=len(measured))
        theta = {node.id: Angle8(int(k)) for node, k in zip(measured, draws)}
    phi = {node.id: node.angle for node in measured}
    theta = {node.id: theta[node.id] for node in measured}
    delta = {node.id: phi[node.id] - theta[node.id] + 4 * r_flags.of(node.id) for node in measured}  # type: ignore
    logger.debug(f"Blinded {len(measured)} measured nodes")
    return BlindedPattern(pattern, delta, BlindingSecrets(theta, phi), r_flags)  # type: ignore[arg-type]


def blinded_input_prep(theta: Angle8) -> Circuit:
    """One-qubit fragment mapping |0> to |+_theta>: H then RZ(theta)."""
    return CircuitBuilder(1).h(0).rz(0, theta.k).build()


def decode_output(outputs: str, branch_bits: str, frame: PauliFrame) -> str:
    """Applies the X part of the frame to computational-basis output bits.

    `outputs` holds one bit per output node (first output node rightmost) and `branch_bits`
    one bit per measured node (first measured node rightmost). Z dependencies do not act on
    computational-basis outcomes.
    """
    output_nodes = frame.output_nodes
    if len(outputs) != len(output_nodes):
        raise FilterError(f"Frame covers {len(output_nodes)} outputs, got {len(outputs)} output bits")
    branch_values = clbit_values(branch_bits)
    if len(branch_values) != len(frame.measured):
        raise FilterError(f"Expected {len(frame.measured)} branch bits, got {len(branch_values)}")
    outcomes = dict(zip(frame.measured, branch_values))
    values = list(clbit_values(outputs))
    for index, node in enumerate(output_nodes):
        values[index] ^= frame.x_parity(node, outcomes)
    return outcome_string(values)
