from __future__ import annotations

import itertools
import logging
from typing import Dict, FrozenSet, List, Mapping, Tuple

import numpy as np
from attr import define, field  # type: ignore

from blindqc.exceptions import FrameCalibrationError, FrameNotLinearError, PatternValidationError
from blindqc.mbqc.lowering import emit_pattern, emit_preparation, plus_inputs
from blindqc.mbqc.pattern import Pattern, clbit_layout
from blindqc.qsim.circuit import CircuitBuilder, Gate, Instruction
from blindqc.qsim.simulator import enumerate_branches
from blindqc.qsim.statevector import FIDELITY_TOLERANCE, Statevector
from blindqc.utils.bits import clbit_values, xor_bits

logger = logging.getLogger(__name__)

Dependencies = Dict[int, FrozenSet[int]]


def _frozen_deps(value: Mapping[int, object]) -> Dependencies:
    return {int(node): frozenset(deps) for node, deps in value.items()}  # type: ignore[call-overload]


@define(frozen=True)
class PauliFrame:
    """Byproduct X^a Z^b on every output node, a and b being XORs of measured-node outcomes."""

    x_deps: Dependencies = field(converter=_frozen_deps)
    z_deps: Dependencies = field(converter=_frozen_deps)
    measured: Tuple[int, ...] = field(factory=tuple, converter=tuple)

    @property
    def output_nodes(self) -> List[int]:
        return sorted(self.x_deps)

    def x_parity(self, output_node: int, outcomes: Mapping[int, int]) -> int:
        return xor_bits([outcomes[node] for node in self.x_deps[output_node]])

    def z_parity(self, output_node: int, outcomes: Mapping[int, int]) -> int:
        return xor_bits([outcomes[node] for node in self.z_deps[output_node]])

    @classmethod
    def identity(cls, pattern: Pattern) -> PauliFrame:
        outputs = [node.id for node in pattern.output_nodes]
        measured = [node.id for node in pattern.measured_nodes]
        return cls({node: frozenset() for node in outputs}, {node: frozenset() for node in outputs}, measured)


def _pauli_images(reference: Statevector, num_outputs: int) -> Tuple[List[Tuple[Tuple[int, ...], ...]], np.ndarray]:
    labels = []
    images = []
    for xs in itertools.product((0, 1), repeat=num_outputs):
        for zs in itertools.product((0, 1), repeat=num_outputs):
            state = reference
            for qubit in range(num_outputs):
                if zs[qubit]:
                    state = state.apply(Instruction(Gate.Z, qubit))
                if xs[qubit]:
                    state = state.apply(Instruction(Gate.X, qubit))
            labels.append((xs, zs))
            images.append(state.amplitudes)
    return labels, np.array(images)


def _choi_circuit(pattern: Pattern):
    measured, _ = clbit_layout(pattern)
    wires = pattern.wires
    size = len(pattern.nodes)
    builder = CircuitBuilder(size + len(wires), len(measured))
    firsts = pattern.input_nodes
    for index, wire in enumerate(wires):
        reference = size + index
        builder.h(reference)
        builder.cx(reference, firsts[wire].id)
    node_qubits = {node.id: node.id for node in pattern.nodes}
    skip = frozenset(node.id for node in firsts.values())
    emit_preparation(builder, pattern, node_qubits, plus_inputs(pattern), skip=skip)
    emit_pattern(builder, pattern, node_qubits, measured, measure_outputs=False)
    return builder.build(), measured


def calibrate_frame(pattern: Pattern) -> PauliFrame:
    """Measures the byproduct of every branch and fits it as an XOR-linear Pauli frame.

    Every wire input is maximally entangled with a reference qubit, so a branch residual
    determines the realized operator. For each branch the unique Pauli P on the outputs with
    P(reference branch) equal to the branch residual is searched, then the branch -> P map
    is checked to be XOR-linear in the outcomes.

    A frame exists exactly when no node measured at an odd multiple of pi/4 receives an X
    byproduct; non-adaptive measurement cannot absorb X through such a rotation.

    Raises:
        FrameCalibrationError: a branch has no exact Pauli correction
        FrameNotLinearError: corrections are not XOR-linear in the outcomes

    Returns:
        PauliFrame keyed by output node id
    """
    outputs = [node.id for node in pattern.output_nodes]
    if not pattern.measured_nodes:
        return PauliFrame.identity(pattern)
    circuit, measured = _choi_circuit(pattern)
    branches = enumerate_branches(circuit)
    reference_bits = "0" * circuit.num_clbits
    reference = next((branch for branch in branches if branch.bits == reference_bits), None)
    if reference is None or reference.residual is None:
        raise PatternValidationError("Zero branch has no weight under the entangled fiducial input")
    labels, images = _pauli_images(reference.residual, len(outputs))

    observed: Dict[str, Tuple[Tuple[int, ...], Tuple[int, ...]]] = {}
    for branch in branches:
        overlaps = np.abs(images.conj() @ branch.residual.amplitudes) ** 2  # type: ignore[union-attr]
        match = int(np.argmax(overlaps))
        if overlaps[match] < 1.0 - FIDELITY_TOLERANCE:
            raise FrameCalibrationError(branch.bits)
        observed[branch.bits] = labels[match]

    def outcomes_of(bits: str) -> Dict[int, int]:
        values = clbit_values(bits)
        return {node: values[clbit] for node, clbit in measured.items()}

    x_deps: Dict[int, set] = {node: set() for node in outputs}
    z_deps: Dict[int, set] = {node: set() for node in outputs}
    for node, clbit in measured.items():
        single = ["0"] * circuit.num_clbits
        single[circuit.num_clbits - 1 - clbit] = "1"
        bits = "".join(single)
        if bits not in observed:
            raise FrameCalibrationError(bits)
        xs, zs = observed[bits]
        for index, output in enumerate(outputs):
            if xs[index]:
                x_deps[output].add(node)
            if zs[index]:
                z_deps[output].add(node)
    frame = PauliFrame(x_deps, z_deps, sorted(measured))

    for bits, (xs, zs) in observed.items():
        outcomes = outcomes_of(bits)
        for index, output in enumerate(outputs):
            if frame.x_parity(output, outcomes) != xs[index] or frame.z_parity(output, outcomes) != zs[index]:
                raise FrameNotLinearError(bits)
    logger.debug(f"Calibrated frame over {len(branches)} branches: x={frame.x_deps} z={frame.z_deps}")
    return frame
