from __future__ import annotations

import logging
from typing import Mapping, Optional

from blindqc.exceptions import PatternValidationError
from blindqc.mbqc.angle import Angle8
from blindqc.mbqc.pattern import Pattern, clbit_layout
from blindqc.qsim.circuit import Circuit, CircuitBuilder

logger = logging.getLogger(__name__)

InputMap = Mapping[int, Optional[Angle8]]


def plus_inputs(pattern: Pattern) -> InputMap:
    return {wire: None for wire in pattern.wires}


def emit_preparation(
    builder: CircuitBuilder,
    pattern: Pattern,
    node_qubits: Mapping[int, int],
    inputs: InputMap,
    node_phases: Optional[Mapping[int, Angle8]] = None,
    skip: frozenset = frozenset(),
) -> None:
    """Prepares every node in |+>, input nodes in |+_theta> when the input map gives an angle.

    `node_phases` adds a rotation to any node's preparation (blinded |+_theta> states);
    nodes in `skip` are left untouched because the caller prepares them.
    """
    missing = set(pattern.wires) - set(inputs)
    if missing:
        raise PatternValidationError(f"Input map has no entry for wires {sorted(missing)}")
    first = {node.id: node.wire for node in pattern.input_nodes.values()}
    for node in pattern.nodes:
        if node.id in skip:
            continue
        qubit = node_qubits[node.id]
        builder.h(qubit)
        phase: Optional[Angle8] = None
        if node.id in first:
            phase = inputs[first[node.id]]
        if node_phases is not None and node.id in node_phases:
            phase = node_phases[node.id] + (phase or 0)
        if phase is not None:
            builder.rz(qubit, phase.k)


def emit_pattern(
    builder: CircuitBuilder,
    pattern: Pattern,
    node_qubits: Mapping[int, int],
    node_clbits: Mapping[int, int],
    angles: Optional[Mapping[int, Angle8]] = None,
    measure_outputs: bool = True,
) -> None:
    """Entangles the graph and measures it: CZ on every edge, then RZ(angle), H, MEASURE per measured node.

    RZ is emitted for every measured node, including angle 0, so the instruction stream does
    not depend on angle values.
    """
    angles = pattern.angles if angles is None else angles
    for a, b in pattern.sorted_edges():
        builder.cz(node_qubits[a], node_qubits[b])
    for node in pattern.measured_nodes:
        qubit = node_qubits[node.id]
        builder.rz(qubit, angles[node.id].k)
        builder.h(qubit)
        builder.measure(qubit, node_clbits[node.id])
    if measure_outputs:
        for node in pattern.output_nodes:
            builder.measure(node_qubits[node.id], node_clbits[node.id])


def lower_to_circuit(
    pattern: Pattern,
    inputs: Optional[InputMap] = None,
    measure_outputs: bool = True,
    node_phases: Optional[Mapping[int, Angle8]] = None,
    angles: Optional[Mapping[int, Angle8]] = None,
) -> Circuit:
    """Gate-level circuit of a pattern: qubit i holds node i.

    Clbit i records the i-th measured node (id order); output nodes follow in wire order
    when `measure_outputs` is set. Without output measurements, branch enumeration leaves
    the output nodes as the residual state, wire 0 being bit 0.

    Args:
        pattern: pattern to lower
        inputs: wire -> input angle (None for |+>); defaults to |+> on every wire
        measure_outputs: measure output nodes too
        node_phases: extra preparation rotations per node
        angles: measurement angles overriding the pattern's own

    Raises:
        PatternValidationError: input map missing a wire

    Returns:
        Circuit
    """
    inputs = plus_inputs(pattern) if inputs is None else inputs
    measured, outputs = clbit_layout(pattern)
    num_clbits = len(measured) + (len(outputs) if measure_outputs else 0)
    node_qubits = {node.id: node.id for node in pattern.nodes}
    builder = CircuitBuilder(len(pattern.nodes), num_clbits)
    emit_preparation(builder, pattern, node_qubits, inputs, node_phases)
    emit_pattern(builder, pattern, node_qubits, {**measured, **outputs}, angles, measure_outputs)
    return builder.build()
