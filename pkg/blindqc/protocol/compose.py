from __future__ import annotations

import logging
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
from attr import define, field  # type: ignore

from blindqc.exceptions import ComposeError, FilterError
from blindqc.mbqc.lowering import emit_pattern, emit_preparation, plus_inputs
from blindqc.mbqc.pattern import clbit_layout
from blindqc.qfactory.rsp import RspInstance, SqueezeSite, emit_rsp
from blindqc.qsim.circuit import Circuit, CircuitBuilder, Gate
from blindqc.ubqc.blinding import BlindedPattern
from blindqc.utils.bits import Bits, clbit_values, outcome_string

logger = logging.getLogger(__name__)

RSP_WIDTH = 5
RSP_BITS = 4


@define(frozen=True)
class ClbitMap:
    """Partition of the composed circuit's clbits.

    `rsp` holds the (y1, y2, b1, b2) clbits of every blinded node, `measured` and
    `outputs` the pattern bits. A recycled ancilla starts its next block in the state its
    previous measurement left, so a recorded bit is XORed with the clbit given in `carry`.
    """

    rsp: Dict[int, Tuple[int, int, int, int]]
    measured: Dict[int, int]
    outputs: Dict[int, int]
    num_clbits: int
    carry: Dict[int, int] = field(factory=dict)

    def __attrs_post_init__(self):
        used = [c for bits in self.rsp.values() for c in bits] + list(self.measured.values())
        used += list(self.outputs.values())
        if sorted(used) != list(range(self.num_clbits)):
            raise ComposeError(f"Clbit partition is not disjoint and total over {self.num_clbits} clbits")

    def values(self, outcome: str) -> Bits:
        if len(outcome) != self.num_clbits:
            raise FilterError(f"Shot has {len(outcome)} bits, composed circuit writes {self.num_clbits}")
        return clbit_values(outcome)

    def rsp_outcome(self, values: Bits, node: int) -> Tuple[Bits, Bits]:
        """Corrected (y, b) of one node."""
        bits = [values[c] ^ (values[self.carry[c]] if c in self.carry else 0) for c in self.rsp[node]]
        return (bits[0], bits[1]), (bits[2], bits[3])

    def rsp_sources(self, node: int) -> Set[int]:
        """Clbits the corrected RSP bits of `node` are read from."""
        bits = self.rsp[node]
        return set(bits) | {self.carry[c] for c in bits if c in self.carry}

    def rsp_rows(self, clbits: np.ndarray, node: int) -> np.ndarray:
        """Corrected (y1, y2, b1, b2) of `node` for every row of a clbit batch."""
        columns = [clbits[:, c] ^ clbits[:, self.carry[c]] if c in self.carry else clbits[:, c] for c in self.rsp[node]]
        return np.stack(columns, axis=1)

    def measured_string(self, values: Bits) -> str:
        return outcome_string([values[c] for _, c in sorted(self.measured.items())])

    def output_string(self, values: Bits) -> str:
        return outcome_string([values[c] for c in self.outputs.values()])


@define(frozen=True)
class ComposedJob:
    """Server-visible circuit plus the client's clbit bookkeeping.

    `delta_ops` and `alpha_ops` index the RZ instructions whose angle is a published delta
    or a squeezing alpha; no other RZ appears in the circuit. `oracle_ops` index the
    CX/CCX gates spelling out the public matrices of each RSP block.
    """

    circuit: Circuit
    clbit_map: ClbitMap
    shots: int
    delta_ops: Tuple[int, ...] = field(converter=tuple)
    alpha_ops: Tuple[int, ...] = field(converter=tuple)
    oracle_ops: Tuple[int, ...] = field(default=(), converter=tuple)


def _rz_positions(circuit: Circuit, start: int, stop: int) -> List[int]:
    return [i for i in range(start, stop) if circuit.instructions[i].gate == Gate.RZ]


def compose(
    blinded: BlindedPattern,
    rsp: Mapping[int, RspInstance],
    swap_reuse: bool = False,
    shots: int = 1,
) -> ComposedJob:
    """Feeds every blinded node from its own remote state preparation and appends the pattern.

    Node qubits come first (qubit i holds node i). Without `swap_reuse` each measured node
    gets four fresh ancillas; its node qubit plays the RSP state qubit. With `swap_reuse` a
    single 5-qubit RSP register follows the nodes and the prepared state is SWAPped into the
    node qubit after each block.

    Clbits: four RSP bits per measured node (id order), then the pattern's measured nodes,
    then output nodes in wire order.

    Raises:
        ComposeError: RSP instances do not match the measured nodes, or recycling is asked
            for a layout that squeezes the targets
    """
    pattern = blinded.pattern
    measured = [node.id for node in pattern.measured_nodes]
    if sorted(rsp) != measured:
        raise ComposeError(f"Need one RSP instance per measured node {measured}, got {sorted(rsp)}")
    if swap_reuse and any(inst.layout.squeeze != SqueezeSite.CONTROLS for inst in rsp.values()):
        raise ComposeError("Ancilla recycling needs RSP blocks that measure the targets computationally")

    num_nodes = len(pattern.nodes)
    num_ancillas = (RSP_WIDTH if swap_reuse else RSP_BITS * len(measured)) if measured else 0
    pattern_measured, pattern_outputs = clbit_layout(pattern)
    rsp_clbits = RSP_BITS * len(measured)
    num_clbits = rsp_clbits + len(pattern_measured) + len(pattern_outputs)
    builder = CircuitBuilder(num_nodes + num_ancillas, num_clbits)

    rsp_bits: Dict[int, Tuple[int, int, int, int]] = {}
    carry: Dict[int, int] = {}
    last_raw: Dict[int, int] = {}
    alpha_ops: List[int] = []
    oracle_ops: List[int] = []
    for index, node in enumerate(measured):
        inst = rsp[node]
        clbits = tuple(range(RSP_BITS * index, RSP_BITS * (index + 1)))
        if swap_reuse:
            register = [num_nodes + q for q in range(RSP_WIDTH)]
        else:
            ancillas = [num_nodes + RSP_BITS * index + q for q in range(RSP_BITS)]
            register = ancillas[:2] + [node] + ancillas[2:]
        qubits = _place(inst, register, node, swap_reuse)
        start = len(builder.instructions)
        emit_rsp(builder, inst, qubits, clbits)
        alpha_ops += [i for i in range(start, len(builder.instructions)) if builder.instructions[i].gate == Gate.RZ]
        oracle_ops += [
            i for i in range(start, len(builder.instructions)) if builder.instructions[i].gate in (Gate.CX, Gate.CCX)
        ]
        if swap_reuse:
            builder.swap(qubits[inst.layout.state_qubit], node)
            for clbit in clbits:
                written = _writer(builder.instructions[start:], clbit)
                if written in last_raw:
                    carry[clbit] = last_raw[written]
                last_raw[written] = clbit
        rsp_bits[node] = clbits  # type: ignore[assignment]

    node_qubits = {node.id: node.id for node in pattern.nodes}
    node_clbits = {node: rsp_clbits + clbit for node, clbit in {**pattern_measured, **pattern_outputs}.items()}
    emit_preparation(builder, pattern, node_qubits, plus_inputs(pattern), skip=frozenset(measured))
    start = len(builder.instructions)
    emit_pattern(builder, pattern, node_qubits, node_clbits, blinded.delta, measure_outputs=True)
    circuit = builder.build()
    clbit_map = ClbitMap(
        rsp_bits,
        {node: node_clbits[node] for node in pattern_measured},
        {node: node_clbits[node] for node in pattern_outputs},
        num_clbits,
        carry,
    )
    delta_ops = _rz_positions(circuit, start, len(circuit))
    logger.info(
        f"Composed {len(measured)} RSP blocks into {circuit.num_qubits} qubits, "
        f"{len(circuit)} instructions, {num_clbits} clbits"
    )
    return ComposedJob(circuit, clbit_map, shots, delta_ops, alpha_ops, oracle_ops)


def _place(inst: RspInstance, register: Sequence[int], node: int, swap_reuse: bool) -> List[int]:
    """Physical qubit of every local RSP qubit."""
    layout = inst.layout
    physical = [0] * layout.num_qubits
    for slot, local in enumerate([*layout.controls, *layout.targets]):
        physical[local] = register[slot]
    if not swap_reuse and physical[layout.state_qubit] != node:
        raise ComposeError(f"State qubit of node {node} is not placed on the node qubit")
    return physical


def _writer(instructions, clbit: int) -> Optional[int]:
    for inst in instructions:
        if inst.gate == Gate.MEASURE and inst.clbit == clbit:
            return inst.qubits[0]
    return None
