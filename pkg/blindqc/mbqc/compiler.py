from __future__ import annotations

import logging
from typing import Dict, List, Sequence, Set, Tuple, Union

from blindqc.exceptions import PatternValidationError, UnsupportedGateError
from blindqc.mbqc.angle import Angle8
from blindqc.mbqc.pattern import NodeRole, Pattern, PatternNode
from blindqc.qsim.circuit import Circuit, Gate, Instruction

logger = logging.getLogger(__name__)

Slot = Tuple[int, int]  # (wire, chain position)
GateSpec = Union[Gate, str, Tuple[Union[Gate, str], int], Tuple[Union[Gate, str]]]


class _WireChain:
    """Chain under construction for one logical wire.

    Every H closes the current node with the accumulated RZ angle as its measurement angle;
    RZ rotations accumulate mod 8 on the current node. An H arriving while the current node
    is untouched reopens the previous node with its angle pending again.
    """

    def __init__(self, wire: int):
        self.wire = wire
        self.angles: List[int] = []
        self.pending = 0
        self.degree: Dict[int, int] = {}

    @property
    def position(self) -> int:
        return len(self.angles)

    def hadamard(self) -> None:
        if self.angles and self.pending == 0 and not self.degree.get(self.position):
            self.pending = self.angles.pop()
            return
        self.angles.append(self.pending)
        self.pending = 0

    def rotate(self, k: int) -> None:
        self.pending = (self.pending + k) % 8

    def finish(self) -> None:
        if self.pending:
            self.angles.append(self.pending)
            self.angles.append(0)
            self.pending = 0


class _PatternCompiler:
    def __init__(self, num_wires: int):
        self.chains = [_WireChain(wire) for wire in range(num_wires)]
        self.bridges: Set[Tuple[Slot, Slot]] = set()

    def cz(self, a: int, b: int) -> None:
        slots = sorted([(a, self.chains[a].position), (b, self.chains[b].position)])
        edge = (slots[0], slots[1])
        delta = -1 if edge in self.bridges else 1
        self.bridges.symmetric_difference_update({edge})
        for wire, position in edge:
            degree = self.chains[wire].degree
            degree[position] = degree.get(position, 0) + delta

    def feed(self, instruction: Instruction) -> None:
        gate, qubits = instruction.gate, instruction.qubits
        if gate == Gate.H:
            self.chains[qubits[0]].hadamard()
        elif gate == Gate.RZ:
            self.chains[qubits[0]].rotate(instruction.k or 0)
        elif gate == Gate.Z:
            self.chains[qubits[0]].rotate(4)
        elif gate == Gate.X:
            chain = self.chains[qubits[0]]
            chain.hadamard()
            chain.rotate(4)
            chain.hadamard()
        elif gate == Gate.CZ:
            self.cz(*qubits)
        elif gate == Gate.CX:
            control, target = qubits
            self.chains[target].hadamard()
            self.cz(control, target)
            self.chains[target].hadamard()
        else:
            raise UnsupportedGateError(gate.value, "pattern compilation")

    def build(self) -> Pattern:
        for chain in self.chains:
            chain.finish()
        ids: Dict[Slot, int] = {}
        nodes: List[PatternNode] = []
        edges: List[Tuple[int, int]] = []
        for chain in self.chains:
            last = chain.position
            for position in range(last + 1):
                node_id = len(nodes)
                ids[(chain.wire, position)] = node_id
                if position == last:
                    nodes.append(PatternNode(node_id, chain.wire, NodeRole.OUTPUT))
                    continue
                role = NodeRole.INPUT if position == 0 else NodeRole.BODY
                nodes.append(PatternNode(node_id, chain.wire, role, Angle8(chain.angles[position])))
                edges.append((node_id, node_id + 1))
        for a, b in self.bridges:
            edges.append((ids[a], ids[b]))
        return Pattern(nodes, edges)


def compile_circuit(circuit: Circuit, prepare_zero: bool = False) -> Pattern:
    """Compiles a circuit over {H, X, Z, RZ, CZ, CX} into a chain+bridge measurement pattern.

    Each wire becomes a chain realizing its single-qubit gates as a product of H*RZ(phi)
    factors, one per measured node. CZ becomes an edge between the current nodes of both
    wires and CX is lowered to H(target) CZ H(target). Adjacent rotations merge mod 8 and
    an H directly undoing the previous H reopens its node. A trailing rotation costs one extra node
    with angle 0.

    The pattern consumes |+> on every wire input. With `prepare_zero` an H is prepended to
    every wire, so the pattern realizes the circuit on |0...0> instead.

    Example usage:
        >>> bell = CircuitBuilder(2).h(0).cx(0, 1).build()
        >>> pattern = compile_circuit(bell, prepare_zero=True)
        >>> [node.id for node in pattern.measured_nodes]
        [1]

    Args:
        circuit: measurement-free source circuit
        prepare_zero: realize the circuit on |0...0> instead of |+...+>

    Raises:
        UnsupportedGateError: CCX, SWAP or MEASURE in the source

    Returns:
        Pattern
    """
    compiler = _PatternCompiler(circuit.num_qubits)
    if prepare_zero:
        for wire in range(circuit.num_qubits):
            compiler.chains[wire].hadamard()
    for instruction in circuit.instructions:
        compiler.feed(instruction)
    pattern = compiler.build()
    logger.debug(
        f"Compiled {len(circuit)} instructions on {circuit.num_qubits} wires into "
        f"{len(pattern.nodes)} nodes ({len(pattern.measured_nodes)} measured), {len(pattern.edges)} edges"
    )
    return pattern


def _gate_instruction(spec: GateSpec) -> Instruction:
    if isinstance(spec, tuple):
        gate, *args = spec
    else:
        gate, args = spec, []
    gate = Gate(gate)
    if gate == Gate.RZ:
        if len(args) != 1:
            raise PatternValidationError("rz needs exactly one angle index")
        angle = args[0]
        k = angle.k if isinstance(angle, Angle8) else Angle8(angle).k
        return Instruction(Gate.RZ, 0, k=k)
    if gate not in (Gate.H, Gate.X, Gate.Z) or args:
        raise UnsupportedGateError(gate.value, "single wire compilation")
    return Instruction(gate, 0)


def compile_1q(gates: Sequence[GateSpec]) -> Pattern:
    """Single-wire chain for a gate word, e.g. ``[Gate.H, (Gate.RZ, 3), "x"]`` applied left to right.

    Raises:
        AngleOutOfRangeError: rotation index outside 0..7
    """
    if not gates:
        raise PatternValidationError("Gate list must not be empty")
    instructions = [_gate_instruction(spec) for spec in gates]
    return compile_circuit(Circuit(1, 0, instructions))
