from __future__ import annotations

import logging
from enum import Enum
from typing import Dict, Final, List, Optional, Sequence, Tuple

from attr import define, field  # type: ignore

from blindqc.exceptions import CircuitValidationError

logger = logging.getLogger(__name__)


class Gate(str, Enum):
    H = "h"
    X = "x"
    Z = "z"
    RZ = "rz"
    CZ = "cz"
    CX = "cx"
    CCX = "ccx"
    SWAP = "swap"
    MEASURE = "measure"


GATE_ARITY: Final[Dict[Gate, int]] = {
    Gate.H: 1,
    Gate.X: 1,
    Gate.Z: 1,
    Gate.RZ: 1,
    Gate.CZ: 2,
    Gate.CX: 2,
    Gate.CCX: 3,
    Gate.SWAP: 2,
    Gate.MEASURE: 1,
}


def _to_qubits(value) -> Tuple[int, ...]:
    if isinstance(value, int):
        return (value,)
    return tuple(int(q) for q in value)


@define(frozen=True)
class Instruction:
    """Single circuit instruction.

    `k` is the rotation index of RZ (angle k*pi/4), `clbit` the classical target of MEASURE.
    """

    gate: Gate = field(converter=Gate)
    qubits: Tuple[int, ...] = field(converter=_to_qubits)
    k: Optional[int] = field(default=None)
    clbit: Optional[int] = field(default=None)

    def __attrs_post_init__(self):
        if len(self.qubits) != GATE_ARITY[self.gate]:
            raise CircuitValidationError(
                f"{self.gate.value} acts on {GATE_ARITY[self.gate]} qubit(s), got {len(self.qubits)}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitValidationError(f"{self.gate.value} operands must be distinct: {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise CircuitValidationError(f"Negative qubit index in {self.qubits}")
        if (self.gate == Gate.RZ) != (self.k is not None):
            raise CircuitValidationError("Rotation index is required for rz and only for rz")
        if self.k is not None and not (isinstance(self.k, int) and 0 <= self.k < 8):
            raise CircuitValidationError(f"Rotation index must be in 0..7, got {self.k!r}")
        if (self.gate == Gate.MEASURE) != (self.clbit is not None):
            raise CircuitValidationError("Classical target is required for measure and only for measure")
        if self.clbit is not None and self.clbit < 0:
            raise CircuitValidationError(f"Negative clbit index {self.clbit}")

    def remap(self, qubits: Sequence[int], clbits: Optional[Sequence[int]] = None) -> Instruction:
        clbit = self.clbit
        if clbit is not None and clbits is not None:
            clbit = clbits[clbit]
        return Instruction(self.gate, tuple(qubits[q] for q in self.qubits), self.k, clbit)


@define(frozen=True)
class Circuit:
    num_qubits: int
    num_clbits: int
    instructions: Tuple[Instruction, ...] = field(converter=tuple)

    def __attrs_post_init__(self):
        if self.num_qubits < 0 or self.num_clbits < 0:
            raise CircuitValidationError("Register sizes must be non-negative")
        for position, inst in enumerate(self.instructions):
            if max(inst.qubits) >= self.num_qubits:
                raise CircuitValidationError(
                    f"Instruction {position} ({inst.gate.value}) uses qubit {max(inst.qubits)} "
                    f"outside register of {self.num_qubits}"
                )
            if inst.clbit is not None and inst.clbit >= self.num_clbits:
                raise CircuitValidationError(
                    f"Instruction {position} writes clbit {inst.clbit} outside register of {self.num_clbits}"
                )

    def __len__(self) -> int:
        return len(self.instructions)

    @property
    def measured_clbits(self) -> List[int]:
        return sorted({inst.clbit for inst in self.instructions if inst.gate == Gate.MEASURE})  # type: ignore

    @property
    def num_measurements(self) -> int:
        return sum(1 for inst in self.instructions if inst.gate == Gate.MEASURE)

    def gate_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for inst in self.instructions:
            counts[inst.gate.value] = counts.get(inst.gate.value, 0) + 1
        return counts

    def with_measurements(self) -> Circuit:
        """Copy of a measurement-free circuit with every qubit measured into the clbit of the same index."""
        builder = CircuitBuilder(self.num_qubits, max(self.num_clbits, self.num_qubits))
        builder.compose(self)
        for qubit in range(self.num_qubits):
            builder.measure(qubit, qubit)
        return builder.build()


class CircuitBuilder:
    """Fluent mutable builder for `Circuit`.

    Example usage:
        >>> bell = CircuitBuilder(2).h(0).cx(0, 1).build()
    """

    def __init__(self, num_qubits: int, num_clbits: int = 0):
        self.num_qubits = num_qubits
        self.num_clbits = num_clbits
        self.instructions: List[Instruction] = []

    def append(self, instruction: Instruction) -> CircuitBuilder:
        self.instructions.append(instruction)
        return self

    def h(self, qubit: int) -> CircuitBuilder:
        return self.append(Instruction(Gate.H, qubit))

    def x(self, qubit: int) -> CircuitBuilder:
        return self.append(Instruction(Gate.X, qubit))

    def z(self, qubit: int) -> CircuitBuilder:
        return self.append(Instruction(Gate.Z, qubit))

    def rz(self, qubit: int, k: int) -> CircuitBuilder:
        return self.append(Instruction(Gate.RZ, qubit, k=int(k) % 8))

    def cz(self, a: int, b: int) -> CircuitBuilder:
        return self.append(Instruction(Gate.CZ, (a, b)))

    def cx(self, control: int, target: int) -> CircuitBuilder:
        return self.append(Instruction(Gate.CX, (control, target)))

    def ccx(self, control1: int, control2: int, target: int) -> CircuitBuilder:
        return self.append(Instruction(Gate.CCX, (control1, control2, target)))

    def swap(self, a: int, b: int) -> CircuitBuilder:
        return self.append(Instruction(Gate.SWAP, (a, b)))

    def measure(self, qubit: int, clbit: int) -> CircuitBuilder:
        return self.append(Instruction(Gate.MEASURE, qubit, clbit=clbit))

    def compose(
        self, fragment: Circuit, qubits: Optional[Sequence[int]] = None, clbits: Optional[Sequence[int]] = None
    ) -> CircuitBuilder:
        """Appends `fragment`, mapping its qubit i to `qubits[i]` and its clbit j to `clbits[j]`."""
        qubit_map = list(qubits) if qubits is not None else list(range(fragment.num_qubits))
        if len(qubit_map) != fragment.num_qubits:
            raise CircuitValidationError(f"Fragment needs {fragment.num_qubits} qubits, got {len(qubit_map)}")
        if clbits is not None and len(clbits) != fragment.num_clbits:
            raise CircuitValidationError(f"Fragment needs {fragment.num_clbits} clbits, got {len(clbits)}")
        for inst in fragment.instructions:
            self.append(inst.remap(qubit_map, clbits))
        return self

    def build(self) -> Circuit:
        return Circuit(self.num_qubits, self.num_clbits, tuple(self.instructions))
