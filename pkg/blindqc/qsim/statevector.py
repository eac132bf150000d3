from __future__ import annotations

from typing import Final

import numpy as np
from attr import define, field  # type: ignore

from blindqc.exceptions import CircuitValidationError, UnsupportedGateError
from blindqc.qsim import kernels
from blindqc.qsim.circuit import Circuit, Gate, Instruction

FIDELITY_TOLERANCE: Final[float] = 1e-9
PROBABILITY_TOLERANCE: Final[float] = 1e-12


def _as_amplitudes(value) -> np.ndarray:
    return np.asarray(value, dtype=complex).reshape(-1)


@define(frozen=True, eq=False)
class Statevector:
    """Pure state of `num_qubits` qubits; qubit q is bit q of the amplitude index."""

    num_qubits: int
    amplitudes: np.ndarray = field(converter=_as_amplitudes)

    def __attrs_post_init__(self):
        if self.amplitudes.shape != (2**self.num_qubits,):
            raise CircuitValidationError(
                f"{self.num_qubits} qubit state needs {2 ** self.num_qubits} amplitudes, got {self.amplitudes.size}"
            )

    @classmethod
    def zero(cls, num_qubits: int) -> Statevector:
        amplitudes = np.zeros(2**num_qubits, dtype=complex)
        amplitudes[0] = 1.0
        return cls(num_qubits, amplitudes)

    @classmethod
    def plus(cls, k: int = 0) -> Statevector:
        """|+_theta> = (|0> + e^{i k pi/4}|1>)/sqrt(2)."""
        return cls(1, np.array([1.0, kernels.rz_phase(k)]) * kernels.SQRT1_2)

    def _tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((1,) + (2,) * self.num_qubits)

    def _axis(self, qubit: int) -> int:
        return self.num_qubits - qubit

    def apply(self, instruction: Instruction) -> Statevector:
        if instruction.gate == Gate.MEASURE:
            raise UnsupportedGateError(instruction.gate.value, "statevector evolution")
        if max(instruction.qubits) >= self.num_qubits:
            raise CircuitValidationError(f"Qubit {max(instruction.qubits)} outside {self.num_qubits} qubit state")
        axes = tuple(self._axis(q) for q in instruction.qubits)
        psi = kernels.apply_unitary(self._tensor(), instruction.gate.value, axes, instruction.k or 0)
        return Statevector(self.num_qubits, np.ascontiguousarray(psi).reshape(-1))

    def evolve(self, circuit: Circuit) -> Statevector:
        state = self
        for instruction in circuit.instructions:
            state = state.apply(instruction)
        return state

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> Statevector:
        return Statevector(self.num_qubits, self.amplitudes / self.norm)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def inner(self, other: Statevector) -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __repr__(self) -> str:
        return f"Statevector({self.num_qubits}, {np.round(self.amplitudes, 6).tolist()})"


def apply_gate(state: Statevector, instruction: Instruction) -> Statevector:
    return state.apply(instruction)


def fidelity(a: Statevector, b: Statevector) -> float:
    """|<a|b>|^2 of the normalized states; invariant under global phase."""
    if a.num_qubits != b.num_qubits:
        raise CircuitValidationError(f"Cannot compare {a.num_qubits} and {b.num_qubits} qubit states")
    return abs(a.normalized().inner(b.normalized())) ** 2


def same_state(a: Statevector, b: Statevector, tolerance: float = FIDELITY_TOLERANCE) -> bool:
    return fidelity(a, b) >= 1.0 - tolerance
