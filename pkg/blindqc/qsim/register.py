from __future__ import annotations

import logging
from typing import Final, List, Optional, Sequence, Set

import numpy as np

from blindqc.exceptions import SimulationLimitError
from blindqc.qsim import kernels
from blindqc.qsim.circuit import Gate, Instruction

logger = logging.getLogger(__name__)

MAX_LIVE_QUBITS: Final[int] = 22
ZERO_PROBABILITY: Final[float] = 1e-14


class BatchedRegister:
    """Amplitudes of a batch of rows (shots or branches) over the live qubits only.

    A qubit becomes live on first use, starting from the classical value it last settled
    to (|0> if never measured). Measuring a qubit removes its axis and records the outcome,
    so the live width rather than the total qubit count bounds memory.
    """

    def __init__(self, batch: int, num_qubits: int, num_clbits: int, max_live: int = MAX_LIVE_QUBITS):
        self.psi = np.ones((batch,), dtype=complex)
        self.live: List[int] = []
        self.settled = np.zeros((batch, num_qubits), dtype=np.uint8)
        self.clbits = np.zeros((batch, num_clbits), dtype=np.uint8)
        self.weights = np.ones(batch, dtype=float)
        self.measured: Set[int] = set()
        self.num_qubits = num_qubits
        self.max_live = max_live

    @property
    def batch(self) -> int:
        return self.psi.shape[0]

    def axis(self, qubit: int) -> int:
        if qubit not in self.live:
            self.allocate(qubit)
        return 1 + self.live.index(qubit)

    def allocate(self, qubit: int) -> None:
        if len(self.live) >= self.max_live:
            raise SimulationLimitError("Live qubit width", len(self.live) + 1, self.max_live)
        basis = np.zeros((self.batch, 2), dtype=complex)
        basis[np.arange(self.batch), self.settled[:, qubit]] = 1.0
        self.psi = self.psi[..., np.newaxis] * basis.reshape((self.batch,) + (1,) * len(self.live) + (2,))
        self.live.append(qubit)
        self.measured.discard(qubit)

    def apply(self, instruction: Instruction) -> None:
        axes = tuple(self.axis(q) for q in instruction.qubits)
        self.psi = kernels.apply_unitary(self.psi, instruction.gate.value, axes, instruction.k or 0)

    def _settle(self, qubit: int, clbit: int, outcomes: np.ndarray) -> None:
        self.live.remove(qubit)
        self.measured.add(qubit)
        self.settled[:, qubit] = outcomes
        self.clbits[:, clbit] = outcomes

    def measure_sample(self, qubit: int, clbit: int, rng: np.random.Generator) -> None:
        """Collapses every row to a sampled outcome."""
        if qubit not in self.live:
            self.clbits[:, clbit] = self.settled[:, qubit]
            self.measured.add(qubit)
            return
        psi0, psi1 = kernels.branch_slices(self.psi, self.axis(qubit))
        p0, p1 = kernels.row_norms(psi0), kernels.row_norms(psi1)
        outcomes = (rng.random(self.batch) * (p0 + p1) < p1).astype(np.uint8)
        chosen = np.where(outcomes.reshape((-1,) + (1,) * (psi0.ndim - 1)) == 1, psi1, psi0)
        norms = np.sqrt(np.where(outcomes == 1, p1, p0))
        self.psi = chosen / norms.reshape((-1,) + (1,) * (psi0.ndim - 1))
        self._settle(qubit, clbit, outcomes)

    def measure_split(self, qubit: int, clbit: int, include_null: bool = False) -> None:
        """Replaces every row by its two outcome branches, weighted by their probabilities.

        Null branches are those of zero probability conditioned on their parent row.
        """
        if qubit not in self.live:
            self.clbits[:, clbit] = self.settled[:, qubit]
            self.measured.add(qubit)
            return
        psi0, psi1 = kernels.branch_slices(self.psi, self.axis(qubit))
        p0, p1 = kernels.row_norms(psi0), kernels.row_norms(psi1)
        tail = (1,) * (psi0.ndim - 1)
        probabilities = np.stack([p0, p1], axis=1).reshape(-1)
        scale = np.where(probabilities > 0, 1.0 / np.sqrt(np.where(probabilities > 0, probabilities, 1.0)), 0.0)
        self.psi = np.stack([psi0, psi1], axis=1).reshape((-1,) + psi0.shape[1:]) * scale.reshape((-1,) + tail)
        self.weights = np.repeat(self.weights, 2) * probabilities
        self.settled = np.repeat(self.settled, 2, axis=0)
        self.clbits = np.repeat(self.clbits, 2, axis=0)
        outcomes = np.tile(np.array([0, 1], dtype=np.uint8), len(p0))
        self._settle(qubit, clbit, outcomes)
        if not include_null:
            self.keep(probabilities > ZERO_PROBABILITY)

    def keep(self, mask: np.ndarray) -> None:
        self.psi = self.psi[mask]
        self.weights = self.weights[mask]
        self.settled = self.settled[mask]
        self.clbits = self.clbits[mask]

    def residual_qubits(self) -> List[int]:
        """Qubits whose last operation was not a measurement, ascending."""
        return [q for q in range(self.num_qubits) if q not in self.measured]

    def residual(self, qubits: Optional[Sequence[int]] = None) -> np.ndarray:
        """Row-wise amplitude vectors over `qubits` (qubit qubits[j] is bit j of the index)."""
        qubits = list(self.residual_qubits() if qubits is None else qubits)
        for qubit in qubits:
            if qubit not in self.live:
                self.allocate(qubit)
        if sorted(qubits) != sorted(self.live):
            raise ValueError(f"Residual qubits {qubits} do not cover live qubits {self.live}")
        order = [0] + [self.axis(q) for q in reversed(qubits)]
        return np.transpose(self.psi, order).reshape(self.batch, 2 ** len(qubits))

    def step(self, instruction: Instruction, rng: Optional[np.random.Generator] = None, **kwargs) -> None:
        if instruction.gate != Gate.MEASURE:
            self.apply(instruction)
        elif rng is not None:
            self.measure_sample(instruction.qubits[0], instruction.clbit, rng)  # type: ignore
        else:
            self.measure_split(instruction.qubits[0], instruction.clbit, **kwargs)  # type: ignore
