from blindqc.qsim.circuit import Circuit, CircuitBuilder, Gate, Instruction
from blindqc.qsim.simulator import Branch, Counts, enumerate_branches, exact_distribution, final_state, run_shots
from blindqc.qsim.statevector import Statevector, apply_gate, fidelity, same_state

__all__ = [
    "Branch",
    "Circuit",
    "CircuitBuilder",
    "Counts",
    "Gate",
    "Instruction",
    "Statevector",
    "apply_gate",
    "enumerate_branches",
    "exact_distribution",
    "fidelity",
    "final_state",
    "run_shots",
    "same_state",
]
