from __future__ import annotations

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from blindqc.exceptions import BlindQCError, CircuitValidationError
from blindqc.qsim.circuit import Circuit, Instruction

GateName = Literal["h", "x", "z", "rz", "cz", "cx", "ccx", "swap", "measure"]


class OperationModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    g: GateName
    q: List[int] = Field(min_length=1, max_length=3)
    k: Optional[int] = Field(default=None, ge=0, le=7)
    c: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def check_gate_fields(self):
        if (self.g == "rz") != (self.k is not None):
            raise ValueError("field 'k' is required for rz and forbidden otherwise")
        if (self.g == "measure") != (self.c is not None):
            raise ValueError("field 'c' is required for measure and forbidden otherwise")
        return self

    @classmethod
    def from_instruction(cls, instruction: Instruction) -> OperationModel:
        return cls(g=instruction.gate.value, q=list(instruction.qubits), k=instruction.k, c=instruction.clbit)

    def to_instruction(self) -> Instruction:
        return Instruction(self.g, tuple(self.q), self.k, self.c)


class CircuitModel(BaseModel):
    """Wire form of a circuit: {"n_qubits", "n_clbits", "ops": [{"g", "q", "k", "c"}]}."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_qubits: int = Field(ge=0)
    n_clbits: int = Field(ge=0)
    ops: List[OperationModel]

    @classmethod
    def from_circuit(cls, circuit: Circuit) -> CircuitModel:
        return cls(
            n_qubits=circuit.num_qubits,
            n_clbits=circuit.num_clbits,
            ops=[OperationModel.from_instruction(inst) for inst in circuit.instructions],
        )

    def to_circuit(self) -> Circuit:
        try:
            return Circuit(self.n_qubits, self.n_clbits, tuple(op.to_instruction() for op in self.ops))
        except BlindQCError:
            raise
        except (TypeError, ValueError) as error:
            raise CircuitValidationError(str(error)) from error

    def dump(self) -> dict:
        return self.model_dump(exclude_none=True)


def circuit_to_json(circuit: Circuit) -> str:
    return CircuitModel.from_circuit(circuit).model_dump_json(exclude_none=True)


def circuit_from_json(payload: str) -> Circuit:
    return CircuitModel.model_validate_json(payload).to_circuit()
