from __future__ import annotations

from typing import List, Literal, Tuple

from pydantic import BaseModel, ConfigDict, Field

from blindqc.qfactory.rsp import RspInstance, SqueezeSite

BinaryRow = Tuple[Literal[0, 1], Literal[0, 1], Literal[0, 1]]


class RspLayoutModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    controls: Tuple[int, int, int]
    targets: Tuple[int, int]
    clbits: Tuple[int, int, int, int]
    squeeze: SqueezeSite = SqueezeSite.CONTROLS


class RspInstanceModel(BaseModel):
    """Server-visible part of an RSP instance. There is no field for the trapdoor."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    A: Tuple[BinaryRow, BinaryRow, BinaryRow]
    B: Tuple[BinaryRow, BinaryRow, BinaryRow]
    alpha: List[int] = Field(min_length=2, max_length=2)
    layout: RspLayoutModel

    @classmethod
    def from_instance(cls, inst: RspInstance) -> RspInstanceModel:
        layout = inst.layout
        return cls(
            A=inst.public.A,
            B=inst.public.B,
            alpha=[angle.k for angle in inst.alpha],
            layout=RspLayoutModel(
                controls=layout.controls, targets=layout.targets, clbits=layout.clbits, squeeze=layout.squeeze
            ),
        )


class TrapdoorSecretModel(BaseModel):
    """Client-local secrets file: {"d0": 1, "e": bit}."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    d0: Literal[1]
    e: Literal[0, 1]
