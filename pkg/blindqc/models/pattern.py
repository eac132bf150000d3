from __future__ import annotations

from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from blindqc.mbqc.angle import Angle8
from blindqc.mbqc.pattern import NodeRole, Pattern, PatternNode


class NodeModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    id: int = Field(ge=0)
    wire: int = Field(ge=0)
    role: Literal["in", "body", "out"]
    k: Optional[int] = Field(default=None, ge=0, le=7)


class PatternModel(BaseModel):
    """Pattern JSON. `delta` carries the published measurement angles of a blinded pattern.

    A blinded pattern is serialized with `k` omitted on every node: the only angles a
    server ever sees are the `delta` values.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    nodes: List[NodeModel]
    edges: List[Tuple[int, int]]
    delta: Optional[Dict[int, int]] = None

    @classmethod
    def from_pattern(cls, pattern: Pattern, include_angles: bool = True) -> PatternModel:
        return cls(
            nodes=[
                NodeModel(
                    id=node.id,
                    wire=node.wire,
                    role=node.role.value,
                    k=node.angle.k if include_angles and node.angle is not None else None,
                )
                for node in pattern.nodes
            ],
            edges=pattern.sorted_edges(),
        )

    @classmethod
    def blinded(cls, pattern: Pattern, delta: Dict[int, Angle8]) -> PatternModel:
        model = cls.from_pattern(pattern, include_angles=False)
        return model.model_copy(update={"delta": {node: angle.k for node, angle in sorted(delta.items())}})

    def to_pattern(self) -> Pattern:
        angles = self.delta or {}
        nodes = []
        for node in self.nodes:
            k = node.k if node.k is not None else angles.get(node.id)
            nodes.append(PatternNode(node.id, node.wire, NodeRole(node.role), Angle8(k) if k is not None else None))
        return Pattern(nodes, self.edges)
