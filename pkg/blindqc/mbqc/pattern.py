from __future__ import annotations

from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from attr import define, field  # type: ignore

from blindqc.exceptions import PatternValidationError
from blindqc.mbqc.angle import Angle8


class NodeRole(str, Enum):
    INPUT = "in"
    BODY = "body"
    OUTPUT = "out"


@define(frozen=True)
class PatternNode:
    id: int
    wire: int
    role: NodeRole = field(converter=NodeRole)
    angle: Optional[Angle8] = None

    @property
    def is_measured(self) -> bool:
        return self.role != NodeRole.OUTPUT


def _edge_set(edges: Iterable[Iterable[int]]) -> FrozenSet[Tuple[int, int]]:
    normalized = set()
    for edge in edges:
        a, b = tuple(edge)
        normalized.add((min(a, b), max(a, b)))
    return frozenset(normalized)


@define(frozen=True)
class Pattern:
    """Measurement pattern on a chain+bridge graph.

    Node ids run 0..N-1 in wire-major, chain-position order. Every non-output node is
    measured in the X-Y plane at its angle: RZ(angle), H, computational measurement.
    """

    nodes: Tuple[PatternNode, ...] = field(converter=tuple)
    edges: FrozenSet[Tuple[int, int]] = field(converter=_edge_set)

    def __attrs_post_init__(self):
        for position, node in enumerate(self.nodes):
            if node.id != position:
                raise PatternValidationError(f"Node ids must be 0..N-1 in order, found {node.id} at {position}")
            if node.role == NodeRole.OUTPUT and node.angle is not None:
                raise PatternValidationError(f"Output node {node.id} carries a measurement angle")
            if node.role != NodeRole.OUTPUT and node.angle is None:
                raise PatternValidationError(f"Measured node {node.id} has no angle")
        for a, b in self.edges:
            if a == b:
                raise PatternValidationError(f"Self loop on node {a}")
            if not (0 <= a < len(self.nodes) and 0 <= b < len(self.nodes)):
                raise PatternValidationError(f"Edge ({a}, {b}) references a missing node")
        for wire in self.wires:
            chain = self.chain(wire)
            if [node.role for node in chain][-1] != NodeRole.OUTPUT:
                raise PatternValidationError(f"Wire {wire} does not end in an output node")
            if any(node.role == NodeRole.OUTPUT for node in chain[:-1]):
                raise PatternValidationError(f"Wire {wire} has an output node before its end")
            expected = {(chain[i].id, chain[i + 1].id) for i in range(len(chain) - 1)}
            ids = {node.id for node in chain}
            actual = {(a, b) for a, b in self.edges if a in ids and b in ids}
            if actual != expected:
                raise PatternValidationError(f"Nodes of wire {wire} do not form a chain")

    @property
    def wires(self) -> List[int]:
        return sorted({node.wire for node in self.nodes})

    def chain(self, wire: int) -> List[PatternNode]:
        return [node for node in self.nodes if node.wire == wire]

    def node(self, node_id: int) -> PatternNode:
        return self.nodes[node_id]

    @property
    def measured_nodes(self) -> List[PatternNode]:
        return [node for node in self.nodes if node.is_measured]

    @property
    def output_nodes(self) -> List[PatternNode]:
        """Output nodes in wire order."""
        return [node for node in self.nodes if node.role == NodeRole.OUTPUT]

    @property
    def input_nodes(self) -> Dict[int, PatternNode]:
        """First node of every wire (the node receiving the wire's input state)."""
        return {wire: self.chain(wire)[0] for wire in self.wires}

    @property
    def angles(self) -> Dict[int, Angle8]:
        return {node.id: node.angle for node in self.measured_nodes}  # type: ignore

    def neighbours(self, node_id: int) -> List[int]:
        return sorted({b if a == node_id else a for a, b in self.edges if node_id in (a, b)})

    def with_angles(self, angles: Mapping[int, Angle8]) -> Pattern:
        """Copy with the measured nodes' angles replaced."""
        missing = {node.id for node in self.measured_nodes} - set(angles)
        if missing:
            raise PatternValidationError(f"No angle given for measured nodes {sorted(missing)}")
        nodes = [
            PatternNode(node.id, node.wire, node.role, angles[node.id] if node.is_measured else None)
            for node in self.nodes
        ]
        return Pattern(nodes, self.edges)

    def sorted_edges(self) -> List[Tuple[int, int]]:
        return sorted(self.edges)


def clbit_layout(pattern: Pattern) -> Tuple[Dict[int, int], Dict[int, int]]:
    """Clbit of every measured node (id order) followed by every output node (wire order)."""
    measured = {node.id: index for index, node in enumerate(pattern.measured_nodes)}
    outputs = {node.id: len(measured) + index for index, node in enumerate(pattern.output_nodes)}
    return measured, outputs
