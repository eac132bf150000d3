from blindqc.mbqc.angle import Angle8
from blindqc.mbqc.compiler import compile_1q, compile_circuit
from blindqc.mbqc.frame import PauliFrame, calibrate_frame
from blindqc.mbqc.lowering import emit_pattern, emit_preparation, lower_to_circuit
from blindqc.mbqc.pattern import NodeRole, Pattern, PatternNode, clbit_layout

__all__ = [
    "Angle8",
    "NodeRole",
    "Pattern",
    "PatternNode",
    "PauliFrame",
    "calibrate_frame",
    "clbit_layout",
    "compile_1q",
    "compile_circuit",
    "emit_pattern",
    "emit_preparation",
    "lower_to_circuit",
]
