from typing import Sequence

from blindqc.exceptions import LayoutError
from blindqc.qfactory.trapdoor import PublicMatrices
from blindqc.qsim.circuit import Circuit, CircuitBuilder


def build_oracle(public: PublicMatrices) -> Circuit:
    """Reversible |x>|t> -> |x>|t XOR f(x)> on 5 local qubits: x on 0-2, f_1 on 3, f_2 on 4.

    Ones of A (then B) are visited row-major; a diagonal entry becomes CX(x_i, target),
    an off-diagonal one CCX(x_i, x_j, target).
    """
    builder = CircuitBuilder(5)
    for target, which in ((3, "A"), (4, "B")):
        for i, j in public.ones(which):
            if i == j:
                builder.cx(i, target)
            else:
                builder.ccx(i, j, target)
    return builder.build()


def emit_oracle(builder: CircuitBuilder, public: PublicMatrices, controls: Sequence[int], targets: Sequence[int]):
    if len(controls) != 3 or len(targets) != 2:
        raise LayoutError(f"Oracle needs 3 controls and 2 targets, got {list(controls)} and {list(targets)}")
    return builder.compose(build_oracle(public), [*controls, *targets])
