from __future__ import annotations

import itertools
import logging
from enum import Enum
from typing import Dict, Iterator, Optional, Sequence, Tuple

from attr import define, field  # type: ignore

from blindqc.exceptions import LayoutError, StatePreparationFailedError, ThetaCalibrationError
from blindqc.mbqc.angle import Angle8
from blindqc.qfactory.oracle import emit_oracle
from blindqc.qfactory.trapdoor import PublicMatrices, TrapdoorKey, invert
from blindqc.qsim.circuit import Circuit, CircuitBuilder
from blindqc.utils.bits import Bits, clbit_values

logger = logging.getLogger(__name__)


class SqueezeSite(str, Enum):
    """Which qubits are measured in the rotated |+-_alpha> basis."""

    CONTROLS = "controls"
    TARGETS = "targets"


class SignSource(str, Enum):
    FIRST = "first"
    SECOND = "second"
    NONE = "none"


@define(frozen=True)
class RspLayout:
    """Local qubit/clbit roles of one RSP block. Clbits are ordered y1, y2, b1, b2."""

    controls: Tuple[int, int, int] = field(default=(0, 1, 2), converter=tuple)
    targets: Tuple[int, int] = field(default=(3, 4), converter=tuple)
    clbits: Tuple[int, int, int, int] = field(default=(0, 1, 2, 3), converter=tuple)
    squeeze: SqueezeSite = field(default=SqueezeSite.CONTROLS, converter=SqueezeSite)

    def __attrs_post_init__(self):
        qubits = [*self.controls, *self.targets]
        if len(self.controls) != 3 or len(self.targets) != 2 or len(self.clbits) != 4:
            raise LayoutError("RSP layout needs 3 controls, 2 targets and 4 clbits")
        if len(set(qubits)) != len(qubits) or min(qubits) < 0:
            raise LayoutError(f"RSP qubits must be distinct and non-negative, got {qubits}")
        if len(set(self.clbits)) != 4 or min(self.clbits) < 0:
            raise LayoutError(f"RSP clbits must be distinct and non-negative, got {list(self.clbits)}")

    @property
    def num_qubits(self) -> int:
        return max(*self.controls, *self.targets) + 1

    @property
    def num_clbits(self) -> int:
        return max(self.clbits) + 1

    @property
    def state_qubit(self) -> int:
        return self.controls[2]


DEFAULT_LAYOUT = RspLayout()


def _alpha_pair(value: Sequence[int]) -> Tuple[Angle8, Angle8]:
    angles = tuple(Angle8.of(k) for k in value)
    if len(angles) != 2:
        raise LayoutError(f"One alpha per squeezed qubit is needed, got {len(angles)}")
    return angles  # type: ignore[return-value]


@define(frozen=True)
class RspInstance:
    """One remote state preparation: trapdoor (client-only), public matrices, alpha and layout."""

    key: TrapdoorKey = field(repr=False)
    alpha: Tuple[Angle8, Angle8] = field(converter=_alpha_pair)
    layout: RspLayout = field(factory=RspLayout)
    public: PublicMatrices = field()

    @public.default
    def _public_from_key(self) -> PublicMatrices:
        return PublicMatrices.from_key(self.key)

    def __attrs_post_init__(self):
        if self.public != PublicMatrices.from_key(self.key):
            raise LayoutError("Public matrices do not belong to the trapdoor key")

    @property
    def state_qubit(self) -> int:
        return self.layout.state_qubit

    def server_view(self):
        from blindqc.models.qfactory import RspInstanceModel

        return RspInstanceModel.from_instance(self)


def _squeeze(builder: CircuitBuilder, qubit: int, alpha: Angle8, clbit: int) -> None:
    builder.rz(qubit, -alpha.k).h(qubit).measure(qubit, clbit)


def build_rsp_circuit(inst: RspInstance) -> Circuit:
    """Circuit preparing |+_theta> on the state qubit, theta hidden behind the trapdoor.

    H on the controls, the f-oracle into the targets, then the squeezing measurement
    RZ(-alpha), H, MEASURE on the squeezed pair and a computational measurement of the other
    pair. The state qubit stays unmeasured.
    """
    layout = inst.layout
    builder = CircuitBuilder(layout.num_qubits, layout.num_clbits)
    for control in layout.controls:
        builder.h(control)
    emit_oracle(builder, inst.public, layout.controls, layout.targets)
    y1, y2, b1, b2 = layout.clbits
    if layout.squeeze == SqueezeSite.CONTROLS:
        builder.measure(layout.targets[0], y1).measure(layout.targets[1], y2)
        _squeeze(builder, layout.controls[0], inst.alpha[0], b1)
        _squeeze(builder, layout.controls[1], inst.alpha[1], b2)
    else:
        _squeeze(builder, layout.targets[0], inst.alpha[0], y1)
        _squeeze(builder, layout.targets[1], inst.alpha[1], y2)
        builder.measure(layout.controls[0], b1).measure(layout.controls[1], b2)
    return builder.build()


def emit_rsp(
    builder: CircuitBuilder, inst: RspInstance, qubits: Sequence[int], clbits: Sequence[int]
) -> CircuitBuilder:
    """Appends the RSP block with local qubit i on `qubits[i]` and local clbit j on `clbits[j]`."""
    return builder.compose(build_rsp_circuit(inst), qubits, clbits)


def split_outcome(inst: RspInstance, bits: str) -> Tuple[Bits, Bits]:
    """(y, b) of an outcome string of `build_rsp_circuit(inst)`."""
    values = clbit_values(bits)
    y1, y2, b1, b2 = (values[clbit] for clbit in inst.layout.clbits)
    return (y1, y2), (b1, b2)


@define(frozen=True)
class ThetaRule:
    """theta = sign * sum_i (x_p(i) - x'_p(i)) (4 b_i + alpha_i) mod 8 over the two squeezed positions.

    `pairing` maps measured bit / alpha entry i to claw position `pairing[i]` (0-based);
    `sign` selects the preimage whose x3 decides (-1)^{x3}.
    """

    squeeze: SqueezeSite = field(converter=SqueezeSite)
    pairing: Tuple[int, int] = field(converter=tuple)
    sign: SignSource = field(converter=SignSource)

    def theta(self, x: Bits, x_prime: Bits, b: Bits, alpha: Sequence[Angle8]) -> Angle8:
        total = sum((x[p] - x_prime[p]) * (4 * b[i] + alpha[i].k) for i, p in enumerate(self.pairing))
        if self.sign == SignSource.FIRST and x[2]:
            total = -total
        elif self.sign == SignSource.SECOND and x_prime[2]:
            total = -total
        return Angle8(total % 8)


def candidate_rules() -> Iterator[ThetaRule]:
    for squeeze, pairing, sign in itertools.product(SqueezeSite, ((0, 1), (1, 0)), SignSource):
        yield ThetaRule(squeeze, pairing, sign)


CALIBRATED_THETA_RULE = ThetaRule(SqueezeSite.CONTROLS, (0, 1), SignSource.FIRST)


def compute_theta(
    inst: RspInstance, x: Bits, x_prime: Bits, b: Bits, rule: Optional[ThetaRule] = None
) -> Angle8:
    """Client-side angle of the state left on the state qubit.

    Example usage:
        >>> inst = RspInstance(TrapdoorKey(1, 0), (0, 0))
        >>> compute_theta(inst, (1, 0, 1), (1, 1, 0), (0, 1))
        Angle8(k=4)

    Raises:
        ThetaCalibrationError: the rule was calibrated for another squeeze site
    """
    rule = rule or CALIBRATED_THETA_RULE
    if rule.squeeze != inst.layout.squeeze:
        raise ThetaCalibrationError(
            f"Theta rule is calibrated for squeezed {rule.squeeze.value}, instance squeezes {inst.layout.squeeze.value}"
        )
    return rule.theta(x, x_prime, b, inst.alpha)


def theta_for_outcome(inst: RspInstance, y: Bits, b: Bits, rule: Optional[ThetaRule] = None) -> Angle8:
    x, x_prime = invert(inst.key, y)
    return compute_theta(inst, x, x_prime, b, rule)


def theta_table(inst: RspInstance, rule: Optional[ThetaRule] = None) -> Dict[Tuple[Bits, Bits], Angle8]:
    """theta for every (y, b) outcome. Empty for degenerate keys."""
    table = {}
    for y in itertools.product((0, 1), repeat=2):
        try:
            x, x_prime = invert(inst.key, y)
        except StatePreparationFailedError:
            logger.warning(f"No theta for y={y}: preimages agree on x3")
            continue
        for b in itertools.product((0, 1), repeat=2):
            table[(tuple(y), tuple(b))] = compute_theta(inst, x, x_prime, b, rule)
    return table
