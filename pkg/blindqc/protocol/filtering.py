from __future__ import annotations

import logging
from typing import Dict, FrozenSet, Mapping, Optional, Tuple

import numpy as np
from attr import define, field  # type: ignore

from blindqc.exceptions import FilterError
from blindqc.mbqc.frame import PauliFrame
from blindqc.protocol.compose import ClbitMap
from blindqc.qfactory.certify import RSP_BRANCHES
from blindqc.qfactory.rsp import RspInstance, theta_table
from blindqc.qsim.simulator import Postselect
from blindqc.ubqc.blinding import BlindedPattern, decode_output
from blindqc.utils.bits import Bits, format_bits
from blindqc.utils.modes import BranchMode, FilterMode
from blindqc.utils.stats import normalize_counts

logger = logging.getLogger(__name__)

Substring = Tuple[Bits, Bits]


def _substring_key(substring: Substring) -> str:
    y, b = substring
    return format_bits(y) + format_bits(b)


def accepted_substrings(inst: RspInstance, target: int) -> Tuple[Substring, ...]:
    """(y, b) outcomes preparing |+_target>, lexicographically ordered on y1 y2 b1 b2."""
    matching = [substring for substring, theta in theta_table(inst).items() if theta.k == target]
    return tuple(sorted(matching, key=_substring_key))


@define(frozen=True)
class ClientSecrets:
    """Everything the client keeps to itself for one job. Has no wire form."""

    job_id: str
    blinded: BlindedPattern = field(repr=False)
    rsp: Dict[int, RspInstance] = field(repr=False)
    frame: Optional[PauliFrame] = field(repr=False)
    filter_mode: FilterMode = field(default=FilterMode.EXACT_SUBSTRING, converter=FilterMode)
    branch_mode: BranchMode = field(default=BranchMode.ZERO_BRANCH, converter=BranchMode)
    accepted: Dict[int, FrozenSet[Substring]] = field(init=False, repr=False)

    def __attrs_post_init__(self):
        if self.branch_mode == BranchMode.FRAME_DECODE and self.frame is None:
            raise FilterError("Frame decoding needs a calibrated Pauli frame")
        accepted = {}
        for node, inst in self.rsp.items():
            candidates = accepted_substrings(inst, self.blinded.secrets.theta[node].k)
            if not candidates:
                raise FilterError(f"RSP instance of node {node} never prepares its target state")
            if self.filter_mode == FilterMode.EXACT_SUBSTRING:
                candidates = candidates[:1]
            accepted[node] = frozenset(candidates)
        object.__setattr__(self, "accepted", accepted)

    def target_substring(self, node: int) -> Substring:
        return min(self.accepted[node], key=_substring_key)

    def expected_acceptance(self) -> float:
        """Probability that one shot survives filtering, each RSP (y, b) outcome having probability 1/16."""
        acceptance = 1.0
        for substrings in self.accepted.values():
            acceptance *= len(substrings) / RSP_BRANCHES
        if self.branch_mode == BranchMode.ZERO_BRANCH:
            acceptance *= 0.5 ** len(self.accepted)
        return acceptance

    def postselector(self, clbit_map: ClbitMap) -> Postselect:
        """Row mask for exact enumeration over partially measured clbits.

        A row is rejected as soon as one node's four RSP bits are all written and outside its
        accepted substrings, or, for zero-branch decoding, as soon as a measured pattern bit
        reads 1. Rows it keeps are exactly those `decode` accepts once every bit is written.
        """
        accepted = {
            node: np.array([[*y, *b] for y, b in sorted(substrings, key=_substring_key)], dtype=np.uint8)
            for node, substrings in self.accepted.items()
        }
        measured = list(clbit_map.measured.values())

        def keep(clbits: np.ndarray, written: FrozenSet[int]) -> np.ndarray:
            mask = np.ones(clbits.shape[0], dtype=bool)
            for node in clbit_map.rsp:
                if not clbit_map.rsp_sources(node) <= written:
                    continue
                values = clbit_map.rsp_rows(clbits, node)
                mask &= (values[:, np.newaxis, :] == accepted[node][np.newaxis, :, :]).all(axis=2).any(axis=1)
            if self.branch_mode == BranchMode.ZERO_BRANCH:
                for clbit in measured:
                    if clbit in written:
                        mask &= clbits[:, clbit] == 0
            return mask

        return keep

    def decode(self, outcome: str, clbit_map: ClbitMap) -> Optional[str]:
        """Decoded output bits of one shot, None when the shot is filtered out."""
        values = clbit_map.values(outcome)
        for node in clbit_map.rsp:
            if clbit_map.rsp_outcome(values, node) not in self.accepted[node]:
                return None
        branch = clbit_map.measured_string(values)
        outputs = clbit_map.output_string(values)
        if self.branch_mode == BranchMode.ZERO_BRANCH:
            return outputs if "1" not in branch else None
        return decode_output(outputs, branch, self.frame)  # type: ignore[arg-type]


@define(frozen=True)
class FilterReport:
    total_shots: int
    accepted_shots: int
    counts: Dict[str, int]

    def __attrs_post_init__(self):
        if self.accepted_shots > self.total_shots or sum(self.counts.values()) != self.accepted_shots:
            raise FilterError("Filter report counts are inconsistent")

    @property
    def acceptance_rate(self) -> float:
        return self.accepted_shots / self.total_shots if self.total_shots else 0.0

    @property
    def distribution(self) -> Dict[str, float]:
        return normalize_counts(self.counts)

    def to_model(self):
        from blindqc.models.reports import FilterReportModel

        return FilterReportModel(
            total=self.total_shots, accepted=self.accepted_shots, rate=self.acceptance_rate, counts=self.counts
        )


@define(frozen=True)
class ExactFilterReport:
    """Filtering applied to exact branch probabilities instead of sampled shots."""

    acceptance: float
    distribution: Dict[str, float]


def filter_shots(counts: Mapping[str, int], clbit_map: ClbitMap, secrets: ClientSecrets) -> FilterReport:
    """Keeps the shots whose RSP substrings prepared the target states and decodes them.

    Example usage:
        >>> report = filter_shots(counts, job.clbit_map, secrets)
        >>> report.accepted_shots <= report.total_shots
        True

    Raises:
        FilterError: a shot is not as wide as the composed circuit
    """
    decoded: Dict[str, int] = {}
    total = 0
    for outcome, count in counts.items():
        total += count
        output = secrets.decode(outcome, clbit_map)
        if output is not None:
            decoded[output] = decoded.get(output, 0) + count
    report = FilterReport(total, sum(decoded.values()), dict(sorted(decoded.items())))
    logger.info(
        f"Job {secrets.job_id}: accepted {report.accepted_shots}/{total} shots "
        f"({secrets.filter_mode.value}, {secrets.branch_mode.value})"
    )
    return report


def filter_distribution(
    distribution: Mapping[str, float], clbit_map: ClbitMap, secrets: ClientSecrets
) -> ExactFilterReport:
    accepted: Dict[str, float] = {}
    for outcome, probability in distribution.items():
        output = secrets.decode(outcome, clbit_map)
        if output is not None:
            accepted[output] = accepted.get(output, 0.0) + probability
    mass = sum(accepted.values())
    normalized = {bits: weight / mass for bits, weight in sorted(accepted.items())} if mass > 0 else {}
    return ExactFilterReport(mass, normalized)
