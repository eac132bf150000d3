from __future__ import annotations

import itertools
import logging
from collections import Counter
from typing import Dict, Final, Iterable, List, Optional, Sequence, Tuple

from attr import define, field  # type: ignore

from blindqc.exceptions import CertificationError, StatePreparationFailedError, ThetaCalibrationError
from blindqc.mbqc.angle import Angle8
from blindqc.qfactory.rsp import (
    CALIBRATED_THETA_RULE,
    RspInstance,
    RspLayout,
    SqueezeSite,
    ThetaRule,
    build_rsp_circuit,
    candidate_rules,
    compute_theta,
    split_outcome,
)
from blindqc.qfactory.trapdoor import VALID_KEYS, TrapdoorKey, invert
from blindqc.qsim.simulator import Branch, enumerate_branches
from blindqc.qsim.statevector import FIDELITY_TOLERANCE, PROBABILITY_TOLERANCE, Statevector, fidelity
from blindqc.typed_list import DataSequence
from blindqc.utils.bits import format_bits

logger = logging.getLogger(__name__)

ALL_ALPHAS: Tuple[Tuple[int, int], ...] = tuple(itertools.product(range(8), repeat=2))
RSP_BRANCHES: Final[int] = 16


@define(frozen=True)
class BranchCertificate:
    y: str
    b: str
    probability: float
    theta: Optional[int]
    fidelity: float
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.fidelity >= 1.0 - FIDELITY_TOLERANCE


@define(frozen=True)
class CertificationReport:
    key: TrapdoorKey = field(repr=False)
    alpha: Tuple[int, int]
    rule: ThetaRule
    branches: DataSequence[BranchCertificate]

    @property
    def passed(self) -> bool:
        return len(self.branches) > 0 and all(row.passed for row in self.branches) and not self.distribution_errors

    @property
    def total_probability(self) -> float:
        return self.branches.sum("probability")

    @property
    def theta_distribution(self) -> Dict[int, float]:
        """Probability of each prepared theta over the branches."""
        distribution: Dict[int, float] = {}
        for row in self.branches:
            if row.theta is not None:
                distribution[row.theta] = distribution.get(row.theta, 0.0) + row.probability
        return dict(sorted(distribution.items()))

    @property
    def expected_theta_distribution(self) -> Dict[int, float]:
        """Theta law implied by the branch table when every (y, b) outcome has probability 1/16."""
        counts = Counter(row.theta for row in self.branches if row.theta is not None)
        return {theta: count / RSP_BRANCHES for theta, count in sorted(counts.items())}

    @property
    def distribution_errors(self) -> List[str]:
        errors = []
        if abs(self.total_probability - 1.0) > PROBABILITY_TOLERANCE * RSP_BRANCHES:
            errors.append(f"branch probabilities sum to {self.total_probability}")
        realized = self.theta_distribution
        for theta, expected in self.expected_theta_distribution.items():
            if abs(realized[theta] - expected) > PROBABILITY_TOLERANCE * RSP_BRANCHES:
                errors.append(f"theta={theta} has probability {realized[theta]}, expected {expected}")
        return errors

    @property
    def failures(self) -> DataSequence[BranchCertificate]:
        return DataSequence(BranchCertificate, [row for row in self.branches if not row.passed])


def _certify_branch(inst: RspInstance, branch: Branch, rule: ThetaRule) -> BranchCertificate:
    y, b = split_outcome(inst, branch.bits)
    try:
        x, x_prime = invert(inst.key, y)
    except StatePreparationFailedError as error:
        return BranchCertificate(format_bits(y), format_bits(b), branch.probability, None, 0.0, error.message)
    theta = compute_theta(inst, x, x_prime, b, rule)
    value = fidelity(branch.residual, Statevector.plus(theta.k))  # type: ignore[arg-type]
    return BranchCertificate(format_bits(y), format_bits(b), branch.probability, theta.k, value)


def certify(inst: RspInstance, rule: Optional[ThetaRule] = None, raises: bool = True) -> CertificationReport:
    """Checks every nonzero branch of the RSP circuit against |+_theta> for the client's theta.

    Example usage:
        >>> report = certify(RspInstance(TrapdoorKey(1, 1), (3, 5)))
        >>> report.passed
        True

    Raises:
        CertificationError: some branch fails, or the branch probabilities break the theta law, and `raises` is set
    """
    rule = rule or CALIBRATED_THETA_RULE
    rows = [_certify_branch(inst, branch, rule) for branch in enumerate_branches(build_rsp_circuit(inst))]
    report = CertificationReport(
        inst.key, (inst.alpha[0].k, inst.alpha[1].k), rule, DataSequence(BranchCertificate, rows)
    )
    if not report.passed:
        failed = [f"y={row.y} b={row.b}" for row in report.failures]
        message = f"RSP with alpha={report.alpha} fails on branches {failed}"
        if report.distribution_errors:
            message += f", {'; '.join(report.distribution_errors)}"
        if raises:
            raise CertificationError(message)
        logger.warning(message)
    return report


def certify_grid(
    alphas: Iterable[Sequence[int]] = ALL_ALPHAS,
    keys: Sequence[TrapdoorKey] = VALID_KEYS,
    rule: Optional[ThetaRule] = None,
) -> DataSequence[CertificationReport]:
    """Certifies every key x alpha combination without raising."""
    reports = []
    alphas = list(alphas)
    for key in keys:
        for alpha in alphas:
            reports.append(certify(RspInstance(key, alpha), rule=rule, raises=False))
    passed = sum(report.passed for report in reports)
    logger.info(f"Certified {passed}/{len(reports)} RSP instances")
    return DataSequence(CertificationReport, reports)


def calibrate_theta_rule(
    alphas: Iterable[Sequence[int]] = ALL_ALPHAS, keys: Sequence[TrapdoorKey] = VALID_KEYS
) -> ThetaRule:
    """Searches the candidate theta rules and returns the first that certifies everywhere.

    Each squeeze site is enumerated once per key and alpha; a candidate survives only if its
    theta reproduces the residual of every branch.

    Raises:
        ThetaCalibrationError: no candidate survives
    """
    alphas = list(alphas)
    alive: List[ThetaRule] = list(candidate_rules())
    for site in SqueezeSite:
        layout = RspLayout(squeeze=site)
        for key in keys:
            for alpha in alphas:
                inst = RspInstance(key, alpha, layout)
                branches = enumerate_branches(build_rsp_circuit(inst))
                alive = [
                    rule
                    for rule in alive
                    if rule.squeeze != site or all(_certify_branch(inst, branch, rule).passed for branch in branches)
                ]
    if not alive:
        raise ThetaCalibrationError("No candidate theta rule reproduces the prepared states")
    if len(alive) > 1:
        logger.warning(f"{len(alive)} theta rules certify, using the first: {alive}")
    logger.info(f"Calibrated theta rule: {alive[0]}")
    return alive[0]


def theta_coverage(alphas: Iterable[Sequence[int]] = ALL_ALPHAS, key: TrapdoorKey = VALID_KEYS[0]) -> List[Angle8]:
    """Every theta reached by some certified branch over the given alphas."""
    reached = set()
    for alpha in alphas:
        report = certify(RspInstance(key, alpha), raises=False)
        reached.update(row.theta for row in report.branches if row.passed)
    return [Angle8(k) for k in sorted(reached)]
