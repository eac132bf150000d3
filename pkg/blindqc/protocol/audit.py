from __future__ import annotations

import logging
from typing import Final, FrozenSet, Iterator, List, Optional, Tuple

from attr import define  # type: ignore

from blindqc.exceptions import SecretLeakageError
from blindqc.protocol.client import PreparedJob
from blindqc.protocol.server import AuditEntry, AuditLog
from blindqc.utils.stats import uniformity_p_value

logger = logging.getLogger(__name__)

MIN_DELTA_SAMPLES: Final[int] = 800
P_VALUE_THRESHOLD: Final[float] = 1e-3
ALLOWED_KEYS: Final[FrozenSet[str]] = frozenset({"n_qubits", "n_clbits", "ops", "g", "q", "k", "c"})


@define(frozen=True)
class AuditReport:
    """Comparison of what the server recorded for two runs of the same source circuit.

    `public_differences` are oracle gates: they spell out the public matrices, which change
    with each run's trapdoor key.
    """

    job_ids: Tuple[str, str]
    structural_match: bool
    delta_differences: Tuple[int, ...]
    alpha_differences: Tuple[int, ...]
    public_differences: Tuple[int, ...]
    unexplained_differences: Tuple[int, ...]
    delta_samples: int
    delta_p_value: Optional[float]
    leaks: Tuple[str, ...]

    @property
    def uniform_deltas(self) -> Optional[bool]:
        """None while there are too few samples to test."""
        if self.delta_p_value is None or self.delta_samples < MIN_DELTA_SAMPLES:
            return None
        return self.delta_p_value > P_VALUE_THRESHOLD

    @property
    def passed(self) -> bool:
        return (
            self.structural_match
            and not self.unexplained_differences
            and not self.leaks
            and self.uniform_deltas is not False
        )


def _keys(value) -> Iterator[str]:
    if isinstance(value, dict):
        for key, item in value.items():
            yield key
            yield from _keys(item)
    elif isinstance(value, list):
        for item in value:
            yield from _keys(item)


def _signature(entry: AuditEntry, oracle_ops: FrozenSet[int]) -> tuple:
    ops = entry.circuit["ops"]
    body = tuple(
        "oracle" if index in oracle_ops else (op["g"], tuple(op["q"]), op.get("c"))
        for index, op in enumerate(ops)
    )
    return entry.circuit["n_qubits"], entry.circuit["n_clbits"], body


def _leaks(entry: AuditEntry, prepared: PreparedJob) -> List[str]:
    found = []
    unknown = set(_keys(entry.circuit)) - ALLOWED_KEYS
    if unknown:
        found.append(f"{entry.job_id}: unexpected fields {sorted(unknown)}")
    rotations = [index for index, op in enumerate(entry.circuit["ops"]) if op["g"] == "rz"]
    expected = sorted(prepared.job.delta_ops + prepared.job.alpha_ops)
    if rotations != expected:
        found.append(f"{entry.job_id}: {len(rotations)} rotations where only {len(expected)} delta/alpha are published")
    return found


def blindness_audit(
    server_log: AuditLog, secrets_a: PreparedJob, secrets_b: PreparedJob, raises: bool = True
) -> AuditReport:
    """Checks that two runs look alike to the server apart from published angles.

    The logged circuits must agree instruction by instruction except for RZ angles at delta
    or alpha positions and oracle gates; every logged job sharing the structure contributes
    its delta values to a chi-square uniformity test over Z8; logged fields are limited to
    the circuit schema and the only rotations are the published ones.

    Raises:
        SecretLeakageError: the audit fails and `raises` is set
    """
    entry_a, entry_b = server_log.find(secrets_a.job_id), server_log.find(secrets_b.job_id)
    if entry_a is None or entry_b is None:
        raise SecretLeakageError(f"Server log has no record of {secrets_a.job_id} and {secrets_b.job_id}")
    job = secrets_a.job
    oracle_ops = frozenset(job.oracle_ops)
    deltas, alphas = frozenset(job.delta_ops), frozenset(job.alpha_ops)

    structural_match = _signature(entry_a, oracle_ops) == _signature(entry_b, oracle_ops)
    groups: dict = {"delta": [], "alpha": [], "public": [], "unexplained": []}
    if structural_match:
        for index, (op_a, op_b) in enumerate(zip(entry_a.circuit["ops"], entry_b.circuit["ops"])):
            if op_a == op_b:
                continue
            if index in oracle_ops:
                groups["public"].append(index)
            elif index in deltas:
                groups["delta"].append(index)
            elif index in alphas:
                groups["alpha"].append(index)
            else:
                groups["unexplained"].append(index)

    signature = _signature(entry_a, oracle_ops)
    samples = [
        entry.circuit["ops"][index]["k"]
        for entry in server_log.entries
        if _signature(entry, oracle_ops) == signature
        for index in job.delta_ops
    ]
    p_value = uniformity_p_value(samples) if samples else None
    leaks = tuple(_leaks(entry_a, secrets_a) + _leaks(entry_b, secrets_b))

    report = AuditReport(
        (secrets_a.job_id, secrets_b.job_id),
        structural_match,
        tuple(groups["delta"]),
        tuple(groups["alpha"]),
        tuple(groups["public"]),
        tuple(groups["unexplained"]),
        len(samples),
        p_value,
        leaks,
    )
    if not report.passed:
        message = (
            f"Blindness audit failed: structural match {structural_match}, "
            f"unexplained differences {report.unexplained_differences}, leaks {list(leaks)}, "
            f"delta p-value {p_value}"
        )
        if raises:
            raise SecretLeakageError(message)
        logger.warning(message)
    else:
        logger.info(f"Blindness audit passed over {len(samples)} delta samples")
    return report
