from __future__ import annotations

import logging
import threading
from collections import Counter
from typing import Dict, Final, Optional

import numpy as np
from attr import define, field  # type: ignore

from blindqc.exceptions import (
    FilterError,
    FrameCalibrationError,
    FrameNotLinearError,
    ServerErrorReply,
    TransportError,
    WireProtocolError,
    ZeroAcceptanceError,
)
from blindqc.mbqc.compiler import compile_circuit
from blindqc.mbqc.frame import PauliFrame, calibrate_frame
from blindqc.mbqc.pattern import Pattern
from blindqc.models.circuit import CircuitModel
from blindqc.models.messages import ErrorMessage, ResultMessage, SubmitMessage
from blindqc.protocol.compose import ComposedJob, compose
from blindqc.protocol.filtering import (
    ClientSecrets,
    ExactFilterReport,
    FilterReport,
    accepted_substrings,
    filter_distribution,
    filter_shots,
)
from blindqc.protocol.server import QuantumServer
from blindqc.protocol.transport import (
    DEFAULT_TIMEOUT,
    Address,
    InProcessTransport,
    SocketTransport,
    Transport,
    wait_for_server_reachability,
)
from blindqc.qfactory.certify import certify
from blindqc.qfactory.rsp import RspInstance
from blindqc.qfactory.trapdoor import keygen
from blindqc.qsim.circuit import Circuit
from blindqc.qsim.simulator import exact_distribution
from blindqc.ubqc.blinding import blind
from blindqc.utils.modes import BranchMode, FilterMode, InputState
from blindqc.utils.stats import within_sigma

logger = logging.getLogger(__name__)

SHOTS_PER_ACCEPTANCE: Final[int] = 1200
MAX_DEFAULT_SHOTS: Final[int] = 2**22
MAX_ALPHA_DRAWS: Final[int] = 1000


def default_shots(num_nodes: int) -> int:
    """Budget expecting about 1200 accepted shots under exact-substring filtering (rate 1/16 per node).

    >>> default_shots(1)
    19200
    """
    return min(MAX_DEFAULT_SHOTS, SHOTS_PER_ACCEPTANCE * 16**num_nodes)


def _seed_of(sequence: np.random.SeedSequence) -> int:
    return int(sequence.generate_state(1)[0])


@define(frozen=True)
class PreparedJob:
    job_id: str
    job: ComposedJob
    secrets: ClientSecrets = field(repr=False)
    shot_seed: int = field(repr=False)

    def submit_message(self) -> SubmitMessage:
        return SubmitMessage(
            job_id=self.job_id,
            circuit=CircuitModel.from_circuit(self.job.circuit),
            shots=self.job.shots,
            seed=self.shot_seed,
        )


class DelegationClient:
    """Client side of a blind delegation: everything secret stays in this object.

    Example usage:
        >>> client = DelegationClient(transport, seed=5)
        >>> report = client.run(bell_circuit())
        >>> report.counts
    """

    def __init__(
        self,
        transport: Optional[Transport] = None,
        seed: Optional[int] = None,
        filter_mode: FilterMode = FilterMode.EXACT_SUBSTRING,
        branch_mode: BranchMode = BranchMode.ZERO_BRANCH,
        input_state: InputState = InputState.ZERO,
        swap_reuse: bool = False,
        timeout: float = DEFAULT_TIMEOUT,
    ):
        self.transport = transport
        self.seed = seed
        self.filter_mode = FilterMode(filter_mode)
        self.branch_mode = BranchMode(branch_mode)
        self.input_state = InputState(input_state)
        self.swap_reuse = swap_reuse
        self.timeout = timeout
        self.jobs_prepared = 0
        self.logger = logging.getLogger(f"{__name__}.{type(self).__name__}")

    def _frame(self, pattern: Pattern) -> Optional[PauliFrame]:
        if self.branch_mode != BranchMode.FRAME_DECODE:
            return None
        try:
            return calibrate_frame(pattern)
        except (FrameCalibrationError, FrameNotLinearError) as error:
            self.logger.warning(f"No exact Pauli frame ({error}); postselecting the zero branch instead")
            return None

    def _rsp_instances(self, targets: Dict[int, int], key_seq, alpha_seq) -> Dict[int, RspInstance]:
        instances = {}
        key_seeds = key_seq.spawn(len(targets))
        rng = np.random.default_rng(alpha_seq)
        for (node, target), key_seed in zip(sorted(targets.items()), key_seeds):
            key, public = keygen(_seed_of(key_seed))
            for _ in range(MAX_ALPHA_DRAWS):
                inst = RspInstance(key, tuple(int(k) for k in rng.integers(0, 8, size=2)), public=public)
                if accepted_substrings(inst, target):
                    break
                self.logger.debug(f"Resampling alpha of node {node}")
            else:
                raise FilterError(f"No alpha reaches the target state of node {node}")
            certify(inst, raises=True)
            instances[node] = inst
        return instances

    def prepare(self, source: Circuit, shots: Optional[int] = None) -> PreparedJob:
        """Compiles, blinds and composes `source` without talking to the server."""
        self.jobs_prepared += 1
        job_id = f"job-{self.jobs_prepared:04d}"
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.jobs_prepared,))
        blind_seq, key_seq, alpha_seq, shot_seq = sequence.spawn(4)

        pattern = compile_circuit(source, prepare_zero=self.input_state == InputState.ZERO)
        frame = self._frame(pattern)
        branch_mode = self.branch_mode if frame is not None else BranchMode.ZERO_BRANCH
        blinded = blind(pattern, seed=_seed_of(blind_seq))
        targets = {node: angle.k for node, angle in blinded.secrets.theta.items()}
        instances = self._rsp_instances(targets, key_seq, alpha_seq)
        job = compose(blinded, instances, swap_reuse=self.swap_reuse, shots=shots or default_shots(len(targets)))
        secrets = ClientSecrets(job_id, blinded, instances, frame, self.filter_mode, branch_mode)
        self.logger.info(f"Prepared {job_id}: {len(pattern.nodes)} nodes, {len(targets)} blinded, {job.shots} shots")
        return PreparedJob(job_id, job, secrets, _seed_of(shot_seq))

    def submit(self, prepared: PreparedJob) -> Counter:
        """Round trip of one submit message.

        Raises:
            ServerErrorReply: the server answered with an error
            WireProtocolError: the reply belongs to another job
            TransportError: no transport or the channel failed
        """
        if self.transport is None:
            raise TransportError("Client has no transport")
        self.transport.send(prepared.submit_message())
        reply = self.transport.receive(timeout=self.timeout)
        if isinstance(reply, ErrorMessage):
            raise ServerErrorReply(reply.job_id, reply.message)
        if not isinstance(reply, ResultMessage) or reply.job_id != prepared.job_id:
            raise WireProtocolError(f"Unexpected reply {reply.kind} for {reply.job_id}, waiting for {prepared.job_id}")
        self.logger.info(f"{prepared.job_id}: received {sum(reply.counts.values())} shots")
        return Counter(reply.counts)

    def finish(self, prepared: PreparedJob, counts: Counter) -> FilterReport:
        report = filter_shots(counts, prepared.job.clbit_map, prepared.secrets)
        if report.accepted_shots == 0:
            self.logger.warning(f"{prepared.job_id}: no shot accepted out of {report.total_shots}")
            raise ZeroAcceptanceError(report.total_shots)
        expected = prepared.secrets.expected_acceptance()
        if not within_sigma(report.acceptance_rate, expected, report.total_shots):
            self.logger.warning(
                f"{prepared.job_id}: acceptance rate {report.acceptance_rate:.5f} is off the expected {expected:.5f}"
            )
        return report

    def run(self, source: Circuit, shots: Optional[int] = None) -> FilterReport:
        prepared = self.prepare(source, shots)
        return self.finish(prepared, self.submit(prepared))

    def exact_report(self, source: Circuit) -> ExactFilterReport:
        """Decoded distribution from the composed circuit's exact branch probabilities.

        Rejected RSP substrings (and nonzero branches in zero-branch mode) are dropped while
        enumerating, so only accepted branches are ever split further.
        """
        prepared = self.prepare(source, shots=1)
        clbit_map = prepared.job.clbit_map
        distribution = exact_distribution(prepared.job.circuit, postselect=prepared.secrets.postselector(clbit_map))
        return filter_distribution(distribution, clbit_map, prepared.secrets)


def connect(address: Address, retries: int = 5, delay: float = 0.5, timeout: float = DEFAULT_TIMEOUT) -> Transport:
    """Socket transport to a running server, probed first.

    Raises:
        TransportError: server unreachable
    """
    if not wait_for_server_reachability(address, retries=retries, delay=delay):
        raise TransportError(f"Server {address[0]}:{address[1]} is unreachable")
    return SocketTransport.connect(address, timeout=timeout)


def client_run(
    source: Circuit,
    shots: Optional[int] = None,
    seed: Optional[int] = None,
    transport: Optional[Transport] = None,
    **options,
) -> FilterReport:
    """Delegates `source` end to end and returns the filtered, decoded report.

    Without a transport an in-process server is started for the duration of the run.
    `options` are passed on to `DelegationClient`.
    """
    if transport is not None:
        return DelegationClient(transport, seed=seed, **options).run(source, shots)
    client_end, server_end = InProcessTransport.pair()
    worker = threading.Thread(target=QuantumServer().serve, args=(server_end,), daemon=True)
    worker.start()
    try:
        return DelegationClient(client_end, seed=seed, **options).run(source, shots)
    finally:
        client_end.close()
        worker.join(timeout=5)
