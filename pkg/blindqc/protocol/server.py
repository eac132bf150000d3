from __future__ import annotations

import json
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Final, List, Optional, Union

from attr import define, field  # type: ignore

from blindqc import with_worker_header
from blindqc.exceptions import BlindQCError, WireProtocolError
from blindqc.models.messages import ErrorMessage, ResultMessage, SubmitMessage, decode, result_message
from blindqc.protocol.transport import SocketListener, Transport
from blindqc.qsim.circuit import Circuit
from blindqc.qsim.simulator import MAX_SHOTS, run_shots
from blindqc.version import PROTOCOL_VERSION, is_supported_protocol

logger = logging.getLogger(__name__)
audit_logger = logging.getLogger(f"{__name__}.audit")

MAX_QUBITS: Final[int] = 128
MAX_INSTRUCTIONS: Final[int] = 200_000
UNKNOWN_JOB: Final[str] = "unknown"


@define(frozen=True)
class AuditEntry:
    job_id: str
    shots: int
    circuit: dict = field(eq=False)
    seed: Optional[int] = None

    def to_line(self) -> str:
        return json.dumps(
            {"job_id": self.job_id, "shots": self.shots, "seed": self.seed, "circuit": self.circuit}, sort_keys=True
        )

    @classmethod
    def from_line(cls, line: str) -> AuditEntry:
        data = json.loads(line)
        return cls(data["job_id"], data["shots"], data["circuit"], data.get("seed"))


class AuditLog:
    """Append-only record of every accepted submission, one JSON line each."""

    def __init__(self, path: Optional[Union[str, Path]] = None):
        self.path = Path(path) if path else None
        self._entries: List[AuditEntry] = []
        self._lock = threading.Lock()

    def append(self, entry: AuditEntry) -> None:
        line = entry.to_line()
        with self._lock:
            self._entries.append(entry)
            if self.path:
                with self.path.open("a", encoding="utf-8") as file:
                    file.write(line + "\n")
        audit_logger.info(line)

    @property
    def entries(self) -> List[AuditEntry]:
        with self._lock:
            return list(self._entries)

    def lines(self) -> List[str]:
        return [entry.to_line() for entry in self.entries]

    def find(self, job_id: str) -> Optional[AuditEntry]:
        return next((entry for entry in self.entries if entry.job_id == job_id), None)

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def load(cls, path: Union[str, Path]) -> AuditLog:
        log = cls()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if line.strip():
                log._entries.append(AuditEntry.from_line(line))
        return log


class QuantumServer:
    """Executes submitted circuits and answers with counts.

    The server only sees the instruction stream; each submission is validated against the
    closed gate set and the resource guards, recorded in the audit log, then sampled.

    Example usage:
        >>> client_end, server_end = InProcessTransport.pair()
        >>> server = QuantumServer()
        >>> threading.Thread(target=server.serve, args=(server_end,), daemon=True).start()
    """

    def __init__(
        self,
        audit_log: Optional[AuditLog] = None,
        max_qubits: int = MAX_QUBITS,
        max_shots: int = MAX_SHOTS,
        max_workers: int = 4,
    ):
        self.audit_log = audit_log if audit_log is not None else AuditLog()
        self.max_qubits = max_qubits
        self.max_shots = max_shots
        self.max_workers = max_workers
        self.logger = logging.getLogger(f"{__name__}.{type(self).__name__}")
        self._listener: Optional[SocketListener] = None

    @with_worker_header
    def _describe(self, message: SubmitMessage) -> str:
        circuit = message.circuit
        return (
            f"Job {message.job_id}: {circuit.n_qubits} qubits, {len(circuit.ops)} instructions, {message.shots} shots"
        )

    def _check_limits(self, message: SubmitMessage, circuit: Circuit) -> Optional[str]:
        if message.shots > self.max_shots:
            return f"{message.shots} shots exceed the limit of {self.max_shots}"
        if circuit.num_qubits > self.max_qubits:
            return f"{circuit.num_qubits} qubits exceed the limit of {self.max_qubits}"
        if len(circuit) > MAX_INSTRUCTIONS:
            return f"{len(circuit)} instructions exceed the limit of {MAX_INSTRUCTIONS}"
        return None

    def handle_line(self, line: str) -> Union[ResultMessage, ErrorMessage]:
        """Answer to one received line; every failure becomes an error reply."""
        try:
            message = decode(line)
        except WireProtocolError as error:
            self.logger.warning(f"Rejected line: {error}")
            return ErrorMessage(job_id=UNKNOWN_JOB, message=str(error))
        if not isinstance(message, SubmitMessage):
            return ErrorMessage(job_id=message.job_id, message=f"Server only accepts submit, got {message.kind}")
        if not is_supported_protocol(message.protocol):
            return ErrorMessage(
                job_id=message.job_id,
                message=f"Protocol {message.protocol} is not supported, server speaks {PROTOCOL_VERSION}",
            )
        return self.handle_submit(message)

    def handle_submit(self, message: SubmitMessage) -> Union[ResultMessage, ErrorMessage]:
        self.logger.debug(self._describe(message))
        try:
            circuit = message.circuit.to_circuit()
            problem = self._check_limits(message, circuit)
            if problem:
                return ErrorMessage(job_id=message.job_id, message=problem)
            self.audit_log.append(
                AuditEntry(message.job_id, message.shots, message.circuit.dump(), message.seed)
            )
            counts = run_shots(circuit, message.shots, seed=message.seed)
        except BlindQCError as error:
            self.logger.error(f"Job {message.job_id} failed: {error}")
            return ErrorMessage(job_id=message.job_id, message=str(error))
        self.logger.info(f"Job {message.job_id} done: {len(counts)} distinct outcomes")
        return result_message(message.job_id, dict(counts))

    def _reply(self, transport: Transport, line: str) -> None:
        reply = self.handle_line(line)
        try:
            transport.send(reply)
        except BlindQCError as error:
            self.logger.error(f"Cannot deliver reply for job {reply.job_id}: {error}")

    def serve(self, transport: Transport) -> None:
        """Handles lines from one channel until the peer closes it; jobs run concurrently."""
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            while True:
                try:
                    line = transport.receive_line(timeout=None)
                except BlindQCError as error:
                    self.logger.warning(f"Channel failed: {error}")
                    break
                if line is None:
                    break
                executor.submit(self._reply, transport, line)
        transport.close()
        self.logger.info("Channel closed")

    def serve_forever(self, listener: SocketListener) -> None:
        self._listener = listener
        self.logger.info(f"Listening on {listener.host}:{listener.port}")
        for transport in listener.accept():
            threading.Thread(target=self.serve, args=(transport,), daemon=True).start()

    def shutdown(self) -> None:
        if self._listener:
            self._listener.close()


def server_serve(transport: Transport, server: Optional[QuantumServer] = None) -> QuantumServer:
    """Serves one channel with `server` (a fresh one by default) and returns it."""
    server = server or QuantumServer()
    server.serve(transport)
    return server
