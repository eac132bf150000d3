from __future__ import annotations

import logging
import queue
import socket
import threading
from abc import ABC, abstractmethod
from typing import Iterator, List, Optional, Tuple, Union

from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_fixed  # type: ignore

from blindqc.exceptions import TransportError
from blindqc.models.messages import ErrorMessage, ResultMessage, SubmitMessage, decode, encode

Message = Union[SubmitMessage, ResultMessage, ErrorMessage]
Address = Tuple[str, int]

DEFAULT_TIMEOUT = 300.0


def parse_address(address: str) -> Address:
    """Splits "host:port".

    >>> parse_address("127.0.0.1:7070")
    ('127.0.0.1', 7070)
    """
    host, sep, port = address.rpartition(":")
    if not sep or not port.isdigit():
        raise TransportError(f"Expected HOST:PORT, got {address!r}")
    return host or "127.0.0.1", int(port)


class Transport(ABC):
    """Duplex channel of newline-delimited JSON lines. Every line passing through is kept in `log`."""

    def __init__(self):
        self.log: List[str] = []
        self.logger = logging.getLogger(f"{__name__}.{type(self).__name__}")
        self._send_lock = threading.Lock()

    @abstractmethod
    def _write(self, line: str) -> None:
        ...

    @abstractmethod
    def _read(self, timeout: Optional[float]) -> Optional[str]:
        ...

    def close(self) -> None:
        pass

    def send_line(self, line: str) -> None:
        if "\n" in line:
            raise TransportError("Wire lines cannot contain a newline")
        with self._send_lock:
            self.log.append(line)
            self._write(line)

    def receive_line(self, timeout: Optional[float] = DEFAULT_TIMEOUT) -> Optional[str]:
        """Next line, None once the peer has closed the channel."""
        line = self._read(timeout)
        if line is not None:
            self.log.append(line)
        return line

    def send(self, message: Message) -> None:
        self.send_line(encode(message))

    def receive(self, timeout: Optional[float] = DEFAULT_TIMEOUT) -> Message:
        line = self.receive_line(timeout)
        if line is None:
            raise TransportError("Peer closed the channel")
        return decode(line)

    def __enter__(self) -> Transport:
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class InProcessTransport(Transport):
    """One end of an in-memory channel; build both ends with `pair()`."""

    _CLOSED = object()

    def __init__(self, inbox: queue.Queue, outbox: queue.Queue):
        super().__init__()
        self.inbox = inbox
        self.outbox = outbox

    @classmethod
    def pair(cls) -> Tuple[InProcessTransport, InProcessTransport]:
        a_to_b: queue.Queue = queue.Queue()
        b_to_a: queue.Queue = queue.Queue()
        return cls(b_to_a, a_to_b), cls(a_to_b, b_to_a)

    def _write(self, line: str) -> None:
        self.outbox.put(line)

    def _read(self, timeout: Optional[float]) -> Optional[str]:
        try:
            item = self.inbox.get(timeout=timeout)
        except queue.Empty as error:
            raise TransportError(f"No message within {timeout} s") from error
        return None if item is self._CLOSED else item

    def close(self) -> None:
        self.outbox.put(self._CLOSED)


class SocketTransport(Transport):
    def __init__(self, sock: socket.socket):
        super().__init__()
        self.sock = sock
        self._reader = sock.makefile("r", encoding="utf-8", newline="\n")

    @classmethod
    def connect(cls, address: Address, timeout: float = DEFAULT_TIMEOUT) -> SocketTransport:
        try:
            sock = socket.create_connection(address, timeout=timeout)
        except OSError as error:
            raise TransportError(f"Cannot connect to {address[0]}:{address[1]}: {error}") from error
        return cls(sock)

    def _write(self, line: str) -> None:
        try:
            self.sock.sendall((line + "\n").encode("utf-8"))
        except OSError as error:
            raise TransportError(f"Send failed: {error}") from error

    def _read(self, timeout: Optional[float]) -> Optional[str]:
        self.sock.settimeout(timeout)
        try:
            line = self._reader.readline()
        except OSError as error:
            raise TransportError(f"Receive failed: {error}") from error
        return line.rstrip("\n") if line else None

    def close(self) -> None:
        try:
            self._reader.close()
            self.sock.close()
        except OSError:
            self.logger.debug("Socket already closed")


class SocketListener:
    """Accepts client connections on a TCP address; `port` is the bound port (useful with port 0)."""

    def __init__(self, address: Address):
        self.sock = socket.create_server(address)
        self.host, self.port = self.sock.getsockname()[:2]
        self.logger = logging.getLogger(f"{__name__}.{type(self).__name__}")

    @property
    def address(self) -> Address:
        return self.host, self.port

    def accept(self) -> Iterator[SocketTransport]:
        while True:
            try:
                conn, peer = self.sock.accept()
            except OSError:
                self.logger.info("Listener closed")
                return
            self.logger.info(f"Connection from {peer[0]}:{peer[1]}")
            yield SocketTransport(conn)

    def close(self) -> None:
        self.sock.close()


def wait_for_server_reachability(address: Address, retries: int = 5, delay: float = 0.5) -> bool:
    """Probes the server with plain TCP connects; never raises.

    Args:
        address: server address
        retries: total number of attempts
        delay: seconds between attempts

    Returns:
        True if a connection was accepted
    """
    logger = logging.getLogger(__name__)

    def _log_exception(retry_state):
        logger.error(f"Cannot reach server, original exception: {retry_state.outcome.exception()}")
        return False

    @retry(
        wait=wait_fixed(delay),
        retry=retry_if_exception_type(OSError),
        stop=stop_after_attempt(retries),
        retry_error_callback=_log_exception,
    )
    def _probe():
        with socket.create_connection(address, timeout=delay or None):
            return True

    return True if _probe() else False
