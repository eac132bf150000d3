from blindqc.protocol.audit import AuditReport, blindness_audit
from blindqc.protocol.client import DelegationClient, PreparedJob, client_run, connect, default_shots
from blindqc.protocol.compose import ClbitMap, ComposedJob, compose
from blindqc.protocol.filtering import (
    ClientSecrets,
    ExactFilterReport,
    FilterReport,
    accepted_substrings,
    filter_distribution,
    filter_shots,
)
from blindqc.protocol.server import AuditEntry, AuditLog, QuantumServer, server_serve
from blindqc.protocol.transport import (
    InProcessTransport,
    SocketListener,
    SocketTransport,
    Transport,
    parse_address,
    wait_for_server_reachability,
)

__all__ = [
    "AuditReport",
    "blindness_audit",
    "DelegationClient",
    "PreparedJob",
    "client_run",
    "connect",
    "default_shots",
    "ClbitMap",
    "ComposedJob",
    "compose",
    "ClientSecrets",
    "ExactFilterReport",
    "FilterReport",
    "accepted_substrings",
    "filter_distribution",
    "filter_shots",
    "AuditEntry",
    "AuditLog",
    "QuantumServer",
    "server_serve",
    "InProcessTransport",
    "SocketListener",
    "SocketTransport",
    "Transport",
    "parse_address",
    "wait_for_server_reachability",
]
