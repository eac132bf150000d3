class BlindQCError(Exception):
    """Superclass of all blindqc exception types."""


class CircuitValidationError(BlindQCError):
    """Raised when a circuit references qubits or clbits outside its declared registers."""

    pass


class UnsupportedGateError(BlindQCError):
    """Raised when a gate is not part of the accepted gate set of an operation."""

    def __init__(self, gate, context: str = ""):
        self.gate = gate
        self.message = f"Unsupported gate: {gate}" + (f" in {context}" if context else "")
        super().__init__(self.message)


class SimulationLimitError(BlindQCError):
    """Raised when a simulation would exceed the configured resource guard."""

    def __init__(self, what: str, value: int, limit: int):
        self.message = f"{what} {value} exceeds limit {limit}"
        super().__init__(self.message)


class NoMeasurementsError(BlindQCError):
    """Raised when sampling is requested for a circuit that never writes a clbit."""

    pass


class AngleOutOfRangeError(BlindQCError):
    def __init__(self, k):
        self.message = f"Angle index {k!r} is not an element of Z8 (expected integer 0..7)"
        super().__init__(self.message)


class PatternValidationError(BlindQCError):
    """Raised when a pattern violates its structural invariants."""

    pass


class FrameCalibrationError(BlindQCError):
    """Raised when a measurement branch has no exact Pauli correction."""

    def __init__(self, branch: str):
        self.branch = branch
        self.message = f"No Pauli correction maps branch {branch} onto the zero branch"
        super().__init__(self.message)


class FrameNotLinearError(BlindQCError):
    """Raised when per-branch Pauli corrections are not XOR-linear in the measurement outcomes."""

    def __init__(self, branch: str):
        self.branch = branch
        self.message = f"Pauli correction of branch {branch} is not an XOR of single-outcome corrections"
        super().__init__(self.message)


class RFlagsError(BlindQCError):
    """Raised when non-zero r-flags are used outside of test mode."""

    pass


class BlindingMismatchError(BlindQCError):
    """Raised when a blinded execution differs from its unblinded counterpart."""

    pass


class StatePreparationFailedError(BlindQCError):
    """Raised when the claw preimages agree on their last bit, so no single-qubit state is prepared."""

    def __init__(self, y):
        self.y = y
        self.message = f"Preimages of image {y} agree on x3; trapdoor key is degenerate"
        super().__init__(self.message)


class LayoutError(BlindQCError):
    """Raised when qubit or clbit assignments collide or are out of range."""

    pass


class CertificationError(BlindQCError):
    """Raised when a remote state preparation branch does not certify."""

    pass


class ThetaCalibrationError(BlindQCError):
    """Raised when no candidate rule reproduces the prepared state on every branch."""

    pass


class ComposeError(BlindQCError):
    pass


class FilterError(BlindQCError):
    pass


class WireProtocolError(BlindQCError):
    """Raised when a wire message cannot be decoded or has an incompatible protocol version."""

    pass


class TransportError(BlindQCError):
    pass


class ServerErrorReply(BlindQCError):
    """Raised on the client side when the server answered a submit with an error message."""

    def __init__(self, job_id: str, reason: str):
        self.job_id = job_id
        self.reason = reason
        self.message = f"Server rejected job {job_id}: {reason}"
        super().__init__(self.message)


class ZeroAcceptanceError(BlindQCError):
    """Raised when filtering accepted no shot at all."""

    def __init__(self, shots: int):
        self.shots = shots
        self.message = f"No shot out of {shots} passed the filter; increase the shot budget (--shots)"
        super().__init__(self.message)


class SecretLeakageError(BlindQCError):
    """Raised when the server-visible record reveals client secrets or differs structurally between runs."""

    pass


class ConfigurationError(BlindQCError):
    pass


class InvalidOperationError(BlindQCError):
    """The exception that is thrown when a method call is invalid for the object's current state."""

    pass
