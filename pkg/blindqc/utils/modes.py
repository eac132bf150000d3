from enum import Enum


class FilterMode(str, Enum):
    """How the client decides that a remote state preparation block produced the requested state."""

    EXACT_SUBSTRING = "exact-substring"
    THETA_MATCH = "theta-match"


class BranchMode(str, Enum):
    ZERO_BRANCH = "zero-branch"
    FRAME_DECODE = "frame-decode"


class InputState(str, Enum):
    """Logical input every wire of a source circuit starts from."""

    ZERO = "zero"
    PLUS = "plus"


class ProtocolMode(str, Enum):
    PROTOCOL = "protocol"
    TEST = "test"
