from typing import Sequence, Tuple

Bits = Tuple[int, ...]


def parse_bits(text: str) -> Bits:
    """Reads a bit string written most significant element first.

    >>> parse_bits("101")
    (1, 0, 1)
    """
    if any(char not in "01" for char in text):
        raise ValueError(f"Not a bit string: {text!r}")
    return tuple(int(char) for char in text)


def format_bits(bits: Sequence[int]) -> str:
    return "".join(str(int(bit)) for bit in bits)


def clbit_values(outcome: str) -> Bits:
    """Clbit values of an outcome string; clbit 0 is the rightmost character.

    >>> clbit_values("110")
    (0, 1, 1)
    """
    return tuple(int(char) for char in reversed(outcome))


def outcome_string(clbits: Sequence[int]) -> str:
    """Inverse of `clbit_values`."""
    return "".join(str(int(bit)) for bit in reversed(clbits))


def xor_bits(values: Sequence[int]) -> int:
    parity = 0
    for value in values:
        parity ^= int(value)
    return parity
