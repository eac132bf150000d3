from __future__ import annotations

import itertools
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from attr import define, field  # type: ignore

from blindqc.exceptions import StatePreparationFailedError
from blindqc.utils.bits import Bits, parse_bits

logger = logging.getLogger(__name__)

Matrix = Tuple[Tuple[int, int, int], Tuple[int, int, int], Tuple[int, int, int]]


def _bit(instance, attribute, value):
    if value not in (0, 1):
        raise ValueError(f"{attribute.name} must be a bit, got {value!r}")


@define(frozen=True)
class TrapdoorKey:
    """Secret trapdoor (d0, e). Only d0 = 1 keys prepare a state; d0 = 0 needs `test_mode`."""

    d0: int = field(validator=_bit)
    e: int = field(validator=_bit)
    test_mode: bool = field(default=False, eq=False, repr=False)

    def __attrs_post_init__(self):
        if self.d0 == 0 and not self.test_mode:
            raise ValueError("Keys with d0=0 make both preimages agree on x3; only allowed in test mode")


VALID_KEYS: Tuple[TrapdoorKey, ...] = (TrapdoorKey(1, 0), TrapdoorKey(1, 1))


def _to_matrix(value) -> Matrix:
    rows = tuple(tuple(int(entry) for entry in row) for row in value)
    if len(rows) != 3 or any(len(row) != 3 for row in rows) or any(v not in (0, 1) for row in rows for v in row):
        raise ValueError(f"Expected a 3x3 binary matrix, got {value!r}")
    return rows  # type: ignore[return-value]


@define(frozen=True)
class PublicMatrices:
    """Binary A, B defining f(x) = (x^T A x, x^T B x) over GF(2)."""

    A: Matrix = field(converter=_to_matrix)
    B: Matrix = field(converter=_to_matrix)

    @classmethod
    def from_key(cls, key: TrapdoorKey) -> PublicMatrices:
        a = np.zeros((3, 3), dtype=int)
        b = np.zeros((3, 3), dtype=int)
        a[key.e, key.e] = 1
        a[1 - key.e, 2] = 1
        b[2, 2] = 1
        b[1 - key.e, 1 - key.e] = key.d0
        return cls(a.tolist(), b.tolist())

    @classmethod
    def zeros(cls) -> PublicMatrices:
        return cls([[0] * 3] * 3, [[0] * 3] * 3)

    def ones(self, which: str) -> List[Tuple[int, int]]:
        """0-based (i, j) positions of the ones of A or B, row-major."""
        matrix = self.A if which == "A" else self.B
        return [(i, j) for i in range(3) for j in range(3) if matrix[i][j]]


def keygen(seed: Optional[int] = None) -> Tuple[TrapdoorKey, PublicMatrices]:
    """Draws a uniform trapdoor, resampling draws with d0 = 0."""
    rng = np.random.default_rng(seed)
    while True:
        d0, e = (int(bit) for bit in rng.integers(0, 2, size=2))
        if d0 == 1:
            break
        logger.debug("Rejected trapdoor draw with d0=0")
    key = TrapdoorKey(d0, e)
    return key, PublicMatrices.from_key(key)


def _as_bits(x: Union[str, Sequence[int]]) -> Bits:
    return parse_bits(x) if isinstance(x, str) else tuple(int(v) for v in x)


def eval_f(public: PublicMatrices, x: Union[str, Sequence[int]]) -> Bits:
    """Classical two-regular function: y_1 = XOR of x_i x_j over ones of A, y_2 over ones of B.

    >>> eval_f(PublicMatrices.from_key(TrapdoorKey(1, 0)), "101")
    (1, 1)
    """
    bits = _as_bits(x)
    return tuple(sum(bits[i] * bits[j] for i, j in public.ones(which)) % 2 for which in ("A", "B"))


def invert(key: TrapdoorKey, y: Union[str, Sequence[int]]) -> Tuple[Bits, Bits]:
    """Both preimages of `y` from the trapdoor.

    >>> invert(TrapdoorKey(1, 0), "11")
    ((1, 0, 1), (1, 1, 0))

    Raises:
        StatePreparationFailedError: preimages agree on x3 (degenerate key)
    """
    y1, y2 = _as_bits(y)
    x = [0, 0, 0]
    x_prime = [0, 0, 0]
    x[1 - key.e], x[key.e], x[2] = 0, y1, y2
    x_prime[1 - key.e], x_prime[key.e], x_prime[2] = 1, y1 ^ y2 ^ key.d0, y2 ^ key.d0
    if x[2] == x_prime[2]:
        raise StatePreparationFailedError((y1, y2))
    return tuple(x), tuple(x_prime)


def preimages(public: PublicMatrices) -> Dict[Bits, List[Bits]]:
    """Brute-force preimage sets over all 8 inputs."""
    table: Dict[Bits, List[Bits]] = {}
    for x in itertools.product((0, 1), repeat=3):
        table.setdefault(eval_f(public, x), []).append(tuple(x))
    return table


def save_key(key: TrapdoorKey, path: Union[str, Path]) -> None:
    from blindqc.models.qfactory import TrapdoorSecretModel

    Path(path).write_text(TrapdoorSecretModel(d0=key.d0, e=key.e).model_dump_json())


def load_key(path: Union[str, Path]) -> TrapdoorKey:
    from blindqc.models.qfactory import TrapdoorSecretModel

    model = TrapdoorSecretModel.model_validate_json(Path(path).read_text())
    return TrapdoorKey(model.d0, model.e)
