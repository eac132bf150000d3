from __future__ import annotations

import math
from typing import Union

from attr import define, field  # type: ignore

from blindqc.exceptions import AngleOutOfRangeError


def _check_k(instance, attribute, value):
    if isinstance(value, bool) or not isinstance(value, int) or not 0 <= value < 8:
        raise AngleOutOfRangeError(value)


@define(frozen=True, order=True)
class Angle8:
    """Angle k*pi/4 with k in Z8. Arithmetic is mod 8.

    >>> Angle8(2) - Angle8(3)
    Angle8(k=7)
    """

    k: int = field(validator=_check_k)

    @classmethod
    def of(cls, value: Union[int, Angle8]) -> Angle8:
        """Reduces any integer mod 8."""
        if isinstance(value, Angle8):
            return value
        return cls(int(value) % 8)

    @property
    def radians(self) -> float:
        return self.k * math.pi / 4

    def __add__(self, other: Union[int, Angle8]) -> Angle8:
        return Angle8((self.k + Angle8.of(other).k) % 8)

    def __radd__(self, other: int) -> Angle8:
        return self + other

    def __sub__(self, other: Union[int, Angle8]) -> Angle8:
        return Angle8((self.k - Angle8.of(other).k) % 8)

    def __neg__(self) -> Angle8:
        return Angle8(-self.k % 8)

    def __int__(self) -> int:
        return self.k

    def __index__(self) -> int:
        return self.k

    def __bool__(self) -> bool:
        return self.k != 0

    @property
    def is_pauli(self) -> bool:
        """True for 0 and pi, the angles a Pauli X correction can be commuted through exactly."""
        return self.k % 4 == 0

    @property
    def is_clifford(self) -> bool:
        return self.k % 2 == 0


ZERO = Angle8(0)
