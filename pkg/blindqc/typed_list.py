from __future__ import annotations

from typing import (
    Any,
    Generic,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Type,
    TypeVar,
    overload,
)

import attrs  # type: ignore
from pydantic import BaseModel

from blindqc.exceptions import InvalidOperationError

T = TypeVar("T")
D = TypeVar("D")


def asdict(item: Any) -> dict:
    if isinstance(item, BaseModel):
        return item.model_dump()
    return attrs.asdict(item, recurse=False)


class DataSequence(Sequence[T], Generic[T]):
    """Immutable homogeneous sequence of report rows (attrs or pydantic records).

    Reports produced by certification, verification and the blindness audit hand their
    per-branch rows out as a `DataSequence`, so they can be narrowed down by attribute.

    ## Example:

    >>> rows = report.branches.filter(theta=3)
    >>> rows.filter(y="01").first().passed
    True
    """

    def __init__(self, _type: Type[T], _iterable: Optional[Iterable[T]] = None, /):
        if not attrs.has(_type) and not issubclass(_type, BaseModel):
            raise TypeError(f"Expected attrs or pydantic item type, got {_type.__name__}.")
        self._type = _type
        self.data: List[T] = []
        for item in _iterable or []:
            if not isinstance(item, _type):
                raise TypeError(f"Expected {_type.__name__} item type, got {type(item).__name__}.")
            self.data.append(item)

    def __repr__(self) -> str:
        return f"DataSequence({self._type.__name__}, {repr(self.data)})"

    def __str__(self) -> str:
        pretty_message = ""
        for element in self.data:
            pprint = "\n".join(f"    {key}: {value}, " for key, value in asdict(element).items())
            pretty_message += f"\n{element.__class__.__name__}(\n" + pprint + "\n)"
        return pretty_message

    def __len__(self) -> int:
        return len(self.data)

    def __iter__(self) -> Iterator[T]:
        return iter(self.data)

    @overload
    def __getitem__(self, i: int) -> T:
        ...

    @overload
    def __getitem__(self, i: slice) -> DataSequence[T]:
        ...

    def __getitem__(self, i):
        if isinstance(i, slice):
            return DataSequence(self._type, self.data[i])
        return self.data[i]

    def __eq__(self, __o: object) -> bool:
        if isinstance(__o, DataSequence):
            return self.data == __o.data
        return False

    @overload
    def single_or_default(self) -> Optional[T]:
        ...

    @overload
    def single_or_default(self, default: D) -> T | D:
        ...

    def single_or_default(self, default=None):
        """Returns the only element of a sequence, or a default value if the sequence is empty.

        Raises:
            InvalidOperationError: Raises when there is more than one element in the sequence.
        """
        if not self.data:
            return default
        if len(self.data) > 1:
            raise InvalidOperationError("The input sequence contains more than one element.")
        return self.data[0]

    def filter(self, **kwargs) -> DataSequence[T]:
        """Filters rows whose attributes equal all given keyword values."""
        return DataSequence(
            self._type, [x for x in self.data if all(getattr(x, key) == value for key, value in kwargs.items())]
        )

    def first(self) -> T:
        """Returns the first element of a sequence.

        Raises:
            InvalidOperationError: Raises when there is no elements in the sequence.
        """
        if not self.data:
            raise InvalidOperationError("The input sequence is empty.")
        return self.data[0]

    def sum(self, attribute: str) -> float:
        return sum(getattr(x, attribute) for x in self.data)
