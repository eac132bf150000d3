from __future__ import annotations

from typing import Dict, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError
from typing_extensions import Annotated

from blindqc.exceptions import WireProtocolError
from blindqc.models.circuit import CircuitModel
from blindqc.version import PROTOCOL_VERSION


class _Message(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    protocol: str = PROTOCOL_VERSION
    job_id: str = Field(min_length=1)


class SubmitMessage(_Message):
    kind: Literal["submit"] = "submit"
    circuit: CircuitModel
    shots: int = Field(ge=1)
    seed: Optional[int] = Field(default=None, ge=0)


class ResultMessage(_Message):
    kind: Literal["result"] = "result"
    counts: Dict[str, int]


class ErrorMessage(_Message):
    kind: Literal["error"] = "error"
    message: str


WireMessage = Annotated[Union[SubmitMessage, ResultMessage, ErrorMessage], Field(discriminator="kind")]

_ADAPTER: TypeAdapter = TypeAdapter(WireMessage)


def encode(message: Union[SubmitMessage, ResultMessage, ErrorMessage]) -> str:
    """One wire line, without the trailing newline."""
    return message.model_dump_json(exclude_none=True)


def decode(line: Union[str, bytes]) -> Union[SubmitMessage, ResultMessage, ErrorMessage]:
    """Parses one wire line.

    Raises:
        WireProtocolError: line is not a valid message
    """
    try:
        return _ADAPTER.validate_json(line.strip())
    except ValidationError as error:
        raise WireProtocolError(f"Malformed wire message: {error.error_count()} validation error(s)") from error


def result_message(job_id: str, counts: Dict[str, int]) -> ResultMessage:
    return ResultMessage(job_id=job_id, counts=dict(sorted(counts.items())))
