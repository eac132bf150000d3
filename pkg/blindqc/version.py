from typing import Final

from packaging._structures import NegativeInfinity  # type: ignore
from packaging.specifiers import SpecifierSet
from packaging.version import InvalidVersion, Version  # type: ignore

PROTOCOL_VERSION: Final[str] = "1.0"
SUPPORTED_PROTOCOLS: Final[SpecifierSet] = SpecifierSet(">=1.0,<2.0")


class NullVersion(Version):
    """Stands in for a protocol version a peer announced but that could not be parsed.

    Orders below every real `Version`, so it never satisfies `SUPPORTED_PROTOCOLS`.
    """

    def __init__(self):
        super().__init__("0")
        self._key = (NegativeInfinity,) * 6

    def __str__(self) -> str:
        return "NullVersion"


def parse_protocol_version(version: str) -> Version:
    """Parse the protocol version announced by a peer.

    >>> parse_protocol_version("1.0")
    <Version('1.0')>
    >>> parse_protocol_version("garbage")
    <Version('NullVersion')>

    Args:
        version (str): The version string to parse.

    Returns:
        Version
    """
    try:
        return Version(version)
    except InvalidVersion:
        return NullVersion()


def is_supported_protocol(version: str) -> bool:
    parsed = parse_protocol_version(version)
    if isinstance(parsed, NullVersion):
        return False
    return parsed in SUPPORTED_PROTOCOLS
