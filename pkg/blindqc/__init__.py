import logging
import logging.config
import threading
from functools import lru_cache, wraps
from importlib import metadata
from os import environ
from pathlib import Path
from traceback import FrameSummary, StackSummary, extract_stack
from typing import Callable, Final, FrozenSet, Optional

PACKAGE_DIR: Final[Path] = Path(__file__).parent
LOGGING_CONF: Final[Path] = PACKAGE_DIR / "logging.conf"


def with_worker_header(method: Callable[..., str]) -> Callable[..., str]:
    """
    Prefixes the returned log text with the worker thread and the caller outside blindqc
    """

    @wraps(method)
    def wrapper(*args, **kwargs) -> str:
        text = method(*args, **kwargs)
        header = f"[{threading.current_thread().name}]"
        if frame := caller_frame(extract_stack()):
            header += f" {Path(frame.filename).name}:{frame.lineno} {frame.name}(...)"
        return f"{header}\n{text}"

    return wrapper


def caller_frame(stack: StackSummary) -> Optional[FrameSummary]:
    """Last frame before execution entered blindqc sources, None when blindqc was entered directly."""
    for index, frame in enumerate(stack):
        if is_package_source(frame.filename):
            return stack[index - 1] if index else None
    return None


@lru_cache()
def is_package_source(fname: str) -> bool:
    return Path(fname) in package_sources()


@lru_cache(maxsize=1)
def package_sources() -> FrozenSet[Path]:
    return frozenset(PACKAGE_DIR.glob("**/*.py"))


def configure_logging(path: Path = LOGGING_CONF) -> None:
    logging.config.fileConfig(path, disable_existing_loggers=False)
    logging.getLogger(__name__).debug(f"blindqc {__version__} logging from {path}")


try:
    __version__ = metadata.version(__name__)
except metadata.PackageNotFoundError:
    __version__ = "0.0.0"


if environ.get("BLINDQC_DEVEL") is not None:
    configure_logging()
