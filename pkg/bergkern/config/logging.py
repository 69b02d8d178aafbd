from rich.console import Console
from rich.logging import RichHandler
import logging

_HANDLER_NAME = "bergkern-rich"


def setup_logging(level: str = "WARNING") -> None:
    """Attach a single rich handler on stderr to the package logger."""
    logger = logging.getLogger("bergkern")
    logger.setLevel(level.upper())
    if any(h.get_name() == _HANDLER_NAME for h in logger.handlers):
        return
    handler = RichHandler(
        console=Console(stderr=True),
        show_path=False,
        rich_tracebacks=True,
    )
    handler.set_name(_HANDLER_NAME)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    logger.addHandler(handler)
    logger.propagate = False
