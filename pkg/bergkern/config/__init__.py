from bergkern.config.config import Config, config
from bergkern.config.logging import setup_logging

__all__ = ["Config", "config", "setup_logging"]
