from .logger import create_logger, logger

__all__ = ["create_logger", "logger"]
