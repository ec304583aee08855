# -*- coding: utf-8 -*-
import logging
import sys
from copy import copy
from datetime import datetime, timezone
from typing import Literal, Optional

import click

from wsclab.config import Config

TRACE_LOG_LEVEL = 5


class ColourizedFormatter(logging.Formatter):
    level_name_colors = {
        TRACE_LOG_LEVEL: lambda level_name: click.style(str(level_name), fg="blue"),
        logging.DEBUG: lambda level_name: click.style(str(level_name), fg="cyan"),
        logging.INFO: lambda level_name: click.style(str(level_name), fg="green"),
        logging.WARNING: lambda level_name: click.style(str(level_name), fg="yellow"),
        logging.ERROR: lambda level_name: click.style(str(level_name), fg="red"),
        logging.CRITICAL: lambda level_name: click.style(str(level_name), fg="bright_red"),
    }

    def __init__(
        self,
        fmt: Optional[str] = None,
        datefmt: Optional[str] = None,
        style: Literal["%", "{", "$"] = "%",
        use_colors: Optional[bool] = None,
    ):
        if use_colors in (True, False):
            self.use_colors = use_colors
        else:
            self.use_colors = sys.stderr.isatty()
        super().__init__(fmt=fmt, datefmt=datefmt, style=style)

    def color_level_name(self, level_name: str, level_no: int) -> str:
        def default(level_name: str) -> str:
            return str(level_name)

        func = self.level_name_colors.get(level_no, default)
        return func(level_name)

    def _dim(self, text: str) -> str:
        if not self.use_colors:
            return text
        return click.style(text, fg=(101, 111, 104))

    def formatMessage(self, record: logging.LogRecord) -> str:
        recordcopy = copy(record)
        levelname = recordcopy.levelname
        separator = " " * (8 - len(recordcopy.levelname))
        if self.use_colors:
            levelname = self.color_level_name(levelname, recordcopy.levelno)
        recordcopy.__dict__["levelprefix"] = levelname + separator
        created = datetime.fromtimestamp(recordcopy.created, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")
        recordcopy.__dict__["asctime"] = self._dim(created)
        recordcopy.__dict__["filename"] = self._dim(f"{recordcopy.module}/{recordcopy.filename}:{recordcopy.lineno}:")
        return super().formatMessage(recordcopy)


class DefaultFormatter(ColourizedFormatter):
    pass


def create_logger(name: str, level: Optional[str] = None) -> logging.Logger:
    logger = logging.getLogger(name)
    if level is None:
        level = Config()("WSC_LOG_LEVEL", default="INFO")
    logger.setLevel(logging.getLevelName(str(level).upper()))
    if not logger.handlers:
        formatter = DefaultFormatter(fmt="%(asctime)s %(levelprefix)s %(filename)s %(message)s")
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(formatter)
        logger.addHandler(handler)
    logger.propagate = False
    return logger


logger = create_logger("wsclab")
