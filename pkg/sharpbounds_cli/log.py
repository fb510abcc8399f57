import logging
from typing import Dict, Optional

import click

from sharpbounds import logger

HEADER_MARKER = "-->"

# click.style keyword arguments per level, INFO is left plain
LEVEL_STYLES: Dict[int, dict] = {
    logging.DEBUG: {"fg": "green"},
    logging.WARNING: {"fg": "yellow"},
    logging.ERROR: {"fg": "red"},
    logging.CRITICAL: {"fg": "red", "bold": True},
}


class LogHandler(logging.Handler):
    """
    Echo every record to stderr through click so stdout stays machine readable.
    """

    def emit(self, record: logging.LogRecord) -> None:
        try:
            click.echo(self.format(record), err=True)
        except Exception:
            self.handleError(record)


class LogFormatter(logging.Formatter):
    """
    ``-->`` lines are section headers separated by a blank line; everything else
    is indented beneath the current section. Debug lines are tagged with the
    module that logged them.
    """

    def __init__(self):
        super().__init__()
        self.in_section = False

    def format(self, record: logging.LogRecord) -> str:
        message = record.getMessage()

        if record.levelno == logging.DEBUG and record.name.startswith("sharpbounds"):
            message = f"[{record.module}] {message}"

        is_header = HEADER_MARKER in message
        if is_header:
            if self.in_section:
                click.echo(err=True)
        else:
            message = f"    {message}"
        self.in_section = True

        style = LEVEL_STYLES.get(record.levelno)
        if style:
            message = click.style(message, **style)
        return message


def setup_logging(log_level: int, other_log_level: Optional[int] = None) -> None:
    """
    Route the package logger through a single ``LogHandler``; ``other_log_level``
    also switches on the root logger (``--debug-all``).
    """

    if other_log_level:
        logging.basicConfig(level=other_log_level)

    for handler in [h for h in logger.handlers if isinstance(h, LogHandler)]:
        logger.removeHandler(handler)

    handler = LogHandler()
    handler.setFormatter(LogFormatter())
    logger.addHandler(handler)
    logger.setLevel(log_level)
    logger.propagate = False
