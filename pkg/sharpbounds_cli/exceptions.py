import sys
from traceback import format_exception_only, format_tb
from typing import List, Tuple, Type

import click

from sharpbounds import logger
from sharpbounds.api.exceptions import (
    DegenerateSupportError,
    DomainError,
    EpsilonOutOfRangeError,
    IndeterminateError,
    InfeasibleParamsError,
    IngestError,
    SharpBoundsError,
)

# Stable exit codes: 1 for I/O and parse problems, 2 for infeasible inputs
EXIT_INPUT_ERROR = 1
EXIT_DOMAIN_ERROR = 2

DEBUG_LOG_FILENAME = "sharpbounds-debug.log"

# First match wins, so subclasses come before their bases
ERROR_KINDS: Tuple[Tuple[Type[BaseException], str], ...] = (
    (InfeasibleParamsError, "Infeasible sensitivity parameters"),
    (EpsilonOutOfRangeError, "Invalid witness epsilon"),
    (DegenerateSupportError, "Degenerate sampling support"),
    (IndeterminateError, "Indeterminate contrast"),
    (IngestError, "Data error"),
    (SharpBoundsError, "sharpbounds error"),
    (OSError, "Local IO error"),
)


def _log_error(kind: str, message: str) -> None:
    logger.warning(f"--> {click.style(kind, 'red', bold=True)}: {message}")


class WrappedError(click.ClickException):
    """
    A library (or OS) exception surfaced to the user: exit 2 when the inputs are
    infeasible, 1 otherwise.
    """

    def __init__(self, e: Exception):
        self.exception = e
        self.traceback = e.__traceback__
        super().__init__(str(e.args[0]) if e.args else repr(e))
        self.exit_code = EXIT_DOMAIN_ERROR if isinstance(e, DomainError) else EXIT_INPUT_ERROR

    @property
    def kind(self) -> str:
        for exception_type, kind in ERROR_KINDS:
            if isinstance(self.exception, exception_type):
                return kind
        return "unknown error"

    def show(self, file=None):
        _log_error(self.kind, self.message)

        region = getattr(self.exception, "region", None)
        if region is not None:
            logger.warning(f"Feasible region: {region.describe()}")


class CliError(click.ClickException):
    exit_code = EXIT_INPUT_ERROR

    def show(self, file=None):
        _log_error("sharpbounds error", self.message)


class CliUsageError(CliError):
    """
    Click usage errors (bad options, unparsable values) remapped onto the input
    error exit code.
    """

    def __init__(self, e: click.UsageError):
        super().__init__(e.format_message())
        self.usage_error = e

    def show(self, file=None):
        if self.usage_error.ctx is not None:
            click.echo(self.usage_error.ctx.get_usage(), err=True)
        super().show(file)


class UnexpectedInternalError(click.ClickException):
    """
    Anything that is not a known error: the traceback is shown briefly and written
    in full to ``sharpbounds-debug.log``.
    """

    def __init__(self, e: Exception):
        self.exception = e
        self.traceback = sys.exc_info()[2] or e.__traceback__
        super().__init__(str(e))

    def get_traceback_lines(self) -> List[str]:
        return format_tb(self.traceback)

    def get_traceback(self) -> str:
        return "".join(self.get_traceback_lines())

    def get_exception(self) -> str:
        return "".join(format_exception_only(type(self.exception), self.exception))

    def show(self, file=None):
        click.echo(
            "--> {0}:\n".format(click.style("An internal exception occurred", "red", bold=True)),
            err=True,
        )

        lines = self.get_traceback_lines()
        if lines:
            click.echo(lines[-1], err=True, nl=False)
        click.echo(self.get_exception(), err=True)

        with open(DEBUG_LOG_FILENAME, "w", encoding="utf-8") as f:
            f.write(self.get_traceback())
            f.write(self.get_exception())

        logger.debug(self.get_traceback())
        click.echo(
            "--> The full traceback has been written to {0}".format(
                click.style(DEBUG_LOG_FILENAME, bold=True),
            ),
            err=True,
        )
