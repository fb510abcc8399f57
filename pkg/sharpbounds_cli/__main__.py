import signal
import sys

import click
import gevent

import sharpbounds

from .main import cli


def _handle_interrupt(signum, frame):
    click.echo("Exiting upon user request!", err=True)
    sys.exit(0)


def execute_sharpbounds():
    # Set CLI mode
    sharpbounds.is_cli = True

    # Force line buffering
    sys.stdout.reconfigure(line_buffering=True)  # type: ignore
    sys.stderr.reconfigure(line_buffering=True)  # type: ignore

    # Kill any sampling greenlets on ctrl+c
    gevent.signal_handler(signal.SIGINT, gevent.kill)
    signal.signal(signal.SIGINT, _handle_interrupt)  # print the message and exit main

    cli(prog_name="sharpbounds")


if __name__ == "__main__":
    execute_sharpbounds()
