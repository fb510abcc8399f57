import os
import platform
import sys
from contextlib import contextmanager
from itertools import cycle
from threading import Event, Lock, Thread
from typing import Callable, Iterator

import sharpbounds

IS_WINDOWS = platform.system() == "Windows"
IS_TTY = sys.stdout.isatty() and sys.stderr.isatty()

REFRESH_SECONDS = 1 / 5
SPINNER_FRAMES = ("-", "/", "|", "\\")


class SampleCounter:
    """
    Thread safe tally of finished samples, read by the spinner thread.
    """

    def __init__(self, total: int, label: str):
        self.total = total
        self.label = label
        self.done = 0
        self._lock = Lock()

    def advance(self, n: int) -> None:
        with self._lock:
            if self.done + n > self.total:
                raise ValueError(f"Progress overflow: {self.done} + {n} > {self.total}")
            self.done += n

    def message(self) -> str:
        with self._lock:
            done = self.done
        percent = done * 100 // self.total if self.total else 100
        return f"{self.label} {percent}% ({done}/{self.total} samples)"


def _spin(counter: SampleCounter, stop_event: Event) -> None:
    if not IS_TTY or os.environ.get("SHARPBOUNDS_PROGRESS") == "off":
        return

    frames = cycle(SPINNER_FRAMES)
    while not stop_event.wait(REFRESH_SECONDS):
        sys.stderr.write(f"    {next(frames)} {counter.message()}\r")
        sys.stderr.flush()
        if not IS_WINDOWS:
            # Clear to end of line, flushed by whatever prints next
            sys.stderr.write("\033[K")


@contextmanager
def sample_progress(total: int, label: str = "sampling") -> Iterator[Callable[[int], None]]:
    """
    Yield an ``advance(n)`` callback and, in CLI mode on a terminal, draw a spinner
    with the share of ``total`` samples done on stderr until the block exits.
    """

    counter = SampleCounter(total, label)

    if not sharpbounds.is_cli:
        yield counter.advance
        return

    stop_event = Event()
    spinner = Thread(target=_spin, args=(counter, stop_event), daemon=True)
    spinner.start()

    try:
        yield counter.advance
    finally:
        stop_event.set()
        spinner.join()
