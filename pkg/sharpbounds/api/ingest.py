"""
Build ``ObservedMargins`` from data: a 2x2 table of counts or exposure/outcome
records.

Record files are CSV with a header holding ``E`` and ``D`` columns (any case, extra
columns ignored) and values exactly ``0`` or ``1``. Counts files are JSON objects
with the keys ``d1e1``, ``d0e1``, ``d1e0`` and ``d0e0``. Any row that cannot be
parsed is an error, rows are never silently dropped.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import IO, Dict, Iterable, Iterator, Tuple

from sharpbounds import logger

from .core import ObservedMargins
from .exceptions import EmptyArmError, IngestError, MalformedRowError
from .util import raise_if_bad_type

COUNT_KEYS = ("d1e1", "d0e1", "d1e0", "d0e0")
BINARY_VALUES = {"0": 0, "1": 1}


@dataclass(frozen=True)
class ContingencyCounts:
    n_d1_e1: int
    n_d0_e1: int
    n_d1_e0: int
    n_d0_e0: int

    def __post_init__(self):
        for name in ("n_d1_e1", "n_d0_e1", "n_d1_e0", "n_d0_e0"):
            value = getattr(self, name)
            raise_if_bad_type(value, int, IngestError, f"Invalid count `{name}`")
            if isinstance(value, bool) or value < 0:
                raise IngestError(f"Count `{name}` must be a non-negative integer (got {value!r})")

    @property
    def n_e1(self) -> int:
        return self.n_d1_e1 + self.n_d0_e1

    @property
    def n_e0(self) -> int:
        return self.n_d1_e0 + self.n_d0_e0

    @property
    def total(self) -> int:
        return self.n_e1 + self.n_e0

    def expand(self) -> Iterator[Tuple[int, int]]:
        """
        One ``(e, d)`` record per counted individual.
        """

        for (e, d), count in (
            ((1, 1), self.n_d1_e1),
            ((1, 0), self.n_d0_e1),
            ((0, 1), self.n_d1_e0),
            ((0, 0), self.n_d0_e0),
        ):
            for _ in range(count):
                yield e, d

    def to_dict(self) -> Dict[str, int]:
        return dict(zip(COUNT_KEYS, (self.n_d1_e1, self.n_d0_e1, self.n_d1_e0, self.n_d0_e0)))


def margins_from_counts(c: ContingencyCounts) -> ObservedMargins:
    if c.n_e1 == 0:
        raise EmptyArmError("No observations with E=1")
    if c.n_e0 == 0:
        raise EmptyArmError("No observations with E=0")

    return ObservedMargins(
        p_e1=c.n_e1 / c.total,
        p_d1_e0=c.n_d1_e0 / c.n_e0,
        p_d1_e1=c.n_d1_e1 / c.n_e1,
    )


def counts_from_records(rows: Iterable[Tuple[object, object]]) -> ContingencyCounts:
    """
    Tally ``(e, d)`` rows, values must be 0 or 1 (ints or the strings "0"/"1").
    Row numbers in errors count from 1.
    """

    tally = {(e, d): 0 for e in (0, 1) for d in (0, 1)}

    for row_number, row in enumerate(rows, start=1):
        try:
            if isinstance(row, (str, bytes)):
                # "10" is not an (E, D) pair
                raise TypeError(row)
            e, d = row
        except (TypeError, ValueError):
            raise MalformedRowError(
                f"Row {row_number}: expected an (E, D) pair, got {row!r}",
                row_number=row_number,
            )

        key = (_parse_binary(e, "E", row_number), _parse_binary(d, "D", row_number))
        tally[key] += 1

    return ContingencyCounts(
        n_d1_e1=tally[(1, 1)],
        n_d0_e1=tally[(1, 0)],
        n_d1_e0=tally[(0, 1)],
        n_d0_e0=tally[(0, 0)],
    )


def margins_from_records(rows: Iterable[Tuple[object, object]]) -> ObservedMargins:
    return margins_from_counts(counts_from_records(rows))


def _parse_binary(value, column: str, row_number: int) -> int:
    if isinstance(value, str):
        parsed = BINARY_VALUES.get(value.strip())
    elif isinstance(value, int) and not isinstance(value, bool) and value in (0, 1):
        parsed = value
    else:
        parsed = None

    if parsed is None:
        raise MalformedRowError(
            f"Row {row_number}: {column} must be 0 or 1 (got {value!r})",
            row_number=row_number,
        )
    return parsed


def read_records_csv(file: IO[str]) -> Iterator[Tuple[str, str]]:
    """
    Stream ``(E, D)`` string pairs from a CSV file with a header row.
    """

    reader = csv.reader(file)
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("Records file is empty")

    columns = {name.strip().upper(): index for index, name in enumerate(header)}
    missing = [name for name in ("E", "D") if name not in columns]
    if missing:
        raise IngestError(
            "Records file is missing column(s): {0} (header: {1})".format(
                ", ".join(missing),
                ", ".join(header),
            ),
        )

    e_index, d_index = columns["E"], columns["D"]
    for row_number, row in enumerate(reader, start=1):
        if max(e_index, d_index) >= len(row):
            raise MalformedRowError(
                f"Row {row_number}: expected at least {max(e_index, d_index) + 1} columns, "
                f"got {len(row)}",
                row_number=row_number,
            )
        yield row[e_index], row[d_index]


def read_counts_json(file: IO[str]) -> ContingencyCounts:
    try:
        data = json.load(file)
    except ValueError as e:
        raise IngestError(f"Counts file is not valid JSON: {e}")

    raise_if_bad_type(data, Dict[str, int], IngestError, "Invalid counts file")

    missing = [key for key in COUNT_KEYS if key not in data]
    if missing:
        raise IngestError("Counts file is missing key(s): {0}".format(", ".join(missing)))

    unknown = sorted(set(data) - set(COUNT_KEYS))
    if unknown:
        logger.warning("Ignoring unknown count keys: {0}".format(", ".join(unknown)))

    return ContingencyCounts(
        n_d1_e1=data["d1e1"],
        n_d0_e1=data["d0e1"],
        n_d1_e0=data["d1e0"],
        n_d0_e0=data["d0e0"],
    )


def margins_from_csv(file: IO[str]) -> ObservedMargins:
    return margins_from_records(read_records_csv(file))


def margins_from_counts_json(file: IO[str]) -> ObservedMargins:
    return margins_from_counts(read_counts_json(file))
