from __future__ import annotations

import json
from enum import Enum
from pathlib import Path
from typing import IO, Optional

import click
import numpy as np

from sharpbounds import logger
from sharpbounds.api.core import ObservedMargins
from sharpbounds.api.ingest import margins_from_counts_json, margins_from_csv
from sharpbounds.api.util import json_float

from .exceptions import CliError


def json_encode(obj):
    # numpy types
    if isinstance(obj, np.integer):
        return int(obj)

    if isinstance(obj, np.floating):
        return json_float(float(obj))

    if isinstance(obj, np.ndarray):
        return [json_encode(value) for value in obj.tolist()]

    # Python types
    if isinstance(obj, Enum):
        return obj.value

    if isinstance(obj, Path):
        return str(obj)

    if isinstance(obj, (set, frozenset)):
        return sorted(list(obj))

    raise TypeError("Cannot serialize: {0} ({1})".format(type(obj), obj))


def _extended_reals(data):
    # json.dumps never hands floats to ``default``, so infinities are swapped here
    if isinstance(data, float):
        return json_float(data)

    if isinstance(data, dict):
        return {key: _extended_reals(value) for key, value in data.items()}

    if isinstance(data, (list, tuple)):
        return [_extended_reals(value) for value in data]

    return data


def jsonify(data, *args, **kwargs):
    kwargs.setdefault("default", json_encode)
    kwargs.setdefault("allow_nan", False)
    return json.dumps(_extended_reals(data), *args, **kwargs)


def load_margins(
    p_e1: Optional[float],
    p_d1_e0: Optional[float],
    p_d1_e1: Optional[float],
    counts: Optional[IO[str]],
    data: Optional[IO[str]],
) -> ObservedMargins:
    """
    Resolve the observed margins from exactly one of the three input styles:
    direct probabilities, a counts JSON file or a records CSV file.
    """

    direct = (p_e1, p_d1_e0, p_d1_e1)
    given_direct = [value is not None for value in direct]

    sources = [
        name
        for name, given in (
            ("--p-e1/--p-d1-e0/--p-d1-e1", any(given_direct)),
            ("--counts", counts is not None),
            ("--data", data is not None),
        )
        if given
    ]

    if not sources:
        raise CliError(
            "No observed margins given: use --p-e1, --p-d1-e0 and --p-d1-e1, "
            "or --counts FILE, or --data FILE",
        )

    if len(sources) > 1:
        raise CliError(
            "Margin sources are mutually exclusive, got: {0}".format(", ".join(sources)),
        )

    if counts is not None:
        logger.info("--> Loading counts from {0}".format(getattr(counts, "name", "<stream>")))
        return margins_from_counts_json(counts)

    if data is not None:
        logger.info("--> Loading records from {0}".format(getattr(data, "name", "<stream>")))
        return margins_from_csv(data)

    if not all(given_direct):
        missing = [
            option
            for option, given in zip(("--p-e1", "--p-d1-e0", "--p-d1-e1"), given_direct)
            if not given
        ]
        raise CliError("Missing margin option(s): {0}".format(", ".join(missing)))

    return ObservedMargins(p_e1=p_e1, p_d1_e0=p_d1_e0, p_d1_e1=p_d1_e1)


def write_output(text: str, out: Optional[str]) -> None:
    if not text.endswith("\n"):
        text = f"{text}\n"

    if out is None:
        click.echo(text, nl=False)
        return

    with open(out, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info("--> Output written to {0}".format(out))
