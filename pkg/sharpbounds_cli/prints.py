"""
Render command results as JSON, CSV or markdown.

Every command first builds a plain ``dict`` payload (the documented JSON schema,
see ``docs/output.md``); CSV and markdown are rendered from the same payload so
the three formats never disagree. JSON and CSV carry full precision, markdown
rounds for display.
"""

from __future__ import annotations

import csv
import io
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence

from jinja2 import Environment, StrictUndefined, Template

from sharpbounds.api.contrasts import ContrastInterval, GridTable
from sharpbounds.api.core import (
    FeasibleRegion,
    ObservedMargins,
    ProbabilityInterval,
    SensitivityParams,
)
from sharpbounds.api.montecarlo import BoundSummary, McSummary
from sharpbounds.api.util import format_axis_value, format_value
from sharpbounds.api.witness import (
    SharpnessGap,
    WitnessModel,
    exact_counterfactual,
    implied_extrema,
    implied_margins,
)

from .util import jsonify


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"
    MARKDOWN = "markdown"


# Payloads
#


def _cell_key(e: int, u: int) -> str:
    return f"e{e}_u{u}"


def bounds_payload(
    obs: ObservedMargins,
    region: FeasibleRegion,
    params: SensitivityParams,
    intervals: Sequence[ProbabilityInterval],
    interval: ContrastInterval,
    crude: Optional[float],
) -> dict:
    interval_0, interval_1 = intervals
    return {
        "margins": obs.to_dict(),
        "feasible_region": region.to_dict(),
        "params": params.to_dict(),
        "contrast": interval.contrast.to_dict(),
        "counterfactual": {"p0": interval_0.to_dict(), "p1": interval_1.to_dict()},
        "bounds": {"lower": interval.lower, "upper": interval.upper},
        "crude": crude,
        "null_position": interval.null_position(),
        "share_above_null": interval.share_above_null(),
    }


def grid_payload(obs: ObservedMargins, region: FeasibleRegion, table: GridTable) -> dict:
    return {
        "margins": obs.to_dict(),
        "feasible_region": region.to_dict(),
        "contrast": table.contrast.to_dict(),
        "m_values": table.m_values,
        "M_values": table.big_m_values,
        "cells": [
            [
                None if cell is None else {"lower": cell.lower, "upper": cell.upper}
                for cell in row
            ]
            for row in table.cells
        ],
        "failures": [
            {"row": failure.row, "column": failure.column, "message": failure.message}
            for failure in table.failures
        ],
    }


def witness_payload(
    obs: ObservedMargins,
    params: SensitivityParams,
    w: WitnessModel,
    gap: SharpnessGap,
) -> dict:
    margins = implied_margins(w)
    m, big_m = implied_extrema(w)
    joint = w.joint()

    return {
        "target": w.target.value,
        "margins": obs.to_dict(),
        "params": params.to_dict(),
        "p_e1": w.p_e1,
        "epsilon": w.epsilon,
        "u_given_e": w.u_given_e,
        "cond_table": {
            _cell_key(e, u): w.cond_table[(e, u)] for e, u in sorted(w.cond_table, reverse=True)
        },
        "joint": {f"d{d}_e{e}_u{u}": joint[(d, e, u)] for d, e, u in sorted(joint, reverse=True)},
        "implied_margins": margins.to_dict(),
        "implied_extrema": {"m": m, "M": big_m},
        "exact_counterfactual": {
            "p0": exact_counterfactual(w, 0),
            "p1": exact_counterfactual(w, 1),
        },
        "sharpness_gap": gap._asdict(),
    }


def _bound_summary_payload(summary: BoundSummary) -> dict:
    return {
        "n": summary.n,
        "mean": summary.mean,
        "std": summary.std,
        "quantiles": {f"{level:g}": value for level, value in summary.quantiles.items()},
        "histogram": {
            "edges": summary.histogram_edges,
            "counts": summary.histogram_counts,
        },
        "n_infinite": summary.n_infinite,
    }


def mc_payload(obs: ObservedMargins, region: FeasibleRegion, summary: McSummary) -> dict:
    config = summary.config
    return {
        "margins": obs.to_dict(),
        "feasible_region": region.to_dict(),
        "contrast": config.contrast.to_dict(),
        "n_samples": summary.n_samples,
        "seed": config.seed,
        "n_indeterminate": summary.n_indeterminate,
        "distributions": {"m": config.m_dist.to_dict(), "M": config.big_m_dist.to_dict()},
        "lower": _bound_summary_payload(summary.lower),
        "upper": _bound_summary_payload(summary.upper),
        "exceedance": [
            dict(threshold=threshold, **probabilities)
            for threshold, probabilities in summary.exceedance().items()
        ],
    }


# CSV
#


def _write_csv(rows: Iterable[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    for row in rows:
        writer.writerow([_csv_value(value) for value in row])
    return buffer.getvalue()


def _csv_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def bounds_csv(payload: dict) -> str:
    counterfactual = payload["counterfactual"]
    name = payload["contrast"]["name"]
    crude = payload["crude"]
    return _write_csv(
        [
            ("quantity", "lower", "upper"),
            ("p0", counterfactual["p0"]["lower"], counterfactual["p0"]["upper"]),
            ("p1", counterfactual["p1"]["lower"], counterfactual["p1"]["upper"]),
            (name, payload["bounds"]["lower"], payload["bounds"]["upper"]),
            (f"crude_{name}", crude, crude),
        ],
    )


def grid_csv(payload: dict) -> str:
    rows: List[Sequence[object]] = [["m\\M", *payload["M_values"]]]
    for m, cells in zip(payload["m_values"], payload["cells"]):
        rows.append(
            [
                m,
                *(
                    None
                    if cell is None
                    else "{0},{1}".format(_csv_value(cell["lower"]), _csv_value(cell["upper"]))
                    for cell in cells
                ),
            ],
        )
    return _write_csv(rows)


def _flatten(data: dict, prefix: str = "") -> Iterable[Sequence[object]]:
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _flatten(value, f"{name}.")
        else:
            yield name, value


def witness_csv(payload: dict) -> str:
    return _write_csv([("key", "value"), *_flatten(payload)])


def mc_csv(payload: dict) -> str:
    lower, upper = payload["lower"], payload["upper"]
    rows: List[Sequence[object]] = [
        ("statistic", "lower", "upper"),
        ("n", lower["n"], upper["n"]),
        ("mean", lower["mean"], upper["mean"]),
        ("std", lower["std"], upper["std"]),
    ]
    for level in lower["quantiles"]:
        rows.append((f"q{level}", lower["quantiles"][level], upper["quantiles"][level]))
    rows.append(("n_infinite", lower["n_infinite"], upper["n_infinite"]))
    for row in payload["exceedance"]:
        threshold = _csv_value(row["threshold"])
        rows.append((f"p_leq[{threshold}]", row["p_lower_leq"], row["p_upper_leq"]))
        rows.append((f"p_geq[{threshold}]", row["p_lower_geq"], row["p_upper_geq"]))
    return _write_csv(rows)


def histogram_csv(summary: BoundSummary) -> str:
    return _write_csv(
        [
            ("bin_left_edge", "count"),
            *zip(summary.histogram_edges[:-1], summary.histogram_counts),
        ],
    )


def samples_csv(summary: McSummary) -> str:
    samples = summary.samples
    return _write_csv(
        [
            ("index", "m", "M", "lower", "upper"),
            *(
                (index, float(m), float(big_m), float(lower), float(upper))
                for index, (m, big_m, lower, upper) in enumerate(
                    zip(samples.m, samples.big_m, samples.lower, samples.upper),
                )
            ),
        ],
    )


# Markdown
#

BOUNDS_TEMPLATE = """\
## {{ contrast.name }} bounds

Margins: p(E=1) = {{ margins.p_e1 | value(4) }}, \
p(D=1|E=0) = {{ margins.p_d1_e0 | value(4) }}, \
p(D=1|E=1) = {{ margins.p_d1_e1 | value(4) }}

Sensitivity parameters: m = {{ params.m | axis(4) }}, M = {{ params.M | axis(4) }} \
(feasible: 0 <= m <= {{ feasible_region.m_star | axis(4) }}, \
{{ feasible_region.M_star | axis(4) }} <= M <= 1)

| quantity | lower | upper |
|---|---|---|
| p(D_0=1) | {{ counterfactual.p0.lower | value }} | {{ counterfactual.p0.upper | value }} |
| p(D_1=1) | {{ counterfactual.p1.lower | value }} | {{ counterfactual.p1.upper | value }} |
| {{ contrast.name }} | {{ bounds.lower | value }} | {{ bounds.upper | value }} |

Crude {{ contrast.name }}: {{ crude | value }}. \
The interval lies {{ null_position }} the null ({{ contrast.null | axis }})\
{% if share_above_null is not none %}, \
{{ (share_above_null * 100) | value(0) }}% of it above{% endif %}.
"""

GRID_TEMPLATE = """\
## {{ contrast.name }} bounds over the sensitivity parameters

| m \\ M | {{ M_values | map("axis") | join(" | ") }} |
|---|{{ "---|" * (M_values | length) }}
{% for m in m_values %}
| {{ m | axis }} | {{ cells[loop.index0] | map("cell") | join(" | ") }} |
{% endfor %}
{% if failures %}

Indeterminate cells:

{% for failure in failures %}
- m = {{ m_values[failure.row] | axis }}, M = {{ M_values[failure.column] | axis }}: \
{{ failure.message }}
{% endfor %}
{% endif %}
"""

WITNESS_TEMPLATE = """\
## Witness model ({{ target }}, epsilon = {{ epsilon | sci }})

p(E=1) = {{ p_e1 | value(4) }}, p(U=1|E=1) = p(U=0|E=0) = {{ u_given_e | sci }}

| p(D=1) given | U=1 | U=0 |
|---|---|---|
| E=1 | {{ cond_table.e1_u1 | value(4) }} | {{ cond_table.e1_u0 | value(4) }} |
| E=0 | {{ cond_table.e0_u1 | value(4) }} | {{ cond_table.e0_u0 | value(4) }} |

| quantity | value |
|---|---|
| exact p(D_1=1) | {{ exact_counterfactual.p1 | value(4) }} |
| exact p(D_0=1) | {{ exact_counterfactual.p0 | value(4) }} |
| gap p(D_1=1) | {{ sharpness_gap.gap_p1 | sci }} |
| gap p(D_0=1) | {{ sharpness_gap.gap_p0 | sci }} |
| margin drift | {{ sharpness_gap.margin_drift | sci }} |
"""

MC_TEMPLATE = """\
## Monte Carlo {{ contrast.name }} bounds ({{ n_samples }} samples, seed {{ seed }})

| statistic | lower | upper |
|---|---|---|
| mean | {{ lower.mean | value }} | {{ upper.mean | value }} |
| std | {{ lower.std | value }} | {{ upper.std | value }} |
{% for level in lower.quantiles %}
| q{{ level }} | {{ lower.quantiles[level] | value }} | {{ upper.quantiles[level] | value }} |
{% endfor %}
| infinite | {{ lower.n_infinite }} | {{ upper.n_infinite }} |
{% for row in exceedance %}
| P(bound <= {{ row.threshold | axis(4) }}) | {{ row.p_lower_leq | value(4) }} | \
{{ row.p_upper_leq | value(4) }} |
| P(bound >= {{ row.threshold | axis(4) }}) | {{ row.p_lower_geq | value(4) }} | \
{{ row.p_upper_geq | value(4) }} |
{% endfor %}
{% if n_indeterminate %}

{{ n_indeterminate }} indeterminate samples excluded.
{% endif %}
"""

MARKDOWN_TEMPLATES = {
    "bounds": BOUNDS_TEMPLATE,
    "grid": GRID_TEMPLATE,
    "witness": WITNESS_TEMPLATE,
    "mc": MC_TEMPLATE,
}

TEMPLATES: Dict[str, Template] = {}


def _display(value, decimals: int = 2) -> str:
    if value is None:
        return "n/a"
    return format_value(value, decimals)


def _grid_cell(cell) -> str:
    if cell is None:
        return "n/a"
    return "({0}, {1})".format(format_value(cell["lower"]), format_value(cell["upper"]))


def _scientific(value) -> str:
    return f"{value:.3g}"


def get_template(name: str) -> Template:
    if name in TEMPLATES:
        return TEMPLATES[name]

    environment = Environment(
        undefined=StrictUndefined,
        keep_trailing_newline=True,
        trim_blocks=True,
        lstrip_blocks=True,
    )
    environment.filters["value"] = _display
    environment.filters["axis"] = format_axis_value
    environment.filters["cell"] = _grid_cell
    environment.filters["sci"] = _scientific

    template = environment.from_string(MARKDOWN_TEMPLATES[name])
    TEMPLATES[name] = template
    return template


# Dispatch
#

CSV_RENDERERS = {
    "bounds": bounds_csv,
    "grid": grid_csv,
    "witness": witness_csv,
    "mc": mc_csv,
}


def render(command: str, payload: dict, output_format: OutputFormat) -> str:
    if output_format is OutputFormat.JSON:
        return jsonify(payload, indent=2)

    if output_format is OutputFormat.CSV:
        return CSV_RENDERERS[command](payload)

    return get_template(command).render(**payload)

