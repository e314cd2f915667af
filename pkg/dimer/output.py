"""Result rows as CSV or JSON with a fixed, versioned column schema.
Rows carry no timestamps, so identical runs give identical bytes."""

import csv
import json
import math
import sys

from .protocols import SweepCell

SCHEMA_NAME = "dimer-results"
SCHEMA_VERSION = 1

COLUMNS = (
    "omega_d",
    "epsilon_d",
    "n_Tminus",
    "n_T0",
    "n_S",
    "n_Tplus",
    "fid_S_bare",
    "fid_T0_bare",
    "fid_T0_dressed",
    "n_d",
    "n_D",
    "rate_TmS",
    "rate_STp",
    "hierarchy_ok",
    "error_code",
)


def row(cell):
    return {column: getattr(cell, column) for column in COLUMNS}


def solution_row(sol):
    return row(SweepCell.from_solution(sol))


def _csv_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _json_value(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return float(value) if math.isfinite(value) else None
    return value


def write_csv(rows, handle):
    handle.write("# %s schema=%d\n" % (SCHEMA_NAME, SCHEMA_VERSION))
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow([_csv_value(r[column]) for column in COLUMNS])


def write_json(rows, handle):
    document = {
        "schema": SCHEMA_NAME,
        "version": SCHEMA_VERSION,
        "columns": list(COLUMNS),
        "rows": [[_json_value(r[column]) for column in COLUMNS]
                 for r in rows],
    }
    json.dump(document, handle, allow_nan=False)
    handle.write("\n")


WRITERS = {
    "csv": write_csv,
    "json": write_json,
}


def write_results(rows, fmt="csv", path=None):
    writer = WRITERS[fmt]
    if path is None:
        writer(rows, sys.stdout)
        return

    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer(rows, handle)
