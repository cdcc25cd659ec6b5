"""CSV contracts: strict readers for profile and box-plot inputs."""
import csv

import numpy as np

PROFILE_COLUMNS = ("solver", "alpha", "rho")
BOX_COLUMNS = ("basis_label", "metric", "value")


class CsvFormatError(ValueError):
    """Raised when an input CSV does not match its contract."""


def _data_rows(path, columns):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as err:
        raise CsvFormatError(f"cannot read {path}: {err}")
    if not rows:
        raise CsvFormatError(f"{path}: empty file")
    if rows[0] != list(columns):
        raise CsvFormatError(
            f"{path}: expected header {','.join(columns)}, got {','.join(rows[0])}")
    if len(rows) == 1:
        raise CsvFormatError(f"{path}: no data rows")
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(columns):
            raise CsvFormatError(
                f"{path} row {i}: expected {len(columns)} fields, got {len(row)}")
    return rows[1:]


def _number(path, i, field, text):
    try:
        return float(text)
    except ValueError:
        raise CsvFormatError(f"{path} row {i}: {field} is not a number: {text!r}")


def read_profile(path):
    """Parse a profile CSV into {solver: (alphas, rhos)} in file order.

    Per solver, alpha must be non-decreasing and rho non-decreasing in
    [0, 1]; alpha must be positive so curves survive a log axis.
    """
    pts = {}
    for i, (solver, alpha, rho) in enumerate(_data_rows(path, PROFILE_COLUMNS),
                                             start=2):
        a = _number(path, i, "alpha", alpha)
        r = _number(path, i, "rho", rho)
        if a <= 0.0:
            raise CsvFormatError(f"{path} row {i}: alpha must be positive")
        if not 0.0 <= r <= 1.0:
            raise CsvFormatError(f"{path} row {i}: rho outside [0, 1]")
        pts.setdefault(solver, []).append((a, r))
    curves = {}
    for solver, ar in pts.items():
        alphas = np.array([a for a, _ in ar])
        rhos = np.array([r for _, r in ar])
        if np.any(np.diff(alphas) < 0.0):
            raise CsvFormatError(f"{path}: alpha decreases for solver {solver}")
        if np.any(np.diff(rhos) < 0.0):
            raise CsvFormatError(f"{path}: rho decreases for solver {solver}")
        curves[solver] = (alphas, rhos)
    return curves


def read_box(path):
    """Parse a box CSV into {metric: {label: values}} in file order."""
    groups = {}
    for i, (label, metric, value) in enumerate(_data_rows(path, BOX_COLUMNS),
                                               start=2):
        v = _number(path, i, "value", value)
        groups.setdefault(metric, {}).setdefault(label, []).append(v)
    return groups
