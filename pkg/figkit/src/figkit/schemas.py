"""Strict schema validation for the simulator's published file formats.

Every loader checks the header and every value before anything is
plotted; a mismatch raises SchemaError naming the offending column.
Failing fast beats a plot silently built from misaligned columns.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path


class SchemaError(ValueError):
    """Input file does not match the documented schema."""


# column name -> python type, per CSV schema
TRIALS_COLUMNS = {
    "trial": int,
    "channel_kind": str,
    "gamma_db": float,
    "capacity": float,
    "fro_norm": float,
    "cond": float,
}
HARDENING_COLUMNS = {
    "m_antennas": int,
    "channel_kind": str,
    "case": int,
    "trials": int,
    "capacity_mean": float,
    "capacity_std": float,
}
SER_COLUMNS = {
    "gamma_db": float,
    "channel_kind": str,
    "case": int,
    "detector": str,
    "trials": int,
    "symbol_errors": int,
    "ser": float,
}

FIT_FAMILIES = {"gaussian": 2, "weibull": 2, "skew_normal": 3}


def load_csv(path: str | Path, columns: dict) -> list[dict]:
    """Rows of a delimited file, typed and validated against `columns`."""
    path = Path(path)
    name = path.name
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in columns:
            if col not in header:
                raise SchemaError(f"{name}: missing column '{col}'")
        extra = set(header) - set(columns)
        if extra:
            raise SchemaError(f"{name}: unexpected column '{sorted(extra)[0]}'")
        rows = []
        for i, raw in enumerate(reader, start=2):
            row = {}
            for col, typ in columns.items():
                value = raw[col]
                if value is None:
                    raise SchemaError(f"{name}: row {i}: missing value in column '{col}'")
                try:
                    row[col] = typ(value)
                except ValueError:
                    raise SchemaError(
                        f"{name}: row {i}: column '{col}': cannot parse {value!r} as {typ.__name__}"
                    ) from None
            rows.append(row)
    if not rows:
        raise SchemaError(f"{name}: no data rows")
    return rows


def _check_fit_record(name: str, i: int, rec: dict) -> None:
    for key in ("scenario_id", "gamma_db", "family"):
        if key not in rec:
            raise SchemaError(f"{name}: record {i}: missing field '{key}'")
    family = rec["family"]
    if family not in FIT_FAMILIES:
        raise SchemaError(f"{name}: record {i}: unknown family '{family}'")
    if "error" in rec:
        return
    theta = rec.get("theta")
    if not isinstance(theta, list) or len(theta) != FIT_FAMILIES[family]:
        raise SchemaError(
            f"{name}: record {i}: field 'theta' must hold {FIT_FAMILIES[family]} "
            f"parameters for family '{family}'"
        )


def load_fits(path: str | Path) -> list[dict]:
    """Records of a fits.json file, keeping only successful fits."""
    path = Path(path)
    records = _load_json_list(path)
    for i, rec in enumerate(records):
        _check_fit_record(path.name, i, rec)
    good = [r for r in records if "error" not in r]
    if not good:
        raise SchemaError(f"{path.name}: no successful fit records")
    return good


def load_regression(path: str | Path) -> list[dict]:
    path = Path(path)
    records = _load_json_list(path)
    for i, rec in enumerate(records):
        for key in ("scenario_id", "family", "param_index", "a", "c", "theta_err"):
            if key not in rec:
                raise SchemaError(f"{path.name}: record {i}: missing field '{key}'")
    return records


def load_channel_dump(path: str | Path):
    """(header dict, complex matrix) from a dump-channel export."""
    path = Path(path)
    name = path.name
    with open(path) as fh:
        first = fh.readline()
        try:
            header = json.loads(first)
        except json.JSONDecodeError:
            raise SchemaError(f"{name}: first line is not a JSON header") from None
        for key in ("m_antennas", "n_streams", "kind", "trial", "d_perp"):
            if key not in header:
                raise SchemaError(f"{name}: header: missing field '{key}'")
        m, n = int(header["m_antennas"]), int(header["n_streams"])
        rows = []
        for i, rec in enumerate(csv.reader(fh), start=2):
            if len(rec) != 2 * n:
                raise SchemaError(
                    f"{name}: row {i}: expected {2 * n} interleaved re/im values, got {len(rec)}"
                )
            try:
                vals = [float(v) for v in rec]
            except ValueError:
                raise SchemaError(f"{name}: row {i}: non-numeric matrix entry") from None
            rows.append(vals)
    if len(rows) != m:
        raise SchemaError(f"{name}: expected {m} matrix rows, got {len(rows)}")
    import numpy as np

    flat = np.asarray(rows)
    return header, flat[:, 0::2] + 1j * flat[:, 1::2]


def _load_json_list(path: Path) -> list:
    try:
        with open(path) as fh:
            records = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path.name}: invalid JSON: {exc}") from None
    if not isinstance(records, list) or not records:
        raise SchemaError(f"{path.name}: expected a non-empty JSON list")
    return records
