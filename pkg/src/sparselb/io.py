"""Instance ingestion (CSV/JSON) and result persistence.

Matrices and vectors travel as plain numeric CSV (optional single header
row, detected by a non-numeric first row).  Group structures travel as
JSON ``{"d": int, "groups": [[...]], "weights": [...]}`` with 1-based
indices in the external schema; the library is 0-based internally and the
loaders convert.

Reports serialize to JSON with shortest round-trip float formatting plus a
sibling CSV (same stem) holding one row per bound instance.  Every bound
is re-validated at serialization time; a violated certificate aborts the
run instead of writing corrupt output.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import BoundViolationError, ConfigError
from .gso import GroupStructure
from .lower_bound import BoundReport

__all__ = [
    "load_matrix_csv",
    "load_vector_csv",
    "load_group_structure",
    "instance_digest",
    "bound_report_payload",
    "emit_report",
    "validate_document",
]


def _parse_cell(cell: str, row: int, col: int) -> float:
    try:
        return float(cell.strip())
    except ValueError:
        raise ConfigError(
            f"non-numeric cell {cell.strip()!r} at row {row}, column {col}"
        ) from None


def _is_numeric_row(cells: list[str]) -> bool:
    for cell in cells:
        try:
            float(cell.strip())
        except ValueError:
            return False
    return True


def load_matrix_csv(path) -> np.ndarray:
    """Read a rectangular numeric CSV, skipping one header row if present."""
    path = Path(path)
    with path.open(newline="") as fh:
        raw = [row for row in csv.reader(fh) if any(c.strip() for c in row)]
    if not raw:
        raise ConfigError(f"{path}: empty matrix file")
    start = 0
    if not _is_numeric_row(raw[0]):
        start = 1
        if len(raw) == 1:
            raise ConfigError(f"{path}: header row but no data")
    width = len(raw[start])
    rows = []
    for r, cells in enumerate(raw[start:], start=start + 1):
        if len(cells) != width:
            raise ConfigError(
                f"{path}: ragged row at row {r} "
                f"({len(cells)} cells, expected {width})"
            )
        rows.append([_parse_cell(c, r, j + 1) for j, c in enumerate(cells)])
    return np.array(rows, dtype=float)


def load_vector_csv(path) -> np.ndarray:
    """Read a vector stored as a single CSV row or column."""
    mat = load_matrix_csv(path)
    if 1 not in mat.shape:
        raise ConfigError(f"{path}: expected a single row or column vector")
    return mat.reshape(-1)


def load_group_structure(path) -> GroupStructure:
    """Read a group structure from the 1-based JSON schema."""
    path = Path(path)
    with path.open() as fh:
        doc = json.load(fh)
    for field in ("d", "groups"):
        if field not in doc:
            raise ConfigError(f"{path}: missing field {field!r}")
    d = int(doc["d"])
    groups = []
    for gi, group in enumerate(doc["groups"]):
        idx = []
        for v in group:
            j = int(v)
            if not 1 <= j <= d:
                raise ConfigError(
                    f"{path}: groups[{gi}] index {j} outside 1..{d}"
                )
            idx.append(j - 1)
        groups.append(tuple(idx))
    weights = doc.get("weights")
    if weights is None:
        weights = [1.0] * len(groups)
    try:
        return GroupStructure(d, tuple(groups), tuple(float(w) for w in weights))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def instance_digest(*parts) -> str:
    """Stable SHA-256 digest of instance data (arrays, scalars, strings)."""
    h = hashlib.sha256()
    for part in parts:
        if isinstance(part, np.ndarray):
            arr = np.ascontiguousarray(part, dtype=float)
            h.update(str(arr.shape).encode())
            h.update(arr.tobytes())
        else:
            h.update(repr(part).encode())
    return h.hexdigest()


def bound_report_payload(report: BoundReport) -> dict:
    """JSON-ready dict for one certified bound."""
    return {
        "dual_value": float(report.dual_value),
        "exact_value": float(report.exact_value),
        "gap": float(report.gap),
        "certificate_y": [float(v) for v in report.certificate_y],
        "exact_support": report.exact_support.as_one_based(),
        "inner_sup_tolerance": float(report.inner_sup_tolerance),
        "wallclock_s": float(report.wallclock_s),
        "k": int(report.k),
    }


def validate_document(document: dict) -> None:
    """Re-check every certified bound contained in a result document."""
    _validate_bound_payload(document, "report")
    for i, inst in enumerate(document.get("instances", [])):
        _validate_bound_payload(inst, f"instance {i}")


def _validate_bound_payload(payload: dict, where: str) -> None:
    dual = payload.get("dual_value")
    exact = payload.get("exact_value")
    tol = payload.get("inner_sup_tolerance", 0.0)
    if dual is None or exact is None:
        return
    if not dual <= exact + tol:
        raise BoundViolationError(
            f"{where}: dual value {dual} exceeds exact optimum {exact} "
            f"beyond tolerance {tol}"
        )


_CSV_COLUMNS = [
    "index",
    "d",
    "p",
    "k",
    "exact_value",
    "dual_value",
    "gap",
    "inner_sup_tolerance",
    "wallclock_s",
]


def emit_report(document: dict, path) -> Path:
    """Write a result document as JSON (plus a CSV sibling for bound runs).

    Re-validates every contained bound before writing; numbers are
    serialized with Python's shortest round-trip representation.  Returns
    the JSON path.
    """
    path = Path(path)
    validate_document(document)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        json.dump(document, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
    instances = document.get("instances")
    if instances:
        csv_path = path.with_suffix(".csv")
        with csv_path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(_CSV_COLUMNS)
            for i, inst in enumerate(instances):
                writer.writerow([
                    inst.get("index", i),
                    inst.get("d", ""),
                    inst.get("p", ""),
                    inst.get("k", ""),
                    repr(inst.get("exact_value", "")),
                    repr(inst.get("dual_value", "")),
                    repr(inst.get("gap", "")),
                    repr(inst.get("inner_sup_tolerance", "")),
                    repr(inst.get("wallclock_s", "")),
                ])
    return path
